"""Haar-orbit Monte Carlo for Horn's and Schur's problems.

Samples are produced in fixed-size chunks.  Chunk ``k`` draws from its own
generator seeded by ``SeedSequence(seed, spawn_key=(k,))`` so the output does
not depend on how chunks are scheduled across threads.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import EigenFailure
from .spectra import GroupClass, Spectrum, group_class, make_spectrum

CHUNK_SIZE = 2 ** 14
KRAMERS_TOL = 1e-8


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def default_threads() -> int:
    env = os.environ.get("HORN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- Haar sampling -----------------------------------------------------------


def _haar_orthogonal(n: int, rng: np.random.Generator, m: int) -> np.ndarray:
    z = rng.standard_normal((m, n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    q = q * d[:, None, :]
    # O(n) -> SO(n): flipping one column maps the det=-1 coset onto SO(n)
    neg = np.linalg.det(q) < 0
    q[neg, :, 0] *= -1.0
    return q


def _haar_unitary(n: int, rng: np.random.Generator, m: int) -> np.ndarray:
    z = (rng.standard_normal((m, n, n)) + 1j * rng.standard_normal((m, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    ph = d / np.abs(d)
    q = q * ph[:, None, :]
    det = np.linalg.det(q)
    q = q * np.exp(-1j * np.angle(det) / n)[:, None, None]
    return q


def _quaternion_partner(v: np.ndarray, n: int) -> np.ndarray:
    """(a; b) -> (-conj(b); conj(a)), the second column of a quaternionic pair."""
    return np.concatenate([-np.conj(v[:, n:]), np.conj(v[:, :n])], axis=1)


def _haar_symplectic(n: int, rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar USp(n) as 2n x 2n complex unitaries [[A, B], [-conj(B), conj(A)]].

    Quaternionic Gram-Schmidt on Gaussian vectors: the span of each pair
    (v, partner(v)) is closed under the quaternionic structure, so
    orthogonalising against both columns of every previous pair keeps the
    frame symplectic.  Left-invariance of the Gaussian law makes it Haar.
    """
    dim = 2 * n
    cols = np.empty((m, dim, dim), dtype=complex)
    for k in range(n):
        w = (rng.standard_normal((m, dim)) + 1j * rng.standard_normal((m, dim))) / np.sqrt(2.0)
        for _ in range(2):  # second pass restores orthogonality to machine precision
            for i in range(k):
                for c in (cols[:, :, i], cols[:, :, n + i]):
                    w = w - c * np.einsum("mi,mi->m", np.conj(c), w)[:, None]
        w = w / np.linalg.norm(w, axis=1)[:, None]
        cols[:, :, k] = w
        cols[:, :, n + k] = _quaternion_partner(w, n)
    return cols


def haar_batch(group, n: int, rng: np.random.Generator, m: int) -> np.ndarray:
    """``m`` independent Haar matrices stacked along axis 0."""
    g = group_class(group)
    if n < 2:
        raise ValueError("n must be at least 2")
    if g.name == "SO":
        return _haar_orthogonal(n, rng, m)
    if g.name == "SU":
        return _haar_unitary(n, rng, m)
    return _haar_symplectic(n, rng, m)


def haar_matrix(group, n: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed element of SO(n), SU(n) or USp(n) (2n x 2n complex)."""
    return haar_batch(group, n, rng, 1)[0]


def symplectic_form(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


# -- Horn / Schur sampling ---------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    group: GroupClass
    n: int
    alpha: Spectrum
    beta: Spectrum
    samples: int
    seed: int
    t: float = 1.0
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self):
        object.__setattr__(self, "group", group_class(self.group))
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if len(self.alpha) != self.n or len(self.beta) != self.n:
            raise ValueError("alpha and beta must both have n entries")

    def chunks(self) -> list:
        """(index, size) of every chunk."""
        full, rest = divmod(self.samples, self.chunk_size)
        out = [(k, self.chunk_size) for k in range(full)]
        if rest:
            out.append((full, rest))
        return out

    def echo(self) -> dict:
        return {
            "group": self.group.name,
            "theta": str(self.group.theta),
            "n": self.n,
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "samples": self.samples,
            "seed": self.seed,
            "t": self.t,
            "chunk_size": self.chunk_size,
        }


def _embed(values: np.ndarray, g: GroupClass) -> np.ndarray:
    if g.name == "USp":
        return np.concatenate([values, values])
    return values


def _eigvalsh(c: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(c)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenFailure(str(exc)) from exc


def kramers_reduce(ev: np.ndarray, tol: float = KRAMERS_TOL) -> np.ndarray:
    """Collapse ascending 2n eigenvalues into n Kramers pairs."""
    m, dim = ev.shape
    pairs = ev.reshape(m, dim // 2, 2)
    gap = np.abs(pairs[:, :, 1] - pairs[:, :, 0])
    scale = np.maximum(1.0, np.abs(ev).max(axis=1))
    if np.any(gap.max(axis=1) > tol * scale):
        raise EigenFailure(f"Kramers pairs split by {gap.max():.3e}")
    return pairs.mean(axis=2)


def horn_chunk(cfg: SamplerConfig, chunk: int, size: int) -> np.ndarray:
    """Decreasing spectra of ``t V diag(alpha) V^-1 + diag(beta)``, shape (size, n)."""
    g = cfg.group
    rng = chunk_rng(cfg.seed, chunk)
    v = haar_batch(g, cfg.n, rng, size)
    a = _embed(cfg.alpha.as_array(), g)
    b = _embed(cfg.beta.as_array(), g)
    c = cfg.t * (v * a[None, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    c = c + np.diag(b)[None, :, :]
    if np.iscomplexobj(c):
        c = 0.5 * (c + np.conj(np.swapaxes(c, 1, 2)))
    else:
        c = 0.5 * (c + np.swapaxes(c, 1, 2))
    ev = _eigvalsh(c)
    if g.name == "USp":
        ev = kramers_reduce(ev)
    return ev[:, ::-1].copy()


def _run_chunks(func, chunks, threads):
    threads = threads or default_threads()
    if threads <= 1 or len(chunks) <= 1:
        return [func(k, s) for k, s in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ks: func(*ks), chunks))


def horn_chunks(cfg: SamplerConfig) -> Iterator[np.ndarray]:
    for k, size in cfg.chunks():
        yield horn_chunk(cfg, k, size)


def sample_horn_array(cfg: SamplerConfig, threads: int | None = None) -> np.ndarray:
    parts = _run_chunks(lambda k, s: horn_chunk(cfg, k, s), cfg.chunks(), threads)
    return np.concatenate(parts, axis=0)


def sample_horn(cfg: SamplerConfig) -> Iterator[Spectrum]:
    """Stream of sampled spectra, one :class:`Spectrum` per draw."""
    for block in horn_chunks(cfg):
        for row in block:
            yield Spectrum(tuple(float(x) for x in row))


def schur_chunk(group, n: int, alpha: Spectrum, seed: int, chunk: int, size: int) -> np.ndarray:
    g = group_class(group)
    rng = chunk_rng(seed, chunk)
    v = haar_batch(g, n, rng, size)
    a = _embed(alpha.as_array(), g)
    diag = np.einsum("mij,j,mij->mi", v, a, np.conj(v)).real
    return diag[:, :n].copy()


def sample_schur_array(group, n: int, alpha: Spectrum, samples: int, seed: int,
                       threads: int | None = None, chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    full, rest = divmod(samples, chunk_size)
    chunks = [(k, chunk_size) for k in range(full)] + ([(full, rest)] if rest else [])
    parts = _run_chunks(lambda k, s: schur_chunk(group, n, alpha, seed, k, s), chunks, threads)
    return np.concatenate(parts, axis=0)


def sample_schur(group, n: int, alpha: Spectrum, samples: int, seed: int) -> Iterator[tuple]:
    """Stream of diagonals of ``V diag(alpha) V^-1`` (unsorted)."""
    full, rest = divmod(samples, CHUNK_SIZE)
    chunks = [(k, CHUNK_SIZE) for k in range(full)] + ([(full, rest)] if rest else [])
    for k, size in chunks:
        for row in schur_chunk(group, n, alpha, seed, k, size):
            yield tuple(float(x) for x in row)


# -- histograms --------------------------------------------------------------


@dataclass
class Histogram2D:
    bounds: tuple
    bins: tuple
    counts: np.ndarray = field(default=None)
    total: int = 0
    overflow: int = 0

    def __post_init__(self):
        b1, b2 = self.bins
        if b1 < 1 or b2 < 1:
            raise ValueError("need at least one bin per axis")
        self.bounds = tuple(float(x) for x in self.bounds)
        if self.counts is None:
            self.counts = np.zeros((b1, b2), dtype=np.int64)

    def add(self, points: np.ndarray) -> "Histogram2D":
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            return self
        pts = pts.reshape(-1, pts.shape[-1])
        x1, x2 = pts[:, 0], pts[:, 1]
        lo1, hi1, lo2, hi2 = self.bounds
        b1, b2 = self.bins
        i = np.floor((x1 - lo1) / (hi1 - lo1) * b1).astype(np.int64)
        j = np.floor((x2 - lo2) / (hi2 - lo2) * b2).astype(np.int64)
        i[x1 == hi1] = b1 - 1
        j[x2 == hi2] = b2 - 1
        ok = (i >= 0) & (i < b1) & (j >= 0) & (j < b2)
        flat = np.bincount(i[ok] * b2 + j[ok], minlength=b1 * b2)
        self.counts += flat.reshape(b1, b2)
        self.total += len(pts)
        self.overflow += int((~ok).sum())
        return self

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        if self.bounds != other.bounds or tuple(self.bins) != tuple(other.bins):
            raise ValueError("cannot merge histograms on different grids")
        return Histogram2D(self.bounds, self.bins, self.counts + other.counts,
                           self.total + other.total, self.overflow + other.overflow)

    def centers(self) -> tuple:
        lo1, hi1, lo2, hi2 = self.bounds
        b1, b2 = self.bins
        c1 = lo1 + (np.arange(b1) + 0.5) * (hi1 - lo1) / b1
        c2 = lo2 + (np.arange(b2) + 0.5) * (hi2 - lo2) / b2
        return c1, c2

    def edges(self) -> tuple:
        lo1, hi1, lo2, hi2 = self.bounds
        b1, b2 = self.bins
        return np.linspace(lo1, hi1, b1 + 1), np.linspace(lo2, hi2, b2 + 1)

    def probabilities(self) -> np.ndarray:
        return self.counts / max(self.total, 1)

    def write_csv(self, path, sidecar: dict | None = None) -> None:
        c1, c2 = self.centers()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma1_center", "gamma2_center", "count"])
            for a in range(self.bins[0]):
                for b in range(self.bins[1]):
                    w.writerow([repr(float(c1[a])), repr(float(c2[b])), int(self.counts[a, b])])
        meta = {"bounds": list(self.bounds), "bins": list(self.bins),
                "total": int(self.total), "overflow": int(self.overflow)}
        if sidecar:
            meta.update(sidecar)
        with open(str(path) + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def accumulate_histogram(stream: Iterable, bounds, bins) -> Histogram2D:
    """Bin the first two coordinates of every item of ``stream``.

    Items may be single spectra/sequences or 2D arrays of points.
    """
    h = Histogram2D(tuple(bounds), tuple(bins))
    for item in stream:
        arr = np.asarray(tuple(item) if isinstance(item, Spectrum) else item, dtype=float)
        h.add(arr.reshape(-1, arr.shape[-1]) if arr.ndim else arr.reshape(1, -1))
    return h


def horn_histogram(cfg: SamplerConfig, bounds, bins, threads: int | None = None) -> Histogram2D:
    """Chunk-parallel histogram; partial histograms merged in chunk order."""
    def one(k, s):
        return Histogram2D(tuple(bounds), tuple(bins)).add(horn_chunk(cfg, k, s))

    parts = _run_chunks(one, cfg.chunks(), threads)
    out = Histogram2D(tuple(bounds), tuple(bins))
    for p in parts:
        out = out.merge(p)
    return out


def spectrum_arg(values, traceless=False) -> Spectrum:
    """Convenience for callers passing plain lists."""
    if isinstance(values, Spectrum):
        return values
    return make_spectrum(values, traceless)
