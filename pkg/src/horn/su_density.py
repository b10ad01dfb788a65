"""Exact Horn density for SU(n), n = 2, 3, 4.

J(alpha, beta; gamma) is a signed sum over pairs of permutations of a
fixed piecewise polynomial in the partial sums

    A_j(P, P') = sum_{k<=j} (alpha_P(k) + beta_P'(k) - gamma_k),

tabulated once per n in :mod:`horn.dirichlet`.  Rational inputs give exact
:class:`~fractions.Fraction` results; float inputs use a vectorised path.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .dirichlet import dirichlet_table, sign_forms
from .errors import DegenerateSpectrum, DimensionMismatch, TraceError
from .spectra import vandermonde, weyl_box

SUPPORTED_N = (2, 3, 4)
WALL_TOL = 1e-12

# Partial sums of the tie-breaking direction d used on walls; any choice
# with L(D) != 0 for every sign form works.
_TIE_DIRECTION = (Fraction(1), Fraction(-17, 29), Fraction(5, 41))


@dataclass(frozen=True)
class JResult:
    value: object
    on_wall: bool = False

    def __float__(self):
        return float(self.value)


def _perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


@lru_cache(maxsize=None)
def _prepared(n: int):
    """Integer form matrix, per-term data and the permutation list for n."""
    if n not in SUPPORTED_N:
        raise ValueError(f"n must be one of {SUPPORTED_N}")
    m = n - 1
    forms = sign_forms(n)
    index = {f: i for i, f in enumerate(forms)}
    # clear denominators of the forms; remember the scale for each
    scales = []
    int_forms = []
    for f in forms:
        den = math.lcm(*(c.denominator for c in f))
        int_forms.append(tuple(int(c * den) for c in f))
        scales.append(den)
    terms = []
    for t in dirichlet_table(n):
        coef = t.coefficient
        for f, r in zip(t.arguments, t.exponents):
            coef /= Fraction(scales[index[f]]) ** (r - 1)
        terms.append((coef, tuple(index[f] for f in t.arguments), tuple(r - 1 for r in t.exponents)))
    tie = [sum(c * d for c, d in zip(f, _TIE_DIRECTION[:m])) for f in int_forms]
    # gamma -> gamma + eps d moves every A_j by -eps D_j
    tie_sign = tuple(-1 if v > 0 else 1 for v in tie)
    assert all(v != 0 for v in tie)
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(n))]
    return int_forms, terms, tie_sign, perms


def _validate(alpha, beta, gamma, n):
    vals = [tuple(s) for s in (alpha, beta, gamma)]
    if n is None:
        n = len(vals[0])
    if any(len(v) != n for v in vals):
        raise DimensionMismatch("alpha, beta, gamma must all have n entries")
    if n not in SUPPORTED_N:
        raise ValueError(f"n must be one of {SUPPORTED_N}")
    return vals, n


def _all_rational(*seqs) -> bool:
    return all(isinstance(v, Rational) for s in seqs for v in s)


def _exact_j(alpha, beta, gamma, n) -> JResult:
    forms, terms, tie_sign, perms = _prepared(n)
    a = [Fraction(v) for v in alpha]
    b = [Fraction(v) for v in beta]
    g = [Fraction(v) for v in gamma]
    if sum(a) + sum(b) != sum(g):
        raise TraceError("trace(gamma) must equal trace(alpha) + trace(beta)")
    # integer arithmetic after clearing denominators; J is homogeneous
    scale = math.lcm(*(v.denominator for v in a + b + g))
    ai = [int(v * scale) for v in a]
    bi = [int(v * scale) for v in b]
    gi = [int(v * scale) for v in g]
    gpart = list(itertools.accumulate(gi))
    plus = Fraction(0)
    minus = Fraction(0)
    on_wall = False
    for p, sp in perms:
        apart = list(itertools.accumulate(ai[i] for i in p))
        for q, sq in perms:
            bpart = list(itertools.accumulate(bi[i] for i in q))
            A = [apart[j] + bpart[j] - gpart[j] for j in range(n - 1)]
            L = [sum(c * x for c, x in zip(f, A)) for f in forms]
            sg_p = []
            sg_m = []
            for v, ts in zip(L, tie_sign):
                if v:
                    s = 1 if v > 0 else -1
                    sg_p.append(s)
                    sg_m.append(s)
                else:
                    on_wall = True
                    sg_p.append(ts)
                    sg_m.append(-ts)
            sign = sp * sq
            for coef, idx, pw in terms:
                mono = 1
                sprod_p = sign
                sprod_m = sign
                for k, e in zip(idx, pw):
                    mono *= L[k] ** e
                    sprod_p *= sg_p[k]
                    sprod_m *= sg_m[k]
                if mono:
                    plus += coef * sprod_p * mono
                    minus += coef * sprod_m * mono
    deg = (n - 1) * (n - 2) // 2
    value = (plus + minus) / 2 / Fraction(scale) ** deg
    return JResult(value, on_wall)


def _float_j(alpha, beta, gamma, n, wall_tol=WALL_TOL):
    """Vectorised J; ``gamma`` has shape (..., n).  Returns (values, on_wall mask)."""
    forms, terms, tie_sign, perms = _prepared(n)
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    g = np.asarray(gamma, dtype=float)
    shape = g.shape[:-1]
    g = g.reshape(-1, n)
    F = np.array(forms, dtype=float)  # (nforms, m)
    coefs = [float(c) for c, _, _ in terms]
    scale = max(np.abs(a).max(), np.abs(b).max(), 1.0)
    gpart = np.cumsum(g, axis=1)[:, : n - 1]
    total = np.zeros(len(g))
    wall = np.zeros(len(g), dtype=bool)
    ties = np.array(tie_sign, dtype=float)
    for p, sp in perms:
        apart = np.cumsum(a[list(p)])[: n - 1]
        for q, sq in perms:
            bpart = np.cumsum(b[list(q)])[: n - 1]
            A = apart + bpart - gpart  # (N, m)
            L = A @ F.T  # (N, nforms)
            s = np.sign(L)
            tie = np.abs(L) < wall_tol * scale
            if tie.any():
                wall |= tie.any(axis=1)
                L = np.where(tie, 0.0, L)
                s_p = np.where(tie, ties, s)
                s_m = np.where(tie, -ties, s)
            else:
                s_p = s_m = s
            acc = np.zeros(len(g))
            for c, (_, idx, pw) in zip(coefs, terms):
                mono = np.full(len(g), c)
                sgp = np.ones(len(g))
                sgm = np.ones(len(g))
                for k, e in zip(idx, pw):
                    if e:
                        mono = mono * L[:, k] ** e
                    sgp = sgp * s_p[:, k]
                    sgm = sgm * s_m[:, k]
                acc += mono * 0.5 * (sgp + sgm)
            total += sp * sq * acc
    return total.reshape(shape), wall.reshape(shape)


def j_evaluate(alpha, beta, gamma, n: int | None = None) -> JResult:
    """J(alpha, beta; gamma) together with the on-wall flag.

    On a wall (some sign argument vanishes) the value is the mean of the
    two one-sided limits along a fixed generic traceless direction and
    ``on_wall`` is set.
    """
    (a, b, g), n = _validate(alpha, beta, gamma, n)
    if _all_rational(a, b, g):
        return _exact_j(a, b, g, n)
    if abs(sum(map(float, a)) + sum(map(float, b)) - sum(map(float, g))) > 1e-9 * max(
        1.0, max(abs(float(v)) for v in a + b + g)
    ):
        raise TraceError("trace(gamma) must equal trace(alpha) + trace(beta)")
    val, wall = _float_j(a, b, np.array([g], dtype=float), n)
    return JResult(float(val[0]), bool(wall[0]))


def j_function(alpha, beta, gamma, n: int | None = None):
    """Value of J; exact Fraction for rational input, float otherwise."""
    return j_evaluate(alpha, beta, gamma, n).value


def _prefactor(n: int) -> Fraction:
    # n! times the unordered-spectrum constant prod p! / n!
    return Fraction(math.prod(math.factorial(p) for p in range(1, n)))


def _check_nondegenerate(s, name):
    vals = list(s)
    if any(vals[i] == vals[j] for i in range(len(vals)) for j in range(i + 1, len(vals))):
        raise DegenerateSpectrum(f"{name} has repeated eigenvalues")


def pdf_su(alpha, beta, gamma):
    """Density of the sorted spectrum of A + B at gamma.

    Measured against d gamma_1 ... d gamma_{n-1} on the trace hyperplane and
    normalised over the Weyl chamber, so it is n! times the symmetric
    density of the unordered eigenvalues.  Zero off the chamber.
    """
    (a, b, g), n = _validate(alpha, beta, gamma, None)
    _check_nondegenerate(a, "alpha")
    _check_nondegenerate(b, "beta")
    if any(g[i] < g[i + 1] for i in range(n - 1)):
        return 0.0
    j = j_function(a, b, g, n)
    if _all_rational(a, b, g):
        return _prefactor(n) * vandermonde(g) / (vandermonde(a) * vandermonde(b)) * j
    out = float(_prefactor(n)) * float(vandermonde(g)) / float(vandermonde(a) * vandermonde(b)) * j
    return max(out, 0.0) if out > -1e-9 else out


def pdf_su_many(alpha, beta, gammas) -> np.ndarray:
    """pdf_su on an array of spectra of shape (N, n); zero off the Weyl chamber."""
    g = np.asarray(gammas, dtype=float)
    n = g.shape[-1]
    _check_nondegenerate(alpha, "alpha")
    _check_nondegenerate(beta, "beta")
    j, _ = _float_j(alpha, beta, g, n)
    dg = np.ones(g.shape[:-1])
    for i in range(n):
        for k in range(i + 1, n):
            dg = dg * (g[..., i] - g[..., k])
    pref = float(_prefactor(n)) / float(vandermonde([float(x) for x in alpha]) * vandermonde([float(x) for x in beta]))
    out = pref * dg * j
    chamber = np.all(np.diff(g, axis=-1) <= 0, axis=-1)
    out = np.where(chamber, out, 0.0)
    return np.where(np.abs(out) < 1e-9, np.maximum(out, 0.0), out)


@dataclass
class DensityGrid:
    gamma1: np.ndarray
    gamma2: np.ndarray
    values: np.ndarray  # shape (len(gamma1), len(gamma2))
    alpha: tuple
    beta: tuple
    n: int = 3
    resolution: int = field(default=0)

    @property
    def spacing(self):
        return self.gamma1[1] - self.gamma1[0], self.gamma2[1] - self.gamma2[0]

    def total_mass(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.gamma2, axis=1), self.gamma1))

    def write_csv(self, path, sidecar: bool = True):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma1", "gamma2", "pdf"])
            for i, x in enumerate(self.gamma1):
                for j, y in enumerate(self.gamma2):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(self.values[i, j]))])
        if sidecar:
            meta = {
                "alpha": [float(v) for v in self.alpha],
                "beta": [float(v) for v in self.beta],
                "n": self.n,
                "resolution": self.resolution,
                "gamma1_range": [float(self.gamma1[0]), float(self.gamma1[-1])],
                "gamma2_range": [float(self.gamma2[0]), float(self.gamma2[-1])],
            }
            with open(str(path) + ".json", "w") as fh:
                json.dump(meta, fh, indent=2)


def grid_bounds(alpha, beta, pad: float = 0.05):
    """Weyl-inequality box for (gamma1, gamma2), padded by ``pad`` of its width."""
    box = weyl_box([float(v) for v in alpha], [float(v) for v in beta])
    out = []
    for lo, hi in box[:2]:
        w = hi - lo
        out.append((lo - pad * w, hi + pad * w))
    return out


def density_grid(alpha, beta, resolution: int, threads: int = 1) -> DensityGrid:
    """pdf_su on a resolution x resolution grid for n = 3."""
    alpha = tuple(float(v) for v in alpha)
    beta = tuple(float(v) for v in beta)
    if len(alpha) != 3 or len(beta) != 3:
        raise ValueError("density_grid is two-dimensional: n must be 3")
    if not 2 <= resolution <= 2000:
        raise ValueError("resolution must lie in [2, 2000]")
    (x0, x1), (y0, y1) = grid_bounds(alpha, beta)
    gx = np.linspace(x0, x1, resolution)
    gy = np.linspace(y0, y1, resolution)
    trace = sum(alpha) + sum(beta)

    def rows(sl):
        X, Y = np.meshgrid(gx[sl], gy, indexing="ij")
        G = np.stack([X, Y, trace - X - Y], axis=-1)
        return pdf_su_many(alpha, beta, G)

    blocks = [slice(i, min(i + 64, resolution)) for i in range(0, resolution, 64)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(rows, blocks))
    else:
        parts = [rows(s) for s in blocks]
    return DensityGrid(gx, gy, np.concatenate(parts, axis=0), alpha, beta, 3, resolution)


def cell_averaged_pdf(alpha, beta, edges1, edges2, sub: int = 4) -> np.ndarray:
    """Mean of pdf_su over each cell of a (gamma1, gamma2) grid, by a sub x sub midpoint rule."""
    e1 = np.asarray(edges1, dtype=float)
    e2 = np.asarray(edges2, dtype=float)
    off = (np.arange(sub) + 0.5) / sub
    x = (e1[:-1, None] + np.diff(e1)[:, None] * off[None, :]).ravel()
    y = (e2[:-1, None] + np.diff(e2)[:, None] * off[None, :]).ravel()
    trace = float(sum(map(float, alpha)) + sum(map(float, beta)))
    X, Y = np.meshgrid(x, y, indexing="ij")
    G = np.stack([X, Y, trace - X - Y], axis=-1)
    vals = pdf_su_many(alpha, beta, G)
    n1, n2 = len(e1) - 1, len(e2) - 1
    return vals.reshape(n1, sub, n2, sub).mean(axis=(1, 3))
