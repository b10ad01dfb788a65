"""Spectra, Dynkin weights and the elementary geometry of Horn's problem.

Weight-derived spectra are kept as exact :class:`fractions.Fraction` values;
sampled spectra are plain floats.  Nothing in here holds global state, every
tolerance is an explicit argument.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, DominanceError, SumMismatch, TraceError

TRACE_RTOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Weakly decreasing eigenvalue vector."""

    values: tuple
    traceless: bool = False

    def __post_init__(self):
        vals = self.values
        for a, b in zip(vals, vals[1:]):
            if a < b:
                raise ValueError(f"spectrum not weakly decreasing: {vals}")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def scaled(self, s) -> "Spectrum":
        if s < 0:
            raise ValueError("negative scale reverses the ordering")
        return Spectrum(tuple(s * v for v in self.values), self.traceless)

    def differences(self) -> tuple:
        return tuple(a - b for a, b in zip(self.values, self.values[1:]))

    def to_json(self) -> list:
        return [float(v) if not isinstance(v, int) else v for v in self.values]


@dataclass(frozen=True)
class DynkinWeight:
    """Dynkin labels of an su(n) weight; ``len(labels) == n - 1``."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels) + 1

    @property
    def dominant(self) -> bool:
        return all(x >= 0 for x in self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def __add__(self, other: "DynkinWeight") -> "DynkinWeight":
        if other.rank != self.rank:
            raise DimensionMismatch("weights of different rank")
        return DynkinWeight(tuple(a + b for a, b in zip(self.labels, other.labels)))

    def scaled(self, s: int) -> "DynkinWeight":
        return DynkinWeight(tuple(s * x for x in self.labels))

    def partition(self) -> tuple:
        """GL(n) partition with ``n`` parts, last part zero."""
        parts = []
        acc = 0
        for lab in reversed(self.labels):
            acc += lab
            parts.append(acc)
        return tuple(reversed(parts)) + (0,)

    @classmethod
    def from_partition(cls, parts: Sequence[int], n: int | None = None) -> "DynkinWeight":
        parts = list(parts)
        if n is not None:
            parts = parts + [0] * (n - len(parts))
        return cls(tuple(a - b for a, b in zip(parts, parts[1:])))

    @classmethod
    def zero(cls, n: int) -> "DynkinWeight":
        return cls((0,) * (n - 1))

    @classmethod
    def fundamental(cls, n: int, k: int) -> "DynkinWeight":
        """The fundamental weight omega_k (1-based)."""
        labels = [0] * (n - 1)
        labels[k - 1] = 1
        return cls(tuple(labels))


@dataclass(frozen=True)
class GroupClass:
    """One of the three self-adjoint classes, tagged by half the Dyson index."""

    theta: Fraction
    name: str

    def __post_init__(self):
        theta = Fraction(self.theta)
        if theta not in (Fraction(1, 2), Fraction(1), Fraction(2)):
            raise ValueError(f"theta must be 1/2, 1 or 2, got {self.theta}")
        object.__setattr__(self, "theta", theta)


SO = GroupClass(Fraction(1, 2), "SO")
SU = GroupClass(Fraction(1), "SU")
USP = GroupClass(Fraction(2), "USp")

_GROUPS = {"so": SO, "su": SU, "usp": USP, "sp": USP}


def group_class(name_or_theta) -> GroupClass:
    """Look a group class up by name ("so", "su", "usp") or by theta."""
    if isinstance(name_or_theta, GroupClass):
        return name_or_theta
    if isinstance(name_or_theta, str):
        key = name_or_theta.strip().lower()
        if key in _GROUPS:
            return _GROUPS[key]
        name_or_theta = Fraction(key)
    theta = Fraction(name_or_theta)
    for g in (SO, SU, USP):
        if g.theta == theta:
            return g
    raise ValueError(f"unknown group class {name_or_theta!r}")


@dataclass(frozen=True)
class HyperplaneTriple:
    """A candidate wall ``sum_K gamma = sum_I alpha + sum_J beta`` (1-based indices)."""

    I: tuple
    J: tuple
    K: tuple
    constant: float

    def residual(self, gamma) -> float:
        return sum(float(gamma[k - 1]) for k in self.K) - float(self.constant)

    def distance(self, gamma) -> float:
        """Euclidean distance of ``gamma`` to the wall inside its trace hyperplane.

        Walls with ``|K| = n`` are not hyperplanes of the trace hyperplane and
        report ``inf``.
        """
        n = len(gamma)
        k = len(self.K)
        if k == n:
            return math.inf
        norm = math.sqrt(k * (1 - k / n) ** 2 + (n - k) * (k / n) ** 2)
        return abs(self.residual(gamma)) / norm


def _sorted_desc(values: Iterable) -> tuple:
    return tuple(sorted(values, reverse=True))


def make_spectrum(values: Sequence, traceless: bool = False) -> Spectrum:
    """Sorted copy of ``values``; verifies the trace when ``traceless`` is set."""
    vals = list(values)
    if not vals:
        raise ValueError("empty spectrum")
    vals = _sorted_desc(vals)
    if traceless:
        total = sum(vals)
        if all(isinstance(v, Rational) for v in vals):
            ok = total == 0
        else:
            scale = max(1.0, max(abs(float(v)) for v in vals))
            ok = abs(float(total)) <= TRACE_RTOL * scale
        if not ok:
            raise TraceError(f"trace {total} is not zero")
    return Spectrum(vals, traceless)


def weight_to_spectrum(w: DynkinWeight) -> Spectrum:
    """Traceless exact spectrum whose consecutive differences are the labels."""
    parts = [Fraction(x) for x in w.partition()]
    mean = sum(parts) / len(parts)
    return Spectrum(tuple(p - mean for p in parts), traceless=True)


def spectrum_to_weight(s: Spectrum) -> DynkinWeight:
    diffs = s.differences()
    if any(Fraction(d).denominator != 1 for d in diffs):
        raise ValueError("spectrum differences are not integers")
    return DynkinWeight(tuple(int(d) for d in diffs))


def rho(n: int) -> DynkinWeight:
    """Weyl vector of su(n): all Dynkin labels equal to one."""
    return DynkinWeight((1,) * (n - 1))


def rho_shift(w: DynkinWeight, direction: int = 1) -> DynkinWeight:
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    labels = tuple(x + direction for x in w.labels)
    if any(x < 0 for x in labels):
        raise DominanceError(f"{w.labels} shifted by {direction:+d} rho is not dominant")
    return DynkinWeight(labels)


def vandermonde(s) -> object:
    """prod_{i<j} (s_i - s_j); exact when the entries are rationals."""
    vals = list(s)
    out = 1
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            out *= vals[i] - vals[j]
    return out


def _check_same_n(*spectra):
    ns = {len(s) for s in spectra}
    if len(ns) != 1:
        raise DimensionMismatch(f"spectra of different sizes {sorted(ns)}")
    return ns.pop()


def weyl_check(alpha, beta, gamma, tol: float = 0.0) -> list:
    """Pairs (i, j), 1-based, for which gamma_{i+j-1} > alpha_i + beta_j + tol."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    n = _check_same_n(alpha, beta, gamma)
    bad = []
    for i in range(1, n + 1):
        for j in range(1, n + 2 - i):
            if gamma[i + j - 2] > alpha[i - 1] + beta[j - 1] + tol:
                bad.append((i, j))
    return bad


def weyl_box(alpha, beta) -> list:
    """Per-coordinate [lo, hi] bounds on gamma from Weyl's inequalities and their duals."""
    n = _check_same_n(alpha, beta)
    out = []
    for k in range(1, n + 1):
        hi = min(alpha[i - 1] + beta[k - i] for i in range(1, k + 1))
        lo = max(alpha[i - 1] + beta[n + k - i - 1] for i in range(k, n + 1))
        out.append((lo, hi))
    return out


def singular_hyperplanes(alpha, beta, max_card: int) -> list:
    """Candidate non-analyticity walls, deduplicated on (K, constant)."""
    n = _check_same_n(alpha, beta)
    if not 1 <= max_card <= n:
        raise ValueError(f"max_card must lie in [1, {n}]")
    seen = set()
    out = []
    idx = range(1, n + 1)
    for card in range(1, max_card + 1):
        subsets = list(itertools.combinations(idx, card))
        for K in subsets:
            for I in subsets:
                a = sum(alpha[i - 1] for i in I)
                for J in subsets:
                    c = a + sum(beta[j - 1] for j in J)
                    key = (K, round(float(c), 12))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(HyperplaneTriple(I, J, K, c))
    return out


def nearest_wall(gamma, walls) -> tuple:
    """(distance, wall) of the wall closest to ``gamma``."""
    best = (math.inf, None)
    for w in walls:
        d = w.distance(gamma)
        if d < best[0]:
            best = (d, w)
    return best


def permutahedron_contains(alpha, xi, tol: float = 1e-12) -> bool:
    """Is ``xi`` in the convex hull of the permutations of ``alpha``?

    Uses majorization: at equal sums, membership is equivalent to partial-sum
    dominance of the decreasingly sorted vectors.
    """
    _check_same_n(alpha, xi)
    a = sorted((float(v) for v in alpha), reverse=True)
    x = sorted((float(v) for v in xi), reverse=True)
    if abs(sum(a) - sum(x)) > tol * max(1.0, max(map(abs, a))):
        raise SumMismatch(f"sums differ: {sum(a)} vs {sum(x)}")
    sa = sx = 0.0
    for ai, xi_ in zip(a[:-1], x[:-1]):
        sa += ai
        sx += xi_
        if sx > sa + tol:
            return False
    return True
