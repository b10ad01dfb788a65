"""Stretching (quasi-)polynomials P(s) = N_{s lambda, s mu}^{s nu} and volumes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from ..errors import PeriodUndetermined
from ..spectra import DynkinWeight
from .hive import boundary, gl_partitions, hive_program, lr_coefficient, rhombi

MAX_PERIOD = 3


@dataclass(frozen=True)
class QuasiPolynomial:
    """sum_l a_l(s) s^l with a_l depending on s mod ``period``."""

    degree: int
    period: int
    coefficients: tuple  # coefficients[r] = (a_0, ..., a_d) for s = r mod period

    def __call__(self, s: int) -> Fraction:
        coefs = self.coefficients[s % self.period]
        return sum(c * Fraction(s) ** k for k, c in enumerate(coefs))

    @property
    def is_polynomial(self) -> bool:
        return self.period == 1

    @property
    def leading(self) -> Fraction:
        leads = {c[self.degree] for c in self.coefficients}
        if len(leads) != 1:
            raise ValueError("leading coefficient is periodic")
        return leads.pop()


def _weights(*ws):
    return [w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in ws]


def _inequality_system(lam, mu, nu):
    """Rows (G, h) with G x <= h over the interior hive entries."""
    n = lam.n
    parts = gl_partitions(lam, mu, nu)
    if parts is None:
        raise ValueError("|lambda| + |mu| - |nu| is not a non-negative multiple of n")
    h = boundary(n, *parts)
    order = hive_program(n).order
    pos = {v: i for i, v in enumerate(order)}
    G = []
    rhs = []
    for obt, acu in rhombi(n):
        row = np.zeros(len(order))
        const = 0
        for v, c in [(obt[0], 1), (obt[1], 1), (acu[0], -1), (acu[1], -1)]:
            if v in pos:
                row[pos[v]] += c
            else:
                const += c * h[v]
        # row . x + const >= 0  <=>  -row . x <= const
        G.append(-row)
        rhs.append(const)
    return np.array(G), np.array(rhs, dtype=float)


def polytope_dimension(lam, mu, nu, tol: float = 1e-9) -> int:
    """Affine dimension of the real hive polytope.

    A rhombus inequality is an implicit equality when its slack cannot be
    made positive anywhere on the polytope; d is the number of interior
    entries minus the rank of those equalities.
    """
    lam, mu, nu = _weights(lam, mu, nu)
    G, h = _inequality_system(lam, mu, nu)
    k = G.shape[1]
    if k == 0:
        return 0
    tight = []
    for i in range(len(G)):
        res = linprog(G[i], A_ub=G, b_ub=h, bounds=[(None, None)] * k, method="highs")
        if res.status == 2:
            raise ValueError("empty hive polytope")
        if res.status != 0:
            raise RuntimeError(f"linprog failed: {res.message}")
        # max slack of row i = h_i - min(G_i x)
        if h[i] - res.fun <= tol:
            tight.append(G[i])
    rank = int(np.linalg.matrix_rank(np.array(tight))) if tight else 0
    return k - rank


def stretch_counts(lam, mu, nu, s_max: int) -> list:
    lam, mu, nu = _weights(lam, mu, nu)
    return [lr_coefficient(lam.scaled(s), mu.scaled(s), nu.scaled(s)) for s in range(1, s_max + 1)]


def _interpolate(points) -> tuple:
    """Exact monomial coefficients of the polynomial through ``points``."""
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    m = len(xs)
    # Newton divided differences
    coef = list(ys)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * m
    basis = [Fraction(1)]
    for j in range(m):
        for k, b in enumerate(basis):
            poly[k] += coef[j] * b
        # basis *= (x - xs[j])
        nxt = [Fraction(0)] * (len(basis) + 1)
        for k, b in enumerate(basis):
            nxt[k + 1] += b
            nxt[k] -= xs[j] * b
        basis = nxt
    return tuple(poly)


def _fit(counts: dict, d: int, period: int):
    coefs = []
    for r in range(period):
        pts = sorted((s, c) for s, c in counts.items() if s % period == r)
        if len(pts) < d + 2:
            return None
        poly = _interpolate(pts[: d + 1])
        for s, c in pts[d + 1:]:
            if sum(a * Fraction(s) ** k for k, a in enumerate(poly)) != c:
                return None
        coefs.append(poly)
    return QuasiPolynomial(d, period, tuple(coefs))


def stretch_quasipolynomial(lam, mu, nu, s_max: int | None = None) -> QuasiPolynomial:
    """Fit P(s) = N_{s lambda, s mu}^{s nu} from exact counts.

    An honest degree-d polynomial is tried first (fit on s = 1..d+1,
    checked on the rest); then periods 2 and 3.
    """
    lam, mu, nu = _weights(lam, mu, nu)
    if lr_coefficient(lam, mu, nu) < 1:
        raise ValueError("N must be at least 1")
    d = polytope_dimension(lam, mu, nu)
    if s_max is None:
        s_max = 2 * d + 2
    if s_max < 2 * d + 2:
        raise ValueError(f"s_max must be at least 2d + 2 = {2 * d + 2}")
    counts = dict(zip(range(1, s_max + 1), stretch_counts(lam, mu, nu, s_max)))
    for period in range(1, MAX_PERIOD + 1):
        need = period * (d + 2) + period
        for s in range(len(counts) + 1, need + 1):
            counts[s] = lr_coefficient(lam.scaled(s), mu.scaled(s), nu.scaled(s))
        q = _fit(counts, d, period)
        if q is not None:
            return q
    raise PeriodUndetermined(f"no quasi-polynomial of period <= {MAX_PERIOD} fits")


def polytope_volume(lam, mu, nu) -> Fraction:
    """Leading stretching coefficient a_d: the relative volume of the hive polytope.

    A rigid triple (d = 0) is a point of volume 1.
    """
    q = stretch_quasipolynomial(lam, mu, nu)
    return q.leading
