"""SO(2) closed forms and the exact SO(3) density at alpha = beta = (1, 0, -1).

For SO(3) the symmetric functions p = sum_{i<j} gamma_i gamma_j and
q = -gamma_1 gamma_2 gamma_3 of C = diag(alpha) + R diag(beta) R^T are
quadratic in c = cos(theta) once R is written in z-y-z Euler angles.  Their
resultant in c reduces to a polynomial R(u, z) in u = cos^2(phi) and
z = cos^2(psi), and

    rho(p, q) = 2/pi^2 int_0^1 dz sum_{u_i in [0,1], R(u_i,z)=0} (2 + u_i + z) / |R_u(u_i, z)|

is the density of (p, q); the density of (gamma_1, gamma_2) is
|Delta(gamma)| rho(p, q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NoRealTriple, ReductionFailure

# -- a small sparse polynomial type over the rationals -------------------------

# variable slots: cos/sin of phi, cos/sin of psi, cos/sin of theta, p, q
CF, SF, CP, SP, C, ST, PV, QV = range(8)
NVARS = 8
_SINE_OF = {SF: CF, SP: CP, ST: C}


class Poly:
    """Sparse polynomial: {exponent tuple: Fraction}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, c):
        return cls({(0,) * NVARS: Fraction(c)})

    @classmethod
    def var(cls, i):
        e = [0] * NVARS
        e[i] = 1
        return cls({tuple(e): Fraction(1)})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return Poly(out).reduce_trig()

    __rmul__ = __mul__

    def reduce_trig(self):
        """Rewrite sin^2 = 1 - cos^2 until every sine exponent is 0 or 1."""
        out = {}
        stack = list(self.terms.items())
        while stack:
            k, v = stack.pop()
            for s, c in _SINE_OF.items():
                if k[s] >= 2:
                    k1 = list(k)
                    k1[s] -= 2
                    k2 = list(k1)
                    k2[c] += 2
                    stack.append((tuple(k1), v))
                    stack.append((tuple(k2), -v))
                    break
            else:
                out[k] = out.get(k, 0) + v
        return Poly(out)

    def degree(self, i) -> int:
        return max((k[i] for k in self.terms), default=0)

    def coefficient(self, i, d):
        """Coefficient of var_i^d, as a polynomial in the others."""
        out = {}
        for k, v in self.terms.items():
            if k[i] == d:
                k2 = list(k)
                k2[i] = 0
                out[tuple(k2)] = v
        return Poly(out)

    def evaluate(self, values):
        tot = 0
        for k, v in self.terms.items():
            t = v
            for x, e in zip(values, k):
                if e:
                    t = t * x ** e
            tot += t
        return tot

    def substitute(self, i, value):
        out = {}
        for k, v in self.terms.items():
            k2 = list(k)
            e = k2[i]
            k2[i] = 0
            out[tuple(k2)] = out.get(tuple(k2), 0) + v * value ** e
        return Poly(out)


def _lift(x):
    return x if isinstance(x, Poly) else Poly.const(x)


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(3)), Poly()) for j in range(3)] for i in range(3)]


def _transpose(a):
    return [[a[j][i] for j in range(3)] for i in range(3)]


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def euler_rotation():
    """R_z(phi) R_y(theta) R_z(psi) with symbolic trig entries."""
    one, zero = Poly.const(1), Poly()
    cf, sf, cp, sp = Poly.var(CF), Poly.var(SF), Poly.var(CP), Poly.var(SP)
    c, st = Poly.var(C), Poly.var(ST)
    rz_phi = [[cf, -sf, zero], [sf, cf, zero], [zero, zero, one]]
    ry = [[c, zero, st], [zero, one, zero], [-st, zero, c]]
    rz_psi = [[cp, -sp, zero], [sp, cp, zero], [zero, zero, one]]
    return _matmul(_matmul(rz_phi, ry), rz_psi)


def _rational_spectrum(s):
    vals = tuple(Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10 ** 12) for v in s)
    if len(vals) != 3:
        raise ValueError("SO(3) machinery needs n = 3")
    if sum(vals) != 0:
        raise ValueError("spectrum must be traceless")
    return vals


@dataclass(frozen=True)
class CharPolyPair:
    """P_p(c) and Q_q(c) as {power of c: Poly in the other variables}.

    When p and q are given numerically they have been substituted; the
    symbolic variables PV, QV then no longer appear.
    """

    alpha: tuple
    beta: tuple
    p: object
    q: object
    Pp: dict
    Qq: dict

    def evaluate(self, phi, theta, psi):
        vals = [math.cos(phi), math.sin(phi), math.cos(psi), math.sin(psi), math.cos(theta), math.sin(theta),
                float(self.p) if self.p is not None else 0.0, float(self.q) if self.q is not None else 0.0]
        c = vals[C]
        pp = sum(float(v.evaluate(vals)) * c ** k for k, v in self.Pp.items())
        qq = sum(float(v.evaluate(vals)) * c ** k for k, v in self.Qq.items())
        return pp, qq


@lru_cache(maxsize=32)
def _symbolic_pair(alpha: tuple, beta: tuple):
    r = euler_rotation()
    db = [[Poly.const(beta[i]) if i == j else Poly() for j in range(3)] for i in range(3)]
    m = _matmul(_matmul(r, db), _transpose(r))
    for i in range(3):
        m[i][i] = m[i][i] + alpha[i]
    tr2 = sum((m[i][k] * m[k][i] for i in range(3) for k in range(3)), Poly())
    P = tr2 * Fraction(-1, 2) - Poly.var(PV)
    Q = -_det3(m) - Poly.var(QV)
    out = []
    for poly in (P, Q):
        if any(k[ST] for k in poly.terms):
            raise ReductionFailure("sin(theta) survives in the characteristic coefficients")
        if poly.degree(C) > 2:
            raise ReductionFailure("characteristic coefficient is not quadratic in cos(theta)")
        out.append({d: poly.coefficient(C, d) for d in range(3)})
    return tuple(out)


def char_poly_pair(alpha, beta, p=None, q=None) -> CharPolyPair:
    """Quadratics in cos(theta) whose joint zeros give spectrum (p, q).

    P_p = -tr(C^2)/2 - p and Q_q = -det(C) - q, i.e. the coefficients of
    det(z - C) = z^3 + P z + Q shifted by the target values.
    """
    a = _rational_spectrum(alpha)
    b = _rational_spectrum(beta)
    Ps, Qs = _symbolic_pair(a, b)
    if p is not None:
        Ps = {d: v.substitute(PV, _num(p)) for d, v in Ps.items()}
    if q is not None:
        Qs = {d: v.substitute(QV, _num(q)) for d, v in Qs.items()}
    return CharPolyPair(a, b, p, q, Ps, Qs)


def _num(x):
    return Fraction(x) if not isinstance(x, float) else x


# -- resultant in c and its (u, z) form -----------------------------------------


@dataclass(frozen=True)
class BivariatePoly:
    """sum coefficients[(i, j)] u^i z^j; zero coefficients are never stored."""

    coefficients: tuple  # sorted ((i, j), value) pairs
    deg_u: int
    deg_z: int

    @classmethod
    def from_dict(cls, d, deg_u=None, deg_z=None):
        d = {k: v for k, v in d.items() if v != 0}
        du = max((i for i, _ in d), default=0)
        dz = max((j for _, j in d), default=0)
        if deg_u is not None and du > deg_u or deg_z is not None and dz > deg_z:
            raise ValueError("degree exceeds the declared bound")
        return cls(tuple(sorted(d.items())), du if deg_u is None else deg_u, dz if deg_z is None else deg_z)

    def as_dict(self) -> dict:
        return dict(self.coefficients)

    def __call__(self, u, z):
        return sum(v * u ** i * z ** j for (i, j), v in self.coefficients)

    def du(self) -> "BivariatePoly":
        return BivariatePoly.from_dict({(i - 1, j): i * v for (i, j), v in self.coefficients if i})

    def dz(self) -> "BivariatePoly":
        return BivariatePoly.from_dict({(i, j - 1): j * v for (i, j), v in self.coefficients if j})

    def swapped(self) -> "BivariatePoly":
        return BivariatePoly.from_dict({(j, i): v for (i, j), v in self.coefficients}, self.deg_z, self.deg_u)

    def array(self) -> np.ndarray:
        """K[i, j] = coefficient of u^i z^j as floats."""
        k = np.zeros((self.deg_u + 1, self.deg_z + 1))
        for (i, j), v in self.coefficients:
            k[i, j] = float(v)
        return k


def _resultant_quadratics(a, b):
    a0, a1, a2 = a.get(0, Poly()), a.get(1, Poly()), a.get(2, Poly())
    b0, b1, b2 = b.get(0, Poly()), b.get(1, Poly()), b.get(2, Poly())
    # Sylvester determinant of two quadratics
    return (a2 * b0 - a0 * b2) * (a2 * b0 - a0 * b2) - (a2 * b1 - a1 * b2) * (a1 * b0 - a0 * b1)


def _to_uzpq(poly: Poly) -> dict:
    out = {}
    for k, v in poly.terms.items():
        if k[SF] or k[SP] or k[ST] or k[C]:
            raise ReductionFailure(f"monomial {k} is not a function of cos^2 only")
        if k[CF] % 2 or k[CP] % 2:
            raise ReductionFailure(f"odd power of cos in monomial {k}")
        key = (k[CF] // 2, k[CP] // 2, k[PV], k[QV])
        out[key] = out.get(key, 0) + v
    return {k: v for k, v in out.items() if v != 0}


@lru_cache(maxsize=32)
def resultant_family(alpha: tuple, beta: tuple) -> dict:
    """Exact R as {(deg_u, deg_z, deg_p, deg_q): Fraction}."""
    Ps, Qs = _symbolic_pair(_rational_spectrum(alpha), _rational_spectrum(beta))
    return _to_uzpq(_resultant_quadratics(Ps, Qs))


def resultant_R(pair: CharPolyPair) -> BivariatePoly:
    """Resultant in cos(theta) of the pair, as a polynomial in u = cos^2 phi, z = cos^2 psi.

    Requires numeric p and q on the pair.  Raises ReductionFailure if an odd
    trigonometric monomial survives the reduction.
    """
    if pair.p is None or pair.q is None:
        raise ValueError("resultant_R needs numeric p and q")
    res = _to_uzpq(_resultant_quadratics(pair.Pp, pair.Qq))
    out = {}
    for (i, j, _, _), v in res.items():
        out[(i, j)] = out.get((i, j), 0) + v
    return BivariatePoly.from_dict(out)


def resultant_at(alpha, beta, p, q) -> BivariatePoly:
    """Specialise the cached symbolic resultant at (p, q); cheaper than resultant_R."""
    fam = resultant_family(_rational_spectrum(alpha), _rational_spectrum(beta))
    p, q = _num(p), _num(q)
    out = {}
    for (i, j, kp, kq), v in fam.items():
        out[(i, j)] = out.get((i, j), 0) + v * p ** kp * q ** kq
    return BivariatePoly.from_dict(out)


# -- (p, q) <-> gamma ----------------------------------------------------------


def gamma_to_pq(gamma):
    g = [float(x) if isinstance(x, float) else x for x in gamma]
    if len(g) != 3:
        raise ValueError("gamma must have three entries")
    if abs(sum(g)) > 1e-9 * max(1.0, max(abs(float(x)) for x in g)):
        raise ValueError("gamma must be traceless")
    p = g[0] * g[1] + g[1] * g[2] + g[2] * g[0]
    q = -g[0] * g[1] * g[2]
    return p, q


def pq_to_gamma(p, q) -> tuple:
    """Sorted real roots of z^3 + p z + q (trigonometric form)."""
    p = float(p)
    q = float(q)
    disc = -4 * p ** 3 - 27 * q ** 2
    scale = max(1.0, abs(p) ** 3, q ** 2)
    if disc < -1e-12 * scale:
        raise NoRealTriple(f"z^3 + {p} z + {q} has complex roots")
    if p >= 0:
        # only the triple root 0 survives the discriminant test
        return (0.0, 0.0, 0.0)
    m = 2.0 * math.sqrt(-p / 3.0)
    if p * m == 0.0:
        # underflow: every root is below ~1e-150
        return (0.0, 0.0, 0.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    th = math.acos(arg) / 3.0
    roots = sorted((m * math.cos(th - 2 * math.pi * k / 3) for k in range(3)), reverse=True)
    # one Newton step per root; near a double root f' ~ 0 and the step is
    # noise, so it is kept only when small and actually reducing |f|
    out = []
    for r in roots:
        d = 3 * r * r + p
        f = r ** 3 + p * r + q
        if d:
            t = r - f / d
            if abs(t - r) <= 1e-6 * max(1.0, abs(r)) and abs(t ** 3 + p * t + q) < abs(f):
                r = t
        out.append(r)
    return tuple(sorted(out, reverse=True))


# -- the reference integral ------------------------------------------------------

REFERENCE_ALPHA = (Fraction(1), Fraction(0), Fraction(-1))
ROOT_IMAG_TOL = 1e-7
ENDPOINT_TOL = 1e-10
MAX_LEVEL = 9
NODE_CUTOFF = 1e-13
DIVERGENT_SLOPE = -0.9
LD = np.longdouble
PAIR_TOL = 1e-4
CHEBYSHEV_NODES = (64, 128, 256, 512, 1024)
DEGENERATE_FRACTION = 0.05
SCAN_INSET = 1e-9
MIN_SLOPE_WIDTH = 1e-6
EVENT_WINDOW = 1e-3
SECTIONS = 32


@dataclass(frozen=True)
class RhoResult:
    value: float
    singular: bool = False
    levels: int = 0


def _coeff_matrix(p, q) -> np.ndarray:
    """K[i, j]: coefficient of u^i z^j of R at (p, q) for the reference case.

    Extended precision: near the special points the coefficients of R(., z)
    cancel heavily and double precision loses the small roots.
    """
    fam = resultant_family(REFERENCE_ALPHA, REFERENCE_ALPHA)
    p, q = LD(p), LD(q)
    k = np.zeros((5, 5), dtype=LD)
    for (i, j, kp, kq), v in fam.items():
        k[i, j] += LD(v.numerator) / LD(v.denominator) * p ** kp * q ** kq
    return k


def _u_coeffs(K, z):
    """a[..., i] = sum_j K[i, j] z^j for an array of z."""
    z = np.asarray(z, dtype=LD)
    zp = z[..., None] ** np.arange(K.shape[1])
    return zp @ K.T


def _horner(c, x):
    out = np.zeros_like(x) + c[..., -1:]
    for k in range(c.shape[-1] - 2, -1, -1):
        out = out * x + c[..., k:k + 1]
    return out


def _roots_and_slopes(a):
    """Real roots of sum_i a[..., i] u^i and |dR/du| there, as (n, 4) arrays.

    Roots come from the companion matrix; nearly double ones (real or a
    conjugate pair) are resolved by _refine_close_pairs.  Other slopes are
    |a_4 prod_j (r_i - r_j)|.  ``keep`` marks real roots in [0, 1];
    ``unresolved`` flags rows with a double root at working precision.
    """
    n = a.shape[0]
    af = a.astype(float)
    lead = af[:, 4]
    scale = np.abs(af).max(axis=1)
    regular = np.abs(lead) > 1e-14 * np.maximum(scale, 1e-300)
    roots = np.zeros((n, 4), dtype=LD)
    slopes = np.ones((n, 4), dtype=LD)
    keep = np.zeros((n, 4), dtype=bool)
    if regular.any():
        comp = np.zeros((int(regular.sum()), 4, 4))
        comp[:, 0, :] = -af[regular, 3::-1] / lead[regular, None]
        comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
        r = np.linalg.eigvals(comp)
        diff = r[:, :, None] - r[:, None, :]
        diff[:, np.arange(4), np.arange(4)] = 1.0
        roots[regular] = r.real
        slopes[regular] = np.abs(lead[regular, None] * diff.prod(axis=2))
        # near-real conjugate pairs are settled by _refine_close_pairs
        keep[regular] = np.abs(r.imag) < PAIR_TOL
    for row in np.flatnonzero(~regular):
        coeffs = np.trim_zeros(af[row, ::-1], "f")
        r = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
        real = np.abs(r.imag) <= ROOT_IMAG_TOL * np.maximum(1.0, np.abs(r))
        d = np.polynomial.polynomial.polyder(af[row])
        m = len(r)
        roots[row, :m] = r.real
        slopes[row, :m] = np.abs(np.polynomial.polynomial.polyval(r.real, d))
        keep[row, :m] = real
    # polish in extended precision; steps are capped so a root never jumps
    d1 = a[:, 1:] * np.arange(1, 5, dtype=LD)
    for _ in range(2):
        fv, dv = _horner(a, roots), _horner(d1, roots)
        step = np.where(dv != 0, fv / np.where(dv == 0, 1, dv), 0)
        roots = np.where(keep & (np.abs(step) < 1e-6), roots - step, roots)
    unresolved = np.zeros(n, dtype=bool)
    _refine_close_pairs(a, roots, slopes, keep, unresolved)
    keep &= (roots >= -ENDPOINT_TOL) & (roots <= 1 + ENDPOINT_TOL)
    return np.clip(roots, 0, 1), slopes, keep, unresolved


def _refine_close_pairs(a, roots, slopes, keep, unresolved):
    """Recompute nearly coalesced real root pairs from the local quadratic.

    Whether such a pair is real at all is decided here, by the sign of
    R R_uu at the critical point, not by the eigenvalue solver.
    Two roots a distance ~sqrt(eps) apart are individually inaccurate, but
    at the critical point m between them (R_u(m) = 0) the pair is
    m +- sqrt(-2 R / R_uu) with |R_u| = sqrt(-2 R R_uu), and R(m) is
    insensitive to errors in m.  Updates the arrays in place and marks rows
    holding a pair that is double to working precision in ``unresolved``.
    """
    P = np.polynomial.polynomial
    eps = np.finfo(LD).eps
    srt = np.sort(np.where(keep, roots, np.inf), axis=1)
    with np.errstate(invalid="ignore"):
        close = (np.diff(srt, axis=1) < PAIR_TOL).any(axis=1)
    for row in np.flatnonzero(close):
        idx = np.flatnonzero(keep[row])
        if len(idx) < 2:
            continue
        idx = idx[np.argsort(roots[row, idx])]
        gaps = np.diff(roots[row, idx])
        for k in np.flatnonzero(gaps < PAIR_TOL):
            i, j = idx[k], idx[k + 1]
            c = a[row]
            d1, d2 = P.polyder(c), P.polyder(c, 2)
            m = (roots[row, i] + roots[row, j]) / 2
            for _ in range(3):
                h = P.polyval(m, d2)
                if h == 0:
                    break
                m -= P.polyval(m, d1) / h
            r, h = P.polyval(m, c), P.polyval(m, d2)
            if h == 0:
                continue
            noise = 64 * eps * P.polyval(abs(m), np.abs(c))
            if abs(r) <= noise:
                # a double root to working precision: dropped, since next to
                # an isolated fold its share of the integral is negligible
                keep[row, i] = keep[row, j] = False
                unresolved[row] = True
                continue
            if r * h > 0:
                # R and R_uu of one sign at the critical point: complex pair
                keep[row, i] = keep[row, j] = False
                continue
            disc = -2 * r * h
            w = np.sqrt(disc) / abs(h)
            roots[row, i], roots[row, j] = m - w, m + w
            slopes[row, i] = slopes[row, j] = np.sqrt(disc)


def _integrand(K, z):
    """(2 + u + z) / |R_u| summed over admissible roots, with the root count and min |R_u|."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    roots, slopes, keep, _ = _roots_and_slopes(_u_coeffs(K, z))
    terms = np.where(keep, (2 + roots + z[:, None]) / np.maximum(slopes, 1e-300), 0)
    vals = terms.sum(axis=1).astype(float)
    counts = keep.sum(axis=1)
    mins = np.where(keep, slopes, np.inf).min(axis=1).astype(float)
    return vals, counts, mins


# quartic discriminant of a u^4 + b u^3 + c u^2 + d u + e as (coefficient, powers of a..e)
_QUARTIC_DISC = (
    (256, (3, 0, 0, 0, 3)), (-192, (2, 1, 0, 1, 2)), (-128, (2, 0, 2, 0, 2)), (144, (2, 0, 1, 2, 1)),
    (-27, (2, 0, 0, 4, 0)), (144, (1, 2, 1, 0, 2)), (-6, (1, 2, 0, 2, 1)), (-80, (1, 1, 2, 1, 1)),
    (18, (1, 1, 1, 3, 0)), (16, (1, 0, 4, 0, 1)), (-4, (1, 0, 3, 2, 0)), (-27, (0, 4, 0, 0, 2)),
    (18, (0, 3, 1, 1, 1)), (-4, (0, 3, 0, 3, 0)), (-4, (0, 2, 3, 0, 1)), (1, (0, 2, 2, 2, 0)),
)


def _dict_mul(f, g):
    out = {}
    for k1, v1 in f.items():
        for k2, v2 in g.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=1)
def discriminant_family() -> dict:
    """u-discriminant of the reference R as {(deg_z, deg_p, deg_q): Fraction}."""
    fam = resultant_family(REFERENCE_ALPHA, REFERENCE_ALPHA)
    coef = [{} for _ in range(5)]
    for (i, j, kp, kq), v in fam.items():
        coef[i][(j, kp, kq)] = coef[i].get((j, kp, kq), 0) + v
    # a..e are the coefficients of u^4 .. u^0
    abcde = coef[::-1]
    powers = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = {(0, 0, 0): Fraction(1)} if k == 0 else _dict_mul(power(i, k - 1), abcde[i])
        return powers[(i, k)]

    out = {}
    for c, ks in _QUARTIC_DISC:
        term = {(0, 0, 0): Fraction(c)}
        for i, k in enumerate(ks):
            if k:
                term = _dict_mul(term, power(i, k))
        for key, v in term.items():
            out[key] = out.get(key, 0) + v
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=1)
def reduced_discriminant_family() -> dict:
    """The u-discriminant divided by z^2 (1 - z)^2, which it always contains.

    Those factors put multiple roots at z = 0 and 1 that would otherwise
    swamp nearby simple roots in floating point.
    """
    by_z = {}
    for (j, kp, kq), v in discriminant_family().items():
        by_z.setdefault(j, {})[(kp, kq)] = v
    deg = max(by_z)
    c = [dict(by_z.get(j, {})) for j in range(deg + 1)]
    for _ in range(2):
        # synthetic division by (z - 1), highest degree first
        quo = [None] * (len(c) - 1)
        carry = {}
        for j in range(len(c) - 1, 0, -1):
            cur = dict(c[j])
            for k, v in carry.items():
                cur[k] = cur.get(k, 0) + v
            quo[j - 1] = {k: v for k, v in cur.items() if v}
            carry = quo[j - 1]
        rem = dict(c[0])
        for k, v in carry.items():
            rem[k] = rem.get(k, 0) + v
        if any(rem.values()):
            raise ReductionFailure("discriminant is not divisible by (1 - z)")
        c = quo
    if c[0] or c[1]:
        raise ReductionFailure("discriminant is not divisible by z^2")
    return {(j - 2, kp, kq): v for j in range(2, len(c)) for (kp, kq), v in c[j].items()}


@lru_cache(maxsize=1)
def _discriminant_arrays():
    fam = reduced_discriminant_family()
    keys = list(fam)
    J, KP, KQ = (np.array([k[s] for k in keys]) for s in range(3))
    V = np.array([LD(fam[k].numerator) / LD(fam[k].denominator) for k in keys], dtype=LD)
    return J, KP, KQ, V


def _z_polynomials(p, q):
    """Ascending z-coefficients of R(0, z), R(1, z) and the reduced u-discriminant."""
    K = _coeff_matrix(p, q)
    J, KP, KQ, V = _discriminant_arrays()
    disc = np.zeros(J.max() + 1, dtype=LD)
    np.add.at(disc, J, V * LD(p) ** KP * LD(q) ** KQ)
    return K[0], K.sum(axis=0), disc


def _event_candidates(p, q, imag_tol=1e-3):
    """z in [0, 1] where the admissible-root count can change or nearly does."""
    out = []
    for c in _z_polynomials(p, q):
        c = np.trim_zeros(np.asarray(c, dtype=float), "b")
        if len(c) < 2:
            continue
        r = np.roots(c[::-1])
        # complex roots close to the axis mark a near-touching pair
        keep = (np.abs(r.imag) <= imag_tol) & (r.real > 0) & (r.real < 1)
        out.extend(float(x) for x in r.real[keep])
    return sorted(out)


def _count_changes(K, zs, counts, pts):
    """Bisect every count change between consecutive entries of zs."""
    for i in range(len(zs) - 1):
        lo, hi = zs[i], zs[i + 1]
        c_lo, c_hi = counts[i], counts[i + 1]
        # a cell may hold several changes; after each one found by
        # bisection, continue with the remainder of the cell
        for _ in range(8):
            if c_lo == c_hi:
                break
            # 32-way sectioning: the first grid point off c_lo brackets the change
            a, b = lo, hi
            for _ in range(12):
                grid = np.linspace(a, b, SECTIONS + 1)
                c = _integrand(K, grid[1:-1])[1]
                off = np.flatnonzero(c != c_lo)
                k = off[0] + 1 if len(off) else SECTIONS
                a, b = grid[k - 1], grid[k]
                if b - a <= 4 * np.spacing(b):
                    break
            pts.add(0.5 * (a + b))
            lo, c_lo = b, _integrand(K, [b])[1][0]


def _grid_min(f, lo, hi, iterations=10):
    """Minimize f on [lo, hi] by repeated zooming on a vectorized grid."""
    for _ in range(iterations):
        grid = np.linspace(lo, hi, SECTIONS + 1)
        k = int(np.argmin(f(grid)))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, SECTIONS)]
    return 0.5 * (lo + hi)


def _breakpoints(K, scan: int, p, q):
    zs = np.linspace(0.0, 1.0, scan + 1)
    # R(., 0) and R(., 1) typically have double roots; count just inside
    zs[0], zs[-1] = SCAN_INSET, 1.0 - SCAN_INSET
    _, counts, mins = _integrand(K, zs)
    pts = {0.0, 1.0}
    _count_changes(K, zs, counts, pts)
    # events narrower than a scan cell: zeros of R(0, z), R(1, z) and of the
    # u-discriminant; roots of these are inaccurate when multiple, so a
    # window around each is rescanned
    for c in _event_candidates(p, q):
        pts.add(c)
        lo, hi = max(c - EVENT_WINDOW, SCAN_INSET), min(c + EVENT_WINDOW, 1.0 - SCAN_INSET)
        fine = np.linspace(lo, hi, 257)
        _count_changes(K, fine, _integrand(K, fine)[1], pts)
    # near-coalescence or crossing: sharp local minima of the smallest |R_u|
    finite = np.isfinite(mins)
    if finite.any():
        ref = np.median(mins[finite])
        for i in range(1, scan):
            if finite[i] and mins[i] <= mins[i - 1] and mins[i] <= mins[i + 1] and mins[i] < 1e-2 * ref:
                pts.add(_grid_min(lambda x: _integrand(K, x)[2], zs[i - 1], zs[i + 1]))
    return sorted(pts)


def _tanh_sinh(K, a, b, max_level):
    """Yield tanh-sinh estimates of int_a^b, one per refinement level."""
    half = 0.5 * (b - a)
    tmax = 3.5
    total = 0.0
    h = 1.0
    for level in range(max_level + 1):
        if level:
            h /= 2
        k = np.arange(-int(tmax / h), int(tmax / h) + 1)
        # after the first level only the new (odd) nodes are evaluated
        t = (k if level == 0 else k[k % 2 != 0]) * h
        s = 0.5 * math.pi * np.sinh(t)
        # distance to the nearer endpoint, accurate near the ends
        e = np.exp(-2 * np.abs(s))
        d = half * 2 * e / (1 + e)
        x = np.where(t < 0, a + d, b - d)
        w = half * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
        # integrable endpoint singularities: skip nodes within CUTOFF of the ends
        ok = (d > NODE_CUTOFF * (b - a)) & (w > 0)
        vals, _, _ = _integrand(K, x[ok])
        total += float(np.sum(w[ok] * vals))
        yield total * h


def _gauss_chebyshev(K, a, b, n):
    """int_a^b f with the fold weight 1/sqrt((z - a)(b - z)) factored out."""
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * np.cos((2 * np.arange(1, n + 1) - 1) * math.pi / (2 * n))
    vals, _, _ = _integrand(K, x)
    return math.pi / n * float(np.sum(vals * np.sqrt((x - a) * (b - x))))


def _endpoint_slope(K, z0, inward, width=1.0):
    """log-log slope of the integrand approaching z0 from one side."""
    ds = np.minimum(np.array([1e-5, 1e-7, 1e-9]), width * np.array([1e-2, 1e-4, 1e-6]))
    vals, _, _ = _integrand(K, z0 + inward * ds)
    if np.any(vals <= 0):
        return 0.0
    return float(np.polyfit(np.log(ds), np.log(vals), 1)[0])


def _unresolved_fraction(K, scan: int) -> float:
    zs = np.linspace(0.0, 1.0, scan + 1)
    return float(_roots_and_slopes(_u_coeffs(K, zs))[3].mean())


def rho_evaluate(p, q, quad_points: int = 256, max_level: int = MAX_LEVEL, rtol: float = 1e-5) -> RhoResult:
    """rho(p, q) for alpha = beta = (1, 0, -1), with the divergence flag.

    The integral over z is split at every change in the number of admissible
    roots and at sharp minima of |R_u|; each piece uses tanh-sinh.  It is
    declared divergent if the integrand grows like |z - z0|^s with
    s <= -0.9 at a breakpoint, if R(., z) keeps a double root over a range
    of z, or if the quadrature fails to settle.
    """
    # R(u, z) also vanishes for shared roots c outside [-1, 1], so (p, q)
    # beyond the Horn polygon can still pick up roots: test the support first
    try:
        g = pq_to_gamma(p, q)
    except NoRealTriple:
        return RhoResult(0.0)
    if not _in_support(g[0], g[1], 1e-12):
        return RhoResult(0.0)
    p, q = float(p), float(q)
    if abs(2 * p - q + 8) <= 1e-12 * max(1.0, abs(p), abs(q)) and q != 0.0:
        # on 2p - q + 8 = 0 (the edge gamma3 = -2) R(., z) is a perfect
        # square for every z; rho is even in q and the mirror is regular
        q = -q
    K = _coeff_matrix(p, q)
    if _unresolved_fraction(K, int(quad_points)) > DEGENERATE_FRACTION:
        return RhoResult(math.inf, True, 0)
    bps = _breakpoints(K, int(quad_points), p, q)
    # slivers left by bisection carry at most O(sqrt(width)) mass
    segs = [(a, b) for a, b in zip(bps, bps[1:]) if b - a >= 1e-12]
    for a, b in segs:
        # a non-integrable point also borders a wide segment; below ~1e-6 the
        # probes would sit under the resolution of z near 1
        if b - a < MIN_SLOPE_WIDTH:
            continue
        if _endpoint_slope(K, a, +1, b - a) <= DIVERGENT_SLOPE or _endpoint_slope(K, b, -1, b - a) <= DIVERGENT_SLOPE:
            return RhoResult(math.inf, True, 0)
    gens = [_tanh_sinh(K, a, b, max_level) for a, b in segs]
    history = [[next(g) for _ in range(3)] for g in gens]
    # tolerances are relative to the whole integral: micro-segments between
    # clustered folds are hard to resolve but carry little of the mass
    scale = max(1.0, sum(abs(h[-1]) for h in history))
    total = 0.0
    worst = 0
    for (a, b), gen, hist in zip(segs, gens, history):
        tol = rtol * scale
        conv = None
        for lvl in range(2, max_level + 1):
            if lvl >= len(hist):
                hist.append(next(gen))
            est = hist[lvl]
            # root noise near coalescence limits the attainable accuracy
            if abs(est - hist[lvl - 1]) <= tol:
                conv = lvl
                break
        if conv is None:
            # fold endpoints can be too close to resolve the coalescing
            # roots; Chebyshev nodes keep clear of them
            prev = None
            for lvl, m in enumerate(CHEBYSHEV_NODES):
                est = _gauss_chebyshev(K, a, b, m)
                if prev is not None and abs(est - prev) <= tol:
                    conv = max_level + lvl
                    break
                prev = est
        if conv is None:
            return RhoResult(math.inf, True, max_level)
        worst = max(worst, conv)
        total += est
    return RhoResult(2.0 / math.pi ** 2 * total, False, worst)


def rho_reference(p, q, quad_points: int = 256) -> float:
    """Density of (p, q); +inf when the integral diverges (see rho_evaluate)."""
    return rho_evaluate(p, q, quad_points).value


def pdf_so3(gamma1, gamma2, quad_points: int = 256) -> float:
    """Density of the ordered spectrum (gamma1, gamma2, -gamma1-gamma2) at alpha = beta = (1, 0, -1)."""
    return pdf_so3_evaluate(gamma1, gamma2, quad_points).value


def pdf_so3_evaluate(gamma1, gamma2, quad_points: int = 256) -> RhoResult:
    g1, g2 = float(gamma1), float(gamma2)
    g3 = -g1 - g2
    if not (g1 >= g2 >= g3):
        return RhoResult(0.0)
    vd = abs((g1 - g2) * (g1 - g3) * (g2 - g3))
    if min(g1 - g2, g2 - g3) <= 1e-12 * max(1.0, abs(g1), abs(g3)):
        # chamber wall: the Vandermonde factor wins
        return RhoResult(0.0)
    # exactly on a wall the divergence can be as weak as a logarithm, too
    # weak for the quadrature to see; decide it algebraically instead
    if wall_distance(g1, g2) <= 1e-12 * max(1.0, abs(g1), abs(g3)) and is_singular_point(g1, g2):
        return RhoResult(math.inf, True, 0)
    p, q = gamma_to_pq((g1, g2, g3))
    r = rho_evaluate(p, q, quad_points)
    if r.singular:
        return r
    return RhoResult(vd * r.value, False, r.levels)


# -- singular curves -----------------------------------------------------------

CHAMBER_GAP = 1e-4
MIN_VANDERMONDE = 1e-4
SINGULAR_RESIDUAL = 1e-13
NEWTON_STEP = 1e-6


def _power_table(x, degree, order, dtype=float):
    """t[d][:, k] = d^d/dx^d x^k for d <= order, k <= degree."""
    x = np.atleast_1d(np.asarray(x, dtype=dtype))
    k = np.arange(degree + 1)
    out = []
    for d in range(order + 1):
        coef = np.ones(degree + 1, dtype=dtype)
        for s in range(d):
            coef = coef * (k - s)
        out.append(np.where(k >= d, coef * x[:, None] ** np.maximum(k - d, 0), 0.0))
    return out


@lru_cache(maxsize=1)
def _reference_terms():
    fam = resultant_family(REFERENCE_ALPHA, REFERENCE_ALPHA)
    keys = list(fam)
    idx = tuple(np.array([k[s] for k in keys]) for s in range(4))
    return idx, np.array([float(fam[k]) for k in keys])


class _RTables:
    """Derivatives of the reference R at many (u, z, p, q) at once."""

    def __init__(self, u, z, p, q, dtype=float):
        (self.I, self.J, self.KP, self.KQ), V = _reference_terms()
        self.V = V.astype(dtype)
        m = max(np.size(u), np.size(z), np.size(p), np.size(q))
        b = (lambda x: np.broadcast_to(np.asarray(x, dtype=dtype), (m,)))
        self.u = _power_table(b(u), int(self.I.max()), 2, dtype)
        self.z = _power_table(b(z), int(self.J.max()), 2, dtype)
        self.p = _power_table(b(p), int(self.KP.max()), 1, dtype)
        self.q = _power_table(b(q), int(self.KQ.max()), 1, dtype)

    def __call__(self, du=0, dz=0, dp=0, dq=0):
        return np.sum(self.V * self.u[du][:, self.I] * self.z[dz][:, self.J]
                      * self.p[dp][:, self.KP] * self.q[dq][:, self.KQ], axis=1)


def _r_derivative(u, z, p, q, du=0, dz=0, dp=0, dq=0):
    return _RTables(u, z, p, q)(du, dz, dp, dq)


def _pq_and_gradients(g1, g2):
    g3 = -g1 - g2
    p = g1 * g2 + g2 * g3 + g3 * g1
    q = -g1 * g2 * g3
    return p, q, (-2 * g1 - g2, -g1 - 2 * g2), (2 * g1 * g2 + g2 * g2, g1 * g1 + 2 * g1 * g2)


def _singular_system(x, fixed, vertical=True, dtype=float):
    """F = (R, R_u, R_z) and its Jacobian in the unknowns (u, z, g).

    On a vertical transect gamma1 = ``fixed`` and g = gamma2; otherwise
    gamma2 = ``fixed`` and g = gamma1.
    """
    u, z, g = x[:, 0], x[:, 1], x[:, 2]
    g1, g2 = (fixed, g) if vertical else (g, fixed)
    p, q, pg, qg = _pq_and_gradients(g1, g2)
    pg, qg = (pg[1], qg[1]) if vertical else (pg[0], qg[0])
    R = _RTables(u, z, p, q, dtype)
    F = np.zeros((len(u), 3), dtype=dtype)
    Jm = np.zeros((len(u), 3, 3), dtype=dtype)
    for row, (a, b) in enumerate([(0, 0), (1, 0), (0, 1)]):
        F[:, row] = R(a, b)
        Jm[:, row, 0] = R(a + 1, b)
        Jm[:, row, 1] = R(a, b + 1)
        Jm[:, row, 2] = R(a, b, 1, 0) * pg + R(a, b, 0, 1) * qg
    return F, Jm


def _in_support(g1, g2, tol=1e-9) -> bool:
    """Horn polygon of alpha = beta = (1, 0, -1); for n = 3 Weyl and dual Weyl suffice."""
    from .spectra import weyl_check

    a = (1.0, 0.0, -1.0)
    g = (g1, g2, -g1 - g2)
    dual = tuple(-x for x in reversed(g))
    return not weyl_check(a, a, g, tol) and not weyl_check(a, a, dual, tol)


def _in_support_interior(g1, g2, margin=1e-7) -> bool:
    return all(_in_support(g1 + d1, g2 + d2, 0.0)
               for d1, d2 in ((margin, 0), (-margin, 0), (0, margin), (0, -margin)))


def _in_chamber(g1, g2, gap=CHAMBER_GAP) -> bool:
    """Strictly inside the Weyl chamber, away from where gamma -> (p, q) degenerates."""
    g3 = -g1 - g2
    vd = (g1 - g2) * (g1 - g3) * (g2 - g3)
    return g1 - g2 > gap and g2 - g3 > gap and vd > MIN_VANDERMONDE


def _newton(x, fixed, vertical=True, iterations=120, polish=30):
    """Damped Newton; the last ``polish`` steps evaluate F in extended precision."""
    for it in range(iterations + polish):
        dtype = LD if it >= iterations else float
        if it == iterations:
            x, fixed = x.astype(LD), np.asarray(fixed, dtype=LD)
        F, Jm = _singular_system(x, fixed, vertical, dtype)
        step = np.einsum("mij,mj->mi", np.linalg.pinv(Jm.astype(float)), F.astype(float))
        norm = np.linalg.norm(step, axis=1, keepdims=True)
        x = x - step * np.minimum(1.0, 0.25 / np.maximum(norm, 1e-300))
    res = np.abs(_singular_system(x, fixed, vertical, LD)[0]).max(axis=1)
    # near-double solutions converge linearly: the last step bounds the error
    return x.astype(float), res.astype(float), norm[:, 0]


def _walls():
    from .spectra import singular_hyperplanes

    a = (1.0, 0.0, -1.0)
    return singular_hyperplanes(a, a, 2)


def is_singular_point(gamma1, gamma2, tol=SINGULAR_RESIDUAL) -> bool:
    """Does R = R_u = R_z = 0 hold at some (u, z) in [0, 1]^2 for this gamma?

    Damped Newton in (u, z) from a grid of starts, polished in extended
    precision like the transect solver: degenerate corner solutions
    converge only linearly.
    """
    p, q, _, _ = _pq_and_gradients(float(gamma1), float(gamma2))
    g = np.linspace(0.0, 1.0, 6)
    x = np.array([(u, z) for u in g for z in g], dtype=float)
    iterations, polish = 120, 30
    for it in range(iterations + polish):
        dtype = LD if it >= iterations else float
        R = _RTables(x[:, 0].astype(dtype), x[:, 1].astype(dtype), p, q, dtype)
        F = np.stack([R(0, 0), R(1, 0), R(0, 1)], axis=1)
        Jm = np.stack([np.stack([R(1, 0), R(0, 1)], axis=1),
                       np.stack([R(2, 0), R(1, 1)], axis=1),
                       np.stack([R(1, 1), R(0, 2)], axis=1)], axis=1)
        step = np.einsum("mij,mj->mi", np.linalg.pinv(Jm.astype(float)), F.astype(float))
        norm = np.linalg.norm(step, axis=1, keepdims=True)
        x = x - step * np.minimum(1.0, 0.25 / np.maximum(norm, 1e-300))
    R = _RTables(x[:, 0].astype(LD), x[:, 1].astype(LD), p, q, LD)
    res = np.max(np.abs(np.stack([R(0, 0), R(1, 0), R(0, 1)], axis=1)), axis=1).astype(float)
    inside = np.all((x >= -1e-9) & (x <= 1 + 1e-9), axis=1)
    return bool(np.any(inside & (res <= tol) & (norm[:, 0] <= NEWTON_STEP)))


def singular_curves(resolution: int = 41) -> np.ndarray:
    """Points (gamma1, gamma2) where two roots u of R(., z) coalesce degenerately.

    A divergence of rho needs a singular point of the curve R(u, z) = 0
    in [0, 1]^2, i.e. R = R_u = R_z = 0.  Along ``resolution`` vertical
    (gamma1 fixed) and as many horizontal (gamma2 fixed) transects of the
    Weyl box this is solved for (u, z, the free coordinate) by Newton's
    method from a grid of starts.  Solutions on the chamber walls (where
    gamma -> (p, q) degenerates) or not strictly inside the support are
    discarded; on the support edge the density vanishes instead of
    diverging.  Crossings of the walls that carry the located points with
    any other wall are added when they are singular points themselves: a
    transect grid can miss them.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    found = set()
    for vertical, (lo, hi), (flo, fhi) in ((True, (0.0, 2.0), (-1.0, 1.0)),
                                          (False, (-1.0, 1.0), (0.0, 2.0))):
        # transects at cell centres, so that none lies along a wall
        step = (hi - lo) / resolution
        lines = lo + step * (np.arange(resolution) + 0.5)
        starts = [(u, z, g) for u in (0.05, 0.5, 0.95) for z in (0.05, 0.5, 0.95)
                  for g in np.linspace(flo, fhi, 9)[1:-1]]
        x0 = np.array([s for _ in lines for s in starts], dtype=float)
        fixed = np.repeat(lines, len(starts))
        x, res, last = _newton(x0, fixed, vertical)
        for (u, z, g), f, r, s in zip(x, fixed, res, last):
            if not (r <= SINGULAR_RESIDUAL and s <= NEWTON_STEP):
                continue
            if not (-1e-9 <= u <= 1 + 1e-9 and -1e-9 <= z <= 1 + 1e-9):
                continue
            g1, g2 = (f, g) if vertical else (g, f)
            if _in_chamber(g1, g2) and _in_support_interior(g1, g2):
                found.add((round(float(g1), 9), round(float(g2), 9)))
    pts = sorted(found)
    walls = _walls()
    active = [w for w in walls
              if sum(1 for g1, g2 in pts if w.distance((g1, g2, -g1 - g2)) < 1e-6) >= 3]
    for w1 in active:
        for w2 in walls:
            cross = _wall_crossing(w1, w2) if w1 != w2 else None
            if cross is None:
                continue
            g1, g2 = cross
            if _in_support(g1, g2) and _in_chamber(g1, g2) and is_singular_point(g1, g2):
                found.add((round(g1, 9), round(g2, 9)))
    return np.array(sorted(found), dtype=float).reshape(-1, 2)


def _wall_crossing(w1, w2):
    """Intersection of two walls in the (gamma1, gamma2) plane, or None."""
    rows = []
    for w in (w1, w2):
        # sum_K gamma_k with gamma3 = -gamma1 - gamma2
        c1 = sum(1 if k == 1 else -1 if k == 3 else 0 for k in w.K)
        c2 = sum(1 if k == 2 else -1 if k == 3 else 0 for k in w.K)
        rows.append((c1, c2, float(w.constant)))
    A = np.array([r[:2] for r in rows], dtype=float)
    if abs(np.linalg.det(A)) < 1e-12:
        return None
    g = np.linalg.solve(A, [r[2] for r in rows])
    return float(g[0]), float(g[1])


def wall_distance(gamma1, gamma2) -> float:
    """Distance from (gamma1, gamma2, -gamma1-gamma2) to the nearest candidate wall."""
    from .spectra import nearest_wall

    return nearest_wall((gamma1, gamma2, -gamma1 - gamma2), _walls())[0]


def active_walls(points=None, tol: float = 1e-6, min_points: int = 3) -> list:
    """Walls carrying at least ``min_points`` of the singular-curve points."""
    pts = singular_curves() if points is None else np.asarray(points, dtype=float)
    return [w for w in _walls()
            if sum(1 for g1, g2 in pts if w.distance((g1, g2, -g1 - g2)) < tol) >= min_points]


def singular_segments(points=None) -> list:
    """Each active wall clipped to the extent of the points it carries.

    Returns ((g1, g2), (g1, g2)) endpoint pairs.
    """
    pts = singular_curves() if points is None else np.asarray(points, dtype=float)
    out = []
    for w in active_walls(pts):
        on = pts[[w.distance((g1, g2, -g1 - g2)) < 1e-6 for g1, g2 in pts]]
        # order along the wall by its direction in the plane
        c1 = sum(1 if k == 1 else -1 if k == 3 else 0 for k in w.K)
        c2 = sum(1 if k == 2 else -1 if k == 3 else 0 for k in w.K)
        t = on @ np.array([-c2, c1], dtype=float)
        seg = (tuple(on[np.argmin(t)]), tuple(on[np.argmax(t)]))
        if not any(np.allclose(seg, s) or np.allclose(seg, s[::-1]) for s in out):
            out.append(seg)
    return out


def segment_distance(gamma1, gamma2, segments) -> float:
    """Euclidean distance in the (gamma1, gamma2) plane to the nearest segment."""
    x = np.array([gamma1, gamma2], dtype=float)
    best = np.inf
    for a, b in segments:
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        ab = b - a
        t = 0.0 if not ab.any() else np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(x - a - t * ab)))
    return best


# -- divergence along transects ------------------------------------------------


def transect_values(point, direction, distances, quad_points: int = 256) -> np.ndarray:
    """pdf_so3 at point + d * direction for each d (direction is normalized)."""
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v)
    g1, g2 = (float(x) for x in point)
    return np.array([pdf_so3(g1 + d * v[0], g2 + d * v[1], quad_points) for d in distances])


def fit_log(distances, values) -> tuple:
    """Least squares values ~ a log d + b; returns (a, b, r2)."""
    x = np.log(np.asarray(distances, dtype=float))
    y = np.asarray(values, dtype=float)
    a, b = np.polyfit(x, y, 1)
    ss = np.sum((y - (a * x + b)) ** 2)
    return float(a), float(b), float(1.0 - ss / np.sum((y - y.mean()) ** 2))


def fit_power(distances, values) -> tuple:
    """Least squares log values ~ k log d + c; returns (k, c, r2)."""
    return fit_log(distances, np.log(np.asarray(values, dtype=float)))


def classify_divergence(point, direction, distances=None, quad_points: int = 256) -> dict:
    """Label the behaviour of pdf_so3 as d -> 0 along a transect.

    "logarithmic" when the log fit is tight with a negative slope and the
    effective power is well above -1/2, "inverse-sqrt" when the power fit
    gives -1/2 within 0.05, otherwise "finite" or "other".
    """
    d = np.logspace(-6, -3, 7) if distances is None else np.asarray(distances, dtype=float)
    vals = transect_values(point, direction, d, quad_points)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        return {"kind": "other", "values": vals}
    a, b, r2_log = fit_log(d, vals)
    k, c, r2_pow = fit_power(d, vals)
    if abs(k + 0.5) <= 0.05 and r2_pow > 0.99:
        kind = "inverse-sqrt"
    elif a < 0 and r2_log > 0.99 and k > -0.35:
        kind = "logarithmic"
    elif abs(a) * np.log(d[-1] / d[0]) < 1e-2 * np.mean(vals):
        kind = "finite"
    else:
        kind = "other"
    return {"kind": kind, "log_slope": a, "log_r2": r2_log, "exponent": k, "power_r2": r2_pow,
            "values": vals}


# -- grids ---------------------------------------------------------------------

GRID_BOUNDS = (0.0, 2.0, -1.0, 1.0)


def so3_grid(bins: int, bounds=GRID_BOUNDS, sub: int = 1, quad_points: int = 256) -> list:
    """Rows (gamma1, gamma2, pdf, flag) at cell centres of a bins x bins grid.

    With ``sub`` > 1 the pdf is averaged over sub x sub Gauss-Legendre
    nodes of the cell.  ``flag`` is 1 when any node hit a divergence; the
    pdf of such a cell is inf.
    """
    lo1, hi1, lo2, hi2 = (float(x) for x in bounds)
    h1, h2 = (hi1 - lo1) / bins, (hi2 - lo2) / bins
    x, w = np.polynomial.legendre.leggauss(sub)
    x, w = 0.5 * x, 0.5 * w
    rows = []
    for i in range(bins):
        c1 = lo1 + (i + 0.5) * h1
        for j in range(bins):
            c2 = lo2 + (j + 0.5) * h2
            total, flag = 0.0, 0
            for xa, wa in zip(x, w):
                for xb, wb in zip(x, w):
                    r = pdf_so3_evaluate(c1 + xa * h1, c2 + xb * h2, quad_points)
                    if r.singular:
                        flag = 1
                    total += wa * wb * r.value
            rows.append((c1, c2, float("inf") if flag else float(total), flag))
    return rows


def so3_mass(bins: int = 30, sub: int = 2, quad_points: int = 256) -> tuple:
    """Integral of pdf_so3 over the Weyl box by cellwise Gauss-Legendre.

    The grid is shifted by a small irrational offset so that no node falls
    on a singular line or the support edge (the singularities are
    integrable).  Returns (mass, number of nodes that still hit a divergence).
    """
    shift = ((math.sqrt(2) - 1) * 1e-3, (math.sqrt(3) - 1) * 1e-3)
    lo1, hi1, lo2, hi2 = GRID_BOUNDS
    bounds = (lo1 + shift[0], hi1 + shift[0], lo2 + shift[1], hi2 + shift[1])
    rows = so3_grid(bins, bounds, sub, quad_points)
    h1, h2 = (hi1 - lo1) / bins, (hi2 - lo2) / bins
    mass = sum(v for _, _, v, f in rows if not f) * h1 * h2
    return mass, sum(f for *_, f in rows)


def write_grid_csv(rows, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma1", "gamma2", "pdf", "flag"])
        for g1, g2, v, f in rows:
            w.writerow([repr(float(g1)), repr(float(g2)), repr(float(v)), int(f)])


# -- SO(2) closed forms --------------------------------------------------------


def so2_horn_pdf(a12, b12, g12) -> float:
    """Density of gamma_12 for 2x2 real symmetric A + B under SO(2)."""
    a12, b12, g12 = float(a12), float(b12), float(g12)
    if a12 <= 0 or b12 <= 0:
        raise ValueError("alpha_12 and beta_12 must be positive")
    lo, hi = abs(a12 - b12), a12 + b12
    if not lo < g12 < hi:
        return 0.0
    return 2.0 / math.pi * g12 / math.sqrt((hi * hi - g12 * g12) * (g12 * g12 - lo * lo))


def so2_horn_cdf(a12, b12, g12) -> float:
    """Closed-form CDF of so2_horn_pdf: g12 = |a e^{2i t} + b| with t uniform."""
    a12, b12, g12 = float(a12), float(b12), float(g12)
    lo, hi = abs(a12 - b12), a12 + b12
    if g12 <= lo:
        return 0.0
    if g12 >= hi:
        return 1.0
    cos_t = (g12 * g12 - a12 * a12 - b12 * b12) / (2 * a12 * b12)
    return 1.0 - math.acos(max(-1.0, min(1.0, cos_t))) / math.pi


def so2_schur_pdf(a1, x) -> float:
    """Density of a diagonal entry of R diag(a1, -a1) R^T, R uniform in SO(2)."""
    a1, x = float(a1), float(x)
    if a1 <= 0:
        raise ValueError("alpha_1 must be positive")
    if abs(x) >= a1:
        return 0.0
    return 1.0 / (math.pi * math.sqrt(a1 * a1 - x * x))


def so2_schur_cdf(a1, x) -> float:
    a1, x = float(a1), float(x)
    if x <= -a1:
        return 0.0
    if x >= a1:
        return 1.0
    return 0.5 + math.asin(x / a1) / math.pi
