"""Unitary orbital integrals (HCIZ), su(n) Weyl characters and an n = 2
Fourier-inversion check of the Horn density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import roots_legendre

from .errors import CutoffTooSmall
from .spectra import DynkinWeight, rho, rho_shift, weight_to_spectrum

DEFAULT_CONFLUENCE_TOL = 1e-3


@dataclass(frozen=True)
class OrbitalArgs:
    alpha: tuple
    x: tuple
    confluence_tol: float = DEFAULT_CONFLUENCE_TOL

    def __post_init__(self):
        if len(self.alpha) != len(self.x):
            raise ValueError("alpha and x must have equal length")
        if self.confluence_tol <= 0:
            raise ValueError("confluence_tol must be positive")


def _superfactorial(n: int) -> int:
    return math.prod(math.factorial(p) for p in range(1, n))


def _min_gap(v: np.ndarray) -> float:
    if len(v) < 2:
        return math.inf
    s = np.sort(v)
    return float(np.min(np.diff(s)))


def _bidiagonal(nodes: np.ndarray) -> np.ndarray:
    n = len(nodes)
    z = np.diag(nodes.astype(complex))
    z[np.arange(n - 1), np.arange(1, n)] = 1.0
    return z


def divided_difference_matrix(x, alpha) -> np.ndarray:
    """M[k, l] = divided difference of exp(i x a) over x_1..x_{k+1} and a_1..a_{l+1}.

    Obtained as one row of ``expm(i kron(Zx, Za))`` with ``Z`` the bidiagonal
    matrices carrying the nodes (Opitz's formula, extended to the product
    ``x a`` by expanding the exponential in powers).  Exact in the confluent
    limit.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(alpha, dtype=float)
    n = len(x)
    # expm divides by eigenvalue gaps of the triangular blocks; coincident
    # nodes are masked inside but still trip numpy's warnings
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = expm(1j * np.kron(_bidiagonal(x), _bidiagonal(a)))
    return big[0].reshape(n, n)


def _hciz_generic(x: np.ndarray, a: np.ndarray) -> complex:
    n = len(x)
    det = np.linalg.det(np.exp(1j * np.outer(x, a)))
    dx = np.prod([x[i] - x[j] for i in range(n) for j in range(i + 1, n)])
    da = np.prod([a[i] - a[j] for i in range(n) for j in range(i + 1, n)])
    return _superfactorial(n) * det / ((1j) ** (n * (n - 1) // 2) * dx * da)


def _hciz_confluent(x: np.ndarray, a: np.ndarray) -> complex:
    # det(e^{i x a}) / (Delta(x) Delta(a)) == det(divided differences)
    n = len(x)
    m = divided_difference_matrix(x, a)
    return _superfactorial(n) * np.linalg.det(m) / (1j) ** (n * (n - 1) // 2)


def hciz(args_or_alpha, x=None, confluence_tol: float | None = None) -> complex:
    """Unitary orbital integral H(alpha, i x) = int exp(i tr(X V A V*)) dV.

    Accepts either an :class:`OrbitalArgs` or ``(alpha, x)``.
    """
    if isinstance(args_or_alpha, OrbitalArgs):
        args = args_or_alpha
    else:
        tol = DEFAULT_CONFLUENCE_TOL if confluence_tol is None else confluence_tol
        args = OrbitalArgs(tuple(args_or_alpha), tuple(x), tol)
    a = np.array([float(v) for v in args.alpha])
    xv = np.array([float(v) for v in args.x])
    # scalar X or A: tr(X V A V*) does not depend on V
    if not np.any(xv - xv[0]):
        return complex(np.exp(1j * xv[0] * a.sum()))
    if not np.any(a - a[0]):
        return complex(np.exp(1j * a[0] * xv.sum()))
    if _min_gap(xv) < args.confluence_tol or _min_gap(a) < args.confluence_tol:
        return complex(_hciz_confluent(xv, a))
    return complex(_hciz_generic(xv, a))


# -- root-system helpers for su(n) ---------------------------------------------


def delta_g(x) -> complex:
    """Product over positive roots of <root, x>: prod_{i<j} (x_i - x_j)."""
    x = list(x)
    out = 1
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            out *= x[i] - x[j]
    return out


def weyl_denominator(x) -> complex:
    """prod_{i<j} (e^{i(x_i-x_j)/2} - e^{-i(x_i-x_j)/2})."""
    x = np.asarray(x, dtype=float)
    out = 1.0 + 0j
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            out *= 2j * math.sin((x[i] - x[j]) / 2)
    return out


def weyl_dimension(w: DynkinWeight) -> int:
    """dim V_w = prod_{i<j} (l_i + ... + l_{j-1} + j - i) / (j - i)."""
    labels = w.labels
    n = w.n
    num = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            num *= Fraction(sum(labels[i:j]) + j - i, j - i)
    assert num.denominator == 1
    return int(num)


def weyl_character_su(w: DynkinWeight, x) -> complex:
    """Character of V_w at diag(e^{i x}), x traceless.

    Ratio det(e^{i x_i (w+rho)_j}) / det(e^{i x_i rho_j}); both determinants
    are taken in divided-difference form so the x-Vandermonde cancels and the
    ratio stays finite at coincident x.  At x = 0 the exact dimension is
    returned.
    """
    x = np.asarray(x, dtype=float)
    if len(x) != w.n:
        raise ValueError("x must have n entries")
    if abs(x.sum()) > 1e-9 * max(1.0, np.abs(x).max()):
        raise ValueError("x must be traceless")
    if not np.any(x):
        return complex(weyl_dimension(w))
    top = np.array([float(v) for v in weight_to_spectrum(rho_shift(w, +1))])
    bottom = np.array([float(v) for v in weight_to_spectrum(rho(w.n))])
    ratio = delta_g(top) / delta_g(bottom)
    num = np.linalg.det(divided_difference_matrix(x, top))
    den = np.linalg.det(divided_difference_matrix(x, bottom))
    return complex(ratio * num / den)


def character_relation_residual(w: DynkinWeight, x) -> float:
    """|chi_w / dim - Delta_g(i x) / Delta_hat(e^{ix}) * H(w + rho, i x)|."""
    x = np.asarray(x, dtype=float)
    chi = weyl_character_su(w, x) / weyl_dimension(w)
    shifted = weight_to_spectrum(rho_shift(w, +1))
    dg = delta_g(1j * x)
    rhs = dg / weyl_denominator(x) * hciz([float(v) for v in shifted], x)
    return abs(chi - rhs)


# -- Fourier inversion at n = 2 -----------------------------------------------

ACCURACY_TARGET = 1e-3


def _n2_gaps(spec) -> float:
    vals = [float(v) for v in spec]
    if len(vals) != 2:
        raise ValueError("pdf_fourier_check is restricted to n = 2")
    return vals[0] - vals[1]


@lru_cache(maxsize=64)
def _panel_rule(cutoff: float, omega: float, order: int):
    """Composite Gauss-Legendre nodes/weights on [0, cutoff]."""
    panel = math.pi / max(omega, 1e-12)
    npanels = max(1, int(math.ceil(cutoff / panel)))
    edges = np.linspace(0.0, cutoff, npanels + 1)
    xg, wg = roots_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return t, w


def _unnormalized(a: float, b: float, g: float, t, w) -> float:
    # |Delta(gamma)|^2 |Delta(x)|^2 H(a) H(b) H(g)^* with x = (t, -t): the
    # integrand collapses to sin(a t) sin(b t) sin(g t) / t up to constants
    return g * float(np.sum(w * np.sin(a * t) * np.sin(b * t) * np.sin(g * t) / t))


def _tail_bound(a: float, b: float, g: float, cutoff: float) -> float:
    # sin sin sin = 1/4 sum of four sines; |int_T^inf sin(w t)/t| <= 2/(|w| T)
    freqs = [a + b - g, a - b + g, -a + b + g, a + b + g]
    return g * sum(0.25 * 2.0 / (abs(f) * cutoff) if f != 0 else math.inf for f in freqs)


def _normalizer(a: float, b: float, t, w, gmax: float) -> float:
    # int_0^gmax g sin(g t) dg = (sin(G t) - G t cos(G t)) / t^2
    inner = (np.sin(gmax * t) - gmax * t * np.cos(gmax * t)) / t ** 2
    return float(np.sum(w * np.sin(a * t) * np.sin(b * t) * inner / t))


def pdf_fourier_check(alpha, beta, gamma, cutoff: float = 4000.0, quadrature_order: int = 16) -> float:
    """Density of gamma_1 (trace fixed) at n = 2 by truncated Fourier inversion.

    The Fourier integral is cut at ``cutoff`` and integrated with a
    composite Gauss-Legendre rule of ``quadrature_order`` nodes per
    half-period.  The overall constant is fixed numerically by integrating
    the same truncated representation over gamma_12.  Raises
    :class:`CutoffTooSmall` if the bound on the discarded tail exceeds the
    1e-3 accuracy target.
    """
    a = abs(_n2_gaps(alpha))
    b = abs(_n2_gaps(beta))
    g = abs(_n2_gaps(gamma))
    if a == 0 or b == 0:
        raise ValueError("alpha and beta must be non-degenerate")
    gmax = a + b
    omega = 2 * gmax + g
    t, w = _panel_rule(float(cutoff), float(omega), int(quadrature_order))
    z = _normalizer(a, b, t, w, gmax)
    if g == 0:
        return 0.0
    tail = _tail_bound(a, b, g, cutoff) / abs(z)
    if tail > ACCURACY_TARGET:
        raise CutoffTooSmall(f"tail bound {tail:.2e} exceeds {ACCURACY_TARGET:g} at cutoff {cutoff}")
    # the normaliser is taken in gamma_12 = 2 gamma_1 - trace
    return 2.0 * _unnormalized(a, b, g, t, w) / z
