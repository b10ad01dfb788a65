"""Identities linking J at (shifted) highest weights to LR multiplicities.

    J(lambda + rho, mu + rho; nu + rho) = sum_k c_k N_{lambda mu k}^nu
    J(lambda, mu; nu)                   = sum_k c'_k N_{(lambda-rho)(mu-rho) k}^{nu-rho}

with the coefficient sets hard-coded for su(3) and su(4).
"""

from __future__ import annotations

from fractions import Fraction

from ..orbital import weyl_dimension
from ..spectra import DynkinWeight, rho, weight_to_spectrum
from .hive import lr_coefficient, root_lattice_check, tensor_decomposition

# {n: {"shifted": {kappa: c}, "unshifted": {kappa: c}}}
KAPPA = {
    3: {
        "shifted": {(0, 0): Fraction(1)},
        "unshifted": {(0, 0): Fraction(1)},
    },
    4: {
        "shifted": {(0, 0, 0): Fraction(9, 24), (1, 0, 1): Fraction(1, 24)},
        "unshifted": {(0, 1, 0): Fraction(1, 6)},
    },
}


def kappa_normalization(n: int, which: str) -> Fraction:
    """sum_k c_k dim V_k; equals 1 for every tabulated set."""
    return sum(c * weyl_dimension(DynkinWeight(k)) for k, c in KAPPA[n][which].items())


def triple_multiplicity(lam, mu, kappa, nu) -> int:
    """Multiplicity of nu in lambda x mu x kappa: sum_tau N_{lam mu}^tau N_{tau kappa}^nu."""
    lam, mu, kappa, nu = (w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in (lam, mu, kappa, nu))
    if not any(kappa.labels):
        return lr_coefficient(lam, mu, nu)
    return sum(c * lr_coefficient(tau, kappa, nu) for tau, c in tensor_decomposition(lam, mu).items())


def j_at_weights(lam, mu, nu) -> Fraction:
    from ..su_density import j_function

    return j_function(weight_to_spectrum(lam).values, weight_to_spectrum(mu).values, weight_to_spectrum(nu).values)


def verify_bridge(n: int, lam, mu, nu) -> dict:
    """Exact |LHS - RHS| per identity; inapplicable identities go under ``skipped``."""
    if n not in KAPPA:
        raise ValueError("bridge identities are tabulated for n = 3 and 4 only")
    lam, mu, nu = (w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in (lam, mu, nu))
    if not lam.n == mu.n == nu.n == n:
        raise ValueError(f"weights must belong to su({n})")
    out = {"residuals": {}, "skipped": {}}
    if not root_lattice_check(lam, mu, nu):
        for key in KAPPA[n]:
            out["skipped"][key] = "lambda + mu - nu is not in the root lattice"
        return out
    r = rho(n)
    lhs = j_at_weights(lam + r, mu + r, nu + r)
    rhs = sum(c * triple_multiplicity(lam, mu, DynkinWeight(k), nu) for k, c in KAPPA[n]["shifted"].items())
    out["residuals"]["shifted"] = abs(lhs - rhs)
    if min(lam.labels + mu.labels + nu.labels) < 1:
        out["skipped"]["unshifted"] = "needs lambda, mu, nu >= rho"
    else:
        lm, mm, nm = (DynkinWeight(tuple(x - 1 for x in w)) for w in (lam, mu, nu))
        lhs = j_at_weights(lam, mu, nu)
        rhs = sum(c * triple_multiplicity(lm, mm, DynkinWeight(k), nm) for k, c in KAPPA[n]["unshifted"].items())
        out["residuals"]["unshifted"] = abs(lhs - rhs)
    return out
