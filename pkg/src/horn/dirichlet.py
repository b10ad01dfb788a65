"""Iterated partial fractions of 1/Delta~(u) and their Dirichlet primitives.

``Delta~(u) = prod_{i<j} (u_i + ... + u_{j-1})`` is split, one variable at a
time, into products of simple elements

    c * prod_k (u_k + s_k(u_{k+1}, ..., u_m)) ** -r_k

(a triangular form: each shift only involves later variables).  Integrating
``u_1, u_2, ...`` in turn against ``exp(i sum_j u_j A_j)`` with the principal
value rule

    P int du e^{i u L} / (u + s)^r = e^{-i s L} i pi (i L)^{r-1} / (r-1)! sgn(L)

turns every simple-element product into ``c * prod_k (i pi) (i L_k)^{r_k-1}
/ (r_k-1)! sgn(L_k)`` where ``L_k`` is a linear form in the A's picked up
from the shifts.  The table below is built once per ``n`` in exact
arithmetic.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


Form = tuple  # linear form: tuple of Fraction coefficients, one per variable


def _canon(form: Form):
    """(scale, canonical form) with the first non-zero coefficient equal to 1."""
    for c in form:
        if c != 0:
            return c, tuple(x / c for x in form)
    raise ZeroDivisionError("zero linear form")


def _sub(a: Form, b: Form) -> Form:
    return tuple(x - y for x, y in zip(a, b))


def delta_tilde_factors(n: int) -> list:
    m = n - 1
    out = []
    for i in range(m):
        for j in range(i + 1, n):
            out.append(tuple(Fraction(1) if i <= k < j else Fraction(0) for k in range(m)))
    return out


@dataclass(frozen=True)
class SimpleProduct:
    """``coefficient * prod_k (u_k + shifts[k](u)) ** -powers[k]``."""

    coefficient: Fraction
    powers: tuple
    shifts: tuple

    def evaluate(self, u) -> Fraction:
        out = Fraction(self.coefficient)
        for k, (r, s) in enumerate(zip(self.powers, self.shifts)):
            out /= (u[k] + sum(c * x for c, x in zip(s, u))) ** r
        return out


@dataclass(frozen=True)
class DirichletTerm:
    """One integrated simple-element product.

    Contributes ``coefficient * prod_k L_k^{r_k-1} / (r_k-1)! * sgn(L_k)``
    where ``L_k = sum_j arguments[k][j] * A_j``.
    """

    coefficient: Fraction
    exponents: tuple
    arguments: tuple


def _partial_fractions(shift_mults: dict) -> list:
    """Expand prod_a (u + s_a)^-m_a into simple elements in u.

    Returns a list of (s_a, r, coefficient, extra) where ``extra`` maps
    linear forms (s_b - s_a) to (negative) powers.
    """
    out = []
    keys = list(shift_mults)
    for a in keys:
        ma = shift_mults[a]
        others = [b for b in keys if b != a]
        for r in range(1, ma + 1):
            need = ma - r
            for ks in _compositions(need, len(others)):
                coef = Fraction(1)
                extra = {}
                for b, kb in zip(others, ks):
                    mb = shift_mults[b]
                    coef *= (-1) ** kb * math.comb(mb + kb - 1, kb)
                    extra[_sub(b, a)] = mb + kb
                out.append((a, r, coef, extra))
    return out


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def simple_products(n: int) -> tuple:
    """Triangular partial-fraction expansion of 1/Delta~(u), u in R^{n-1}."""
    m = n - 1
    # state: (coef, den: dict form -> multiplicity, done: tuple of (r, shift))
    states = [(Fraction(1), {f: 1 for f in delta_tilde_factors(n)}, ())]
    for k in range(m):
        new_states = defaultdict(Fraction)
        for coef, den, done in states:
            shift_mults = {}
            rest = {}
            for form, mult in den.items():
                c = form[k]
                if c == 0:
                    rest[form] = rest.get(form, 0) + mult
                    continue
                coef = coef / c ** mult
                shift = tuple(Fraction(0) if j <= k else form[j] / c for j in range(m))
                shift_mults[shift] = shift_mults.get(shift, 0) + mult
            if not shift_mults:
                raise ArithmeticError(f"no pole in u_{k + 1}; delta term")
            for s, r, pc, extra in _partial_fractions(shift_mults):
                c2 = coef * pc
                den2 = dict(rest)
                for form, power in extra.items():
                    scale, canon = _canon(form)
                    c2 /= scale ** power
                    den2[canon] = den2.get(canon, 0) + power
                key = (tuple(sorted(den2.items())), done + ((r, s),))
                new_states[key] += c2
        states = [(c, dict(den), done) for (den, done), c in new_states.items() if c != 0]
    out = []
    for coef, den, done in states:
        assert not den
        out.append(SimpleProduct(coef, tuple(r for r, _ in done), tuple(s for _, s in done)))
    return tuple(out)


def check_reconstruction(n: int, points) -> Fraction:
    """Max |sum of simple products - 1/Delta~(u)| over exact rational points."""
    worst = Fraction(0)
    factors = delta_tilde_factors(n)
    prods = simple_products(n)
    for u in points:
        u = tuple(Fraction(x) for x in u)
        target = Fraction(1)
        for f in factors:
            target /= sum(c * x for c, x in zip(f, u))
        got = sum(p.evaluate(u) for p in prods)
        worst = max(worst, abs(got - target))
    return worst


@lru_cache(maxsize=None)
def dirichlet_table(n: int) -> tuple:
    """Integrated table for J at rank n-1, like terms merged.

    The overall factor i^{-n(n-1)/2} (i pi)^{n-1} i^{sum(r)-(n-1)} / (2 pi)^{n-1}
    equals 2^{-(n-1)}, which is folded into the coefficients.
    """
    m = n - 1
    merged = defaultdict(Fraction)
    for p in simple_products(n):
        assert sum(p.powers) == n * (n - 1) // 2
        args = []
        for k in range(m):
            # L_k = A_k - sum_{k'<k} (coefficient of u_k in s_{k'}) L_{k'}
            lk = [Fraction(0)] * m
            lk[k] = Fraction(1)
            for kp in range(k):
                sig = p.shifts[kp][k]
                if sig:
                    lk = [a - sig * b for a, b in zip(lk, args[kp])]
            args.append(tuple(lk))
        coef = p.coefficient / 2 ** m
        for r in p.powers:
            coef /= math.factorial(r - 1)
        # sgn(-L) = -sgn(L) and (-L)^e: canonicalise argument signs
        canon_args = []
        for lk, r in zip(args, p.powers):
            if not any(lk):
                coef = Fraction(0)  # principal value of an oscillation-free pole
                break
            first = next(c for c in lk if c != 0)
            if first < 0:
                lk = tuple(-c for c in lk)
                coef *= (-1) ** r  # r-1 powers plus one sign
            canon_args.append(tuple(lk))
        if coef == 0:
            continue
        merged[(p.powers, tuple(canon_args))] += coef
    return tuple(
        DirichletTerm(c, powers, args) for (powers, args), c in sorted(merged.items()) if c != 0
    )


def sign_forms(n: int) -> list:
    """Every distinct argument form appearing in the table."""
    forms = set()
    for t in dirichlet_table(n):
        forms.update(t.arguments)
    return sorted(forms)
