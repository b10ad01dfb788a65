from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from horn.dirichlet import check_reconstruction, delta_tilde_factors, dirichlet_table, sign_forms, simple_products

pos = st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9)


@settings(max_examples=25, deadline=None)
@given(st.lists(pos, min_size=3, max_size=3))
def test_partial_fractions_reconstruct_exactly(u):
    assert check_reconstruction(3, [u[:2]]) == 0
    assert check_reconstruction(4, [u]) == 0


def test_reconstruction_symbolic_n3():
    u1, u2 = sp.symbols("u1 u2")
    total = 0
    for p in simple_products(3):
        term = sp.Rational(p.coefficient.numerator, p.coefficient.denominator)
        for k, (r, s) in enumerate(zip(p.powers, p.shifts)):
            lin = (u1, u2)[k] + sum(sp.Rational(c.numerator, c.denominator) * x for c, x in zip(s, (u1, u2)))
            term /= lin**r
        total += term
    assert sp.simplify(total - 1 / (u1 * u2 * (u1 + u2))) == 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_table_shape(n):
    assert len(delta_tilde_factors(n)) == n * (n - 1) // 2
    for t in dirichlet_table(n):
        assert len(t.exponents) == len(t.arguments) == n - 1
        assert sum(t.exponents) == n * (n - 1) // 2
        for a in t.arguments:
            assert next(c for c in a if c) > 0
    assert all(f in sign_forms(n) for t in dirichlet_table(n) for f in t.arguments)
