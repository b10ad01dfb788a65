import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from horn.errors import CutoffTooSmall
from horn.orbital import (OrbitalArgs, character_relation_residual, divided_difference_matrix, hciz,
                          pdf_fourier_check, weyl_character_su, weyl_dimension)
from horn.spectra import DynkinWeight
from horn.su_density import pdf_su

reals = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(reals, min_size=2, max_size=5), st.data())
def test_hciz_bounded_symmetric_and_normalised(a, data):
    x = data.draw(st.lists(reals, min_size=len(a), max_size=len(a)))
    h = hciz(a, x)
    assert abs(h) <= 1 + 1e-9
    assert abs(h - hciz(x, a)) <= 1e-8
    assert abs(hciz(a, [0.0] * len(a)) - 1) <= 1e-12
    # conjugation: x -> -x
    assert abs(hciz(a, [-v for v in x]) - h.conjugate()) <= 1e-8


def test_hciz_n2_closed_form():
    for a, t in [(0.3, 1.7), (2.0, -0.4), (1.0, 5.0)]:
        assert abs(hciz((a, -a), (t, -t)) - math.sin(2 * a * t) / (2 * a * t)) < 1e-12


def test_hciz_matches_haar_average():
    a = np.array([1.0, 0.2, -0.9])
    x = np.array([0.8, -0.1, -0.5])
    v = unitary_group.rvs(3, size=20000, random_state=1)
    vals = np.exp(1j * np.einsum("i,kij,j,kij->k", x, v, a, v.conj()))
    mc = vals.mean()
    se = vals.std() / math.sqrt(len(vals))
    assert abs(hciz(a, x) - mc) < 4 * se


def test_confluent_limit_is_continuous():
    a = (1.0, 0.0, -1.0)
    near = hciz(a, (0.5, 0.5 + 1e-7, -1.0 - 1e-7))
    at = hciz(a, (0.5, 0.5, -1.0))
    assert abs(near - at) < 1e-6
    args = OrbitalArgs(a, (0.5, 0.5, -1.0))
    assert hciz(args) == at
    with pytest.raises(ValueError):
        OrbitalArgs(a, (1.0, -1.0))


def test_divided_differences_of_exponential():
    x, a = (0.3, -0.2), (1.1, 0.4)
    m = divided_difference_matrix(x, a)
    f = lambda s, t: cmath.exp(1j * s * t)  # noqa: E731
    assert abs(m[0, 0] - f(x[0], a[0])) < 1e-12
    dd = (f(x[0], a[0]) - f(x[1], a[0])) / (x[0] - x[1])
    assert abs(m[1, 0] - dd) < 1e-12


@pytest.mark.parametrize("labels,dim", [((1,), 2), ((3,), 4), ((1, 1), 8), ((2, 0), 6), ((1, 0, 1), 15),
                                        ((0, 1, 0), 6), ((2, 1), 15)])
def test_weyl_dimension(labels, dim):
    assert weyl_dimension(DynkinWeight(labels)) == dim


def test_characters_against_explicit_sums():
    t = 0.37
    for k in range(5):
        # spin k/2: sum of e^{i m t} over m = k, k - 2, ..., -k
        direct = sum(cmath.exp(1j * m * t) for m in range(-k, k + 1, 2))
        assert abs(weyl_character_su(DynkinWeight((k,)), (t, -t)) - direct) < 1e-12
    x = np.array([0.4, -0.1, -0.3])
    tr = np.exp(1j * x).sum()
    assert abs(weyl_character_su(DynkinWeight((1, 1)), x) - (abs(tr) ** 2 - 1)) < 1e-12
    assert abs(weyl_character_su(DynkinWeight((1, 0)), x) - tr) < 1e-12
    assert weyl_character_su(DynkinWeight((1, 1)), np.zeros(3)) == 8


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=3), st.integers(0, 2**31))
def test_character_relation(labels, seed):
    rng = np.random.default_rng(seed)
    w = DynkinWeight(tuple(labels))
    x = rng.uniform(-math.pi, math.pi, size=w.n)
    x -= x.mean()
    assert character_relation_residual(w, x) < 1e-9


def test_fourier_inversion_agrees_with_exact_n2():
    a, b = (1.5, -1.5), (0.5, -0.5)
    for g in (1.2, 1.5, 1.9):
        exact = float(pdf_su(a, b, (g, -g)))
        assert pdf_fourier_check(a, b, (g, -g)) == pytest.approx(exact, abs=2e-3)
    with pytest.raises(CutoffTooSmall):
        pdf_fourier_check(a, b, (1.5, -1.5), cutoff=5.0)
