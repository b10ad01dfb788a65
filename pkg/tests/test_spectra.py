from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horn.errors import DimensionMismatch, DominanceError, SumMismatch, TraceError
from horn.spectra import (DynkinWeight, group_class, make_spectrum, nearest_wall, permutahedron_contains,
                          rho, rho_shift, singular_hyperplanes, spectrum_to_weight, vandermonde,
                          weight_to_spectrum, weyl_box, weyl_check)

labels = st.lists(st.integers(0, 9), min_size=1, max_size=5)


def herm(rng, n, spec):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, _ = np.linalg.qr(z)
    return q @ np.diag(spec) @ q.conj().T


def test_make_spectrum_sorts_and_checks_trace():
    s = make_spectrum([0, 1, -1], traceless=True)
    assert s.values == (1, 0, -1) and s.n == 3 and s.exact
    with pytest.raises(TraceError):
        make_spectrum([1, 0, 0], traceless=True)
    with pytest.raises(ValueError):
        make_spectrum([])


def test_spectrum_rejects_increasing():
    from horn.spectra import Spectrum

    with pytest.raises(ValueError):
        Spectrum((0, 1))


@given(labels)
def test_partition_roundtrip(lab):
    w = DynkinWeight(tuple(lab))
    assert DynkinWeight.from_partition(w.partition()) == w
    assert spectrum_to_weight(weight_to_spectrum(w)) == w
    assert sum(weight_to_spectrum(w).values) == 0


def test_rho_shift():
    assert rho_shift(DynkinWeight((2, 0)), 1) == DynkinWeight((3, 1))
    with pytest.raises(DominanceError):
        rho_shift(DynkinWeight((2, 0)), -1)
    assert rho(4).labels == (1, 1, 1)


def test_group_class_lookup():
    assert group_class("so").theta == Fraction(1, 2)
    assert group_class(2).name == "USp"
    assert group_class("SU") is group_class(1)


def test_vandermonde_exact():
    assert vandermonde((Fraction(1), Fraction(0), Fraction(-1))) == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31))
def test_weyl_inequalities_hold_for_random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = np.sort(rng.normal(size=n))[::-1]
    b = np.sort(rng.normal(size=n))[::-1]
    g = np.linalg.eigvalsh(herm(rng, n, a) + herm(rng, n, b))[::-1]
    assert weyl_check(a, b, g, 1e-9) == []
    box = weyl_box(a, b)
    assert all(lo - 1e-9 <= x <= hi + 1e-9 for x, (lo, hi) in zip(g, box))


def test_weyl_check_flags_violation():
    assert weyl_check((1, 0, -1), (1, 0, -1), (3, 0, -3)) == [(1, 1)]
    with pytest.raises(DimensionMismatch):
        weyl_check((1, 0), (1, 0, -1), (1, 0, -1))
    with pytest.raises(ValueError):
        weyl_check((1, 0), (1, 0), (1, 0), tol=-1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31))
def test_schur_diagonal_in_permutahedron(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n)
    d = np.diag(herm(rng, n, a)).real
    assert permutahedron_contains(a, d, 1e-9)
    push = np.zeros(n)
    push[0], push[1] = 10.0, -10.0
    assert not permutahedron_contains(a, d + push)
    with pytest.raises(SumMismatch):
        permutahedron_contains(a, d + 1.0)


def test_singular_hyperplanes_and_distance():
    walls = singular_hyperplanes((1, 0, -1), (1, 0, -1), 1)
    assert len({(w.K, w.constant) for w in walls}) == len(walls)
    w = next(w for w in walls if w.K == (2,) and w.constant == 0)
    assert w.distance((1.3, 0.0, -1.3)) == 0
    # in-plane normal of gamma2 = 0 is e2 - (1, 1, 1) / 3, of length sqrt(6) / 3
    assert w.distance((1.0, 0.5, -1.5)) == pytest.approx(0.5 * 3 / np.sqrt(6))
    d, _ = nearest_wall((1.3, 1e-3, -1.301), walls)
    assert d == pytest.approx(1e-3 * 3 / np.sqrt(6))
    with pytest.raises(ValueError):
        singular_hyperplanes((1, 0, -1), (1, 0, -1), 4)
