from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horn.errors import DegenerateSpectrum, TraceError
from horn.sampler import SamplerConfig, horn_histogram, spectrum_arg
from horn.spectra import weyl_check
from horn.su_density import (cell_averaged_pdf, density_grid, j_evaluate, j_function, pdf_su, pdf_su_many)

REF = (1, 0, -1)
small = st.fractions(min_value=-3, max_value=3, max_denominator=7)


def spectrum(draw_vals):
    vals = sorted(set(draw_vals), reverse=True)
    mean = sum(vals) / len(vals)
    return tuple(v - mean for v in vals)


spectra3 = st.lists(small, min_size=3, max_size=3, unique=True).map(spectrum)


def gamma_from(a, b, u, v):
    """A sorted spectrum near the Horn polytope of (a, b), from u, v roughly in [0, 1]."""
    lo, hi = a[2] + b[2], a[0] + b[0]
    g1 = lo + u * (hi - lo)
    g2 = lo + v * (hi - lo)
    return tuple(sorted((g1, g2, sum(a) + sum(b) - g1 - g2), reverse=True))


def test_n2_closed_form_exact():
    a, b = (Fraction(3, 2), Fraction(-3, 2)), (Fraction(1, 2), Fraction(-1, 2))
    for g in (Fraction(11, 10), Fraction(3, 2), Fraction(19, 10)):
        # gamma_1 has density gamma_1 / (2 a_1 b_1) on [a_1 - b_1, a_1 + b_1]
        assert pdf_su(a, b, (g, -g)) == g / (2 * a[0] * b[0])
    assert pdf_su(a, b, (Fraction(1, 2), Fraction(-1, 2))) == 0


def test_exact_rational_values():
    j = j_evaluate(REF, REF, (Fraction(1, 2), 0, Fraction(-1, 2)))
    assert isinstance(j.value, Fraction) and j.on_wall
    assert isinstance(j_function(REF, REF, (Fraction(4, 5), Fraction(1, 5), -1)), Fraction)
    with pytest.raises(TraceError):
        j_evaluate(REF, REF, (1, 1, 1))
    with pytest.raises(DegenerateSpectrum):
        pdf_su((1, 1, -2), REF, (1, 0, -1))


@settings(max_examples=40, deadline=None)
@given(spectra3, spectra3, st.floats(0, 1), st.floats(0, 1))
def test_symmetries(a, b, u, v):
    g = gamma_from(a, b, Fraction(u), Fraction(v))
    p = pdf_su(a, b, g)
    assert p >= 0
    assert pdf_su(b, a, g) == p
    # A + B -> -(A + B) reverses every spectrum
    neg = lambda s: tuple(-x for x in reversed(s))  # noqa: E731
    assert pdf_su(neg(a), neg(b), neg(g)) == p
    # homogeneous of degree -(n - 1) = -2
    s = Fraction(3, 2)
    sc = lambda t: tuple(s * x for x in t)  # noqa: E731
    assert pdf_su(sc(a), sc(b), sc(g)) == p / s**2


@settings(max_examples=60, deadline=None)
@given(spectra3, spectra3, st.floats(-0.2, 1.2), st.floats(-0.2, 1.2))
def test_zero_outside_horn_polytope(a, b, u, v):
    g = gamma_from(a, b, Fraction(u), Fraction(v))
    bad = weyl_check([float(x) for x in a], [float(x) for x in b], [float(x) for x in g], 1e-9)
    if bad:
        assert pdf_su(a, b, g) == 0


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(0)
    pts = []
    for _ in range(50):
        g1, g2 = rng.uniform(0, 2), rng.uniform(-1, 1)
        pts.append((g1, g2, -g1 - g2))
    many = pdf_su_many(REF, REF, np.array(pts))
    one = [float(pdf_su(REF, REF, g)) for g in pts]
    assert np.allclose(many, one, atol=1e-12)


def test_normalisation():
    g = density_grid(REF, REF, 401)
    assert g.total_mass() == pytest.approx(1.0, abs=2e-3)
    e1, e2 = np.linspace(0, 2, 81), np.linspace(-1, 1, 81)
    m = cell_averaged_pdf(REF, REF, e1, e2, sub=4).sum() * (2 / 80) ** 2
    assert m == pytest.approx(1.0, abs=1e-4)
    a, b = (2.0, 0.5, -2.5), (1.0, 0.3, -1.3)
    assert density_grid(a, b, 301).total_mass() == pytest.approx(1.0, abs=5e-3)


def test_grid_csv_line_endings(tmp_path):
    path = tmp_path / "g.csv"
    density_grid(REF, REF, 5).write_csv(path)
    raw = path.read_bytes()
    assert raw.startswith(b"gamma1,gamma2,pdf\n") and b"\r" not in raw
    with pytest.raises(ValueError):
        density_grid((1, -1), (1, -1), 5)


def test_monte_carlo_agreement():
    a = spectrum_arg(REF)
    h = horn_histogram(SamplerConfig("su", 3, a, a, 200000, 21), (0, 2, -1, 1), (20, 20))
    e1, e2 = h.edges()
    m = cell_averaged_pdf(REF, REF, e1, e2) * 0.01
    tv = 0.5 * np.abs(h.probabilities() - m / m.sum()).sum()
    floor = 0.5 * np.sum(np.sqrt(2 * m * (1 - m) / (np.pi * h.total)))
    assert tv < 1.5 * floor
