import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydswm.errors import DegenerateResponseError, NonCompressiveError, SeriesInvalidError
from rydswm.metrics import (
    QuasiStaticMap,
    alpha,
    extract_h1_h3,
    fit_odd_cubic,
    iip3,
    imd3_dbc,
    linearity_report,
    p1db,
    tone_slopes,
    two_tone_imd3_timedomain,
)
from rydswm.metrics.linearity import P1DB_FACTOR
from rydswm.response import LinearizedModel

from conftest import mhz


@pytest.fixture(scope="module")
def swm_fit(swm):
    return extract_h1_h3(swm)


def test_synthetic_cubic():
    amps = np.linspace(0.05, 0.5, 8)
    fit = extract_h1_h3(None, amplitudes=amps, fundamental=lambda a: a - 0.075 * a ** 3)
    assert fit.h1 == pytest.approx(1.0, abs=1e-6)
    assert fit.h3 == pytest.approx(-0.1, abs=1e-6)
    assert fit.residual < 1e-12


def test_fit_rejects_strong_curvature():
    a = np.linspace(0.1, 3, 8)
    with pytest.raises(SeriesInvalidError):
        fit_odd_cubic(a, np.tanh(a) ** 5)


def test_auto_range_keeps_cubic_fraction_in_band(swm_fit):
    assert 0.01 <= swm_fit.cubic_fraction <= 0.10
    assert swm_fit.residual < 0.01
    assert len(swm_fit.amplitudes) >= 6


def test_h1_is_the_small_signal_transfer(swm, swm_fit):
    h0 = LinearizedModel(swm)(0.0)
    assert abs(swm_fit.h1 - h0) / abs(h0) < 0.005


def test_quasi_static_map_offset_free(swm):
    qs = QuasiStaticMap(swm)
    assert qs(0.0) == pytest.approx(qs.offset)
    assert abs(qs.offset) < 1e-15  # no RF, no 6-1 coherence


# ---- closed-form figures ---------------------------------------------------------------

def test_p1db_unit_case():
    assert P1DB_FACTOR == pytest.approx((4 / 3) * (10 ** (-1 / 20) - 1), rel=1e-15)
    assert (4 / 3) * (1 - 10 ** -0.05) == pytest.approx(0.14500, abs=1e-5)
    assert p1db(-0.14500) == pytest.approx(1.0, abs=1e-4)


def test_p1db_scaling():
    assert p1db(-0.05) == pytest.approx(np.sqrt(2) * p1db(-0.1), rel=1e-14)


def test_p1db_needs_compression():
    with pytest.raises(NonCompressiveError):
        p1db(0.1)


def test_iip3_unit_and_ratio():
    assert iip3(0.75, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert iip3(3 - 1j, 0.2j) == pytest.approx(iip3(1000 * (3 - 1j), 200j), rel=1e-14)
    assert iip3(1.0, 0.0) == float("inf")


def test_alpha_requires_h1():
    with pytest.raises(DegenerateResponseError):
        alpha(0.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3),
       st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
def test_imd3_zero_at_intercept(h1, h3):
    ip = iip3(h1, h3)
    assert imd3_dbc(h1, h3, ip) == pytest.approx(0.0, abs=1e-9)
    assert imd3_dbc(h1, h3, ip / 10) == pytest.approx(-40.0, abs=1e-9)


def test_imd3_needs_h1():
    with pytest.raises(DegenerateResponseError):
        imd3_dbc(0.0, 1.0, 1.0)


def test_p1db_iip3_spacing(swm, swm_fit):
    r = linearity_report(swm, fit=swm_fit)
    spacing = 20 * np.log10(r.omega_iip3 / r.omega_p1db)
    assert abs(spacing - 9.64) < 1.0
    assert r.omega_p1db < r.omega_iip3
    assert np.all(np.diff(r.imd3_dbc) > 0)


# ---- tone slopes and the time-domain oracle ------------------------------------------------

def test_tone_slopes(swm, swm_fit):
    top = np.max(swm_fit.amplitudes)
    ts = tone_slopes(swm, np.geomspace(top / 30, top / 3, 6))
    assert ts.slope_fundamental == pytest.approx(1.0, abs=0.05)
    assert ts.slope_imd3 == pytest.approx(3.0, abs=0.05)


def test_two_tone_imd3_agrees_with_formula(swm):
    spacing = mhz(0.1)
    center = 2 * spacing
    fit = extract_h1_h3(swm, omega=center)
    amp = 0.5 * np.max(fit.amplitudes)
    td = two_tone_imd3_timedomain(swm, center, spacing, amp)
    assert abs(td - imd3_dbc(fit.h1, fit.h3, amp)) < 1.0
