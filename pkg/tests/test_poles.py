import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydswm.errors import NoCrossingError, WindowError
from rydswm.metrics import (
    bandwidth_closed_form,
    bandwidth_numeric,
    bandwidth_report,
    pole_analysis,
    spectrum_fwhm,
)
from rydswm.response import probe_spectrum, transfer_function

from conftest import mhz


def two_pole(g51, g61, oa):
    return lambda w: 1.0 / ((g51 + 1j * w) * (g61 + 1j * w) + abs(oa) ** 2 / 4)


def test_paper_poles():
    p = pole_analysis(mhz(0.129), mhz(6.1), mhz(6.2))
    assert p.regime == "underdamped"
    assert p.gamma_plus == pytest.approx(mhz(3.1145), rel=1e-12)
    assert p.gamma_minus == pytest.approx(mhz(3.1145), rel=1e-12)
    # 0.5 sqrt(6.2^2 - 5.971^2) = 0.83476 MHz
    assert abs(p.lam_plus.imag) == pytest.approx(mhz(0.835), rel=1e-3)
    assert p.lam_plus.imag == pytest.approx(-p.lam_minus.imag)


def test_decoupled_poles():
    p = pole_analysis(mhz(0.1), mhz(10), 0.0)
    assert p.regime == "overdamped"
    assert sorted([p.gamma_plus, p.gamma_minus]) == pytest.approx([mhz(0.1), mhz(10)])
    assert p.gamma_plus <= p.gamma_minus


@pytest.mark.parametrize("oa", [0.1, 1.0, 30.0])
def test_equal_rates_share_decay(oa):
    p = pole_analysis(mhz(1), mhz(1), mhz(oa))
    assert p.regime == "underdamped"
    assert p.gamma_plus == pytest.approx(mhz(1)) and p.gamma_minus == pytest.approx(mhz(1))


def test_critical_regime():
    assert pole_analysis(mhz(1), mhz(3), mhz(2)).regime == "critical"


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 20), st.floats(0.01, 20), st.floats(0, 20))
def test_regime_matches_discriminant(a, b, c):
    p = pole_analysis(mhz(a), mhz(b), mhz(c))
    assert p.gamma_plus > 0 and p.gamma_minus > 0
    d = (a - b) ** 2 - c ** 2
    if abs(d) > 1e-6 * max((a - b) ** 2, c ** 2):
        assert p.regime == ("overdamped" if d > 0 else "underdamped")


def test_closed_form_equal_poles():
    p = pole_analysis(mhz(1), mhz(1), 0.0)
    b = bandwidth_closed_form(p)
    assert b.f3db == pytest.approx(np.sqrt(np.sqrt(2) - 1) * 1e6, rel=1e-12)
    assert round(b.f3db / 1e6, 3) == 0.644


def test_closed_form_slow_pole_limit():
    b = bandwidth_closed_form(pole_analysis(mhz(0.1), mhz(10), 0.0))
    assert b.f3db == pytest.approx(0.0999e6, rel=1e-3)


def test_closed_form_flagged_when_underdamped():
    b = bandwidth_closed_form(pole_analysis(mhz(0.129), mhz(6.1), mhz(6.2)))
    assert not b.valid and b.note


def test_overdamped_closed_form_matches_scan():
    g51, g61, oa = mhz(0.1), mhz(10), mhz(1)
    c = bandwidth_closed_form(pole_analysis(g51, g61, oa))
    n = bandwidth_numeric(two_pole(g51, g61, oa))
    assert c.valid
    assert abs(c.f3db - n.f3db) / n.f3db < 0.005


def test_overdamped_random_suite():
    rng = np.random.default_rng(7)
    for _ in range(40):
        g51 = mhz(rng.uniform(0.05, 1.0))
        g61 = g51 * rng.uniform(10, 100)
        oa = rng.uniform(0, 0.3) * (g61 - g51)
        c = bandwidth_closed_form(pole_analysis(g51, g61, oa))
        n = bandwidth_numeric(two_pole(g51, g61, oa))
        assert abs(c.f3db - n.f3db) / n.f3db < 0.005


def test_numeric_single_pole():
    g = mhz(1.0)
    n = bandwidth_numeric(lambda w: 1.0 / (1 + 1j * w / g))
    assert n.f3db == pytest.approx(1e6, rel=1e-6)
    assert not n.resonant


def test_numeric_from_samples():
    g = mhz(1.0)
    w = mhz(np.linspace(0, 5, 5001))
    n = bandwidth_numeric((w, 1.0 / (1 + 1j * w / g)))
    assert n.f3db == pytest.approx(1e6, rel=1e-5)


def test_numeric_constant_factor_invariance():
    f = two_pole(mhz(0.3), mhz(5), mhz(2))
    a = bandwidth_numeric(f).f3db
    b = bandwidth_numeric(lambda w: (3 - 4j) * 1e9 * f(w)).f3db
    assert a == pytest.approx(b, rel=1e-9)


def test_numeric_resonant_flag():
    n = bandwidth_numeric(two_pole(mhz(0.05), mhz(0.05), mhz(5)))
    assert n.resonant and n.peak_ratio > 1


def test_numeric_no_crossing():
    with pytest.raises(NoCrossingError):
        bandwidth_numeric(lambda w: 1.0 + 0 * w)


@pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
def test_bandwidth_scales_with_rates(s):
    g51, g61, oa = mhz(0.129), mhz(6.1), mhz(6.2)
    p0, p1 = pole_analysis(g51, g61, oa), pole_analysis(s * g51, s * g61, s * oa)
    assert p1.gamma_plus == pytest.approx(s * p0.gamma_plus, rel=1e-12)
    assert bandwidth_closed_form(p1).f3db == pytest.approx(s * bandwidth_closed_form(p0).f3db, rel=1e-12)
    n0 = bandwidth_numeric(two_pole(g51, g61, oa)).f3db
    n1 = bandwidth_numeric(two_pole(s * g51, s * g61, s * oa)).f3db
    assert n1 == pytest.approx(s * n0, rel=1e-5)


def test_report_for_paper_system(swm):
    r = bandwidth_report(swm)
    assert r.regime == "underdamped" and not r.closed_valid
    assert r.f3db_closed > 0 and r.f3db_numeric > 0


def test_closed_form_route_poles_match_formula(swm):
    # the closed-form response is exactly the two-pole filter
    a = bandwidth_numeric(transfer_function(swm, "closed-form")).f3db
    b = bandwidth_numeric(two_pole(swm.gamma(5), swm.gamma(6), swm.rabi("A"))).f3db
    assert a == pytest.approx(b, rel=1e-9)


# ---- FWHM ----------------------------------------------------------------------------

def test_fwhm_lorentzian():
    g = 2.0
    x = np.linspace(-40, 40, 8001)
    r = spectrum_fwhm(x, np.abs(1.0 / (g + 1j * x)))
    assert r.fwhm == pytest.approx(2 * g, rel=1e-5)
    assert not r.multimodal


def test_fwhm_window_too_narrow():
    x = np.linspace(-1, 1, 101)
    with pytest.raises(WindowError):
        spectrum_fwhm(x, np.abs(1.0 / (2.0 + 1j * x)))


def test_fwhm_two_peaks_flagged():
    x = np.linspace(-20, 20, 4001)
    y = np.abs(1 / (0.5 + 1j * (x - 5))) + np.abs(1 / (0.5 + 1j * (x + 5)))
    r = spectrum_fwhm(x, y)
    assert r.multimodal and r.n_regions == 2
    assert r.fwhm > 10


def test_strong_lo_splits_spectrum(swm):
    s = swm.with_drive("LO", rabi=mhz(30.0))
    x = mhz(np.linspace(-40, 40, 801))
    amp = np.abs(probe_spectrum(s, x))
    peaks = np.flatnonzero((amp[1:-1] > amp[:-2]) & (amp[1:-1] > amp[2:]))
    assert len(peaks) >= 2
    assert spectrum_fwhm(x, amp).multimodal
