import numpy as np
import pytest

from rydswm.config import load_config
from rydswm.errors import SingularityError
from rydswm.metrics import bandwidth_numeric
from rydswm.response import (
    CoherenceResponse,
    LinearizedModel,
    rho61_closed_form,
    rho61_linearized,
    rho61_timedomain_oracle,
    transfer_function,
    transfer_H,
)

from conftest import mhz
from test_atomic import make


def weak(system, probe=1e-3, rest=1e-4):
    """Same rates with the optical drives scaled into the weak-probe limit."""
    s = system.with_drive("P", rabi=system.rabi("P") * probe)
    for x in ("C", "LO", "A"):
        s = s.with_drive(x, rabi=s.rabi(x) * rest)
    return s


# ---- closed form ---------------------------------------------------------------

def test_closed_form_zero_aux(swm):
    assert rho61_closed_form(swm.with_drive("A", rabi=0.0), 0.0) == 0


def test_closed_form_linear_in_probe(swm):
    a = rho61_closed_form(swm, 0.0)
    b = rho61_closed_form(swm.with_drive("P", rabi=2 * swm.rabi("P")), 0.0)
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_closed_form_frozen_value(swm):
    # hand arithmetic with the bundled rates, all detunings zero
    assert rho61_closed_form(swm, 0.0) == pytest.approx(10.970424034024013j, rel=1e-12)


def test_closed_form_equals_flattened_chain(swm):
    w = mhz(np.linspace(0, 20, 41))
    a = rho61_closed_form(swm, w)
    b = rho61_linearized(swm, w, flatten=True).rho61
    assert np.allclose(a, b, rtol=1e-10, atol=0)


def test_closed_form_singular_without_damping():
    s = make(rabi={"P": 1, "C": 1, "LO": 1, "RF": 1}, gammas={j: 0.0 for j in range(2, 7)})
    with pytest.raises(SingularityError):
        rho61_closed_form(s, 0.0)


# ---- linearized chain -------------------------------------------------------------

def test_chain_without_rf_stops_at_level4(swm):
    r = rho61_linearized(swm.with_rf(0.0), 0.0)
    assert r[5][0] == 0 and r[6][0] == 0
    assert all(abs(r[j][0]) > 0 for j in (2, 3, 4))


def test_chain_single_pole():
    s = make(rabi={"P": 1, "C": 1, "LO": 1, "RF": 1},
             gammas={2: 6.1, 3: 0.05, 4: 0.08, 5: 1.0, 6: 1.0})
    w = mhz([0.0, 1.0])
    r = rho61_linearized(s, w, flatten=True)
    assert np.all(r[6] == 0)
    assert abs(r[5][1]) / abs(r[5][0]) == pytest.approx(2 ** -0.5, rel=1e-12)


def test_chain_matches_closed_form_at_low_frequency(swm):
    # the unflattened chain differs by roughly 1.6 w / min|D_2..D_4|
    dmin = min(abs(swm.complex_detuning(j)) for j in (2, 3, 4))
    w = np.linspace(0, 0.005 * dmin, 11)
    a = rho61_closed_form(swm, w)
    b = rho61_linearized(swm, w).rho61
    assert np.all(np.abs(a - b) / np.abs(a) < 0.01)


def test_chain_smooth_over_band(swm):
    # on resonance the cascade is a product of low-pass factors
    r = np.abs(rho61_linearized(swm, mhz(np.linspace(0, 20, 2001))).rho61)
    assert np.all(np.isfinite(r))
    assert np.all(np.diff(r) < 0)


def test_coherence_response_grid_checked():
    with pytest.raises(ValueError):
        CoherenceResponse(np.array([1.0, 0.5]), {6: np.ones(2)}, "linearized")


# ---- full Liouvillian route ------------------------------------------------------

def test_liouvillian_reduces_to_closed_form_when_weak(swm):
    s = weak(swm)
    lm = LinearizedModel(s)
    for w in mhz([0.0, 0.1, 1.0, 5.0]):
        assert lm(w) == pytest.approx(transfer_H(s, w), rel=1e-5)


def test_liouvillian_frozen_values(swm, eit):
    h = LinearizedModel(swm)
    assert bandwidth_numeric(h).f3db == pytest.approx(2.2004016e6, rel=1e-6)
    assert bandwidth_numeric(LinearizedModel(eit)).f3db == pytest.approx(0.5271742e6, rel=1e-6)


# ---- transfer_H -------------------------------------------------------------------

def test_transfer_independent_of_rf_normalisation(swm):
    a = transfer_H(swm, mhz(1.0))
    b = transfer_H(swm.with_rf(mhz(0.3)), mhz(1.0))
    assert a == pytest.approx(b, rel=1e-13)


def test_transfer_dc_agrees_between_routes(swm):
    assert transfer_H(swm, 0.0, "linearized") == pytest.approx(transfer_H(swm, 0.0), rel=1e-12)


def test_transfer_vanishes_at_high_frequency(swm):
    h = np.abs(transfer_H(swm, mhz([1e2, 1e3, 1e4])))
    assert h[1] / h[0] == pytest.approx(1e-2, rel=0.02)
    assert h[2] < 1e-6 * abs(transfer_H(swm, 0.0))


@pytest.mark.parametrize("method", ["closed-form", "linearized", "liouvillian"])
def test_magnitude_even_at_zero_detuning(swm, method):
    w = mhz(np.linspace(-10, 10, 21))
    h = np.abs(transfer_function(swm, method)(w))
    assert np.allclose(h, h[::-1], rtol=1e-9)


def test_unknown_method(swm):
    with pytest.raises(ValueError):
        transfer_H(swm, 0.0, "magic")


# ---- time-domain oracle -------------------------------------------------------------

def test_oracle_zero_amplitude(swm):
    assert rho61_timedomain_oracle(swm, mhz(1.0), 0.0) == 0


@pytest.mark.parametrize("f", [0.3, 1.0, 3.0])
def test_oracle_matches_linear_response(swm, f):
    w = mhz(f)
    a = 1e-3 * swm.rabi("RF")
    td = rho61_timedomain_oracle(swm, w, a) / a
    lr = LinearizedModel(swm)(w)
    assert abs(td - lr) / abs(lr) < 0.01


def test_oracle_doubling(swm):
    w = mhz(1.0)
    a = 1e-3 * swm.rabi("RF")
    one = rho61_timedomain_oracle(swm, w, a)
    two = rho61_timedomain_oracle(swm, w, 2 * a)
    assert abs(two / one - 2) < 0.005 * 2


def test_oracle_needs_positive_frequency(swm):
    with pytest.raises(ValueError):
        rho61_timedomain_oracle(swm, 0.0, 1.0)


def test_dc_gain_single_peaked_in_aux(swm):
    # rising while Omega_A feeds the slow dressed mode, then falling with broadening
    a = mhz(np.linspace(0.5, 12, 24))
    h = np.array([abs(LinearizedModel(swm.with_drive("A", rabi=x))(0.0)) for x in a])
    k = int(np.argmax(h))
    assert 0 < k < len(h) - 1
    assert np.all(np.diff(h[: k + 1]) > 0) and np.all(np.diff(h[k:]) < 0)
