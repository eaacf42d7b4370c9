import numpy as np
import pytest
from scipy import stats

from rydswm import eit as eit_mod
from rydswm.eit import READOUTS, eit_metrics, eit_model, eit_transfer
from rydswm.metrics import bandwidth_numeric, linearity_report

from conftest import mhz

LO_SWEEP = np.geomspace(0.2, 10, 12)


def test_four_level_detunings(eit):
    s = eit.with_drive("LO", detuning=mhz(1.0)).with_drive("P", detuning=mhz(0.5))
    d = s.derived_detunings()
    assert d[2] == pytest.approx(mhz(0.5)) and d[4] == pytest.approx(mhz(1.5))


def test_rf_normalisation_free(eit):
    a = eit_transfer(eit, mhz(0.3))
    b = eit_transfer(eit.with_rf(mhz(0.01)), mhz(0.3))
    assert a == pytest.approx(b, rel=1e-12)


def test_probe_needed(eit):
    h = [abs(eit_transfer(eit.with_drive("P", rabi=eit.rabi("P") * k))) for k in (1e-2, 1e-4, 1e-6)]
    assert h[1] / h[0] == pytest.approx(1e-2, rel=1e-3)
    assert h[2] / h[0] == pytest.approx(1e-4, rel=1e-3)
    assert eit_transfer(eit.with_drive("P", rabi=0.0)) == 0


def test_readouts_available(eit):
    assert set(READOUTS) == {"rho41", "rho21"}
    assert abs(eit_transfer(eit, 0.0, "rho21")) > 0


def test_shares_metric_code(eit, monkeypatch):
    calls = []
    real_bw, real_lin = bandwidth_numeric, linearity_report
    monkeypatch.setattr(eit_mod, "bandwidth_numeric", lambda *a, **k: calls.append("bw") or real_bw(*a, **k))
    monkeypatch.setattr(eit_mod, "linearity_report", lambda *a, **k: calls.append("lin") or real_lin(*a, **k))
    m = eit_metrics(eit)
    assert calls == ["bw", "lin"]
    assert m.f3db == pytest.approx(bandwidth_numeric(eit_model(eit)).f3db)


def _lo_sweep(eit):
    out = []
    for lo in LO_SWEEP:
        m = eit_metrics(eit.with_drive("LO", rabi=mhz(lo)), linearity=False)
        out.append((m.f3db, abs(m.h0)))
    return np.array(out)


def test_dc_gain_falls_as_bandwidth_grows(eit):
    r = _lo_sweep(eit)
    rho, _ = stats.spearmanr(r[:, 0], r[:, 1])
    assert rho < -0.5


@pytest.mark.xfail(strict=True, reason="model f3dB rises about 7x from 0.2 to 1.7 MHz LO (decision ledger)")
def test_bandwidth_flat_at_low_lo(eit):
    r = _lo_sweep(eit)
    low = r[LO_SWEEP < 2.0, 0]
    assert np.max(low) / np.min(low) < 1.5
