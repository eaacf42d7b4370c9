"""Row builders behind the CLI subcommands.

Each function takes a :class:`~rydswm.config.Config` and a scheme name and
returns :class:`~rydswm.sweep.ReportRow` objects or plain column dicts, so
the same code serves single runs and sweeps.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import ConfigError, DegenerateResponseError, NumericalError
from .metrics import (
    bandwidth_closed_form,
    bandwidth_numeric,
    linearity_report,
    nef_budget,
    pole_analysis,
    resolve_noise_params,
    spectrum_fwhm,
)
from .response import LinearizedModel, probe_spectrum, transfer_function
from .sweep import ReportRow
from .units import TWO_PI, mhz

RF_PATH = "fields.RF.rabi_over_2pi_mhz"


def _rf_bias(system, mode):
    return system.rabi("RF").real if mode == "config" else 0.0


def model_for(cfg, scheme, method="liouvillian", rf_bias="zero"):
    s = cfg.system(scheme)
    if method == "liouvillian" or scheme == "eit4":
        readout = None
        if scheme == "eit4" and cfg.scheme == "eit4":
            from .eit import READOUTS

            readout = READOUTS[cfg.readout]
        return s, LinearizedModel(s, _rf_bias(s, rf_bias), readout)
    return s, transfer_function(s, method)


def bandwidth_row(cfg, scheme, method="liouvillian", rf_bias="zero") -> ReportRow:
    s, h = model_for(cfg, scheme, method, rf_bias)
    row = ReportRow(scheme=scheme)
    h0 = abs(h(0.0))
    row.h0_abs = h0
    if s.n_levels == 6:
        p = pole_analysis(s.gamma(5), s.gamma(6), s.rabi("A"))
        row.regime = p.regime
        c = bandwidth_closed_form(p)
        row.f3db_closed_hz, row.closed_valid = c.f3db, str(c.valid).lower()
    if h0 == 0:
        row.reason = "zero transduction"
        return row
    bw = bandwidth_numeric(h)
    row.f3db_numeric_hz, row.resonant = bw.f3db, str(bw.resonant).lower()
    return row


def linearity_row(cfg, scheme, **_) -> ReportRow:
    s = cfg.system(scheme)
    row = ReportRow(scheme=scheme)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = linearity_report(s)
    row.h0_abs = abs(rep.h1)
    row.p1db_rad_s = rep.omega_p1db
    row.p1db_over_2pi_mhz = rep.p1db_over_2pi_mhz
    row.iip3_rad_s = rep.omega_iip3
    row.iip3_over_2pi_mhz = rep.iip3_over_2pi_mhz
    row.reason = rep.note
    return row


def nef_row(cfg, scheme, omega=0.0, **_) -> ReportRow:
    row = ReportRow(scheme=scheme)
    if scheme != "swm6":
        row.reason = "no optical chain model for this scheme"
        return row
    s = cfg.system(scheme)
    chain = cfg.chain()
    try:
        bw = bandwidth_numeric(LinearizedModel(s)).f3db
    except DegenerateResponseError:
        row.reason = "zero transduction"
        return row
    params = resolve_noise_params(cfg.noise(), s, chain, cfg.cloud(), bandwidth=bw)
    b = nef_budget(params, s, chain, omega)
    row.nef_ex, row.nef_qpn, row.nef_psn, row.nef_rin, row.nef_tn = b.ex, b.qpn, b.psn, b.rin, b.tn
    row.nef_tot = b.total
    row.f3db_numeric_hz = bw
    return row


def tradeoff_row(cfg, scheme, **kw) -> ReportRow:
    row = bandwidth_row(cfg, scheme)
    for part in (linearity_row, nef_row):
        try:
            other = part(cfg, scheme)
        except NumericalError as exc:
            row.reason = (row.reason + "; " if row.reason else "") + f"{part.__name__}: {exc}"
            continue
        for name in ReportRow.columns():
            v = getattr(other, name)
            if name.startswith(("p1db", "iip3", "nef")) and v is not None:
                setattr(row, name, v)
        if other.reason and other.reason not in row.reason:
            row.reason = (row.reason + "; " if row.reason else "") + other.reason
    return row


def spectrum_samples(cfg, scheme, span_mhz=40.0, points=1601, method="steady-state"):
    s = cfg.system(scheme)
    det = mhz(np.linspace(-span_mhz, span_mhz, points))
    readout = None
    if scheme == "eit4" and cfg.scheme == "eit4":
        from .eit import READOUTS

        readout = READOUTS[cfg.readout]
    if scheme == "eit4" and method == "closed-form":
        raise ConfigError("closed-form spectrum exists only for swm6", key="system.scheme")
    return det, probe_spectrum(s, det, method, readout)


def spectrum_summary(cfg, scheme, **kw) -> dict:
    det, vals = spectrum_samples(cfg, scheme, **kw)
    amp = np.abs(vals)
    if not np.max(amp) > 0:
        return {"scheme": scheme, "fwhm_over_2pi_mhz": None, "multimodal": None, "peak_abs": 0.0,
                "reason": "zero transduction"}
    r = spectrum_fwhm(det, amp)
    return {"scheme": scheme, "fwhm_over_2pi_mhz": r.fwhm_hz / 1e6, "multimodal": str(r.multimodal).lower(),
            "peak_abs": float(amp.max()), "reason": ""}
