"""Pole structure and bandwidth of the two-pole coherence response."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..errors import NoCrossingError, WindowError, DegenerateResponseError
from ..units import TWO_PI

log = logging.getLogger(__name__)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class PoleAnalysis:
    lam_plus: complex
    lam_minus: complex
    regime: str  # overdamped | critical | underdamped

    @property
    def gamma_plus(self):
        return -self.lam_plus.real

    @property
    def gamma_minus(self):
        return -self.lam_minus.real


def complex_poles(a5, a6, omega_a):
    """Roots of ``(s + a5)(s + a6) + |Omega_A|^2 / 4`` with ``a_j = gamma_j1 + i Delta_j``.

    Returned ordered so that the first has the smaller decay rate.
    """
    root = np.sqrt(complex((a5 - a6) ** 2 - abs(omega_a) ** 2))
    s1 = -(a5 + a6) / 2 + root / 2
    s2 = -(a5 + a6) / 2 - root / 2
    return (s1, s2) if -s1.real <= -s2.real else (s2, s1)


def pole_analysis(gamma51, gamma61, omega_a, rtol=1e-12) -> PoleAnalysis:
    """Poles of the dressed 5-6 coherence pair at zero detuning.

    ``lam_+`` takes the plus sign of the principal square root, so in the
    overdamped case it is the slow pole.
    """
    if gamma51 < 0 or gamma61 < 0:
        raise ValueError("decay rates must be >= 0")
    disc = (gamma51 - gamma61) ** 2 - abs(omega_a) ** 2
    root = np.sqrt(complex(disc))
    lp = -(gamma51 + gamma61) / 2 + root / 2
    lm = -(gamma51 + gamma61) / 2 - root / 2
    scale = max((gamma51 - gamma61) ** 2, abs(omega_a) ** 2, 1e-300)
    if abs(disc) <= rtol * scale:
        regime = "critical"
    elif disc > 0:
        regime = "overdamped"
    else:
        regime = "underdamped"
    return PoleAnalysis(complex(lp), complex(lm), regime)


@dataclass(frozen=True)
class ClosedFormBandwidth:
    f3db: float  # Hz
    valid: bool
    note: str = ""


def bandwidth_closed_form(poles: PoleAnalysis) -> ClosedFormBandwidth:
    """3-dB point of ``1 / ((1 + i w / g+)(1 + i w / g-))``.

    Only the real parts of the poles enter, so the result describes the
    actual response only when the poles are real.
    """
    gp, gm = poles.gamma_plus, poles.gamma_minus
    if not (gp > 0 and gm > 0):
        raise DegenerateResponseError("closed-form bandwidth needs both decay rates > 0")
    s = gp * gp + gm * gm
    w2 = 0.5 * (-s + np.sqrt(s * s + 4.0 * gp * gp * gm * gm))
    valid = poles.regime in ("overdamped", "critical")
    note = "" if valid else "underdamped poles: product form ignores Im(lambda)"
    return ClosedFormBandwidth(float(np.sqrt(w2) / TWO_PI), valid, note)


@dataclass(frozen=True)
class NumericBandwidth:
    f3db: float  # Hz
    resonant: bool
    peak_ratio: float  # max |H| / |H(0)| found before the crossing

    @property
    def omega3db(self):
        return TWO_PI * self.f3db


def bandwidth_numeric(h, h0=None, omega_min=TWO_PI * 10.0, ceiling=TWO_PI * 1e9,
                      points_per_decade=40, rtol=1e-6) -> NumericBandwidth:
    """First frequency where ``|H(w)|`` drops below ``|H(0)| / sqrt 2``.

    Parameters
    ----------
    h : callable or (omega, values)
        Either an evaluator ``w -> H(w)`` or sampled data on an increasing
        grid (rad/s). Samples are searched with linear interpolation; the
        first sample serves as H(0) unless ``h0`` is given.
    ceiling : float
        Upper end of the geometric scan (rad/s).

    Returns
    -------
    NumericBandwidth
        ``resonant`` is set when |H| exceeded |H(0)| before the crossing.
    """
    if callable(h):
        ref = abs(h(0.0)) if h0 is None else abs(h0)
        if not ref > 0:
            raise DegenerateResponseError("|H(0)| = 0: no bandwidth to measure")
        n = int(np.ceil(np.log10(ceiling / omega_min) * points_per_decade)) + 1
        grid = np.geomspace(omega_min, ceiling, n)
        thr = ref * INV_SQRT2
        peak = 1.0
        prev = 0.0
        for w in grid:
            v = abs(h(w))
            if v < thr:
                g = lambda x: abs(h(x)) - thr
                root = optimize.brentq(g, prev, w, xtol=1e-300, rtol=max(rtol * 1e-3, 4e-16), maxiter=200)
                return NumericBandwidth(root / TWO_PI, peak > 1.0 + 1e-9, peak)
            peak = max(peak, v / ref)
            prev = w
        raise NoCrossingError(f"|H| stays above -3 dB up to {ceiling / TWO_PI:.4g} Hz")
    omega, values = (np.asarray(a) for a in h)
    mag = np.abs(values)
    ref = mag[0] if h0 is None else abs(h0)
    if not ref > 0:
        raise DegenerateResponseError("|H(0)| = 0: no bandwidth to measure")
    thr = ref * INV_SQRT2
    below = np.nonzero(mag < thr)[0]
    if below.size == 0 or below[0] == 0:
        raise NoCrossingError("no -3 dB crossing inside the sampled grid")
    i = below[0]
    frac = (mag[i - 1] - thr) / (mag[i - 1] - mag[i])
    w = omega[i - 1] + frac * (omega[i] - omega[i - 1])
    peak = float(mag[:i].max() / ref)
    return NumericBandwidth(float(w / TWO_PI), peak > 1.0 + 1e-9, peak)


@dataclass(frozen=True)
class BandwidthReport:
    f3db_closed: float
    f3db_numeric: float
    regime: str
    closed_valid: bool
    resonant: bool
    note: str = ""


def bandwidth_report(system, method="liouvillian", **kw) -> BandwidthReport:
    """Closed-form and numeric bandwidth for one configured system.

    The numeric value uses the chosen transfer route; for underdamped poles it
    is the one to trust.
    """
    from ..response import transfer_function

    poles = pole_analysis(system.gamma(5), system.gamma(6), system.rabi("A")) if system.n_levels == 6 else None
    num = bandwidth_numeric(transfer_function(system, method), **kw)
    if poles is None:
        return BandwidthReport(float("nan"), num.f3db, "n/a", False, num.resonant, "no closed form for this scheme")
    closed = bandwidth_closed_form(poles)
    return BandwidthReport(closed.f3db, num.f3db, poles.regime, closed.valid, num.resonant, closed.note)


@dataclass(frozen=True)
class FWHMReport:
    fwhm: float  # same units as the input abscissa
    center: float
    multimodal: bool
    n_regions: int

    @property
    def fwhm_hz(self):
        """Width in Hz when the abscissa was angular frequency."""
        return self.fwhm / TWO_PI


def spectrum_fwhm(x, amplitude) -> FWHMReport:
    """Full width at ``1/sqrt 2`` of the peak amplitude, outermost crossings.

    Raises
    ------
    WindowError
        If the spectrum is still above the threshold at either edge.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(np.asarray(amplitude))
    k = int(np.argmax(a))
    thr = a[k] * INV_SQRT2
    above = a >= thr
    if above[0] or above[-1]:
        raise WindowError("half-amplitude crossings not bracketed by the window")
    idx = np.nonzero(above)[0]
    i0, i1 = idx[0], idx[-1]
    xl = x[i0 - 1] + (a[i0 - 1] - thr) / (a[i0 - 1] - a[i0]) * (x[i0] - x[i0 - 1])
    xr = x[i1] + (a[i1] - thr) / (a[i1] - a[i1 + 1]) * (x[i1 + 1] - x[i1])
    runs = int(np.sum(np.diff(above.astype(int)) == 1))
    return FWHMReport(float(xr - xl), float(x[k]), runs > 1, runs)
