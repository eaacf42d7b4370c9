"""Weak-nonlinearity figures: H1/H3 extraction, P1dB, IIP3 and IMD3.

Throughout, the fundamental of the readout coherence under a single tone of
Rabi amplitude ``a`` is modelled as ``H1 a + (3/4) H3 a^3``, i.e. H1 and H3
are the coefficients of a memoryless cubic ``y = H1 x + H3 x^3`` seen
through one harmonic.

At w = 0 the "fundamental" comes from the quasi-static map: the nonlinear
steady state is solved on a grid of phases of ``a cos(theta)`` and the first
Fourier coefficient is taken. At w > 0 it is the lock-in output of the
time-domain integrator.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DegenerateResponseError, NonCompressiveError, SeriesInvalidError, SeriesWarning
from ..units import TWO_PI

log = logging.getLogger(__name__)

P1DB_FACTOR = (4.0 / 3.0) * (10.0 ** (-1.0 / 20.0) - 1.0)  # negative, = -0.14500...


@dataclass(frozen=True)
class CubicFit:
    h1: complex
    h3: complex
    residual: float  # ||y - fit|| / ||y||
    amplitudes: np.ndarray
    values: np.ndarray

    @property
    def cubic_fraction(self):
        """|3/4 H3 a^2 / H1| at the largest fitted amplitude."""
        a = float(np.max(np.abs(self.amplitudes)))
        return abs(0.75 * self.h3 * a * a / self.h1)


def fit_odd_cubic(amplitudes, values, max_residual=0.01) -> CubicFit:
    """Least-squares fit of ``values = H1 a + 3/4 H3 a^3``.

    Raises
    ------
    SeriesInvalidError
        If the relative residual exceeds ``max_residual``.
    DegenerateResponseError
        If every value is zero.
    """
    a = np.asarray(amplitudes, dtype=float)
    y = np.asarray(values, dtype=complex)
    if a.size < 2:
        raise ValueError("need at least two amplitudes")
    design = np.column_stack([a, 0.75 * a ** 3]).astype(complex)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    norm = np.linalg.norm(y)
    if norm == 0:
        raise DegenerateResponseError("zero transduction: response is identically zero")
    res = float(np.linalg.norm(y - design @ coef) / norm)
    if res > max_residual:
        raise SeriesInvalidError(f"cubic fit residual {res:.3%} exceeds {max_residual:.0%}; amplitude range too large")
    return CubicFit(complex(coef[0]), complex(coef[1]), res, a, y)


class QuasiStaticMap:
    """Nonlinear steady-state readout as a function of a static RF Rabi frequency."""

    def __init__(self, system, readout=None):
        from ..response import LinearizedModel
        from ..liouville import steady_state, vec_index

        self._ss = steady_state
        m = LinearizedModel(system, 0.0, readout)
        self.l0, self.l1 = m.l0, m.l1
        self.index = vec_index(*m.readout, m.n)
        self.n = m.n
        self.offset = m.rho0.reshape(-1, order="F")[self.index]

    def __call__(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(xs.shape, dtype=complex)
        for k, v in np.ndenumerate(xs):
            rho = self._ss(self.l0 + v * self.l1, check_degeneracy=False)
            out[k] = rho.reshape(-1, order="F")[self.index]
        return out if np.ndim(x) else out[0]

    def fundamental(self, amplitudes, phases=32):
        """First harmonic ``2 <f(a cos theta) cos theta>`` for each amplitude."""
        th = TWO_PI * np.arange(phases) / phases
        a = np.atleast_1d(np.asarray(amplitudes, dtype=float))
        # f(a cos theta) only depends on cos theta: solve the distinct half
        half = th[: phases // 2 + 1]
        out = np.empty(a.shape, dtype=complex)
        for k, amp in enumerate(a):
            vals = self(amp * np.cos(half))
            full = np.concatenate([vals, vals[1:-1][::-1]])
            out[k] = 2.0 * np.mean(full * np.cos(th))
        return out

    def two_tone(self, amplitude, grid=32):
        """2-D Fourier coefficients of ``f(a (cos th1 + cos th2))``, indexed ``[m1, m2]``."""
        th = TWO_PI * np.arange(grid) / grid
        c = np.cos(th)
        vals = self(amplitude * (c[:, None] + c[None, :]))
        return np.fft.fft2(vals) / grid ** 2


def _auto_range(fund, start, target=0.03, lo=0.01, hi=0.10, k=8, max_iter=10, max_residual=0.01):
    """Pick the largest amplitude so the cubic term is ``target`` of the fundamental."""
    top = float(start)
    fit = None
    for _ in range(max_iter):
        amps = np.linspace(top / k, top, k)
        try:
            fit = fit_odd_cubic(amps, fund(amps), max_residual=max_residual)
        except SeriesInvalidError:
            top *= 0.3
            continue
        frac = fit.cubic_fraction
        if lo <= frac <= hi:
            return fit
        if frac == 0:
            top *= 10.0
        else:
            top *= float(np.clip(np.sqrt(target / frac), 0.1, 10.0))
    if fit is None:
        raise SeriesInvalidError("no amplitude range gave a valid cubic fit")
    msg = f"cubic fraction {fit.cubic_fraction:.3g} outside [{lo}, {hi}] after auto-ranging"
    log.debug(msg)
    warnings.warn(msg, SeriesWarning, stacklevel=3)
    return fit


def extract_h1_h3(system, omega=0.0, amplitudes=None, readout=None, fundamental=None, **kw) -> CubicFit:
    """H1 and H3 of the readout coherence at drive frequency ``omega``.

    Parameters
    ----------
    amplitudes : array, optional
        RF Rabi amplitudes (rad/s) to fit over. Auto-selected when omitted.
    fundamental : callable, optional
        Override the map ``amplitudes -> first-harmonic values`` (testing).
    """
    if fundamental is None:
        if omega == 0:
            qs = QuasiStaticMap(system, readout)
            fundamental = qs.fundamental
        else:
            from ..response import timedomain_tones

            def fundamental(amps):
                return np.array([timedomain_tones(system, omega, [1], a, [1], readout=readout)[0] for a in amps])

    if amplitudes is not None:
        return fit_odd_cubic(amplitudes, fundamental(np.asarray(amplitudes, dtype=float)), **kw)
    start = abs(system.rabi("RF")) or TWO_PI * 1e6
    if omega != 0:
        # the quasi-static fit is a cheap, good guess for the range
        guess = _auto_range(QuasiStaticMap(system, readout).fundamental, start)
        start = float(np.max(guess.amplitudes))
        return _auto_range(fundamental, start, k=6)
    return _auto_range(fundamental, start)


def alpha(h1, h3):
    if h1 == 0:
        raise DegenerateResponseError("H1 = 0")
    return float(np.real(h3 / h1))


def p1db(alpha_value):
    """1-dB compression amplitude (rad/s) of the cubic model."""
    if not alpha_value < 0:
        raise NonCompressiveError(f"alpha = {alpha_value:.4g} >= 0: no 1-dB compression point")
    return float(np.sqrt(P1DB_FACTOR / alpha_value))


def iip3(h1, h3):
    """Input third-order intercept amplitude (rad/s); ``inf`` when H3 = 0."""
    if h3 == 0:
        log.info("H3 = 0: IIP3 is infinite")
        return float("inf")
    return float(np.sqrt((4.0 / 3.0) * abs(h1 / h3)))


def imd3_dbc(h1, h3, omega_rf):
    """Third-order intermodulation relative to the carrier (dBc)."""
    if h1 == 0:
        raise DegenerateResponseError("H1 = 0: IMD3 undefined")
    return 20.0 * np.log10(np.abs(0.75 * (h3 / h1) * np.asarray(omega_rf, dtype=float) ** 2))


@dataclass(frozen=True)
class ToneSlopes:
    amplitudes: np.ndarray
    fundamental: np.ndarray  # |tone at w1|
    imd3: np.ndarray  # |tone at 2 w1 - w2|
    slope_fundamental: float
    slope_imd3: float


def _loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def tone_slopes(system, amplitudes, readout=None, grid=32) -> ToneSlopes:
    """Quasi-static two-tone test: fundamental and IMD3 tone vs per-tone amplitude."""
    qs = QuasiStaticMap(system, readout)
    a = np.asarray(amplitudes, dtype=float)
    fund, imd = [], []
    for amp in a:
        c = qs.two_tone(amp, grid)
        # a real tone cos(th) carries half its amplitude in each sign of frequency
        fund.append(2 * abs(c[1, 0]))
        imd.append(2 * abs(c[2, -1]))
    fund, imd = np.array(fund), np.array(imd)
    return ToneSlopes(a, fund, imd, _loglog_slope(a, fund), _loglog_slope(a, imd))


def two_tone_imd3_timedomain(system, omega_center, spacing, amplitude, readout=None, **kw):
    """IMD3 (dBc) from a two-tone time-domain run.

    Tones sit at ``n1 * spacing`` and ``(n1 + 1) * spacing`` with ``n1`` the
    integer closest to ``omega_center / spacing``; the IMD3 product sits at
    ``(n1 - 1) * spacing``.
    """
    from ..response import timedomain_tones

    n1 = max(2, int(round(omega_center / spacing)))
    out = timedomain_tones(system, spacing, [n1, n1 + 1], amplitude, [n1, n1 - 1], readout=readout, **kw)
    return float(20.0 * np.log10(abs(out[1]) / abs(out[0])))


@dataclass(frozen=True)
class LinearityReport:
    omega: float
    h1: complex
    h3: complex
    alpha: float
    omega_p1db: Optional[float]
    omega_iip3: float
    imd3_amplitudes: np.ndarray
    imd3_dbc: np.ndarray
    fit_residual: float
    note: str = ""

    @property
    def p1db_over_2pi_mhz(self):
        return None if self.omega_p1db is None else self.omega_p1db / TWO_PI / 1e6

    @property
    def iip3_over_2pi_mhz(self):
        return self.omega_iip3 / TWO_PI / 1e6


def linearity_report(system, omega=0.0, imd3_amplitudes=None, readout=None, fit=None) -> LinearityReport:
    """H1/H3 fit plus the P1dB, IIP3 and IMD3 figures derived from it."""
    fit = fit or extract_h1_h3(system, omega, readout=readout)
    a = alpha(fit.h1, fit.h3)
    note = ""
    try:
        pdb = p1db(a)
    except NonCompressiveError as exc:
        pdb, note = None, str(exc)
    ip = iip3(fit.h1, fit.h3)
    if imd3_amplitudes is None:
        top = np.max(fit.amplitudes)
        imd3_amplitudes = np.geomspace(top / 10, top, 9)
    amps = np.asarray(imd3_amplitudes, dtype=float)
    return LinearityReport(float(omega), fit.h1, fit.h3, a, pdb, ip, amps,
                           imd3_dbc(fit.h1, fit.h3, amps), fit.residual, note)
