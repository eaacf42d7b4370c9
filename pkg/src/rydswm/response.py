"""RF-to-coherence frequency response.

Four routes to the same quantity, kept separate so they can be checked
against each other:

``closed-form``
    The cascaded weak-probe product formula, with D2..D4 frozen at w = 0.
``linearized``
    The same cascade solved as a 5 x 5 linear system at each w, keeping the
    w dependence of every D_j (``flatten=True`` freezes D2..D4 again, which
    makes it algebraically identical to the closed form).
``liouvillian``
    First-order response of the full 36-dimensional master equation around
    its RF-free steady state.
time domain
    :func:`rho61_timedomain_oracle` integrates the driven master equation and
    lock-in demodulates the result.

Sign convention: the cascade uses D_j = gamma_j1 + i (Delta_j + w); in the
Liouvillian the coherence rho_j1 relaxes as gamma_j1 - i Delta_j. Both agree
at zero detuning, which is where they are compared.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .atomic import build_dissipators, build_hamiltonian, rf_perturbation
from .errors import ConvergenceError, SingularityError
from .liouville import (
    build_liouvillian,
    commutator_superop,
    linear_response,
    steady_state,
    vec,
    vec_index,
)

log = logging.getLogger(__name__)

METHODS = ("closed-form", "linearized", "liouvillian")


@dataclass(frozen=True)
class CoherenceResponse:
    """Sampled coherences rho_j1(w) for j = 2..n."""

    omega: np.ndarray
    coherences: dict
    method: str

    def __post_init__(self):
        om = np.atleast_1d(np.asarray(self.omega, dtype=float))
        if om.size > 1 and np.any(np.diff(om) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        object.__setattr__(self, "omega", om)
        for j, v in self.coherences.items():
            if not np.all(np.isfinite(v)):
                raise SingularityError(f"non-finite rho{j}1 in {self.method} response")

    def __getitem__(self, j):
        return self.coherences[j]

    @property
    def rho61(self):
        return self.coherences[max(self.coherences)]


def _d(system, j, omega):
    return system.complex_detuning(j, omega)


def rho61_closed_form(system, omega=0.0):
    """Weak-probe product formula for rho61(w); vectorised over ``omega``."""
    om = np.asarray(omega, dtype=float)
    pre = (0.5j) ** 5 * system.rabi("P") * system.rabi("C") * system.rabi("LO")
    d234 = _d(system, 2, 0.0) * _d(system, 3, 0.0) * _d(system, 4, 0.0)
    oa = system.rabi("A")
    den = _d(system, 5, om) * _d(system, 6, om) + abs(oa) ** 2 / 4.0
    if d234 == 0 or np.any(den == 0):
        raise SingularityError("closed-form rho61 denominator vanishes")
    return pre / d234 * np.conj(oa) * system.rabi("RF") / den


def _chain_matrix(system, omega, flatten):
    """Cascade coefficients: M x = b for x = (rho21, ..., rho61)."""
    h = 0.5j
    d = {j: _d(system, j, 0.0 if (flatten and j <= 4) else omega) for j in range(2, 7)}
    m = np.zeros((5, 5), dtype=complex)
    m[0, 0] = d[2]
    m[1, 0], m[1, 1] = -h * system.rabi("C"), d[3]
    m[2, 1], m[2, 2] = -h * system.rabi("LO"), d[4]
    m[3, 2], m[3, 3], m[3, 4] = -h * system.rabi("RF"), d[5], -h * system.rabi("A")
    m[4, 3], m[4, 4] = -h * np.conj(system.rabi("A")), d[6]
    b = np.zeros(5, dtype=complex)
    b[0] = h * system.rabi("P")
    return m, b


def rho61_linearized(system, omega=0.0, flatten=False) -> CoherenceResponse:
    """Solve the weak-probe cascade for rho21..rho61 at each frequency."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty((om.size, 5), dtype=complex)
    for k, w in enumerate(om):
        m, b = _chain_matrix(system, w, flatten)
        try:
            out[k] = linalg.solve(m, b)
        except linalg.LinAlgError as exc:
            raise SingularityError(f"cascade singular at w = {w:.6g} rad/s") from exc
    return CoherenceResponse(om, {j: out[:, j - 2] for j in range(2, 7)}, "linearized")


class LinearizedModel:
    """Operators of the master equation linearized in Omega_RF.

    Holds the static generator L0 (RF Rabi frequency fixed at ``rf_bias``),
    the superoperator L1 = d L / d Omega_RF and the steady state rho0, so a
    frequency grid can be evaluated without rebuilding them.
    """

    def __init__(self, system, rf_bias=0.0, readout=None):
        self.system = system
        self.n = system.n_levels
        self.readout = readout or system.readout
        self.channels = build_dissipators(system)
        self.l0 = build_liouvillian(build_hamiltonian(system, rf=rf_bias), self.channels)
        self.l1 = commutator_superop(rf_perturbation(system))
        self.rho0 = steady_state(self.l0)
        self.rf_bias = rf_bias

    def __call__(self, omega, readout=None):
        return linear_response(self.l0, self.l1, self.rho0, omega, readout or self.readout)

    def coherences(self, omega) -> CoherenceResponse:
        om = np.atleast_1d(np.asarray(omega, dtype=float))
        full = np.atleast_2d(linear_response(self.l0, self.l1, self.rho0, om))
        co = {j: full[:, vec_index(j, 1, self.n)] for j in range(2, self.n + 1)}
        return CoherenceResponse(om, co, "liouvillian")


def liouvillian_response(system, omega=0.0, rf_bias=0.0, readout=None):
    """d rho_readout / d Omega_RF at frequency ``omega`` from the full master equation."""
    return LinearizedModel(system, rf_bias, readout)(omega)


def transfer_H(system, omega=0.0, method="closed-form", rf_bias=0.0):
    """rho61(w) / Omega_RF by the chosen route.

    ``closed-form`` and ``linearized`` are linear in Omega_RF and are divided
    by the configured value; ``liouvillian`` is the derivative itself.
    """
    if method == "liouvillian":
        return liouvillian_response(system, omega, rf_bias)
    orf = system.rabi("RF")
    if orf == 0:
        raise ValueError("transfer_H needs a nonzero RF Rabi frequency for normalisation")
    if method == "closed-form":
        return rho61_closed_form(system, omega) / orf
    if method == "linearized":
        r = rho61_linearized(system, omega).rho61 / orf
        return r[0] if np.ndim(omega) == 0 else r
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def transfer_function(system, method="liouvillian", rf_bias=0.0):
    """Callable w -> H(w) with any per-system setup done once."""
    if method == "liouvillian":
        return LinearizedModel(system, rf_bias)
    return lambda w: transfer_H(system, w, method)


# --------------------------------------------------------------------------
# time domain
# --------------------------------------------------------------------------


def _slowest_rate(l0):
    ev = np.linalg.eigvals(l0)
    re = -ev.real
    re = re[re > 1e-9 * np.max(np.abs(ev))]
    return float(re.min()), float(np.max(np.abs(ev)))


class _PeriodPropagator:
    """RK4 over one drive period of ``y' = (L0 + f(t) L1) y``.

    Because the step divides the period exactly, each RK4 step matrix S_n is
    the same in every period. One pass builds the period map U and, for each
    demodulation frequency, the row ``w_q`` such that the period-averaged
    demodulated readout starting from state y is ``w_q @ y``.
    """

    def __init__(self, l0, l1, drive, period, steps, idx, demod):
        dim = l0.shape[0]
        eye = np.eye(dim, dtype=complex)
        h = period / steps
        p = eye.copy()
        w = np.zeros((len(demod), dim), dtype=complex)
        for n in range(steps):
            t = n * h
            w += np.exp(-1j * demod * t)[:, None] * p[idx, :]
            a1 = l0 + drive(t) * l1
            a2 = l0 + drive(t + 0.5 * h) * l1
            a4 = l0 + drive(t + h) * l1
            k1 = a1
            k2 = a2 @ (eye + 0.5 * h * k1)
            k3 = a2 @ (eye + 0.5 * h * k2)
            k4 = a4 @ (eye + h * k3)
            s = eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            p = s @ p
        self.u = p
        self.w = w / steps


def timedomain_tones(system, base, tone_multiples, amplitude, demod_multiples,
                     readout=None, rf_bias=0.0, window_periods=20, max_windows=12,
                     settle_tau=10.0, step_factor=50.0, drift_tol=1e-3):
    """Integrate under ``Omega_RF(t) = rf_bias + amplitude * sum_k cos(n_k base t)``.

    Returns complex amplitudes ``2 <rho_readout(t) exp(-i m base t)>`` for each
    ``m`` in ``demod_multiples``, averaged over ``window_periods`` periods of
    ``2 pi / base`` after ``settle_tau`` slowest decay times.

    Raises
    ------
    ConvergenceError
        If consecutive windows differ by more than ``drift_tol`` (relative)
        after ``max_windows`` attempts.
    """
    demod = np.asarray(demod_multiples, dtype=float) * base
    if amplitude == 0:
        return np.zeros(len(demod), dtype=complex)
    if not base > 0:
        raise ValueError("time-domain oracle needs w > 0")
    readout = readout or system.readout
    n = system.n_levels
    channels = build_dissipators(system)
    l0 = build_liouvillian(build_hamiltonian(system, rf=rf_bias), channels)
    l1 = commutator_superop(rf_perturbation(system))
    rho0 = steady_state(l0)
    mult = np.asarray(tone_multiples, dtype=float)

    def drive(t):
        return amplitude * np.sum(np.cos(mult * base * t))

    slow, fast = _slowest_rate(l0)
    rate_max = fast + abs(amplitude) * len(mult) * np.linalg.norm(l1, 2)
    period = 2 * np.pi / base
    steps = max(16, int(math.ceil(period * step_factor * rate_max)))
    prop = _PeriodPropagator(l0, l1, drive, period, steps, vec_index(*readout, n), demod)

    settle = int(math.ceil(settle_tau / slow / period))
    y = np.linalg.matrix_power(prop.u, settle) @ vec(rho0)
    prev = None
    for _ in range(max_windows):
        acc = np.zeros_like(demod, dtype=complex)
        for _k in range(window_periods):
            acc += prop.w @ y
            y = prop.u @ y
        cur = 2.0 * acc / window_periods
        if prev is not None:
            scale = max(np.max(np.abs(cur)), 1e-300)
            if np.max(np.abs(cur - prev)) / scale <= drift_tol:
                return cur
        prev = cur
    raise ConvergenceError(
        f"lock-in amplitude still drifting after {max_windows} windows at base w = {base:.6g} rad/s")


def rho61_timedomain_oracle(system, omega, amplitude, **kw):
    """First-harmonic complex amplitude of rho61 under ``Omega_RF = a cos(w t)``.

    Dividing by ``amplitude`` gives the small-signal transfer at ``omega``
    in the limit of weak drive.
    """
    return timedomain_tones(system, omega, [1], amplitude, [1], **kw)[0]


def steady_coherence(system, readout=None, rf=None):
    """Readout coherence of the full nonlinear steady state (RF held static)."""
    readout = readout or system.readout
    lv = build_liouvillian(build_hamiltonian(system, rf=rf), build_dissipators(system))
    rho = steady_state(lv, check_degeneracy=False)
    return rho[readout[0] - 1, readout[1] - 1]


def probe_spectrum(system, detunings, method="steady-state", readout=None):
    """Readout coherence versus probe detuning Delta_P (rad/s).

    ``steady-state`` solves the full master equation with the configured
    static RF drive; ``closed-form`` evaluates the weak-probe product formula
    at w = 0.
    """
    dets = np.asarray(detunings, dtype=float)
    out = np.empty(dets.shape, dtype=complex)
    for k, d in enumerate(dets):
        s = system.with_drive("P", detuning=float(d))
        if method == "steady-state":
            out[k] = steady_coherence(s, readout)
        elif method == "closed-form":
            out[k] = rho61_closed_form(s, 0.0)
        else:
            raise ValueError(f"unknown spectrum method {method!r}")
    return out
