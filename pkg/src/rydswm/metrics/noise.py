"""Noise-equivalent field (NEF) budget.

Five contributions are combined in quadrature: blackbody-driven external
field noise, quantum projection noise of the atoms, photon shot noise,
laser relative intensity noise and the thermal noise of the front end. The
last three arise in the readout and are referred back to the RF input
through the probe field and |G_opt|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigError
from ..units import C_LIGHT, E_CHARGE, EPS0, H_PLANCK, HBAR, K_B, TWO_PI, db_to_power

COMPONENTS = ("ex", "qpn", "psn", "rin", "tn")


def callen_welton(f, temperature):
    """Mean energy of a thermal mode including zero-point, ``(hf/2) coth(hf / 2kT)`` (J)."""
    x = H_PLANCK * np.asarray(f, dtype=float) / (2.0 * K_B * temperature)
    return H_PLANCK * np.asarray(f, dtype=float) / 2.0 / np.tanh(x)


@dataclass(frozen=True)
class NoiseParams:
    """Inputs of the budget that do not follow from the atomic model.

    Leaving a field as ``None`` selects its default, resolved by
    :func:`resolve_noise_params`.
    """

    temperature: float = 300.0  # K
    front_end: str = "lna"  # "tia" | "lna"
    noise_figure_db: float = 3.0
    s_rin: float = 1e-15  # 1/Hz
    bandwidth: Optional[float] = None  # Hz, default: numeric f3dB
    f_rf: Optional[float] = None  # Hz, default: RF carrier
    n_atoms: Optional[float] = None
    t2: Optional[float] = None  # s, default 1/gamma_51
    dipole_rf: Optional[float] = None  # C m, default mu_45
    p_opt: Optional[float] = None  # W, default DC optical power from E_P
    theta: Callable = callen_welton

    def __post_init__(self):
        if self.front_end not in ("tia", "lna"):
            raise ConfigError(f"front end must be 'tia' or 'lna', got {self.front_end!r}", key="noise.front_end")
        if not self.temperature > 0:
            raise ConfigError("temperature must be > 0", key="noise.temperature_k")
        if self.s_rin < 0:
            raise ConfigError("RIN must be >= 0", key="noise.s_rin_per_hz")

    @property
    def noise_factor(self):
        return db_to_power(self.noise_figure_db)


@dataclass(frozen=True)
class NoiseBudget:
    ex: float
    qpn: float
    psn: float
    rin: float
    tn: float
    params: NoiseParams

    @property
    def total_squared(self):
        return math.fsum(getattr(self, c) ** 2 for c in COMPONENTS)

    @property
    def total(self):
        return math.sqrt(self.total_squared)

    def as_dict(self):
        d = {c: getattr(self, c) for c in COMPONENTS}
        d["total"] = self.total
        return d


def default_atom_number(cloud, beam_label="P"):
    """N0 times a cylinder of the probe waist and the cloud's 1/e^2 length."""
    beam = cloud.beams.get(beam_label)
    if beam is None:
        raise ConfigError("atom number needs the probe waist", key="beams.P.waist_um")
    return cloud.peak_density * np.pi * beam.waist ** 2 * 2.0 * cloud.radius


def resolve_noise_params(params: NoiseParams, system, chain, cloud=None, bandwidth=None) -> NoiseParams:
    """Fill the ``None`` fields of ``params`` from the model."""
    upd = {}
    if params.f_rf is None:
        drv = system.drives.get("RF")
        if drv is None or drv.carrier is None:
            raise ConfigError("NEF needs the RF carrier frequency", key="fields.RF.carrier_ghz")
        upd["f_rf"] = drv.carrier / TWO_PI
    if params.t2 is None:
        g = system.gamma(5) if system.n_levels >= 5 else system.gamma(system.n_levels)
        if not g > 0:
            raise ConfigError("T2 default needs gamma51 > 0", key="noise.t2_s")
        upd["t2"] = 1.0 / g
    if params.dipole_rf is None:
        upd["dipole_rf"] = abs(system.dipole("45" if system.n_levels == 6 else "34"))
    if params.n_atoms is None:
        if cloud is None:
            raise ConfigError("NEF needs the atom number or a cloud description", key="noise.n_atoms")
        upd["n_atoms"] = default_atom_number(cloud)
    if params.bandwidth is None:
        if bandwidth is None:
            raise ConfigError("NEF needs a detection bandwidth", key="noise.bandwidth_hz")
        upd["bandwidth"] = bandwidth
    return replace(params, **upd) if upd else params


def nef_budget(params: NoiseParams, system, chain, omega=0.0, gain=None, e_p=None) -> NoiseBudget:
    """Input-referred NEF components (V/m/sqrt(Hz)) at baseband frequency ``omega``.

    ``params`` must be resolved (see :func:`resolve_noise_params`). ``gain``
    overrides |G_opt(omega)|, which is otherwise computed from the chain.
    """
    from ..transduction import field_amplitude, g_opt

    for name in ("f_rf", "t2", "dipole_rf", "n_atoms", "bandwidth"):
        if getattr(params, name) is None:
            raise ConfigError(f"noise parameter {name} is not set", key=f"noise.{name}")
    if e_p is None:
        e_p = abs(field_amplitude(system, "P"))
    g = abs(g_opt(system, chain, omega)) if gain is None else abs(gain)
    ex = math.sqrt(16.0 * math.pi * params.f_rf ** 2 / (3.0 * EPS0 * C_LIGHT ** 3)
                   * float(params.theta(params.f_rf, params.temperature)))
    qpn = HBAR / (params.dipole_rf * math.sqrt(params.n_atoms) * params.t2)
    i_dc = 0.5 * chain.kappa * chain.responsivity * e_p ** 2
    p_opt = params.p_opt if params.p_opt is not None else 0.5 * chain.kappa * e_p ** 2
    readout = chain.kappa * e_p * g
    if readout == 0:
        inf = float("inf")
        psn = rin = tn = inf
    else:
        psn = math.sqrt(2.0 * E_CHARGE * i_dc) / (chain.responsivity * readout)
        rin = p_opt * math.sqrt(params.s_rin) / readout
        if params.front_end == "tia":
            s_tn = 4.0 * K_B * params.temperature * params.bandwidth
        else:
            s_tn = params.noise_factor * K_B * params.temperature * params.bandwidth
        tn = math.sqrt(s_tn) / (chain.lna_gain * chain.responsivity * readout)
    return NoiseBudget(ex, qpn, psn, rin, tn, params)


def nef_spectrum(params, system, chain, omegas):
    """Frequency-resolved budget: one :class:`NoiseBudget` per baseband frequency."""
    return [nef_budget(params, system, chain, float(w)) for w in np.atleast_1d(omegas)]
