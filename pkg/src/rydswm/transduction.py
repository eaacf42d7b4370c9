"""From the 6-1 coherence to generated light, photocurrent and output voltage.

Field amplitudes are taken at the cloud centre from the configured Rabi
frequencies, ``E_X = hbar Omega_X / mu_X``, using the dipole of the
transition each field drives.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy import integrate

from .errors import ConfigError, SingularityError
from .metrics.poles import complex_poles
from .units import C_LIGHT, EPS0, HBAR, TWO_PI, db_to_amplitude

log = logging.getLogger(__name__)

#: transition driven by each field, per scheme
FIELD_TRANSITIONS = {
    6: {"P": "12", "C": "23", "LO": "34", "RF": "45", "A": "56", "L": "61"},
    4: {"P": "12", "C": "23", "LO": "34", "RF": "34"},
}


@dataclass(frozen=True)
class Beam:
    waist: float  # 1/e^2 radius at focus (m)
    wavelength: float  # m

    @property
    def rayleigh_range(self):
        return np.pi * self.waist ** 2 / self.wavelength

    def amplitude(self, z):
        """On-axis field amplitude relative to the focus (Gouy phase dropped)."""
        return 1.0 / np.sqrt(1.0 + (np.asarray(z) / self.rayleigh_range) ** 2)


@dataclass(frozen=True)
class CloudAndBeams:
    """Axial atom density and the optical beams that overlap in it.

    ``profile`` is ``"gaussian"`` (``N0 exp(-2 z^2 / radius^2)``) or
    ``"uniform"`` (``N0`` on the whole window). Fields without a beam entry
    (LO, RF, and any optical field left out) are treated as plane waves.
    """

    peak_density: float  # m^-3
    radius: float  # m
    beams: Mapping[str, Beam] = field(default_factory=dict)
    profile: str = "gaussian"
    window: Optional[tuple] = None  # (z0, z1) in m

    def __post_init__(self):
        if not self.peak_density > 0:
            raise ConfigError("peak density must be > 0", key="cloud.peak_density_cm3")
        if not self.radius > 0:
            raise ConfigError("cloud radius must be > 0", key="cloud.radius_mm")
        if self.profile not in ("gaussian", "uniform"):
            raise ConfigError(f"unknown density profile {self.profile!r}", key="cloud.profile")
        for label, b in self.beams.items():
            if not (b.waist > 0 and b.wavelength > 0):
                raise ConfigError(f"beam {label}: waist and wavelength must be > 0", key=f"beams.{label}.waist_um")
        if self.window is not None:
            z0, z1 = self.window
            if not z1 > z0:
                raise ConfigError("integration window must have z1 > z0", key="cloud.window_mm")

    @property
    def z_window(self):
        if self.window is not None:
            return tuple(self.window)
        return (-4.0 * self.radius, 4.0 * self.radius)

    def density(self, z):
        z = np.asarray(z, dtype=float)
        if self.profile == "uniform":
            return np.full_like(z, self.peak_density)
        return self.peak_density * np.exp(-2.0 * z * z / self.radius ** 2)

    def overlap(self, z, labels=("P", "C", "LO", "A")):
        out = self.density(z) / self.peak_density
        for lab in labels:
            b = self.beams.get(lab)
            if b is not None:
                out = out * b.amplitude(z)
        return out


def effective_length(cloud: CloudAndBeams, labels=("P", "C", "LO", "A"), epsrel=1e-8) -> float:
    """Axial integral of the density and field-product overlap, normalised at z = 0 (m)."""
    z0, z1 = cloud.z_window
    f = lambda z: float(cloud.overlap(z, labels))
    edge = max(f(z0), f(z1))
    if edge > 1e-6 and cloud.profile != "uniform":
        msg = f"integration window too small: integrand is {edge:.2e} of peak at the edge"
        log.warning(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    pts = [0.0] if z0 < 0.0 < z1 else None
    val, _err = integrate.quad(f, z0, z1, epsabs=0.0, epsrel=epsrel, limit=400, points=pts)
    return float(val)


@dataclass(frozen=True)
class OpticalChainParams:
    """Detection chain downstream of the atoms.

    ``l_eff`` and ``density`` tie the chain to a cloud (see
    :func:`effective_length`); ``a_eff`` is the detector-side effective area.
    """

    omega_L: float  # generated-field angular frequency
    l_eff: float
    density: float
    a_eff: float
    n_L: float = 1.0
    responsivity: float = 0.55
    lna_gain_db: float = 20.0
    delta_omega: float = 0.0

    def __post_init__(self):
        for name in ("omega_L", "l_eff", "density", "a_eff", "n_L"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"optical chain parameter {name} must be > 0", key=f"chain.{name}")
        if self.responsivity < 0:
            raise ConfigError("responsivity must be >= 0", key="chain.responsivity_a_per_w")

    @property
    def kappa(self):
        """n_L eps0 c A_eff (W m^2 / V^2)."""
        return self.n_L * EPS0 * C_LIGHT * self.a_eff

    @property
    def lna_gain(self):
        return db_to_amplitude(self.lna_gain_db)


def field_amplitude(system, label):
    """Complex field amplitude (V/m) behind the configured Rabi frequency of ``label``."""
    tr = FIELD_TRANSITIONS[system.n_levels][label]
    return HBAR * system.rabi(label) / system.dipole(tr)


def optical_field_from_power(power, chain):
    """Field amplitude that carries ``power`` (W) through ``chain.a_eff``."""
    return np.sqrt(2.0 * power / chain.kappa)


def _den(system, omega):
    d234 = system.complex_detuning(2) * system.complex_detuning(3) * system.complex_detuning(4)
    d56 = system.complex_detuning(5, omega) * system.complex_detuning(6, omega) + abs(system.rabi("A")) ** 2 / 4
    if d234 == 0 or np.any(d56 == 0):
        raise SingularityError("susceptibility denominator vanishes")
    return d234, d56


def _dipole_product(system):
    prod = 1.0
    for tr in ("12", "23", "34", "45", "56", "61"):
        prod *= system.dipole(tr)
    return prod


def chi_eff5(system, omega=0.0, density=None):
    """Fifth-order effective susceptibility at frequency ``omega`` (SI, m^4/V^4)."""
    if density is None:
        raise ConfigError("chi_eff5 needs an atom density", key="cloud.peak_density_cm3")
    d234, d56 = _den(system, np.asarray(omega, dtype=float))
    return (0.5j) ** 5 * density / (EPS0 * HBAR ** 5) * _dipole_product(system) / (d234 * d56)


def _field_product(system):
    return (field_amplitude(system, "P") * field_amplitude(system, "C")
            * field_amplitude(system, "LO") * np.conj(field_amplitude(system, "A")))


def g_opt(system, chain: OpticalChainParams, omega=0.0):
    """E_L / E_RF: RF-to-optical field transfer (dimensionless)."""
    pre = 1j * chain.omega_L * chain.l_eff / (2.0 * chain.n_L * C_LIGHT)
    return pre * chi_eff5(system, omega, chain.density) * _field_product(system)


def generated_field(system, chain, omega, e_rf):
    return g_opt(system, chain, omega) * e_rf


def impulse_response(system, chain: OpticalChainParams, t):
    """g_opt(t) with ``G_opt(w) = int g_opt(t) exp(-i w t) dt`` (1/s).

    The prefactor carries the w-independent part of the susceptibility and
    L_eff. The exponents are the two poles of the dressed 5-6 pair, which
    reduce to -(gamma_51 + i Delta_5) and -(gamma_61 + i Delta_6) as Omega_A
    goes to zero. Equal poles use the limit ``t exp(lambda t)``.
    """
    t = np.asarray(t, dtype=float)
    d234, _ = _den(system, 0.0)
    chi0 = (0.5j) ** 5 * chain.density / (EPS0 * HBAR ** 5) * _dipole_product(system) / d234
    pre = 1j * chain.omega_L * chain.l_eff / (2.0 * chain.n_L * C_LIGHT) * chi0 * _field_product(system)
    d5, d6 = system.complex_detuning(5), system.complex_detuning(6)
    # s-domain poles: (s + d5)(s + d6) + |Omega_A|^2/4 = 0 in terms of s = i w
    l1, l2 = complex_poles(d5, d6, system.rabi("A"))
    tp = np.where(t >= 0, t, 0.0)
    sep = l1 - l2
    if abs(sep) <= 1e-9 * max(abs(l1), 1.0):
        shape = tp * np.exp(l1 * tp)
    else:
        shape = (np.exp(l1 * tp) - np.exp(l2 * tp)) / sep
    return np.where(t >= 0, pre * shape, 0.0)


def photodetect(e_p, e_l, delta_omega, chain: OpticalChainParams):
    """DC and complex beat-note amplitude of the heterodyne photocurrent (A).

    The beat current is ``Re[I_AC exp(i delta_omega t)]``.
    """
    if abs(e_p) > 0 and abs(e_l) > 0.1 * abs(e_p):
        warnings.warn("|E_L| / |E_P| > 0.1: weak-signal heterodyne picture breaks down", RuntimeWarning, stacklevel=2)
    k = chain.kappa
    i_dc = 0.5 * k * chain.responsivity * (abs(e_p) ** 2 + abs(e_l) ** 2)
    i_ac = chain.responsivity * k * e_p * np.conj(e_l)
    return i_dc, i_ac


@dataclass(frozen=True)
class TransferResult:
    omega: np.ndarray
    chi: np.ndarray
    g_opt: np.ndarray
    e_l: np.ndarray
    y: np.ndarray


def baseband_output(system, chain: OpticalChainParams, omega, e_rf, e_p=None,
                    noise: Optional[Callable] = None):
    """Receiver output voltage y(w).

    ``e_p`` defaults to the probe amplitude implied by the Rabi frequency.
    ``noise`` may be a callable ``w -> n(w)`` or an array added as-is; no
    noise is generated here.
    """
    if e_p is None:
        e_p = field_amplitude(system, "P")
    y = chain.lna_gain * chain.responsivity * chain.kappa * e_p * g_opt(system, chain, omega) * e_rf
    if noise is not None:
        y = y + (noise(omega) if callable(noise) else np.asarray(noise))
    return y


def transfer_result(system, chain, omega, e_rf, **kw) -> TransferResult:
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    chi = np.asarray(chi_eff5(system, om, chain.density))
    g = np.asarray(g_opt(system, chain, om))
    return TransferResult(om, chi, g, g * e_rf, np.asarray(baseband_output(system, chain, om, e_rf, **kw)))
