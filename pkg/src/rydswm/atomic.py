"""Level schemes, drives, Hamiltonians and dissipator channels.

Two ladder schemes share the machinery here: the six-level six-wave-mixing
loop (:class:`SixLevelSystem`) and the four-level superheterodyne EIT
baseline (:class:`rydswm.eit.FourLevelSystem`). Level indices are 1-based
in the public API (``rho61`` is the coherence between levels 6 and 1) and
0-based only inside matrices.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import ClassVar, Mapping, Optional, Sequence

import numpy as np

from .errors import ClampWarning, ConfigError
from .units import TWO_PI

log = logging.getLogger(__name__)

FIELD_LABELS = ("P", "C", "LO", "RF", "A", "L")


@dataclass(frozen=True)
class FieldDrive:
    """One optical or microwave field.

    ``rabi`` and ``detuning`` are angular frequencies (rad/s); ``carrier`` is
    the field's own angular frequency and is only needed for loop checks and
    for the optical wavelength used by the transduction chain.
    """

    label: str
    rabi: complex = 0.0
    detuning: float = 0.0
    carrier: Optional[float] = None
    wave_vector: Optional[tuple] = None

    def __post_init__(self):
        if self.label not in FIELD_LABELS:
            raise ConfigError(f"unknown field label {self.label!r}", key=self.label)
        if self.carrier is not None and not self.carrier > 0:
            raise ConfigError(f"carrier of field {self.label} must be > 0", key=f"fields.{self.label}.carrier_ghz")
        if self.wave_vector is not None:
            object.__setattr__(self, "wave_vector", tuple(float(k) for k in self.wave_vector))
            if len(self.wave_vector) != 3:
                raise ConfigError(f"wave vector of field {self.label} must have 3 components")


@dataclass(frozen=True)
class DissipatorChannel:
    kind: str  # "population-decay" | "pure-dephasing"
    operator: np.ndarray
    rate: float


def _frozen(mapping):
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class LadderSystem:
    """Common state of a ladder scheme; concrete schemes set the class constants.

    Parameters
    ----------
    drives : mapping of label -> FieldDrive
    coherence_dephasing : mapping of level j -> gamma_j1 (rad/s)
        Total decoherence rate of the coherence rho_j1.
    population_decays : sequence of (j, i, rate)
        Spontaneous (or effective) decay j -> i, rate in rad/s. ``None``
        selects :func:`default_decays`.
    dipoles : mapping of transition label -> dipole moment (C m)
        Labels are digit pairs such as ``"12"``.
    level_detunings : mapping of level -> detuning (rad/s)
        Overrides for the derived level detunings.
    """

    n_levels: ClassVar[int] = 0
    # (lower, upper, field label) for each coherent coupling, 1-based levels
    couplings: ClassVar[tuple] = ()
    readout: ClassVar[tuple] = (0, 0)
    rf_transition: ClassVar[tuple] = (0, 0)
    loop_dipoles: ClassVar[tuple] = ()
    required_fields: ClassVar[tuple] = ()

    drives: Mapping[str, FieldDrive]
    coherence_dephasing: Mapping[int, float]
    population_decays: Optional[Sequence[tuple]] = None
    dipoles: Mapping[str, float] = field(default_factory=dict)
    level_detunings: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        drives = dict(self.drives)
        for label, drive in drives.items():
            if drive.label != label:
                raise ConfigError(f"drive stored under {label!r} is labelled {drive.label!r}")
        for label in self.required_fields:
            if label not in drives:
                raise ConfigError(f"missing drive {label}", key=f"fields.{label}")
        object.__setattr__(self, "drives", _frozen(drives))

        gammas = {int(j): float(g) for j, g in dict(self.coherence_dephasing).items()}
        for j in range(2, self.n_levels + 1):
            if j not in gammas:
                raise ConfigError(f"missing coherence rate gamma{j}1", key=f"rates.gamma{j}1_over_2pi_mhz")
        for j, g in gammas.items():
            if not 2 <= j <= self.n_levels:
                raise ConfigError(f"gamma{j}1 refers to a level outside 1..{self.n_levels}")
            if g < 0:
                raise ConfigError(f"gamma{j}1 must be >= 0", key=f"rates.gamma{j}1_over_2pi_mhz")
        object.__setattr__(self, "coherence_dephasing", _frozen(gammas))

        decays = default_decays(gammas) if self.population_decays is None else self.population_decays
        clean = []
        for entry in decays:
            j, i, rate = entry
            j, i, rate = int(j), int(i), float(rate)
            if not (1 <= i < j <= self.n_levels):
                raise ConfigError(f"decay {j}->{i} must satisfy 1 <= i < j <= {self.n_levels}", key=f"decays.{j}->{i}")
            if rate < 0:
                raise ConfigError(f"decay rate {j}->{i} must be >= 0", key=f"decays.{j}->{i}")
            clean.append((j, i, rate))
        object.__setattr__(self, "population_decays", tuple(clean))

        dipoles = {str(k): float(v) for k, v in dict(self.dipoles).items()}
        for k in self.loop_dipoles:
            if k in dipoles and not abs(dipoles[k]) > 0:
                raise ConfigError(f"dipole mu{k} must be nonzero", key=f"dipoles_au.mu{k}")
        object.__setattr__(self, "dipoles", _frozen(dipoles))
        object.__setattr__(self, "level_detunings", _frozen({int(k): float(v) for k, v in dict(self.level_detunings).items()}))

    # -- accessors -----------------------------------------------------
    def rabi(self, label) -> complex:
        drive = self.drives.get(label)
        return complex(drive.rabi) if drive is not None else 0j

    def detuning(self, label) -> float:
        drive = self.drives.get(label)
        return float(drive.detuning) if drive is not None else 0.0

    def gamma(self, j) -> float:
        return self.coherence_dephasing[j]

    def dipole(self, transition) -> float:
        try:
            return self.dipoles[transition]
        except KeyError:
            raise ConfigError(f"dipole mu{transition} is not configured", key=f"dipoles_au.mu{transition}") from None

    def total_decay(self, level) -> float:
        """Total population decay rate out of ``level``."""
        return sum(rate for j, _, rate in self.population_decays if j == level)

    def derived_detunings(self) -> dict:
        raise NotImplementedError

    def complex_detuning(self, j, omega=0.0):
        """D_j(omega) = gamma_j1 + i (Delta_j + omega)."""
        delta = self.derived_detunings()[j]
        return self.gamma(j) + 1j * (delta + np.asarray(omega, dtype=float))

    # -- functional updates -------------------------------------------
    def with_drive(self, label, **changes):
        """Copy of the system with fields of one drive replaced."""
        drives = dict(self.drives)
        base = drives.get(label, FieldDrive(label))
        drives[label] = replace(base, **changes)
        return replace(self, drives=drives)

    def with_rf(self, rabi):
        return self.with_drive("RF", rabi=rabi)

    def with_gamma(self, j, value):
        gammas = dict(self.coherence_dephasing)
        gammas[j] = value
        return replace(self, coherence_dephasing=gammas)


def default_decays(gammas):
    """Decay table used when none is configured.

    Every excited level j decays straight to |1> at ``2 * gamma_j1``. With no
    other channel present this reproduces each quoted coherence rate exactly
    and leaves every pure-dephasing rate at zero.
    """
    return tuple((j, 1, 2.0 * g) for j, g in sorted(gammas.items()))


@dataclass(frozen=True)
class SixLevelSystem(LadderSystem):
    """Six-wave-mixing loop 1 -P-> 2 -C-> 3 -LO-> 4 -RF-> 5 -A*-> 6 -L-> 1."""

    n_levels: ClassVar[int] = 6
    couplings: ClassVar[tuple] = ((1, 2, "P"), (2, 3, "C"), (3, 4, "LO"), (4, 5, "RF"), (5, 6, "A"))
    readout: ClassVar[tuple] = (6, 1)
    rf_transition: ClassVar[tuple] = (4, 5)
    loop_dipoles: ClassVar[tuple] = ("12", "23", "34", "45", "56", "61")
    required_fields: ClassVar[tuple] = ("P", "C", "LO", "RF", "A")

    def derived_detunings(self) -> dict:
        P, C, LO, RF, L = (self.detuning(x) for x in ("P", "C", "LO", "RF", "L"))
        deltas = {
            2: P,
            3: P + C,
            # not given in the source model; ladder rule, overridable
            4: P + C + LO,
            5: P + C - LO + RF,
            6: L,
        }
        deltas.update(self.level_detunings)
        return deltas


def derived_detunings(system) -> dict:
    """Level detunings {2: Delta_2, ..., n: Delta_n} in rad/s."""
    return system.derived_detunings()


@dataclass(frozen=True)
class LoopReport:
    residual: float
    vector_residual: Optional[np.ndarray]
    tolerance: float
    closed: bool

    @property
    def residual_over_2pi_hz(self):
        return self.residual / TWO_PI


def validate_loop(system: SixLevelSystem, tolerance: float = TWO_PI * 1e3) -> LoopReport:
    """Check frequency closure and, when available, phase matching of the loop.

    The residual is ``w_P + w_C - w_A + w_LO - w_RF - w_L`` (rad/s). The loop
    counts as closed when its magnitude is below ``tolerance``.
    """
    signs = {"P": 1, "C": 1, "A": -1, "LO": 1, "RF": -1, "L": -1}
    for label in signs:
        drive = system.drives.get(label)
        if drive is None:
            raise ConfigError(f"loop check needs drive {label}", key=f"fields.{label}")
        if drive.carrier is None:
            raise ConfigError(f"loop check needs the carrier of {label}", key=f"fields.{label}.carrier_ghz")
    residual = float(sum(s * system.drives[x].carrier for x, s in signs.items()))
    vec = None
    if all(system.drives[x].wave_vector is not None for x in signs):
        vec = sum(s * np.asarray(system.drives[x].wave_vector) for x, s in signs.items())
    closed = abs(residual) < tolerance
    if not closed:
        log.warning("six-wave-mixing loop not closed: residual %.6g rad/s", residual)
    return LoopReport(residual, vec, tolerance, closed)


def build_hamiltonian(system: LadderSystem, rf: Optional[complex] = None) -> np.ndarray:
    """H / hbar in rad/s: ``-1/2`` times the coupling matrix with ``2 Delta_j`` on the diagonal.

    ``rf`` replaces the configured RF Rabi frequency (used by nonlinear
    amplitude sweeps). Couplings that address the same transition add.
    """
    n = system.n_levels
    m = np.zeros((n, n), dtype=complex)
    for lower, upper, label in system.couplings:
        value = complex(rf) if (label == "RF" and rf is not None) else system.rabi(label)
        m[lower - 1, upper - 1] += value
        m[upper - 1, lower - 1] += np.conj(value)
    for j, delta in system.derived_detunings().items():
        m[j - 1, j - 1] = 2.0 * delta
    return -0.5 * m


def rf_perturbation(system: LadderSystem) -> np.ndarray:
    """dH/dOmega_RF for a real change of the RF Rabi frequency."""
    a, b = system.rf_transition
    v = np.zeros((system.n_levels, system.n_levels), dtype=complex)
    v[a - 1, b - 1] = v[b - 1, a - 1] = -0.5
    return v


def _projector(n, i, j):
    op = np.zeros((n, n), dtype=complex)
    op[i - 1, j - 1] = 1.0
    return op


def build_dissipators(system: LadderSystem) -> list:
    """Population-decay and pure-dephasing channels.

    Decay ``j -> i`` gives the jump operator ``|i><j|``. Each configured
    coherence rate gamma_j1 adds the dephasing operator ``|1><1| - |j><j|``
    at ``(gamma_j1 - (G_1 + G_j)/2) / 2`` where G_k is the total decay out of
    level k; negative values are clamped to zero with a :class:`ClampWarning`.
    Zero-rate channels are left out.
    """
    n = system.n_levels
    channels = []
    for j, i, rate in system.population_decays:
        if rate > 0:
            channels.append(DissipatorChannel("population-decay", _projector(n, i, j), rate))
    for j, gamma in sorted(system.coherence_dephasing.items()):
        rate = 0.5 * (gamma - 0.5 * (system.total_decay(1) + system.total_decay(j)))
        if rate < 0:
            # tolerate float noise from the default table
            if rate < -1e-12 * max(gamma, 1.0):
                msg = f"pure-dephasing rate for pair (1,{j}) is negative ({rate:.4g} rad/s); clamped to 0"
                log.warning(msg)
                warnings.warn(msg, ClampWarning, stacklevel=2)
            rate = 0.0
        if rate > 0:
            op = _projector(n, 1, 1) - _projector(n, j, j)
            channels.append(DissipatorChannel("pure-dephasing", op, rate))
    return channels
