"""Four-level superheterodyne EIT receiver used as the comparison baseline.

Ladder 1 -P-> 2 -C-> 3 -(LO + RF)-> 4: the RF field rides on the same
Rydberg transition as the local oscillator, and the response is read from
the coherence rho41 (rho21, the probe coherence, is available too).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

from .atomic import LadderSystem
from .metrics.linearity import linearity_report
from .metrics.poles import bandwidth_numeric
from .response import LinearizedModel

READOUTS = {"rho41": (4, 1), "rho21": (2, 1)}


@dataclass(frozen=True)
class FourLevelSystem(LadderSystem):
    n_levels: ClassVar[int] = 4
    couplings: ClassVar[tuple] = ((1, 2, "P"), (2, 3, "C"), (3, 4, "LO"), (3, 4, "RF"))
    readout: ClassVar[tuple] = (4, 1)
    rf_transition: ClassVar[tuple] = (3, 4)
    loop_dipoles: ClassVar[tuple] = ("12", "23", "34")
    required_fields: ClassVar[tuple] = ("P", "C", "LO")

    def derived_detunings(self) -> dict:
        P, C, LO = (self.detuning(x) for x in ("P", "C", "LO"))
        deltas = {2: P, 3: P + C, 4: P + C + LO}
        deltas.update(self.level_detunings)
        return deltas


def eit_model(system: FourLevelSystem, readout="rho41") -> LinearizedModel:
    """Linearization around the LO-dressed, RF-free steady state."""
    return LinearizedModel(system, 0.0, READOUTS[readout])


def eit_transfer(system: FourLevelSystem, omega=0.0, readout="rho41"):
    """d rho41 / d Omega_RF at frequency ``omega`` (the normalised EIT transfer)."""
    return eit_model(system, readout)(omega)


@dataclass(frozen=True)
class EITMetrics:
    f3db: float
    resonant: bool
    h0: complex
    linearity: object


def eit_metrics(system: FourLevelSystem, readout="rho41", linearity=True) -> EITMetrics:
    """Bandwidth and linearity of the baseline through the shared metrics code."""
    model = eit_model(system, readout)
    bw = bandwidth_numeric(model)
    lin = linearity_report(system, 0.0, readout=READOUTS[readout]) if linearity else None
    return EITMetrics(bw.f3db, bw.resonant, complex(model(0.0)), lin)
