"""Six-wave-mixing Rydberg receiver simulator.

The model chain runs from a six-level Lindblad master equation, through the
RF-to-coherence response rho61(w), to generated light, photocurrent and
receiver output, with bandwidth, linearity and noise figures on top and a
four-level EIT receiver for comparison.
"""

from .atomic import (
    FieldDrive,
    SixLevelSystem,
    build_dissipators,
    build_hamiltonian,
    derived_detunings,
    validate_loop,
)
from .config import Config, load_config
from .eit import FourLevelSystem, eit_metrics, eit_transfer
from .errors import ConfigError, NumericalError
from .liouville import build_liouvillian, steady_state
from .response import (
    rho61_closed_form,
    rho61_linearized,
    rho61_timedomain_oracle,
    transfer_H,
)

__version__ = "0.1.0"
