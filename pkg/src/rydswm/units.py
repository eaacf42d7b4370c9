"""Physical constants and unit helpers.

Everything inside the library is SI with angular frequencies in rad/s.
Configuration files quote frequencies as ``value/2pi`` in MHz, which is
what :func:`mhz` converts from.
"""

import numpy as np
from scipy import constants as _c

HBAR = _c.hbar
H_PLANCK = _c.h
EPS0 = _c.epsilon_0
C_LIGHT = _c.c
E_CHARGE = _c.e
K_B = _c.k
#: e * a0, the Hartree atomic unit of electric dipole moment (C m).
EA0 = _c.physical_constants["atomic unit of electric dipole mom."][0]

TWO_PI = 2.0 * np.pi


def mhz(value):
    """Angular frequency (rad/s) from a ``value/2pi`` quoted in MHz."""
    return TWO_PI * 1e6 * np.asarray(value, dtype=float) if np.ndim(value) else TWO_PI * 1e6 * float(value)


def to_mhz(omega):
    """Inverse of :func:`mhz`."""
    return np.asarray(omega) / (TWO_PI * 1e6) if np.ndim(omega) else omega / (TWO_PI * 1e6)


def ghz(value):
    """Angular frequency (rad/s) from an ordinary frequency in GHz."""
    return TWO_PI * 1e9 * value


def db_to_amplitude(db):
    """Amplitude (field/voltage) ratio for a gain quoted in dB."""
    return 10.0 ** (db / 20.0)


def db_to_power(db):
    return 10.0 ** (db / 10.0)
