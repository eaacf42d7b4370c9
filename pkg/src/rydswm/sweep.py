"""Parameter sweeps and the fixed-column report rows they produce."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, NumericalError

log = logging.getLogger(__name__)

OUTPUTS = ("spectrum", "response", "bandwidth", "linearity", "nef", "tradeoff")


@dataclass(frozen=True)
class SweepSpec:
    """One swept configuration value, e.g. ``fields.A.rabi_over_2pi_mhz 1:12:12``."""

    path: str
    start: float
    stop: float
    count: int
    scale: str = "linear"
    outputs: tuple = ()

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("sweep count must be >= 2", key=self.path)
        if not self.start < self.stop:
            raise ConfigError("sweep needs start < stop", key=self.path)
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep scale must be linear or log, got {self.scale!r}", key=self.path)
        if self.scale == "log" and self.start <= 0:
            raise ConfigError("log sweep needs start > 0", key=self.path)
        for o in self.outputs:
            if o not in OUTPUTS:
                raise ConfigError(f"unknown sweep output {o!r}", key=self.path)

    @classmethod
    def parse(cls, path, text, outputs=()):
        """``start:stop:count`` with an optional ``:log`` suffix."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"sweep range {text!r} must be start:stop:count[:log]", key=path)
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"sweep range {text!r} is not numeric", key=path) from None
        scale = parts[3] if len(parts) == 4 else "linear"
        return cls(path, start, stop, count, scale, tuple(outputs))

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def check(self, config):
        """Raise :class:`ConfigError` unless the path is a settable config key."""
        config.with_override(self.path, self.start)


NA = "NA"


@dataclass
class ReportRow:
    """One line of a sweep report. Missing values are ``None`` and print as NA."""

    param: str = ""
    value: Optional[float] = None
    scheme: str = ""
    f3db_closed_hz: Optional[float] = None
    f3db_numeric_hz: Optional[float] = None
    h0_abs: Optional[float] = None
    p1db_rad_s: Optional[float] = None
    p1db_over_2pi_mhz: Optional[float] = None
    iip3_rad_s: Optional[float] = None
    iip3_over_2pi_mhz: Optional[float] = None
    nef_ex: Optional[float] = None
    nef_qpn: Optional[float] = None
    nef_psn: Optional[float] = None
    nef_rin: Optional[float] = None
    nef_tn: Optional[float] = None
    nef_tot: Optional[float] = None
    regime: str = ""
    resonant: str = ""
    closed_valid: str = ""
    reason: str = ""

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def cells(self):
        out = []
        for name in self.columns():
            v = getattr(self, name)
            if v is None or (isinstance(v, float) and not math.isfinite(v)):
                out.append(NA)
            elif isinstance(v, (float, np.floating)):
                out.append(format_float(v))
            else:
                out.append(str(v))
        return out


def format_float(v):
    return format(float(v), ".10g")


def run_sweep(config, spec: SweepSpec, point: Callable, schemes=("swm6",), threads=1):
    """Evaluate ``point(config_at_value, scheme, value)`` over the sweep grid.

    ``point`` returns a :class:`ReportRow` (or a list of them). Numerical
    failures at a point become NA rows with the error as reason. Results are
    sorted by (value, scheme order) whatever the thread count.
    """
    spec.check(config)
    order = {s: k for k, s in enumerate(schemes)}
    tasks = [(float(v), s) for v in spec.values() for s in schemes]

    def one(task):
        v, s = task
        cfg = config.with_override(spec.path, v)
        try:
            rows = point(cfg, s, v)
        except NumericalError as exc:
            log.warning("sweep point %s=%g (%s) failed: %s", spec.path, v, s, exc)
            rows = ReportRow(reason=f"{type(exc).__name__}: {exc}")
        rows = rows if isinstance(rows, list) else [rows]
        for r in rows:
            r.param, r.value, r.scheme = spec.path, v, s
        return rows

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, tasks))
    else:
        chunks = [one(t) for t in tasks]
    rows = [r for c in chunks for r in c]
    rows.sort(key=lambda r: (r.value, order.get(r.scheme, 99)))
    return rows
