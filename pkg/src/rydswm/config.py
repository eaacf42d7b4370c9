"""INI configuration files.

Sections and keys (frequencies are quoted as value / 2 pi in MHz unless the
key says otherwise)::

    [system]     scheme = swm6 | eit4 ; readout = rho41 | rho21 (eit4 only)
    [fields]     <X>.rabi_over_2pi_mhz, <X>.rabi_phase_deg,
                 <X>.detuning_over_2pi_mhz, <X>.carrier_ghz, <X>.k_direction
                 for X in P, C, LO, RF, A, L
    [rates]      gamma21_over_2pi_mhz ... gamma61_over_2pi_mhz
    [decays]     j->i = rate / 2 pi in MHz (replaces the default table)
    [detunings]  delta4_over_2pi_mhz, ...   (overrides of derived values)
    [dipoles_au] mu12 ... mu61 in units of e a0
    [cloud]      peak_density_cm3, radius_mm, profile, window_mm = z0, z1
    [beams]      <X>.waist_um  (optical beams P, C, A)
    [chain]      n_L, a_eff_m2, responsivity_a_per_w, lna_gain_db
    [noise]      temperature_k, front_end, noise_figure_db, s_rin_per_hz,
                 bandwidth_hz, f_rf_ghz, n_atoms, t2_s

Unknown sections or keys raise :class:`ConfigError`. ``carrier_ghz`` of L may
be the word ``closure`` to place it exactly on the loop sum.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .atomic import FIELD_LABELS, FieldDrive, SixLevelSystem
from .errors import ConfigError
from .units import C_LIGHT, EA0, TWO_PI, ghz, mhz

ENV_VAR = "RYDSWM_CONFIG"
SCHEMES = ("swm6", "eit4")

_FIELD_KEYS = ("rabi_over_2pi_mhz", "rabi_phase_deg", "detuning_over_2pi_mhz", "carrier_ghz", "k_direction")
_SCHEMA = {
    "system": {"scheme", "readout"},
    "fields": {f"{x}.{k}" for x in FIELD_LABELS for k in _FIELD_KEYS},
    "rates": {f"gamma{j}1_over_2pi_mhz" for j in range(2, 7)},
    "decays": None,  # validated separately
    "detunings": {f"delta{j}_over_2pi_mhz" for j in range(2, 7)},
    "dipoles_au": {"mu12", "mu23", "mu34", "mu45", "mu56", "mu61"},
    "cloud": {"peak_density_cm3", "radius_mm", "profile", "window_mm"},
    "beams": {f"{x}.waist_um" for x in ("P", "C", "A", "L")},
    "chain": {"n_l", "a_eff_m2", "responsivity_a_per_w", "lna_gain_db"},
    "noise": {"temperature_k", "front_end", "noise_figure_db", "s_rin_per_hz", "bandwidth_hz",
              "f_rf_ghz", "n_atoms", "t2_s"},
}
_LOOP_SIGNS = {"P": 1, "C": 1, "A": -1, "LO": 1, "RF": -1}


def bundled_config_path(name="paper_swm6.ini"):
    return str(resources.files("rydswm") / "data" / name)


def default_config_path():
    return os.environ.get(ENV_VAR) or bundled_config_path()


def _float(value, key):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}", key=key) from None


def _floats(value, key, n=None):
    parts = [p for p in value.replace(",", " ").split() if p]
    vals = [_float(p, key) for p in parts]
    if n is not None and len(vals) != n:
        raise ConfigError(f"{key}: expected {n} numbers", key=key)
    return vals


@dataclass
class Config:
    """Parsed configuration. ``raw`` keeps the text values so sweeps can override them."""

    raw: dict
    source: str = "<string>"

    # ---- construction -------------------------------------------------
    @classmethod
    def from_text(cls, text, source="<string>"):
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {source}: {exc}") from exc
        raw = {s: dict(cp.items(s)) for s in cp.sections()}
        cfg = cls(raw, source)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path=None):
        path = path or default_config_path()
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, source=str(path))

    def validate(self):
        for section, items in self.raw.items():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", key=section)
            allowed = _SCHEMA[section]
            for key in items:
                if allowed is None:
                    _parse_decay_key(key)
                elif (key.lower() if section == "chain" else key) not in allowed:
                    raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
        # build once so type errors surface at load time
        self.system()
        return self

    def text(self):
        lines = []
        for section, items in self.raw.items():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in items.items())
            lines.append("")
        return "\n".join(lines)

    def digest(self):
        return hashlib.sha256(self.text().encode()).hexdigest()

    def get(self, path, default=None):
        section, _, key = path.partition(".")
        return self.raw.get(section, {}).get(key, default)

    def with_override(self, path, value):
        """Copy with ``section.key`` set to ``value`` (validated)."""
        section, _, key = path.partition(".")
        if section not in _SCHEMA or not key:
            raise ConfigError(f"cannot resolve parameter path {path!r}", key=path)
        raw = {s: dict(v) for s, v in self.raw.items()}
        raw.setdefault(section, {})[key] = repr(float(value)) if isinstance(value, (int, float, np.floating)) else str(value)
        cfg = Config(raw, self.source)
        cfg.validate()
        return cfg

    # ---- accessors ---------------------------------------------------
    @property
    def scheme(self):
        s = self.raw.get("system", {}).get("scheme", "swm6").strip()
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}", key="system.scheme")
        return s

    @property
    def readout(self):
        return self.raw.get("system", {}).get("readout", "rho41").strip()

    def _section(self, name):
        return self.raw.get(name, {})

    def _drives(self):
        fields = self._section("fields")
        drives = {}
        for x in FIELD_LABELS:
            keys = {k.split(".", 1)[1]: v for k, v in fields.items() if k.split(".", 1)[0] == x}
            if not keys:
                continue
            rabi = mhz(_float(keys.get("rabi_over_2pi_mhz", "0"), f"fields.{x}.rabi_over_2pi_mhz"))
            phase = np.deg2rad(_float(keys.get("rabi_phase_deg", "0"), f"fields.{x}.rabi_phase_deg"))
            det = mhz(_float(keys.get("detuning_over_2pi_mhz", "0"), f"fields.{x}.detuning_over_2pi_mhz"))
            car = keys.get("carrier_ghz")
            carrier = None
            if car is not None and car.strip() != "closure":
                carrier = ghz(_float(car, f"fields.{x}.carrier_ghz"))
            drives[x] = dict(label=x, rabi=complex(rabi * np.exp(1j * phase)) if phase else rabi,
                             detuning=det, carrier=carrier, k_dir=keys.get("k_direction"), closure=car)
        if "L" in drives and (drives["L"]["closure"] or "").strip() == "closure":
            total = 0.0
            for lab, s in _LOOP_SIGNS.items():
                c = drives.get(lab, {}).get("carrier")
                if c is None:
                    raise ConfigError("L carrier 'closure' needs all other carriers", key=f"fields.{lab}.carrier_ghz")
                total += s * c
            drives["L"]["carrier"] = total
        out = {}
        for x, d in drives.items():
            kv = None
            if d["k_dir"] is not None:
                direction = np.asarray(_floats(d["k_dir"], f"fields.{x}.k_direction", 3))
                if d["carrier"] is None:
                    raise ConfigError(f"k_direction of {x} needs its carrier", key=f"fields.{x}.carrier_ghz")
                direction = direction / np.linalg.norm(direction)
                kv = tuple(d["carrier"] / C_LIGHT * direction)
            out[x] = FieldDrive(x, d["rabi"], d["detuning"], d["carrier"], kv)
        return out

    def _common(self, n_levels):
        rates = self._section("rates")
        gammas = {}
        for j in range(2, n_levels + 1):
            key = f"gamma{j}1_over_2pi_mhz"
            if key not in rates:
                raise ConfigError(f"missing rate {key}", key=f"rates.{key}")
            gammas[j] = mhz(_float(rates[key], f"rates.{key}"))
        decays = None
        if "decays" in self.raw:
            decays = []
            for key, value in self.raw["decays"].items():
                j, i = _parse_decay_key(key)
                if j <= n_levels:
                    decays.append((j, i, mhz(_float(value, f"decays.{key}"))))
        dip = {k[2:]: _float(v, f"dipoles_au.{k}") * EA0 for k, v in self._section("dipoles_au").items()}
        dets = {int(k[5]): mhz(_float(v, f"detunings.{k}")) for k, v in self._section("detunings").items()
                if int(k[5]) <= n_levels}
        return gammas, decays, dip, dets

    def system(self, scheme=None):
        """Atomic model for ``scheme`` (default: the configured one).

        Asking a six-level config for ``eit4`` gives the matched four-level
        baseline with the same P, C, LO, RF drives and the rates and dipoles
        of levels 1..4.
        """
        scheme = scheme or self.scheme
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}", key="system.scheme")
        drives = self._drives()
        if scheme == "swm6":
            if self.scheme == "eit4":
                raise ConfigError("an eit4 config cannot describe the six-level scheme", key="system.scheme")
            gammas, decays, dip, dets = self._common(6)
            return SixLevelSystem(drives, gammas, decays, dip, dets)
        from .eit import FourLevelSystem

        gammas, decays, dip, dets = self._common(4)
        drives = {k: v for k, v in drives.items() if k in ("P", "C", "LO", "RF")}
        dip = {k: v for k, v in dip.items() if k in ("12", "23", "34")}
        return FourLevelSystem(drives, gammas, decays, dip, dets)

    def cloud(self):
        from .transduction import Beam, CloudAndBeams

        c = self._section("cloud")
        if "peak_density_cm3" not in c or "radius_mm" not in c:
            raise ConfigError("cloud needs peak_density_cm3 and radius_mm", key="cloud.peak_density_cm3")
        drives = self._drives()
        beams = {}
        for key, v in self._section("beams").items():
            lab = key.split(".")[0]
            d = drives.get(lab)
            if d is None or d.carrier is None:
                raise ConfigError(f"beam {lab} needs the carrier of its field", key=f"fields.{lab}.carrier_ghz")
            beams[lab] = Beam(_float(v, f"beams.{key}") * 1e-6, TWO_PI * C_LIGHT / d.carrier)
        window = None
        if "window_mm" in c:
            window = tuple(1e-3 * w for w in _floats(c["window_mm"], "cloud.window_mm", 2))
        return CloudAndBeams(
            _float(c["peak_density_cm3"], "cloud.peak_density_cm3") * 1e6,
            _float(c["radius_mm"], "cloud.radius_mm") * 1e-3,
            beams,
            c.get("profile", "gaussian").strip(),
            window,
        )

    def chain(self, scheme=None):
        from .transduction import OpticalChainParams, effective_length

        ch = {k.lower(): v for k, v in self._section("chain").items()}
        cloud = self.cloud()
        drives = self._drives()
        lab = "L" if "L" in drives and drives["L"].carrier else "P"
        if drives.get(lab) is None or drives[lab].carrier is None:
            raise ConfigError("optical chain needs the L (or P) carrier", key="fields.L.carrier_ghz")
        if "a_eff_m2" in ch:
            a_eff = _float(ch["a_eff_m2"], "chain.a_eff_m2")
        else:
            if "P" not in cloud.beams:
                raise ConfigError("A_eff default needs the probe waist", key="beams.P.waist_um")
            a_eff = np.pi * cloud.beams["P"].waist ** 2
        return OpticalChainParams(
            omega_L=drives[lab].carrier,
            l_eff=effective_length(cloud),
            density=cloud.peak_density,
            a_eff=a_eff,
            n_L=_float(ch.get("n_l", "1"), "chain.n_L"),
            responsivity=_float(ch.get("responsivity_a_per_w", "0.55"), "chain.responsivity_a_per_w"),
            lna_gain_db=_float(ch.get("lna_gain_db", "20"), "chain.lna_gain_db"),
        )

    def noise(self):
        from .metrics.noise import NoiseParams

        n = self._section("noise")
        kw = {}
        conv = {"temperature_k": ("temperature", 1.0), "noise_figure_db": ("noise_figure_db", 1.0),
                "s_rin_per_hz": ("s_rin", 1.0), "bandwidth_hz": ("bandwidth", 1.0),
                "f_rf_ghz": ("f_rf", 1e9), "n_atoms": ("n_atoms", 1.0), "t2_s": ("t2", 1.0)}
        for key, (name, scale) in conv.items():
            if key in n:
                kw[name] = _float(n[key], f"noise.{key}") * scale
        if "front_end" in n:
            kw["front_end"] = n["front_end"].strip().lower()
        return NoiseParams(**kw)


def _parse_decay_key(key):
    try:
        j, i = (int(p) for p in key.replace(" ", "").split("->"))
    except ValueError:
        raise ConfigError(f"decay key {key!r} must look like 'j->i'", key=f"decays.{key}") from None
    return j, i


def load_config(path=None) -> Config:
    """Read a config file; ``None`` uses $RYDSWM_CONFIG or the bundled paper parameters."""
    return Config.from_file(path)
