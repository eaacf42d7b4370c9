"""Command-line front end: ``rydswm <subcommand> [options]``.

Every subcommand writes one or more CSV files plus a JSON manifest into
``--out``. CSV files start with ``#`` metadata lines (schema version,
command, config digest) followed by a single header row.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance failure (``check``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import platform
import sys
import time
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__
from .config import ENV_VAR, SCHEMES, load_config
from .errors import ConfigError, NumericalError
from .sweep import NA, ReportRow, SweepSpec, format_float, run_sweep
from .units import TWO_PI, mhz

log = logging.getLogger("rydswm")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4

COLUMN_DOC = """\
report columns (bandwidth, linearity, nef, tradeoff):
  param, value          swept config path and its value (empty without --sweep)
  scheme                swm6 or eit4
  f3db_closed_hz        two-pole product formula (Hz); closed_valid says if it applies
  f3db_numeric_hz       first -3 dB crossing of |H(w)| (Hz); resonant flags a peak above |H(0)|
  h0_abs                |H(0)| = |d rho_readout / d Omega_RF| at DC (linearity: |H1|)
  p1db_rad_s, p1db_over_2pi_mhz, iip3_rad_s, iip3_over_2pi_mhz
  nef_ex, nef_qpn, nef_psn, nef_rin, nef_tn, nef_tot   NEF components (V/m/sqrt(Hz))
  regime                pole regime of the dressed 5-6 pair
  reason                why a value is NA
sample files: spectrum.csv (delta_p_over_2pi_mhz, abs_<scheme>, norm_<scheme>),
  response.csv (freq_mhz, abs_<scheme>, norm_<scheme>), nef.csv (freq_mhz, NEF components),
  linearity_tones.csv (amplitude_over_2pi_mhz, fundamental_abs, imd3_abs, imd3_dbc_model).
"""


class Run:
    """Collects outputs of one invocation and writes the manifest."""

    def __init__(self, args, config):
        self.args, self.config = args, config
        self.outputs = []
        self.t0 = time.perf_counter()
        self.started = datetime.now(timezone.utc).isoformat(timespec="seconds")
        os.makedirs(args.out, exist_ok=True)

    def meta(self, extra=None):
        lines = [f"schema={SCHEMA_VERSION}", f"command={self.args.command}",
                 f"rydswm={__version__}", f"config_sha256={self.config.digest()}",
                 f"schemes={','.join(self.args.schemes)}"]
        if getattr(self.args, "sweep", None):
            lines.append(f"sweep={self.args.sweep[0]} {self.args.sweep[1]}")
        for k, v in (extra or {}).items():
            lines.append(f"{k}={v}")
        return lines

    def write_csv(self, name, header, rows, extra=None):
        path = os.path.join(self.args.out, name)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in self.meta(extra):
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_cell(c) for c in r])
        self.outputs.append(name)
        return path

    def write_report(self, name, rows, extra=None):
        return self.write_csv(name, ReportRow.columns(), [r.cells() for r in rows], extra)

    def finish(self, code):
        manifest = {
            "command": self.args.command,
            "exit_code": code,
            "config_path": self.config.source,
            "config_sha256": self.config.digest(),
            "schemes": self.args.schemes,
            "sweep": list(self.args.sweep) if getattr(self.args, "sweep", None) else None,
            "seed": self.args.seed,
            "threads": self.args.threads,
            "tolerance_pct": self.args.tolerance,
            "versions": {"rydswm": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                         "python": platform.python_version()},
            "outputs": self.outputs,
            "started_utc": self.started,
            "wall_time_s": round(time.perf_counter() - self.t0, 3),
        }
        path = os.path.join(self.args.out, f"{self.args.command}_manifest.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return code


def _cell(v):
    if v is None:
        return NA
    if isinstance(v, (float, np.floating)):
        return format_float(v) if np.isfinite(v) else NA
    return v


def _sweep_spec(args, outputs):
    if not args.sweep:
        return None
    return SweepSpec.parse(args.sweep[0], args.sweep[1], outputs)


def _rows(run, point, **kw):
    args = run.args
    spec = _sweep_spec(args, (args.command,))
    if spec is None:
        rows = []
        for s in args.schemes:
            r = point(run.config, s, **kw)
            for x in (r if isinstance(r, list) else [r]):
                x.scheme = s
                rows.append(x)
        return rows
    return run_sweep(run.config, spec, lambda c, s, v: point(c, s, **kw), args.schemes, args.threads)


# ---------------------------------------------------------------- commands


def cmd_spectrum(run):
    from .reports import spectrum_samples, spectrum_summary

    a = run.args
    kw = dict(span_mhz=a.span, points=a.points, method=a.method)
    spec = _sweep_spec(a, ("spectrum",))
    if spec is None:
        cols, header, summary = [], ["delta_p_over_2pi_mhz"], []
        det = None
        for s in a.schemes:
            det, vals = spectrum_samples(run.config, s, **kw)
            amp = np.abs(vals)
            peak = amp.max()
            cols += [amp, amp / peak if peak > 0 else amp]
            header += [f"abs_{s}", f"norm_{s}"]
            summary.append(spectrum_summary(run.config, s, **kw))
        rows = zip(det / TWO_PI / 1e6, *cols)
        run.write_csv("spectrum.csv", header, rows, {"method": a.method})
        items = [dict(param="", value=None, **d) for d in summary]
    else:
        items = []
        for v in spec.values():
            cfg = run.config.with_override(spec.path, float(v))
            for s in a.schemes:
                try:
                    d = spectrum_summary(cfg, s, **kw)
                except NumericalError as exc:
                    d = {"scheme": s, "fwhm_over_2pi_mhz": None, "multimodal": None, "peak_abs": None,
                         "reason": f"{type(exc).__name__}: {exc}"}
                items.append(dict(param=spec.path, value=float(v), **d))
    keys = ["param", "value", "scheme", "fwhm_over_2pi_mhz", "multimodal", "peak_abs", "reason"]
    run.write_csv("spectrum_summary.csv", keys, [[d[k] for k in keys] for d in items], {"method": a.method})
    for d in items:
        lead = d["scheme"] + (f" {d['param']}={format_float(d['value'])}" if d["param"] else "")
        print(f"{lead} FWHM/2pi = {_cell(d['fwhm_over_2pi_mhz'])} MHz" + (f" ({d['reason']})" if d["reason"] else ""))
    return EXIT_OK


def cmd_response(run):
    from .reports import bandwidth_row, model_for

    a = run.args
    f = np.linspace(0.0, a.fmax, a.points)
    cols, header = [], ["freq_mhz"]
    for s in a.schemes:
        _, h = model_for(run.config, s, a.method, a.rf_bias)
        vals = np.abs(np.array([h(w) for w in mhz(f)]))
        cols += [vals, vals / vals[0] if vals[0] > 0 else vals]
        header += [f"abs_{s}", f"norm_{s}"]
    run.write_csv("response.csv", header, zip(f, *cols), {"method": a.method, "rf_bias": a.rf_bias})
    rows = _rows(run, bandwidth_row, method=a.method, rf_bias=a.rf_bias)
    run.write_report("response_summary.csv", rows, {"method": a.method, "rf_bias": a.rf_bias})
    _print_rows(rows, ("f3db_numeric_hz", "h0_abs"))
    return EXIT_OK


def _bias_mode(a):
    if a.rf_bias != "auto":
        return a.rf_bias
    return "config" if a.sweep and a.sweep[0].startswith("fields.RF.") else "zero"


def cmd_bandwidth(run):
    from .reports import bandwidth_row

    a = run.args
    mode = _bias_mode(a)
    rows = _rows(run, bandwidth_row, method=a.method, rf_bias=mode)
    run.write_report("bandwidth.csv", rows, {"method": a.method, "rf_bias": mode})
    _print_rows(rows, ("f3db_numeric_hz", "f3db_closed_hz", "regime"))
    return EXIT_OK


def cmd_linearity(run):
    from .metrics import extract_h1_h3, imd3_dbc, tone_slopes
    from .reports import linearity_row
    import warnings

    a = run.args
    rows = _rows(run, linearity_row)
    run.write_report("linearity.csv", rows)
    if not a.sweep:
        out = []
        for s in a.schemes:
            system = run.config.system(s)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fit = extract_h1_h3(system)
            top = float(np.max(fit.amplitudes))
            amps = np.geomspace(top / 20.0, top / 2.0, 8)
            ts = tone_slopes(system, amps)
            model = imd3_dbc(fit.h1, fit.h3, amps)
            for x, fu, im, m in zip(amps, ts.fundamental, ts.imd3, model):
                out.append([s, x / TWO_PI / 1e6, fu, im, m])
            print(f"{s} tone slopes: fundamental {ts.slope_fundamental:.4f}, IMD3 {ts.slope_imd3:.4f}")
        run.write_csv("linearity_tones.csv",
                      ["scheme", "amplitude_over_2pi_mhz", "fundamental_abs", "imd3_abs", "imd3_dbc_model"], out)
    _print_rows(rows, ("iip3_over_2pi_mhz", "p1db_over_2pi_mhz"))
    return EXIT_OK


def cmd_nef(run):
    from .metrics import bandwidth_numeric, nef_budget, resolve_noise_params
    from .reports import nef_row
    from .response import LinearizedModel

    a = run.args
    rows = _rows(run, nef_row)
    run.write_report("nef_summary.csv", rows)
    if not a.sweep and "swm6" in a.schemes:
        cfg = run.config
        s, chain = cfg.system("swm6"), cfg.chain()
        bw = bandwidth_numeric(LinearizedModel(s)).f3db
        params = resolve_noise_params(cfg.noise(), s, chain, cfg.cloud(), bandwidth=bw)
        f = np.geomspace(a.fmin, a.fmax, a.points)
        out = []
        for fm in f:
            b = nef_budget(params, s, chain, mhz(fm))
            out.append([fm, b.ex, b.qpn, b.psn, b.rin, b.tn, b.total])
        run.write_csv("nef.csv", ["freq_mhz", "nef_ex", "nef_qpn", "nef_psn", "nef_rin", "nef_tn", "nef_tot"], out)
    _print_rows(rows, ("nef_tot",))
    return EXIT_OK


def cmd_tradeoff(run):
    from .reports import tradeoff_row

    a = run.args
    if not a.sweep:
        a.sweep = ["fields.A.rabi_over_2pi_mhz", "1:12:12"]
    rows = _rows(run, tradeoff_row)
    run.write_report("tradeoff.csv", rows)
    _print_rows(rows, ("f3db_numeric_hz", "h0_abs", "iip3_over_2pi_mhz", "nef_tot"))
    return EXIT_OK


def cmd_check(run):
    from .acceptance import run_all

    a = run.args
    results = run_all(run.config, a.tolerance, a.seed, report=lambda r: print(r.line(), flush=True))
    run.write_csv("check.csv", ["id", "name", "measured", "target", "tolerance", "verdict", "detail"],
                  [[r.id, r.name, r.measured, r.target, r.tolerance, r.verdict, r.detail] for r in results])
    n_pass = sum(r.ok for r in results)
    print(f"{n_pass}/{len(results)} checks passed")
    return EXIT_OK if n_pass == len(results) else EXIT_CHECK


def _print_rows(rows, cols):
    for r in rows:
        cells = dict(zip(ReportRow.columns(), r.cells()))
        lead = f"{r.scheme}" + (f" {r.param}={format_float(r.value)}" if r.param else "")
        print(lead + " " + " ".join(f"{c}={cells[c]}" for c in cols) + (f" ({r.reason})" if r.reason else ""))


COMMANDS = {
    "spectrum": cmd_spectrum,
    "response": cmd_response,
    "bandwidth": cmd_bandwidth,
    "linearity": cmd_linearity,
    "nef": cmd_nef,
    "tradeoff": cmd_tradeoff,
    "check": cmd_check,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"INI config (default: ${ENV_VAR} or the bundled paper parameters)")
    common.add_argument("--out", default="rydswm-out", help="output directory (default: %(default)s)")
    common.add_argument("--scheme", dest="schemes", action="append", choices=SCHEMES,
                        help="scheme to evaluate; repeat for several (default: the config's scheme)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--tolerance", type=float, default=None, metavar="PCT",
                        help="override the relative tolerance of acceptance checks (percent)")
    common.add_argument("--sweep", nargs=2, metavar=("PATH", "START:STOP:COUNT[:log]"),
                        help="sweep a config value, e.g. fields.A.rabi_over_2pi_mhz 1:12:12")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="rydswm", description="Six-wave-mixing Rydberg receiver simulator.",
                                epilog=COLUMN_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"rydswm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    fmt = dict(parents=[common], epilog=COLUMN_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)

    sp = sub.add_parser("spectrum", help="readout coherence vs probe detuning and its FWHM", **fmt)
    sp.add_argument("--span", type=float, default=40.0, help="half-width of the Delta_P/2pi window (MHz)")
    sp.add_argument("--points", type=int, default=1601)
    sp.add_argument("--method", choices=("steady-state", "closed-form"), default="steady-state")

    methods = ("liouvillian", "closed-form", "linearized")
    rp = sub.add_parser("response", help="|H(w)| and its 3-dB bandwidth", **fmt)
    rp.add_argument("--fmax", type=float, default=20.0, help="upper frequency (MHz)")
    rp.add_argument("--points", type=int, default=401)
    rp.add_argument("--method", choices=methods, default="liouvillian")
    rp.add_argument("--rf-bias", choices=("zero", "config"), default="zero",
                    help="linearize around Omega_RF = 0 or the configured Omega_RF")

    bp = sub.add_parser("bandwidth", help="closed-form and numeric f3dB, optionally swept", **fmt)
    bp.add_argument("--method", choices=methods, default="liouvillian")
    bp.add_argument("--rf-bias", choices=("auto", "zero", "config"), default="auto",
                    help="auto: use the configured Omega_RF only when sweeping an RF key")

    sub.add_parser("linearity", help="H1/H3, P1dB, IIP3 and two-tone slopes", **fmt)

    np_ = sub.add_parser("nef", help="NEF budget and NEF vs baseband frequency", **fmt)
    np_.add_argument("--fmin", type=float, default=0.01, help="lowest frequency (MHz)")
    np_.add_argument("--fmax", type=float, default=100.0, help="highest frequency (MHz)")
    np_.add_argument("--points", type=int, default=121)

    sub.add_parser("tradeoff", help="bandwidth, |H(0)|, IIP3 and NEF along a sweep (default Omega_A)", **fmt)
    sub.add_parser("check", help="run the acceptance suite", **fmt)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if not args.schemes:
            args.schemes = [config.scheme]
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1", key="--threads")
        if args.sweep:
            SweepSpec.parse(*args.sweep).check(config)
        run = Run(args, config)
    except ConfigError as exc:
        print(f"config error [{exc.key or '-'}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        code = COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error [{exc.key or '-'}]: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure in {args.command} ({type(exc).__name__}): {exc}; "
              f"config={config.source} schemes={','.join(args.schemes)}", file=sys.stderr)
        code = EXIT_NUMERIC
    return run.finish(code)


if __name__ == "__main__":
    sys.exit(main())
