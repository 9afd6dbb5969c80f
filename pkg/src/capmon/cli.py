"""``capmon`` command line.

Exit codes: 0 success, 2 invalid input (window, config, paths), 3 window
without switching transitions when ``--strict`` is given.  Failures print a
single JSON object ``{"code", "message", "context"}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import PSO_KEYS, SCENARIO_KEYS, describe, load_pso, load_scenario
from .errors import CapmonError, ConfigError, UnobservableEsr, UnobservableEsrWarning
from .estimator import EstimationReport, PsoConfig, estimate
from .files import atomic_write_text
from .health import assess
from .predictor import predict
from .signals import (
    CapacitorParams,
    ReferenceParams,
    read_window_csv,
    validate_window,
    window_to_csv,
)
from .simulator import ScenarioConfig, generate_window
from .stats import boxplot_stats

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNOBSERVABLE = 3

COMMANDS = ("simulate", "predict", "estimate", "sweep", "assess", "report")
SWEEP_PARAMS = {"swarm_size": int, "error_limit": float}


@dataclass
class RunManifest:
    command: str
    config_path: str | None = None
    input_paths: list = field(default_factory=list)
    output_paths: list = field(default_factory=list)
    seed: int | None = None
    tool_version: str = __version__
    options: dict = field(default_factory=dict)

    def check_paths(self):
        for p in self.input_paths + ([self.config_path] if self.config_path else []):
            if not Path(p).is_file():
                raise CapmonError(f"input file not found: {p}", {"path": str(p)})
        for p in self.output_paths:
            parent = Path(p).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise CapmonError(f"output directory not writable: {parent}", {"path": str(p)})


def _emit_error(code, message, context=None):
    print(json.dumps({"code": code, "message": message, "context": context or {}}, default=str),
          file=sys.stderr)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _reference(opts):
    c0, esr0 = opts.get("c0"), opts.get("esr0")
    if c0 is None and esr0 is None:
        return None
    if c0 is None or esr0 is None:
        raise ConfigError("--c0 and --esr0 must be given together")
    return ReferenceParams(c0, esr0)


def _pso_config(manifest):
    cfg = load_pso(manifest.config_path) if manifest.config_path else PsoConfig()
    if manifest.seed is not None:
        cfg = replace(cfg, seed=manifest.seed)
    return cfg


def _load_window(path, strict):
    window = read_window_csv(path)
    result = validate_window(window)
    result.raise_if_invalid()
    if not result.esr_observable and strict:
        raise UnobservableEsr(result.warnings[0], {"window": str(path)})
    return window


def _cmd_simulate(m):
    cfg = load_scenario(m.config_path) if m.config_path else ScenarioConfig()
    if m.seed is not None:
        cfg = replace(cfg, seed=m.seed)
    out = Path(m.output_paths[0])
    window, truth = generate_window(cfg, window_id=out.stem)
    atomic_write_text(out, window_to_csv(window))
    print(json.dumps({"out": str(out), "n_samples": len(window), "seed": cfg.seed,
                      "truth": {"c": truth.c, "esr": truth.esr}}, sort_keys=True))


def _cmd_predict(m):
    o = m.options
    window = _load_window(m.input_paths[0], o.get("strict"))
    res = predict(window, CapacitorParams(o["c"], o["esr"]))
    rows = zip(window.t, window.v_sm, res.v_hat, res.inst_err)
    atomic_write_text(m.output_paths[0], _csv_text(("t", "v_sm", "v_hat", "err"), rows))
    if o.get("figure"):
        from .plotting import prediction_figure

        prediction_figure(window, res.v_hat, o["figure"])
    print(json.dumps({"v_err": res.v_err, "v_m": res.v_m,
                      "max_abs_err": float(np.max(np.abs(res.inst_err)))}, sort_keys=True))


def _cmd_estimate(m):
    window = _load_window(m.input_paths[0], m.options.get("strict"))
    report = estimate(window, _pso_config(m), reference=_reference(m.options))
    atomic_write_text(m.output_paths[0], report.to_json())
    print(json.dumps({"c_median": report.c_median, "esr_median": report.esr_median,
                      "c_iqr_pct": report.c_iqr, "esr_iqr_pct": report.esr_iqr,
                      "out": str(m.output_paths[0])}, sort_keys=True))


def _cmd_sweep(m):
    o = m.options
    window = _load_window(m.input_paths[0], o.get("strict"))
    base = replace(_pso_config(m), repeats=o["runs"])
    ref = _reference(o)
    param = o["param"]
    rows, c_samples, esr_samples = [], [], []
    for value in o["values"]:
        report = estimate(window, replace(base, **{param: value}), reference=ref)
        iters = float(np.mean([r.iterations for r in report.per_repeat]))
        c_samples.append(report.c_values)
        esr_samples.append(report.esr_values)
        for quantity, values, scale in (("c", report.c_values, report.reference.c),
                                        ("esr", report.esr_values, report.reference.esr)):
            s = boxplot_stats(values, scale)
            rows.append((param, value, quantity, len(values), s.median, s.q1, s.q3, s.iqr_pct,
                         s.whisker_lo, s.whisker_hi, len(s.outliers), iters))
    header = ("param", "value", "quantity", "n", "median", "q1", "q3", "iqr_pct",
              "whisker_lo", "whisker_hi", "n_outliers", "mean_iterations")
    atomic_write_text(m.output_paths[0], _csv_text(header, rows))
    if o.get("figure"):
        from .plotting import sweep_figure

        if ref is not None:
            c_samples = [s / ref.c0 for s in c_samples]
            esr_samples = [s / ref.esr0 for s in esr_samples]
            labels = ("C [p.u.]", "ESR [p.u.]")
        else:
            labels = ("C [F]", "ESR [ohm]")
        sweep_figure(param, o["values"], c_samples, esr_samples, o["figure"], *labels)


def _read_report(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return EstimationReport.from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read report {path}: {exc}", {"path": str(path)}) from None


def _cmd_assess(m):
    o = m.options
    report = _read_report(m.input_paths[0])
    status = assess(report, ReferenceParams(o["c0"], o["esr0"]))
    print(f"{report.window_id}: {status.verdict} (C {status.c_pu:.4f} p.u., "
          f"ESR {status.esr_pu:.4f} p.u.)")
    print(json.dumps(status.to_dict(), sort_keys=True))


def _cmd_report(m):
    o = m.options
    ref = _reference(o)
    quantity = o["quantity"]
    labels, samples, rows = [], [], []
    for path in m.input_paths:
        report = _read_report(path)
        values = report.c_values if quantity == "c" else report.esr_values
        if ref is not None:
            values = values / (ref.c0 if quantity == "c" else ref.esr0)
        s = boxplot_stats(values, 1.0)
        labels.append(report.window_id)
        samples.append(values)
        rows.append((report.window_id, s.median, s.q1, s.q3, s.whisker_lo, s.whisker_hi,
                     len(s.outliers)))
    header = ("id", "median", "q1", "q3", "whisker_lo", "whisker_hi", "n_outliers")
    atomic_write_text(m.output_paths[0], _csv_text(header, rows))
    if o.get("figure"):
        from .plotting import boxplot_figure

        boxplot_figure(labels, samples, o["figure"], quantity=quantity, per_unit=ref is not None)


HANDLERS = {
    "simulate": _cmd_simulate,
    "predict": _cmd_predict,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "assess": _cmd_assess,
    "report": _cmd_report,
}


def run(manifest):
    """Execute one command; returns the process exit code."""
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnobservableEsrWarning)
            manifest.check_paths()
            HANDLERS[manifest.command](manifest)
        for w in caught:
            if issubclass(w.category, UnobservableEsrWarning):
                print(json.dumps({"level": "warning", "code": UnobservableEsr.code,
                                  "message": str(w.message)}), file=sys.stderr)
        return EXIT_OK
    except UnobservableEsr as exc:
        _emit_error(exc.code, exc.message, exc.context)
        return EXIT_UNOBSERVABLE
    except CapmonError as exc:
        _emit_error(exc.code, exc.message, exc.context)
        return EXIT_INVALID
    except ValueError as exc:
        _emit_error("invalid_value", str(exc))
        return EXIT_INVALID


def _values_list(kind):
    def parse(text):
        try:
            return [kind(float(v)) if kind is int else kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value list {text!r}") from None
    return parse


def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(prog="capmon", description=__doc__.splitlines()[0],
                                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"capmon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    scen_help = "scenario config keys (JSON or TOML, flat):\n" + describe(SCENARIO_KEYS)
    pso_help = "estimator config keys (JSON or TOML, flat):\n" + describe(PSO_KEYS)

    p = sub.add_parser("simulate", help="write a synthetic window CSV", epilog=scen_help,
                       formatter_class=fmt)
    p.add_argument("--config", help="scenario config file (defaults used if omitted)")
    p.add_argument("--out", required=True, help="output window CSV (t,v_sm,v_sw,i_arm)")
    p.add_argument("--seed", type=int, help="override the noise seed [integer]")

    p = sub.add_parser("predict", help="predict the voltage for given C and ESR",
                       formatter_class=fmt)
    p.add_argument("--window", required=True, help="window CSV (t,v_sm,v_sw,i_arm)")
    p.add_argument("--c", type=float, required=True, help="capacitance [F]")
    p.add_argument("--esr", type=float, required=True, help="ESR [ohm]")
    p.add_argument("--out", required=True, help="output CSV (t,v_sm,v_hat,err)")
    p.add_argument("--figure", help="also render prediction and error to this image")
    p.add_argument("--strict", action="store_true", help="fail (exit 3) if ESR is unobservable")

    for name, text in (("estimate", "estimate C and ESR from a window"),
                       ("sweep", "repeat estimation across swarm sizes or error limits")):
        p = sub.add_parser(name, help=text, epilog=pso_help, formatter_class=fmt)
        p.add_argument("--window", required=True, help="window CSV (t,v_sm,v_sw,i_arm)")
        p.add_argument("--config", help="estimator config file (published tuning if omitted)")
        p.add_argument("--out", required=True,
                       help="report JSON" if name == "estimate" else "per-value statistics CSV")
        p.add_argument("--seed", type=int, help="override the base seed [integer]")
        p.add_argument("--c0", type=float, help="reference capacitance for IQR percent [F]")
        p.add_argument("--esr0", type=float, help="reference ESR for IQR percent [ohm]")
        p.add_argument("--strict", action="store_true",
                       help="fail (exit 3) if the window has no switching transitions")
        if name == "sweep":
            p.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
            p.add_argument("--values", required=True,
                           help="comma-separated values, e.g. 5,10,20 or 1e-3,1e-6")
            p.add_argument("--runs", type=int, default=100,
                           help="runs per value [count, default 100]")
            p.add_argument("--figure", help="also render per-value boxplots to this image")

    p = sub.add_parser("assess", help="end-of-life verdict from a report", formatter_class=fmt)
    p.add_argument("--report", required=True, help="report JSON from `estimate`")
    p.add_argument("--c0", type=float, required=True, help="initial capacitance [F]")
    p.add_argument("--esr0", type=float, required=True, help="initial ESR [ohm]")

    p = sub.add_parser("report", help="export boxplot data of one or more reports",
                       formatter_class=fmt)
    p.add_argument("--reports", nargs="+", required=True, help="report JSON files")
    p.add_argument("--format", default="boxplot-csv", choices=["boxplot-csv"])
    p.add_argument("--quantity", default="c", choices=["c", "esr"])
    p.add_argument("--c0", type=float, help="normalise C by this [F]")
    p.add_argument("--esr0", type=float, help="normalise ESR by this [ohm]")
    p.add_argument("--out", required=True,
                   help="CSV: id,median,q1,q3,whisker_lo,whisker_hi,n_outliers")
    p.add_argument("--figure", help="also render the boxplots to this image")
    return parser


def manifest_from_args(args):
    opts = {k: v for k, v in vars(args).items()
            if k not in ("command", "config", "window", "report", "reports", "out", "seed")}
    inputs = []
    if getattr(args, "window", None):
        inputs.append(args.window)
    if getattr(args, "report", None):
        inputs.append(args.report)
    inputs.extend(getattr(args, "reports", None) or [])
    outputs = [args.out] if getattr(args, "out", None) else []
    if opts.get("figure"):
        outputs.append(opts["figure"])
    if args.command == "sweep":
        opts["values"] = _values_list(SWEEP_PARAMS[args.param])(args.values)
        if not opts["values"]:
            raise argparse.ArgumentTypeError("--values is empty")
    return RunManifest(
        command=args.command,
        config_path=getattr(args, "config", None),
        input_paths=inputs,
        output_paths=outputs,
        seed=getattr(args, "seed", None),
        options=opts,
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = manifest_from_args(args)
    except argparse.ArgumentTypeError as exc:
        _emit_error("invalid_argument", str(exc))
        return EXIT_INVALID
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
