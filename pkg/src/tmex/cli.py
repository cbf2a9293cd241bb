"""Command-line interface.

Exit codes: 0 success, 2 configuration or usage error, 3 data error,
4 numerical degeneracy.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import causal, io, metrics
from .calibration import run_calibration
from .citest import CiTestConfig
from .exceptions import (ArityError, CellTestError, ConfigError, DataError, DegenerateError, DimError,
                         OverlapError, ShapeError, SingularError, SmallSampleError, TmexError,
                         WeakInstrumentError)
from .measurement import MeasurementModel, make_model_abc, realize
from .scenarios import SCENARIOS, ScenarioConfig, load_report, run_scenario
from .scm import Dag, ScmSpec, sample_scm, simulation_scm
from .score import tmex_from_data

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_NUMERIC = (SingularError, DegenerateError, OverlapError, WeakInstrumentError, SmallSampleError)
_DATA = (DataError, ShapeError, DimError, ArityError)


class UsageError(ConfigError):
    pass


def exit_code(exc):
    if isinstance(exc, CellTestError) and exc.__cause__ is not None:
        return exit_code(exc.__cause__)
    if isinstance(exc, _NUMERIC):
        return EXIT_NUMERIC
    if isinstance(exc, _DATA):
        return EXIT_DATA
    return EXIT_CONFIG


def _emit(text, out):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_scm(arg):
    if arg == "simulation":
        return simulation_scm()
    return io.load_with(arg, ScmSpec.from_dict)


def _load_model(arg, seed):
    if arg.upper() in ("A", "B", "C"):
        return make_model_abc(arg, seed=seed)
    return io.load_with(arg, MeasurementModel.from_dict)


def cmd_simulate(args):
    args.seed = args.seed or 0
    spec = _load_scm(args.scm)
    model = _load_model(args.model, args.seed)
    if model.n_latents != spec.n_nodes:
        raise DataError(f"model has {model.n_latents} latents, SCM has {spec.n_nodes} nodes")
    z = sample_scm(spec, args.n, args.seed)
    ds = realize(model, z, args.seed)
    if args.out:
        io.write_dataset(ds, args.out)
    else:
        import csv
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(ds.header())
        w.writerows([[io.fmt(v) for v in row] for row in np.hstack([ds.z, ds.zhat])])
    print(f"{ds.n} rows, {len(ds.header())} columns: {', '.join(ds.header())}", file=sys.stderr)
    return EXIT_OK


def _test_config(args):
    cfg = io.load_with(args.test_config, CiTestConfig.from_dict) if args.test_config else CiTestConfig()
    overrides = {}
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.seed is not None:
        overrides["seed"] = args.seed
    d = {**cfg.to_dict(), **overrides}
    return CiTestConfig.from_dict(d)


def _parse_latents(text):
    if text is None:
        return None
    try:
        return [int(t) - 1 for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--latents expects 1-based comma-separated indices, got {text!r}") from None


def cmd_tmex(args):
    ds = io.read_dataset(args.data)
    model = io.load_with(args.model, MeasurementModel.from_dict)
    if ds.n_latents != model.n_latents or ds.n_blocks != model.n_blocks:
        raise DataError(f"{args.data}: {ds.n_latents} latents and {ds.n_blocks} blocks, "
                        f"model expects {model.n_latents} and {model.n_blocks}")
    report = tmex_from_data(ds, model, _test_config(args), holm=args.holm,
                            latents=_parse_latents(args.latents), threads=args.threads or 1)
    if args.pvalues_csv:
        io.write_rows(report.p_value_rows(), args.pvalues_csv)
    _emit(io.write_json(report.to_dict()), args.out)
    return EXIT_OK


def cmd_metrics(args):
    which = set(args.which.split(","))
    unknown = which - {"r2", "mcc", "shd"}
    if unknown:
        raise UsageError(f"unknown metrics: {sorted(unknown)}")
    out = {}
    if which & {"r2", "mcc"}:
        if not args.data:
            raise UsageError("r2 and mcc need --data")
        ds = io.read_dataset(args.data)
        if "r2" in which:
            out["r2"] = [metrics.r2_score(ds.z[:, i], ds.zhat, seed=args.seed or 0)
                         for i in range(ds.n_latents)]
        if "mcc" in which:
            out["mcc"] = metrics.mcc(ds.z, ds.zhat, args.mode).to_dict()
    if "shd" in which:
        if not (args.graph1 and args.graph2):
            raise UsageError("shd needs two graph files (--graph1 and --graph2)")
        g1, g2 = (io.load_with(p, _dag_from_dict) for p in (args.graph1, args.graph2))
        out["shd"] = metrics.shd(g1, g2)
    _emit(io.write_json(out), args.out)
    return EXIT_OK


def _dag_from_dict(d):
    for key in ("n_nodes", "edges"):
        if key not in d:
            raise ConfigError(f"graph is missing key {key!r}")
    return Dag(d["n_nodes"], [tuple(e) for e in d["edges"]])


def _columns(ds, names, what):
    header = ds.header()
    full = np.hstack([ds.z, ds.zhat])
    idx = []
    for name in names:
        if name not in header:
            raise UsageError(f"{what}: unknown column {name!r}")
        idx.append(header.index(name))
    return full[:, idx]


def cmd_ate(args):
    ds = io.read_dataset(args.data)
    t = _columns(ds, [args.treatment], "--treatment")[:, 0]
    y = _columns(ds, [args.outcome], "--outcome")[:, 0]
    w = _columns(ds, args.adjust.split(","), "--adjust") if args.adjust else None
    seed = args.seed or 0
    if args.method == "linear":
        res = causal.ate_linear_adjust(t, y, w)
    elif args.method == "plm":
        res = causal.ate_partially_linear(t, y, w, seed=seed)
    elif args.method == "aipw":
        res = causal.ate_aipw(t, y, w, propensity=args.propensity, seed=seed)
    else:
        if not args.instrument:
            raise UsageError("--method iv needs --instrument")
        res = causal.ate_iv(t, y, _columns(ds, [args.instrument], "--instrument")[:, 0])
    _emit(io.write_json(res.to_dict()), args.out)
    return EXIT_OK


def cmd_experiment(args):
    if args.config:
        d = io.read_json(args.config)
    elif args.scenario:
        d = {"scenario": args.scenario}
    else:
        raise UsageError("experiment needs --config or --scenario")
    for key, val in (("seed", args.seed), ("output_dir", args.out), ("threads", args.threads),
                     ("alpha", args.alpha), ("n_repeats", args.repeats), ("n_samples", args.n)):
        if val is not None:
            d[key] = val
    if args.holm:
        d["holm"] = True
    try:
        cfg = ScenarioConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(f"bad experiment config: {exc}") from None
    report = run_scenario(cfg)
    print(render_report(report))
    return EXIT_OK


def render_report(report):
    lines = [f"scenario: {report.scenario}"]
    if not report.records:
        lines.append("no repeats")
        return "\n".join(lines)
    rows = report.table()
    if not rows:
        lines.append("no successful repeats")
        return "\n".join(lines)
    hidden = ("alt_cells", "alt_rejected", "grid_cells")
    metric_names = sorted({r[1] for r in rows if r[1] not in hidden and not r[1].startswith("p_")})
    groups = list(report.aggregates)
    head = ["group"] + metric_names
    body = []
    for g in groups:
        cells = [g]
        for m in metric_names:
            s = report.aggregates[g].get(m)
            cells.append(f"{s['mean']:.4f} ± {s['sd']:.4f}" if s else "-")
        body.append(cells)
    widths = [max(len(str(r[k])) for r in [head] + body) for k in range(len(head))]
    for r in [head] + body:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    n_err = sum(r.get("status") == "error" for r in report.records)
    if n_err:
        lines.append(f"{n_err} repeat(s) failed")
    return "\n".join(lines)


def cmd_report(args):
    print(render_report(load_report(args.report)))
    return EXIT_OK


def cmd_calibrate(args):
    suite = args.suite.split(",") if args.suite else None
    try:
        ledger = run_calibration(suite, budget=args.budget, seed=args.seed or 0, scale=args.scale)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(io.write_json(ledger), args.out)
    return EXIT_OK if ledger["passed"] else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (or directory for experiment)")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--holm", action="store_true", help="Holm-adjust the grid p-values")

    p = argparse.ArgumentParser(prog="tmex", description="Test-based measurement exclusivity.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="sample a paired dataset")
    s.add_argument("--scm", required=True, help="SCM JSON file or 'simulation'")
    s.add_argument("--model", required=True, help="measurement model JSON file or A/B/C")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("tmex", parents=[common], help="score a dataset against a hypothesis")
    s.add_argument("--data", required=True)
    s.add_argument("--model", required=True, help="hypothesized measurement model JSON")
    s.add_argument("--test-config", default=None)
    s.add_argument("--latents", default=None, help="1-based latents in the grid, e.g. 1,2,3")
    s.add_argument("--pvalues-csv", default=None)
    s.set_defaults(func=cmd_tmex)

    s = sub.add_parser("metrics", parents=[common], help="R², MCC and SHD")
    s.add_argument("--data", default=None)
    s.add_argument("--which", default="r2,mcc")
    s.add_argument("--mode", choices=("pearson", "spearman"), default="pearson")
    s.add_argument("--graph1", default=None)
    s.add_argument("--graph2", default=None)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("ate", parents=[common], help="treatment effect from a dataset")
    s.add_argument("--data", required=True)
    s.add_argument("--treatment", required=True)
    s.add_argument("--outcome", required=True)
    s.add_argument("--adjust", default=None, help="comma-separated column names")
    s.add_argument("--method", choices=("linear", "plm", "aipw", "iv"), default="linear")
    s.add_argument("--instrument", default=None)
    s.add_argument("--propensity", type=float, default=0.5)
    s.set_defaults(func=cmd_ate)

    s = sub.add_parser("experiment", parents=[common], help="run a canned scenario")
    s.add_argument("--config", default=None)
    s.add_argument("--scenario", choices=SCENARIOS, default=None)
    s.add_argument("--repeats", type=int, default=None)
    s.add_argument("--n", type=int, default=None)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("report", help="print a scenario report as a table")
    s.add_argument("report")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("calibrate", parents=[common], help="run the calibration suite")
    s.add_argument("--suite", default=None)
    s.add_argument("--budget", type=float, default=None)
    s.add_argument("--scale", type=float, default=1.0)
    s.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except TmexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code(exc)
    except (OSError, ValueError) as exc:
        # ValueError: input values the estimators cannot use (e.g. a non-binary treatment)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
