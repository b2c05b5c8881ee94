"""Command-line interface.

Subcommands:
    simulate          linear-regression study on simulated data
    classify          logistic regression on LIBSVM-format files
    precond-only      fixed-point convergence of the preconditioner
    check-invariants  eigenvalue-bound sweep over a (d, covariance) grid
    time-compare      wall-time comparison of streaming block sizes

Every subcommand reads an optional flat key=value config file, overridable
by flags, writes a CSV report to --out, and with --plot also renders a
figure next to it.  Runs are reproducible from --seed; the default CSV
contains no timing columns so identical seeds produce identical bytes.
"""

import argparse
import os
import sys

from . import plots
from .config import ExperimentConfig, load_config, config_from, replace
from .csvio import emit_csv
from .runner import (PRECOND_COLUMNS, run_invariant_sweep, run_precond_only,
                     run_replications, time_profile)


def _add_common(p, default_out):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="top-level RNG seed")
    p.add_argument("--out", default=None,
                   help=f"output CSV path (default {default_out})")
    p.add_argument("--plot", action="store_true", default=None,
                   help="render a figure next to the CSV")


def _add_sim_flags(p):
    p.add_argument("--d", type=int, help="problem dimension")
    p.add_argument("--n-samples", type=int, dest="n_samples",
                   help="total samples per replication")
    p.add_argument("--replications", type=int)
    p.add_argument("--optimizer", dest="optimizers",
                   help="comma-separated optimizer kinds")
    p.add_argument("--cov", choices=("identity", "toeplitz"))
    p.add_argument("--rho", type=float, help="toeplitz correlation")
    p.add_argument("--block-size", dest="block_size",
                   help="swafa block size: integer, 'sqrt' or 'd'")
    p.add_argument("--a-hat", dest="a_hat", choices=("averaged", "current"))
    p.add_argument("--grad-reuse", dest="grad_reuse", action="store_true",
                   default=None,
                   help="reuse the iterate gradient in the preconditioner "
                        "update (single evaluation per step)")
    p.add_argument("--no-gate-theta", dest="gate_theta", action="store_false",
                   default=None,
                   help="always move theta, even on truncated steps "
                        "(the literal recursion)")
    p.add_argument("--record-precond", dest="record_precond",
                   action="store_true", default=None,
                   help="track the preconditioner error per milestone")
    p.add_argument("--with-timing", dest="with_timing", action="store_true",
                   default=None,
                   help="add wall-time columns (CSV no longer byte-"
                        "deterministic)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fadagrad",
        description="Full-matrix AdaGrad benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="linear regression on simulated data")
    _add_common(p, "simulate.csv")
    _add_sim_flags(p)

    p = sub.add_parser("classify", help="logistic regression on LIBSVM files")
    _add_common(p, "classify.csv")
    p.add_argument("--train", dest="train_path", help="training file")
    p.add_argument("--test", dest="test_path",
                   help="test file (omit to split the training file)")
    p.add_argument("--split-fraction", dest="split_fraction", type=float)
    p.add_argument("--passes", type=int, help="passes over the training set")
    p.add_argument("--replications", type=int)
    p.add_argument("--optimizer", dest="optimizers")
    p.add_argument("--block-size", dest="block_size")

    p = sub.add_parser("precond-only",
                       help="preconditioner convergence at a fixed point")
    _add_common(p, "precond.csv")
    p.add_argument("--d", type=int)
    p.add_argument("--steps", type=int, help="update count")
    p.add_argument("--replications", type=int)
    p.add_argument("--cov", choices=("identity", "toeplitz"))
    p.add_argument("--rho", type=float)
    p.add_argument("--a0-scale", dest="a0_scale", type=float)
    p.add_argument("--block-size", dest="block_size")

    p = sub.add_parser("check-invariants",
                       help="eigenvalue-bound sweep over a grid")
    _add_common(p, "invariants.csv")
    p.add_argument("--dims", default="2,5,20",
                   help="comma-separated dimensions")
    p.add_argument("--covs", default="identity,toeplitz")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--rho", type=float)

    p = sub.add_parser("time-compare",
                       help="median wall times: wafa vs streaming variants")
    _add_common(p, "timing.csv")
    p.add_argument("--d", type=int)
    p.add_argument("--n-samples", type=int, dest="n_samples")
    p.add_argument("--runs", type=int, default=5,
                   help="timed runs per configuration")
    return parser


_CONFIG_KEYS = ("seed", "out", "d", "n_samples", "replications", "optimizers",
                "cov", "rho", "block_size", "a_hat", "grad_reuse",
                "gate_theta", "record_precond", "with_timing", "plot",
                "train_path", "test_path", "split_fraction", "passes",
                "steps", "a0_scale")


def _gather_config(args, defaults):
    overrides = {}
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    overrides.update(defaults)
    if getattr(args, "config", None):
        return load_config(args.config, overrides)
    return config_from(overrides)


def _out_path(cfg, default):
    return cfg.out or default


def _figure_path(csv_path):
    stem, _ = os.path.splitext(csv_path)
    return stem + ".png"


def cmd_simulate(args):
    cfg = _gather_config(args, {"task": "linear_sim"})
    result = run_replications(cfg)
    out = _out_path(cfg, "simulate.csv")
    emit_csv(result["columns"], result["rows"], out)
    print(f"wrote {out} ({len(result['rows'])} rows, "
          f"{len(cfg.optimizers)} optimizers)")
    if args.plot or cfg.plot:
        fig = plots.render_error_curves(result["rows"], _figure_path(out))
        print(f"wrote {fig}")
    return 0


def cmd_classify(args):
    cfg = _gather_config(args, {"task": "logistic_file"})
    if not cfg.train_path:
        print("classify: --train is required", file=sys.stderr)
        return 2
    result = run_replications(cfg)
    out = _out_path(cfg, "classify.csv")
    emit_csv(result["columns"], result["rows"], out)
    print(f"wrote {out}")
    print(f"{'optimizer':<14} {'train acc':>10} {'test acc':>10}")
    for entry in result["accuracy"]:
        print(f"{entry['optimizer']:<14} {entry['train_acc']:>10.4f} "
              f"{entry['test_acc']:>10.4f}")
    if args.plot or cfg.plot:
        fig = plots.render_accuracy(result["accuracy"], _figure_path(out))
        print(f"wrote {fig}")
    return 0


def cmd_precond_only(args):
    cfg = _gather_config(args, {"task": "linear_sim"})
    if cfg.steps is None:
        cfg = replace(cfg, steps=200_000)
    result = run_precond_only(cfg)
    out = _out_path(cfg, "precond.csv")
    emit_csv(PRECOND_COLUMNS, result["rows"], out)
    final = result["rows"][-1]
    print(f"wrote {out}")
    print(f"final relative error of the averaged estimate: "
          f"{final['rel_err_avg_mean']:.4f}")
    if args.plot or cfg.plot:
        fig = plots.render_precond_curve(result["rows"], _figure_path(out))
        print(f"wrote {fig}")
    return 0


def cmd_check_invariants(args):
    dims = tuple(int(s) for s in args.dims.split(","))
    covs = tuple(s.strip() for s in args.covs.split(","))
    seed = args.seed if args.seed is not None else 2024
    rho = args.rho if args.rho is not None else 0.9
    rows = run_invariant_sweep(dims=dims, covs=covs, steps=args.steps,
                               seed=seed, rho=rho)
    out = args.out or "invariants.csv"
    emit_csv(("d", "cov", "steps", "min_margin", "max_margin", "symmetric",
              "violations", "passed"), rows, out)
    failures = 0
    for row in rows:
        status = "ok" if row["passed"] else "VIOLATED"
        print(f"d={row['d']:<3} cov={row['cov']:<9} "
              f"min_margin={row['min_margin']:+.3e} "
              f"max_margin={row['max_margin']:+.3e} {status}")
        failures += 0 if row["passed"] else 1
    print(f"wrote {out}")
    if failures:
        print(f"{failures} grid cell(s) violated the eigenvalue bounds",
              file=sys.stderr)
        return 1
    return 0


def cmd_time_compare(args):
    cfg = _gather_config(args, {"task": "linear_sim"})
    if getattr(args, "d", None) is None:
        cfg = replace(cfg, d=200)
    if getattr(args, "n_samples", None) is None:
        cfg = replace(cfg, n_samples=200_000)
    base = replace(cfg, optimizers=("wafa",))
    sqrt_cfg = replace(cfg, optimizers=("swafa",), block_size="sqrt")
    full_cfg = replace(cfg, optimizers=("swafa",), block_size="d")
    entries = time_profile((base, sqrt_cfg, full_cfg), runs=args.runs)
    out = _out_path(cfg, "timing.csv")
    emit_csv(("label", "median"), entries, out)
    for e in entries:
        print(f"{e['label']:<16} median {e['median']:.3f} s")
    print(f"speedup swafa(n=d) vs wafa: "
          f"{entries[0]['median'] / entries[2]['median']:.2f}x")
    print(f"wrote {out}")
    if args.plot or cfg.plot:
        fig = plots.render_timing(entries, _figure_path(out))
        print(f"wrote {fig}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "precond-only": cmd_precond_only,
    "check-invariants": cmd_check_invariants,
    "time-compare": cmd_time_compare,
}


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"fadagrad {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
