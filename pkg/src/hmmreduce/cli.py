"""Command-line interface.

Subcommands: reduce one model, run a multi-seed batch, compare the two
Step-2 versions, dump a Hankel matrix, evaluate the divergence between two
models, and reproduce the bundled benchmark experiments.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    DegenerateStateError,
    DomainError,
    HmmReduceError,
    InputError,
    ModelParseError,
    ReducibilityError,
    ShapeError,
    SizeLimitError,
    ValidationError,
)
from .experiments import (
    compare_step2_versions,
    run_batch,
    write_divergence_decay_csv,
    write_final_divergence_csv,
    write_table_csv,
    write_variability_csv,
)
from .hankel import build_factors
from .modelio import dump_model, example_model, load_model
from .nmf import Step1Config, Step2Config
from .pipeline import ReductionConfig, final_divergence, reduce_model

EXIT_CODES = """exit codes:
  0  success
  1  internal error
  2  bad command line
  3  model file not found
  4  model file malformed
  5  invalid model or parameters
  6  size limit exceeded
  7  reducible / degenerate chain
"""


def _model_arg(parser, name="model"):
    parser.add_argument(name, type=Path, help="model file (.hmm)")


def _reduction_args(parser):
    parser.add_argument("--size", type=int, required=True,
                        help="target state-space size N")
    parser.add_argument("--n", type=int, default=5,
                        help="Hankel half-length (default 5)")
    parser.add_argument("--step2", choices=["gamma", "pi"], default="gamma",
                        help="Step-2 version (default gamma)")
    parser.add_argument("--iters1", type=int, default=3000,
                        help="Step-1 iterations (default 3000)")
    parser.add_argument("--iters2", type=int, default=3000,
                        help="Step-2 iterations (default 3000)")
    parser.add_argument("--eval-n", type=int, default=None,
                        help="half-length for the final divergence "
                             "(default: same as --n)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmmreduce",
        description="HMM order reduction via I-divergence Hankel factorization.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce one model to an assigned size")
    _model_arg(p)
    _reduction_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("reduction_report.txt"),
                   help="report file (default reduction_report.txt)")
    p.add_argument("--model-out", type=Path, default=None,
                   help="also write the reduced model here")

    p = sub.add_parser("batch", help="multi-seed batch of reductions")
    _model_arg(p)
    _reduction_args(p)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1,
                   help="parallel runs (results independent of scheduling)")
    p.add_argument("--out", type=Path, default=Path("table.csv"))
    p.add_argument("--fig-out", type=Path, default=None,
                   help="also write per-run final divergences here")

    p = sub.add_parser("compare-step2",
                       help="gamma vs pi Step-2 from one fixed Step-1 output")
    _model_arg(p)
    _reduction_args(p)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--snapshot-every", type=int, default=100)
    p.add_argument("--variability-out", type=Path,
                   default=Path("fig_variability.csv"))
    p.add_argument("--decay-out", type=Path,
                   default=Path("fig_divergence_decay.csv"))

    p = sub.add_parser("hankel", help="dump the Hankel matrix of a model")
    _model_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", type=Path, default=Path("hankel.csv"))
    p.add_argument("--factors", action="store_true",
                   help="also dump the forward/backward factors")

    p = sub.add_parser("eval", help="divergence between two models' Hankels")
    _model_arg(p, "model_a")
    _model_arg(p, "model_b")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("reproduce", help="run a bundled benchmark experiment")
    p.add_argument("--example", type=int, choices=[1, 2], required=True)
    p.add_argument("--reduction", choices=["4to2", "4to3"], required=True)
    p.add_argument("--runs", type=int, default=15)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    return parser


def _write_matrix_csv(path, X, header):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in np.asarray(X):
            w.writerow([repr(float(x)) for x in row])


def _report_lines(res, seed):
    yield f"seed: {seed}"
    yield f"target_size: {res.config.target_size}"
    yield f"half_length: {res.config.half_length}"
    yield f"step2_version: {res.config.step2_version}"
    yield f"step1_iterations: {len(res.step1_trace)}"
    yield f"step2_iterations: {len(res.step2_trace)}"
    yield f"div1b: {res.div1b!r}"
    yield f"div1: {res.div1!r}"
    yield f"div2b: {res.div2b!r}"
    yield f"div2: {res.div2!r}"
    yield f"div_final: {res.div_final!r}"
    model = res.model_star
    for y in range(model.m):
        yield f"M*[{y}]:"
        for row in np.asarray(model.M[y]):
            yield "  " + " ".join(repr(float(x)) for x in row)
    yield "A*:"
    for row in model.A:
        yield "  " + " ".join(repr(float(x)) for x in row)
    yield "pi*: " + " ".join(repr(float(x)) for x in model.pi)


def _cmd_reduce(args) -> int:
    model = load_model(args.model)
    cfg = ReductionConfig(
        target_size=args.size, half_length=args.n, step2_version=args.step2,
        step1=Step1Config(max_iterations=args.iters1, seed=args.seed),
        step2=Step2Config(max_iterations=args.iters2, seed=args.seed),
        eval_half_length=args.eval_n,
    )
    res = reduce_model(model, cfg)
    args.out.write_text("\n".join(_report_lines(res, args.seed)) + "\n")
    if args.model_out is not None:
        args.model_out.write_text(dump_model(res.model_star))
    print(f"div_final: {res.div_final!r}")
    print(f"report written to {args.out}")
    return 0


def _make_cfg(args):
    return ReductionConfig(
        target_size=args.size, half_length=args.n, step2_version=args.step2,
        step1=Step1Config(max_iterations=args.iters1),
        step2=Step2Config(max_iterations=args.iters2),
        eval_half_length=args.eval_n,
    )


def _cmd_batch(args) -> int:
    model = load_model(args.model)
    report = run_batch(model, _make_cfg(args), args.runs, args.base_seed,
                       workers=args.workers)
    write_table_csv(args.out, report)
    if args.fig_out is not None:
        write_final_divergence_csv(args.fig_out, report)
    print(f"table written to {args.out}")
    if report.best_run is not None:
        best = report.rows[report.best_run]
        print(f"best run: {best.run + 1} (div_final {best.div_final!r})")
    return 0


def _cmd_compare(args) -> int:
    model = load_model(args.model)
    cmp = compare_step2_versions(model, _make_cfg(args), args.runs,
                                 args.base_seed,
                                 snapshot_every=args.snapshot_every)
    write_variability_csv(args.variability_out, cmp)
    write_divergence_decay_csv(args.decay_out, cmp)
    print(f"R (gamma): {cmp.r_gamma!r}")
    print(f"R (pi): {cmp.r_pi!r}")
    print(f"max |mean M*_gamma - mean M*_pi|: {cmp.mean_gap!r}")
    return 0


def _cmd_hankel(args) -> int:
    model = load_model(args.model)
    system = build_factors(model, args.n)
    meta = [f"# m={model.m}", f"n={args.n}", "rows=flo", "cols=llo"]
    _write_matrix_csv(args.out, system.H, meta)
    if args.factors:
        _write_matrix_csv(args.out.with_suffix(".pi.csv"), system.Pi, meta)
        _write_matrix_csv(args.out.with_suffix(".gamma.csv"), system.Gamma, meta)
    print(f"hankel written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    a = load_model(args.model_a)
    b = load_model(args.model_b)
    print(repr(final_divergence(a, b, args.n)))
    return 0


def _cmd_reproduce(args) -> int:
    model = example_model(args.example)
    if args.reduction == "4to2":
        size, n, iters2 = 2, 5, 3000
    else:
        size, n, iters2 = 3, 7, 20000
    cfg = ReductionConfig(
        target_size=size, half_length=n, step2_version="gamma",
        step1=Step1Config(max_iterations=3000),
        step2=Step2Config(max_iterations=iters2),
    )
    report = run_batch(model, cfg, args.runs, args.base_seed,
                       workers=args.workers)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    table = args.out_dir / f"table_example{args.example}_{args.reduction}.csv"
    fig = args.out_dir / f"fig_final_divergence_example{args.example}_{args.reduction}.csv"
    write_table_csv(table, report)
    write_final_divergence_csv(fig, report)
    print(f"table written to {table}")
    print(f"figure data written to {fig}")
    if report.R is not None:
        print(f"R over final M*: {report.R!r}")
    return 0


_COMMANDS = {
    "reduce": _cmd_reduce,
    "batch": _cmd_batch,
    "compare-step2": _cmd_compare,
    "hankel": _cmd_hankel,
    "eval": _cmd_eval,
    "reproduce": _cmd_reproduce,
}

_ERROR_EXITS = (
    (FileNotFoundError, 3, "file-not-found"),
    (ModelParseError, 4, "parse-error"),
    ((ValidationError, DomainError, InputError, ShapeError), 5, "invalid-input"),
    (SizeLimitError, 6, "size-limit"),
    ((ReducibilityError, DegenerateStateError), 7, "degenerate-chain"),
    (HmmReduceError, 1, "internal-error"),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (HmmReduceError, FileNotFoundError) as err:
        for exc_types, code, category in _ERROR_EXITS:
            if isinstance(err, exc_types):
                print(f"error:{category}: {err}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
