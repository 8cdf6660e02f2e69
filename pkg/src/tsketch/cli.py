"""Command-line experiment runner.

Subcommands map one-to-one onto the experiment types; sweep grids default
to the benchmark's fixed values and can be overridden by passing a comma
list to the swept flag (e.g. ``sweep-m --m 100,200,400``).

Exit codes: 0 success, 2 configuration error, 3 when the fraction of
non-converged solver records exceeds ``--max-fail-frac``.
"""

from __future__ import annotations

import argparse
import os
import sys

from .harness import (
    DEFAULT_HW_THRESHOLDS,
    ConfigError,
    ExperimentConfig,
    REGRESSION_KINDS,
    TENSOR_DISTS,
    run_experiment,
)

_EXPERIMENTS = (
    "sweep-m",
    "sweep-p",
    "sweep-q",
    "bounded",
    "sparse-recovery",
    "embedding",
    "hw-tail",
)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _kinds_list(text: str) -> tuple[str, ...]:
    return tuple(k.strip() for k in text.split(",") if k.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsketch",
        description="Sparse row-wise Kronecker sketching experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in _EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--n1", type=int, default=64)
        p.add_argument("--n2", type=int, default=64)
        p.add_argument("--p", type=_int_list, default=None,
                       help="unknowns; comma list when swept by sweep-p")
        p.add_argument("--q", type=_float_list, default=None,
                       help="density level; comma list when swept by sweep-q")
        p.add_argument("--m", type=_int_list, default=None,
                       help="sketch rows; comma list when swept over m")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--dist", choices=TENSOR_DISTS, default="gr")
        p.add_argument("--kinds", type=_kinds_list, default=REGRESSION_KINDS,
                       help="comma list from {well,ill,structured}")
        p.add_argument("--out", default=None, help="CSV output path")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (fallback: TSKETCH_THREADS)")
        p.add_argument("--max-fail-frac", type=float, default=0.0,
                       help="tolerated fraction of non-converged solves")
        p.add_argument("--no-baselines", action="store_true",
                       help="skip the dense reference operators")
        if name == "sparse-recovery":
            p.add_argument("--s", type=int, default=5, help="signal sparsity")
        if name == "embedding":
            p.add_argument("--set-size", type=int, default=500)
        if name == "hw-tail":
            p.add_argument("--thresholds", type=_float_list,
                           default=DEFAULT_HW_THRESHOLDS)
    return parser


def _scalar(values, default):
    if values is None:
        return default
    if len(values) != 1:
        raise ConfigError("this experiment takes a single value for the flag")
    return values[0]


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    experiment = args.experiment
    kwargs = dict(
        experiment=experiment,
        problem_kinds=tuple(args.kinds),
        n1=args.n1,
        n2=args.n2,
        dist_pair=args.dist,
        trials=args.trials,
        base_seed=args.seed,
        include_baselines=not args.no_baselines,
    )
    sweeps_m = experiment in ("sweep-m", "bounded", "sparse-recovery", "embedding", "hw-tail")
    if sweeps_m:
        if args.m is not None:
            kwargs["m_values"] = tuple(args.m)
    else:
        kwargs["m"] = int(_scalar(args.m, 400))
    if experiment == "sweep-p":
        if args.p is not None:
            kwargs["p_values"] = tuple(args.p)
    else:
        kwargs["p"] = int(_scalar(args.p, 15))
    if experiment == "sweep-q":
        if args.q is not None:
            kwargs["q_values"] = tuple(args.q)
    else:
        kwargs["q"] = float(_scalar(args.q, 0.2))
    if experiment == "sparse-recovery":
        kwargs["sparse_s"] = args.s
        if args.m is None:
            kwargs["m_values"] = (40, 80, 160, 320)
    if experiment == "embedding":
        kwargs["set_size"] = args.set_size
        if args.m is None:
            kwargs["m_values"] = (100, 200, 400, 800)
    if experiment == "hw-tail":
        kwargs["hw_thresholds"] = tuple(args.thresholds)
        if args.m is None:
            kwargs["m_values"] = (50, 100, 200)
    return ExperimentConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("TSKETCH_THREADS", "1"))
    try:
        config = config_from_args(args)
        records = run_experiment(config, out_path=args.out, threads=threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    failed = sum(1 for r in records if not r.converged)
    fail_frac = failed / len(records) if records else 0.0
    where = args.out if args.out else "(records not written; pass --out)"
    print(f"{len(records)} records, {failed} non-converged -> {where}")
    if fail_frac > args.max_fail_frac:
        print(
            f"non-convergence fraction {fail_frac:.4f} exceeds --max-fail-frac "
            f"{args.max_fail_frac:.4f}",
            file=sys.stderr,
        )
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
