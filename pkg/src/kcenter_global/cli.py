"""Command-line front end: solve, FFT baseline and brute-force oracle runs."""

import argparse
import json
import logging
import sys
import time
from contextlib import ExitStack
from typing import Any, Callable, Dict, Optional, Sequence, TextIO

from .config import Config, get_config
from .dataset import Dataset, generate_gaussian, load_csv
from .exceptions import KCenterError, UsageError
from .heuristic import fft_multistart
from .oracle import brute_force
from .parallel import SamplePool
from .search import KCenterSolver, SolverConfig, Termination, TraceRecord

logger = logging.getLogger(__name__)

MODES = ("solve", "fft", "oracle")
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIME_LIMIT = 2

TRACE_HEADER = "iteration,beta,alpha,open_nodes,samples_active\n"


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that raises instead of exiting on bad arguments."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="kcenter-global",
        description="Exact branch-and-bound solver for K-center clustering",
    )
    parser.add_argument("mode", choices=MODES, help="What to run")

    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--csv", help="Comma-delimited numeric dataset")
    source.add_argument(
        "--synthetic",
        metavar="n=N,k=K,a=A,seed=S",
        help="Gaussian mixture with N samples, K clusters, A attributes",
    )
    parser.add_argument("--header", action="store_true", help="CSV has a header line")
    parser.add_argument("--k", type=int, required=True, help="Number of centers")

    solver = parser.add_argument_group("solver settings")
    solver.add_argument("--eps", type=float, dest="epsilon_rel", help="Relative gap")
    solver.add_argument("--time-limit", type=float, help="Seconds")
    solver.add_argument("--i-sr", type=int, help="Sample reduction interval")
    solver.add_argument("--ball-threshold", type=int)
    solver.add_argument("--max-representatives", type=int)
    solver.add_argument("--fft-trials", type=int, help="FFT starts at the root")
    solver.add_argument(
        "--seed-trials", type=int, help="FFT starts swept for initial seeds"
    )
    solver.add_argument("--max-open-nodes", type=int)
    solver.add_argument("--seed", type=int)
    solver.add_argument(
        "--workers",
        type=int,
        help="Sample-level threads; partitions hold at least 16 samples, "
        "so small datasets use fewer threads",
    )
    solver.add_argument("--log-interval", type=int)
    solver.add_argument("--no-bt", action="store_true", help="Disable bounds tightening")
    solver.add_argument("--no-assign", action="store_true", help="Disable cluster assignment")
    solver.add_argument("--no-reduce", action="store_true", help="Disable sample reduction")
    solver.add_argument("--no-symmetry", action="store_true", help="Disable symmetry breaking")

    parser.add_argument("--trials", type=int, help="FFT starts in fft mode")
    parser.add_argument("--oracle-limit", type=int, help="Max subsets in oracle mode")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument(
        "--save-config", help="Also write the effective configuration as YAML"
    )
    parser.add_argument("--output", help="Report path (stdout if omitted)")
    parser.add_argument("--trace", help="Per-iteration bound trace (CSV)")
    parser.add_argument("--log-level", help="Overrides logging.level")
    return parser


def parse_synthetic(text: str) -> Dict[str, int]:
    """Parse ``n=300,k=3,a=2,seed=7``; ``seed`` defaults to 0.

    Raises:
        UsageError: On a malformed item, unknown or missing key.
    """
    params = {"seed": 0}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in ("n", "k", "a", "seed"):
            raise UsageError(f"Bad synthetic item {item!r}; expected n=,k=,a=,seed=")
        try:
            params[key] = int(value)
        except ValueError:
            raise UsageError(f"Synthetic {key} must be an integer, got {value!r}") from None
    missing = {"n", "k", "a"} - set(params)
    if missing:
        raise UsageError(f"Synthetic parameters are missing {sorted(missing)}")
    return params


def configure_logging(config: Config, level: Optional[str] = None) -> None:
    """Set up root logging from the ``logging`` config section."""
    log_level = level or config.get("logging.level", "INFO")
    numeric_level = getattr(logging, str(log_level).upper(), logging.INFO)

    log_config: Dict[str, Any] = {
        "level": numeric_level,
        "format": config.get("logging.format"),
    }
    log_file = config.get("logging.file")
    if log_file:
        log_config["filename"] = log_file

    logging.basicConfig(**log_config)


def _load_dataset(args: argparse.Namespace, config: Config) -> Dataset:
    if args.csv:
        return load_csv(args.csv, has_header=args.header)
    params = parse_synthetic(args.synthetic)
    return generate_gaussian(
        params["n"],
        params["k"],
        params["a"],
        params["seed"],
        mean_low=config.get("generator.mean_low", 0.0),
        mean_high=config.get("generator.mean_high", 100.0),
        stddev=config.get("generator.stddev", 1.0),
    )


def _solver_config(args: argparse.Namespace, config: Config) -> SolverConfig:
    overrides = {
        "epsilon_rel": args.epsilon_rel,
        "time_limit": args.time_limit,
        "i_sr": args.i_sr,
        "ball_threshold": args.ball_threshold,
        "max_representatives": args.max_representatives,
        "fft_trials": args.fft_trials,
        "seed_trials": args.seed_trials,
        "max_open_nodes": args.max_open_nodes,
        "seed": args.seed,
        "workers": args.workers,
        "log_interval": args.log_interval,
    }
    for flag, name in (
        ("no_bt", "bounds_tightening"),
        ("no_assign", "assignment"),
        ("no_reduce", "sample_reduction"),
        ("no_symmetry", "symmetry_breaking"),
    ):
        if getattr(args, flag):
            overrides[name] = False
    return SolverConfig.from_config(config, **overrides)


def _save_config(cfg: SolverConfig, args: argparse.Namespace) -> None:
    """Save the loaded configuration with the effective solver section."""
    effective = Config(args.config) if args.config else Config()
    for name, value in cfg.to_dict().items():
        effective.set(f"solver.{name}", value)
    effective.save(args.save_config)
    logger.info(f"Configuration written to {args.save_config}")


def _trace_writer(stream: TextIO) -> Callable[[TraceRecord], None]:
    stream.write(TRACE_HEADER)

    def write(record: TraceRecord) -> None:
        stream.write(
            f"{record.iteration},{record.beta!r},{record.alpha!r},"
            f"{record.open_nodes},{record.samples_active}\n"
        )

    return write


def _run_solve(
    d: Dataset, args: argparse.Namespace, cfg: SolverConfig
) -> Dict[str, Any]:
    with ExitStack() as stack:
        trace = None
        if args.trace:
            trace = _trace_writer(stack.enter_context(open(args.trace, "w", encoding="utf-8")))
        report = KCenterSolver(d, args.k, cfg, trace).solve()
    return {
        "ub": report.ub,
        "lb": report.lb,
        "gap_pct": report.gap_pct,
        "nodes": report.nodes,
        "wall_time_s": report.wall_time,
        "termination": report.termination.value,
        "incumbent": list(report.incumbent.indices),
        "seeds_found": report.seeds_found,
        "samples_removed": report.samples_removed,
    }


def _run_fft(
    d: Dataset, args: argparse.Namespace, cfg: SolverConfig, config: Config
) -> Dict[str, Any]:
    trials = args.trials or config.get("baseline.fft_trials", 100)
    with SamplePool(cfg.workers) as pool:
        centers, value = fft_multistart(d, args.k, trials, cfg.seed, pool)
    return {
        "ub": value,
        "lb": None,
        "gap_pct": None,
        "nodes": 0,
        "termination": "heuristic",
        "incumbent": list(centers.indices),
        "trials": trials,
    }


def _run_oracle(d: Dataset, args: argparse.Namespace, config: Config) -> Dict[str, Any]:
    result = brute_force(
        d,
        args.k,
        limit=args.oracle_limit or config.get("oracle.limit", 5_000_000),
        batch_size=config.get("oracle.batch_size", 20_000),
    )
    return {
        "ub": result.opt_value,
        "lb": result.opt_value,
        "gap_pct": 0.0,
        "nodes": 0,
        "termination": "exhaustive",
        "incumbent": list(result.opt_centers.indices),
    }


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI invocation and return its exit code.

    Exit codes: 0 when the gap was met or the queue emptied (and for the
    fft and oracle modes), 2 when the time limit stopped the search, 1 on
    usage, data or solver errors.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        config = Config(args.config) if args.config else get_config()
        configure_logging(config, args.log_level)
        if args.k < 1:
            raise UsageError(f"--k must be at least 1, got {args.k}")

        d = _load_dataset(args, config)
        cfg = _solver_config(args, config)
        if args.save_config:
            _save_config(cfg, args)
        logger.info(
            f"Running {args.mode} on {d.n_samples} samples x {d.n_attrs} "
            f"attributes with K={args.k}"
        )

        started = time.perf_counter()
        if args.mode == "solve":
            report = _run_solve(d, args, cfg)
        elif args.mode == "fft":
            report = _run_fft(d, args, cfg, config)
        else:
            report = _run_oracle(d, args, config)
        report.setdefault("wall_time_s", time.perf_counter() - started)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        print(f"kcenter-global: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except KCenterError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"kcenter-global: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"kcenter-global: I/O error: {e}", file=sys.stderr)
        return EXIT_ERROR

    report.update(
        {
            "mode": args.mode,
            "config": cfg.to_dict(),
            "dataset": {
                "source": args.csv or f"synthetic:{args.synthetic}",
                "S": d.n_samples,
                "A": d.n_attrs,
                "K": args.k,
            },
        }
    )
    _write_report(report, args.output)

    if report["termination"] == Termination.TIME_LIMIT.value:
        return EXIT_TIME_LIMIT
    return EXIT_OK


def _write_report(report: Dict[str, Any], path: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info(f"Report written to {path}")
    else:
        print(text)


def main() -> None:
    """Console entry point."""
    sys.exit(run())
