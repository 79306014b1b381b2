"""Command line entry point: `phi4 <experiment> [options]`."""
import argparse
import logging
import os
import sys
from typing import List, Optional, Tuple

from ._experiments import run_experiment
from ._reports import ReportWriter
from ._spec import ExperimentError, ExperimentSpec, ToleranceFailure
from phi4lab.config import RunConfig
from phi4lab.diagrams import QuadratureConvergenceError
from phi4lab.simulation import DivergenceError
from phi4lab.utils import CacheManager, set_global_loggers_to_warning

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

COMMANDS = {
    "toy": "toy",
    "expand": "expand",
    "oracle": "oracle",
    "simulate": "simulate",
    "asymptoticity": "asymptoticity",
    "two-point": "two_point",
    "four-point": "four_point",
}
EXIT_OK, EXIT_TOLERANCE, EXIT_INVALID = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="flat key: value YAML file overlaid on the defaults")
    common.add_argument("--out", default=".", help="directory for the CSV, plot script and figure; for expand, a .txt path names the expansion file")
    common.add_argument("--seed", type=int, default=None, help="seed of every random draw")
    common.add_argument("--threads", type=int, default=None, help="worker processes for independent chains")
    common.add_argument("--dot-dir", default=None, help="write one DOT file per graph here")

    parser = argparse.ArgumentParser(prog="phi4", description="Perturbation theory experiments for lattice Phi^4")
    commands = parser.add_subparsers(dest="command", required=True)

    toy = commands.add_parser("toy", parents=[common], help="zero-dimensional integral against its series")
    toy.add_argument("--coupling", type=float, default=None)
    toy.add_argument("--terms", type=int, default=None)

    expand = commands.add_parser("expand", parents=[common], help="symbolic expansion of the k-point function")
    expand.add_argument("--k", type=int, default=None)
    expand.add_argument("--order", "--n", dest="order", type=int, default=None, help="expansion order N")

    commands.add_parser("oracle", parents=[common], help="identity battery on the quadrature oracle")

    simulate = commands.add_parser("simulate", parents=[common], help="Langevin chains at one coupling")
    simulate.add_argument("--coupling", type=float, default=None)
    simulate.add_argument("--chains", type=int, default=None)
    simulate.add_argument("--checkpoint", default=None, help="save the final chain state here")

    asymptoticity = commands.add_parser("asymptoticity", parents=[common], help="remainder slope of the order-N series")
    asymptoticity.add_argument("--order", type=int, default=None)
    asymptoticity.add_argument("--chains", type=int, default=None)

    for name in ("two-point", "four-point"):
        command = commands.add_parser(name, parents=[common], help=f"{name} short-distance behaviour")
        command.add_argument("--chains", type=int, default=None)
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    """Command line values that win over the run configuration; unset flags are dropped by RunConfig"""
    overrides = {"seed": args.seed, "n_processes": args.threads}
    coupling_key = "toy_coupling" if args.command == "toy" else "coupling"
    overrides[coupling_key] = getattr(args, "coupling", None)
    overrides["toy_terms"] = getattr(args, "terms", None)
    overrides["k"] = getattr(args, "k", None)
    overrides["order"] = getattr(args, "order", None)
    overrides["n_chains"] = getattr(args, "chains", None)
    return overrides


def output_paths(args: argparse.Namespace) -> Tuple[str, Optional[str]]:
    """Output directory and, for `expand --out file.txt`, the expansion file path"""
    if args.command == "expand" and args.out.endswith(".txt"):
        return os.path.dirname(args.out) or ".", args.out
    return args.out, None


def main(argv: Optional[List[str]] = None) -> int:
    set_global_loggers_to_warning()
    args = build_parser().parse_args(argv)
    kind = COMMANDS[args.command]
    try:
        run_config = RunConfig(args.config, overrides_from_args(args))
        CacheManager().clean_cache(run_config.get("cache_max_age_days"))
        output_dir, expansion_file = output_paths(args)
        spec = ExperimentSpec.from_run_config(
            kind,
            run_config,
            output_dir=output_dir,
            dot_dir=args.dot_dir,
            checkpoint_path=getattr(args, "checkpoint", None),
            expansion_file=expansion_file,
        )
        report = run_experiment(spec)
        paths = ReportWriter(output_dir).write(report)
        for key, value in report.summary.items():
            print(f"{key}: {value}")
        print(f"wrote {', '.join(paths)}")
        if not report.passed:
            raise ToleranceFailure(report.name, report.failures)
    except ToleranceFailure as failure:
        print(f"FAILED {failure}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ExperimentError, QuadratureConvergenceError, DivergenceError, FileNotFoundError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
