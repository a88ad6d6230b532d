"""Command-line router: `run`, `report` and `plot` subcommands."""

import argparse
import logging
from typing import Optional, Sequence

from agent.schemas import ReferencePolicy, Variant
from cli.handlers import cmd_plot, cmd_report, cmd_run

logger = logging.getLogger(__name__)

ALGORITHM_CHOICES = [v.value for v in Variant] + [p.value for p in ReferencePolicy] + ["all"]


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw}")
    return value


def _non_negative_int(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {raw}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with all subcommands registered."""
    parser = argparse.ArgumentParser(
        prog="reversedq-bench",
        description="Posterior-sampling Q-learning benchmarks on BDCL and chain MDPs.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run experiments and write results CSVs")
    run.add_argument("--config", help="YAML experiment file")
    run.add_argument("--env", choices=["bdcl", "chain"], help="Environment")
    run.add_argument("--algo", choices=ALGORITHM_CHOICES, help="Agent preset, reference or 'all'")
    run.add_argument(
        "--references", action="store_true", help="Also run the oracle and random references"
    )
    run.add_argument("--seeds", type=_positive_int, help="Number of seeds")
    run.add_argument("--episodes", type=_positive_int, help="Episodes K per run")
    run.add_argument("--seed-base", type=_non_negative_int, help="First root seed")
    run.add_argument("--out", help="Results directory")
    run.add_argument("--kappa", type=float, help="Inflation coefficient")
    run.add_argument("--ensembles", type=_positive_int, help="Ensemble size J")
    run.add_argument("--eta", type=float, help="Mixing rate")
    run.add_argument("--n0", type=float, help="Number of prior transitions")
    run.add_argument("--p-fail", type=float, help="BDCL failure probability")
    run.add_argument("--structure-seed", type=_non_negative_int, help="BDCL progress-action seed")
    run.add_argument("--chain-states", type=_positive_int, help="Chain length S")
    run.add_argument("--horizon", type=_positive_int, help="Episode length H")
    run.add_argument(
        "--track-regret", action="store_true", help="Evaluate greedy snapshots and write regret.csv"
    )
    run.set_defaults(handler=cmd_run)

    report = subparsers.add_parser("report", help="Print the summary table of a results directory")
    report.add_argument("results_dir", help="Results directory")
    report.add_argument(
        "--compare-paper",
        action="store_true",
        help="Show published numbers for the default settings next to the measured ones",
    )
    report.set_defaults(handler=cmd_report)

    plot = subparsers.add_parser("plot", help="Render learning curves as SVG")
    plot.add_argument("results_dir", help="Results directory")
    plot.add_argument(
        "--output", help="SVG path (default: <results_dir>/learning_curves_<env>.svg)"
    )
    plot.add_argument("--env", choices=["bdcl", "chain"], help="Only plot this environment")
    plot.set_defaults(handler=cmd_plot)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and dispatch to the command handler.

    Returns:
        Exit status
    """
    args = build_parser().parse_args(argv)
    logger.debug(f"Dispatching command {args.command}")
    return args.handler(args)
