# fcopt/cli.py
"""
Command-line harness: `fcopt run | verify | compare | regularize-solve | corpus`.

Library errors are translated into exit codes here and nowhere else:
0 success, 1 unreadable input or unwritable output, 2 configuration error,
3 convergence failure, 4 verification failure.
"""

import argparse
import asyncio
import sys
from typing import Callable, Dict, List, Optional, Sequence

import structlog

from fcopt import __version__
from fcopt.config.settings import Settings, settings as app_settings
from fcopt.containers import get_container
from fcopt.exceptions import ConfigError, FcoptError, ProblemFileError, ReportWriteError
from fcopt.orchestration.comparison_pool import ComparisonPool
from fcopt.orchestration.method_runner import MethodRunner, RegularizationService
from fcopt.orchestration.problem_repository import ProblemRepository
from fcopt.orchestration.run_config_factory import RunConfigFactory
from fcopt.orchestration.verification_service import VerificationService
from fcopt.statistics import StatisticsTracker
from fcopt.utils import metrics
from fcopt.utils.logging_config import setup_logging

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFICATION = 4


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--metrics-out", help="Write Prometheus metrics to this file.")


def _add_problem(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", required=True, help="Problem file path or corpus:<id>.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcopt", description="Fully composite optimization methods.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run one method and write its trace.")
    _add_problem(run)
    run.add_argument("--method", required=True)
    run.add_argument("--p", type=int)
    run.add_argument("--iters", type=int)
    run.add_argument("--alpha", type=float)
    run.add_argument("--beta", type=float)
    run.add_argument("--delta", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--radius", type=float, help="Distance estimate R for the FGM bound.")
    run.add_argument("--rho", dest="rho_estimate", type=float, help="Initial Bregman distance estimate.")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", required=True)
    _add_common(run)

    verify = commands.add_parser("verify", help="Run property checks; JSON lines on stdout.")
    _add_problem(verify)
    verify.add_argument("--checks", default="all", help="'all' or a comma-separated list.")
    verify.add_argument("--samples", type=int)
    verify.add_argument("--seed", type=int)
    _add_common(verify)

    compare = commands.add_parser("compare", help="Run several methods and summarize them.")
    _add_problem(compare)
    compare.add_argument("--methods", required=True, help="Comma-separated method ids.")
    compare.add_argument("--iters", type=int)
    compare.add_argument("--alpha", type=float)
    compare.add_argument("--epsilon", type=float)
    compare.add_argument("--seed", type=int)
    compare.add_argument("--out", required=True, help="Output directory.")
    _add_common(compare)

    regularize = commands.add_parser("regularize-solve", help="Solve a convex problem through regularization.")
    _add_problem(regularize)
    regularize.add_argument("--p", type=int, default=1)
    regularize.add_argument("--epsilon", type=float, required=True)
    regularize.add_argument("--out", required=True)
    _add_common(regularize)

    corpus = commands.add_parser("corpus", help="List or export the bundled problems.")
    corpus_commands = corpus.add_subparsers(dest="corpus_command", required=True)
    corpus_list = corpus_commands.add_parser("list")
    _add_common(corpus_list)
    corpus_export = corpus_commands.add_parser("export")
    corpus_export.add_argument("--out", required=True, help="Output directory.")
    _add_common(corpus_export)
    return parser


# --- Commands ---


def cmd_run(args: argparse.Namespace, container) -> int:
    problem = container.resolve(ProblemRepository).resolve(args.problem)
    config = container.resolve(RunConfigFactory).create_from_args(args)
    trace = container.resolve(MethodRunner).run_to_file(problem, config, args.out)
    logger.info("Run complete.", method=config.method.value, rows=len(trace.records), out=args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, container) -> int:
    problem = container.resolve(ProblemRepository).resolve(args.problem)
    names = None if args.checks.strip() == "all" else _split(args.checks)
    service = container.resolve(VerificationService)
    reports = service.verify(problem, names, args.samples, args.seed, stream=sys.stdout)
    return EXIT_OK if service.all_passed(reports) else EXIT_VERIFICATION


def cmd_compare(args: argparse.Namespace, container) -> int:
    problem = container.resolve(ProblemRepository).resolve(args.problem)
    factory = container.resolve(RunConfigFactory)
    methods = _split(args.methods)
    if not methods:
        raise ConfigError("The method list is empty.")
    configs = [factory.create_from_args(args, method=m) for m in methods]
    pool = container.resolve(ComparisonPool)
    asyncio.run(pool.compare(problem, configs, args.out))
    return EXIT_OK


def cmd_regularize(args: argparse.Namespace, container) -> int:
    problem = container.resolve(ProblemRepository).resolve(args.problem)
    config = container.resolve(RunConfigFactory).create("full", args.p, epsilon=args.epsilon)
    container.resolve(RegularizationService).solve(problem, args.p, args.epsilon, config, args.out)
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace, container) -> int:
    repository = container.resolve(ProblemRepository)
    if args.corpus_command == "list":
        for entry in repository.entries():
            sys.stdout.write(f"{entry.id}\t{entry.label}\t{entry.description}\n")
        return EXIT_OK
    repository.export_corpus(args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, object], int]] = {
    "run": cmd_run,
    "verify": cmd_verify,
    "compare": cmd_compare,
    "regularize-solve": cmd_regularize,
    "corpus": cmd_corpus,
}


def _exit_code(error: FcoptError) -> int:
    if isinstance(error, (ProblemFileError, ReportWriteError)):
        return EXIT_IO
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    # ConvergenceError and numerical failures that escaped a run.
    return EXIT_CONVERGENCE


def main(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> int:
    """Parses `argv`, runs the command and returns its exit code."""
    settings = settings or app_settings
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(settings.log, force_json_console=settings.log_json)
    container = get_container(settings)
    try:
        code = COMMANDS[args.command](args, container)
    except FcoptError as e:
        code = _exit_code(e)
        sys.stderr.write(f"fcopt: error: {e}\n")
        logger.debug("Command failed.", command=args.command, error_type=type(e).__name__)

    container.resolve(StatisticsTracker).log_summary()
    if getattr(args, "metrics_out", None):
        try:
            metrics.write_metrics(args.metrics_out)
        except OSError as e:
            sys.stderr.write(f"fcopt: error: cannot write metrics to {args.metrics_out}: {e}\n")
            code = code or EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
