"""
Main entry point for the lpbox command-line experiment runner.

Each verb loads an experiment configuration, runs one service, writes the
report directory and exits with 0 (all assertions passed), 2 (an assertion
failed, report still written), 3 (config error) or 4 (capability error).
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List

from pydantic import ValidationError

from lpbox import __version__
from lpbox.core.config import settings
from lpbox.core.exceptions import ConfigError, LpboxError
from lpbox.models.data_models import ExperimentConfig, ExperimentReport
from lpbox.services.bound_service import BoundService
from lpbox.services.corpus_service import CorpusService
from lpbox.services.gfunction_service import GFunctionService
from lpbox.services.identity_service import IdentityService
from lpbox.services.report_service import ReportService
from lpbox.services.teuwen_service import TeuwenService
from lpbox.services.weak11_service import Weak11Service
from lpbox.utils.file_handler import load_config_file

logger = logging.getLogger("lpbox")

EXIT_PASSED = 0
EXIT_ASSERTION_FAILED = 2

VERBS = ("teuwen-verify", "gfun-constants", "weak11-growth", "bound-sample", "spectral-identities")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpbox",
        description="Numerical experiments on Littlewood-Paley g-functions in the inverse Gaussian setting.",
    )
    parser.add_argument("--version", action="version", version=f"lpbox {__version__}")
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for verb in VERBS:
        sub = subparsers.add_parser(verb)
        sub.add_argument("--config", type=Path, help="YAML experiment file.")
        sub.add_argument("--out", type=Path, help="Report directory (default: a timestamped run directory).")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--threads", type=int, help="Worker threads; 0 selects the CPU count.")
        sub.add_argument("--archive", action="store_true", help="Pack the report directory into a tar.gz.")
        sub.add_argument("--log-level", default=None, help=f"Logging level (default: {settings.log_level}).")
    return parser


def configure_logging(level: str | None) -> None:
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def load_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values first, then the CLI overrides; the verb decides the experiment."""
    values: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    if values.get("experiment", args.experiment) != args.experiment:
        raise ConfigError(
            f"Config file is for experiment '{values['experiment']}', not '{args.experiment}'."
        )
    values["experiment"] = args.experiment
    if args.seed is not None:
        values["seed"] = args.seed
    if args.threads is not None:
        values["threads"] = args.threads
    if args.out is not None:
        values["output_dir"] = args.out
    if args.archive:
        values["archive"] = True
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration: {e}") from e


def runner_for(config: ExperimentConfig) -> Callable[[ExperimentConfig], ExperimentReport]:
    corpus_service = CorpusService(seed=config.seed, degree_cap=config.degree_cap)
    runners: Dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
        "teuwen-verify": TeuwenService().run,
        "gfun-constants": GFunctionService(corpus_service).run,
        "weak11-growth": Weak11Service().run,
        "bound-sample": BoundService().run,
        "spectral-identities": IdentityService(corpus_service).run,
    }
    return runners[config.experiment]


def run_experiment(config: ExperimentConfig, report_service: ReportService | None = None) -> int:
    report_service = report_service or ReportService()
    logger.info(f"Running {config.experiment} (seed {config.seed}, threads {config.threads}).")
    report = runner_for(config)(config)

    success, message = report_service.write_report(report, config.output_dir)
    if not success:
        raise LpboxError(message)
    if config.archive:
        archived, archive_message = report_service.archive_run(Path(message))
        if archived:
            logger.info(archive_message)
        else:
            logger.warning(archive_message)

    failed: List[str] = [a.name for a in report.assertions if not a.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(report.assertions)} assertions failed: {', '.join(failed[:10])}")
        return EXIT_ASSERTION_FAILED
    logger.info(f"All {len(report.assertions)} assertions passed in {report.wall_clock_seconds}s.")
    return EXIT_PASSED


def main(argv: List[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    settings.create_directories()
    try:
        config = load_experiment_config(args)
        return run_experiment(config)
    except LpboxError as e:
        logger.error(str(e))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
