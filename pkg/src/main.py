"""
capg-lab - experiment runner entry point.

Usage:
    capg-lab <variance|bandit|mdp|verify> --config <path> [--out <path>]
             [--seed <int>] [--estimator pg|capg|both] [--log-level LEVEL]
    python -m src.main ...

Environment variables (also read from a .env file):
    CAPG_LOG_LEVEL - Logging level (default: INFO)
    CAPG_LOG_FILE - Also log to this file (optional)

Exit codes:
    0 - success / all checks passed
    1 - at least one verification check failed
    2 - configuration or runtime error
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import find_dotenv, load_dotenv

from .config import ESTIMATOR_CHOICES, ConfigError, ExperimentConfig, LoggingConfig
from .experiments import (
    BanditExperiment,
    ExperimentDispatcher,
    MdpExperiment,
    VarianceExperiment,
    VerifyExperiment,
)
from .metrics import get_metrics

EXIT_CONFIG_ERROR = 2


def setup_logging(level: str, log_file: Optional[str] = None):
    """Configure logging for the application"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )

    # Reduce noise from libraries
    logging.getLogger("numexpr").setLevel(logging.WARNING)


def create_dispatcher() -> ExperimentDispatcher:
    """Create and configure experiment dispatcher"""
    dispatcher = ExperimentDispatcher()
    dispatcher.register(VarianceExperiment())
    dispatcher.register(BanditExperiment())
    dispatcher.register(MdpExperiment())
    dispatcher.register(VerifyExperiment())
    return dispatcher


def build_parser(dispatcher: ExperimentDispatcher) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capg-lab",
        description="Clipped-action policy gradient experiments",
    )
    parser.add_argument("experiment", choices=dispatcher.names(), help="experiment to run")
    parser.add_argument("--config", required=True, help="key = value or YAML config file")
    parser.add_argument("--out", help="output CSV (overrides output_path)")
    parser.add_argument("--seed", type=int, help="master seed (overrides master_seed)")
    parser.add_argument("--estimator", choices=ESTIMATOR_CHOICES, help="overrides estimator")
    parser.add_argument("--log-level", help="overrides CAPG_LOG_LEVEL")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    load_dotenv(find_dotenv(usecwd=True))

    dispatcher = create_dispatcher()
    args = build_parser(dispatcher).parse_args(argv)

    log_config = LoggingConfig.from_env()
    setup_logging(args.log_level or log_config.level, log_config.file)
    logger = logging.getLogger(__name__)

    try:
        cfg = ExperimentConfig.from_file(args.config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR

    cfg = cfg.with_overrides(
        experiment=dispatcher.get(args.experiment).name,
        output_path=args.out,
        master_seed=args.seed,
        estimator=args.estimator,
    )

    errors = cfg.validate()
    if errors:
        for error in errors:
            logger.error(f"Configuration error: {error}")
        return EXIT_CONFIG_ERROR

    result = dispatcher.run(cfg.experiment, cfg)
    if result.success:
        logger.info(result.text)
    else:
        logger.error(result.text)
    logger.debug(f"Run metrics: {get_metrics().get_all_stats()}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
