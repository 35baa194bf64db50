# src/main.py

"""
Main entry point for the eigenflow command line.
"""

import argparse
import logging
import os
import sys
from logging.handlers import TimedRotatingFileHandler

from src import config
from src.handlers import convergence, example, flow, fuzz
from src.utils.decorators import EXIT_INVALID

logger = logging.getLogger(__name__)


def setup_logging(log_dir: str | None = None) -> None:
    """Configures the root logger: daily rotating file plus console."""
    log_dir = config.LOG_DIR if log_dir is None else log_dir
    if not os.path.exists(log_dir):
        os.makedirs(log_dir)

    # 1. Get the root logger
    log = logging.getLogger()
    log.setLevel(logging.INFO)
    if any(isinstance(h, TimedRotatingFileHandler) for h in log.handlers):
        return

    # 2. Create a formatter
    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
    )

    # 3. Create a timed rotating file handler for daily logs
    file_handler = TimedRotatingFileHandler(
        os.path.join(log_dir, "eigenflow.log"), when="midnight", backupCount=7, encoding="utf-8"
    )
    file_handler.setFormatter(formatter)

    # 4. Create a stream handler to print logs to the console
    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)

    # 5. Add handlers to the root logger
    log.addHandler(file_handler)
    log.addHandler(stream_handler)


def build_parser() -> argparse.ArgumentParser:
    """Returns the argument parser with one sub-command per handler."""
    parser = argparse.ArgumentParser(prog="eigenflow", description="Eigenvalue stability laboratory")
    subparsers = parser.add_subparsers(dest="command", required=True)

    example.example_handler(subparsers)
    fuzz.fuzz_handler(subparsers)
    flow.flow_handler(subparsers)
    convergence.convergence_handler(subparsers)
    return parser


def main(argv=None) -> int:
    """Parses the command line and dispatches to the chosen handler."""
    args = build_parser().parse_args(argv)
    setup_logging()

    # Validazione configurazione
    try:
        config.validate_config()
    except ValueError as e:
        logger.error(f"Configurazione non valida! {e}")
        return EXIT_INVALID

    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
