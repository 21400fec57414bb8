"""Main entry point for the ConStance command-line tool.

This module handles:
1. Argument parsing and configuration loading
2. Logging setup
3. Dispatch to the subcommand handlers in cli/
4. Conversion of library errors into exit statuses

All aggregation logic lives in core/ and features/.
"""

import logging
import sys
import os
from pathlib import Path
from typing import List, Optional

from config import RunConfig
from cli import HANDLERS, build_parser
from core.exceptions import ConStanceError


def setup_logging(config: RunConfig):
    """
    Configure application-wide logging with both file and console handlers.

    Args:
        config: Run configuration holding the output directory and log level

    The log file is <out_dir>/constance.log, appended to across runs.
    """

    # Ensure log directory exists
    log_dir = Path(config.out_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    # Configure logging format
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    log_file = log_dir / 'constance.log'

    # Setup logging configuration
    logging.basicConfig(
        level=getattr(logging, config.log_level),
        format=log_format,
        handlers=[
            logging.StreamHandler(sys.stdout),
            logging.FileHandler(log_file, mode='a', encoding='utf-8')
        ],
        force=True,
    )

    # Set specific logger levels for external libraries
    logging.getLogger('joblib').setLevel(logging.WARNING)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    The startup sequence:
    1. Parse arguments (argparse exits with status 2 on bad usage)
    2. Load the config file, environment and flag overrides
    3. Set up logging
    4. Run the handler

    Returns:
        0 on success, 1 when a ConStance error or an I/O error stops the run
    """
    args = build_parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "out_dir": args.out_dir,
        "variant": getattr(args, "variant", None),
        "context": getattr(args, "context", None),
    }

    try:
        config = RunConfig.load(args.config, overrides)
    except ConStanceError as e:
        print(f"Configuration Error: {e}", file=sys.stderr)
        return 1

    try:
        setup_logging(config)
    except OSError as e:
        print(f"Cannot write to output directory {config.out_dir}: {e}", file=sys.stderr)
        return 1
    logger = logging.getLogger(__name__)

    logger.info("=" * 50)
    logger.info(f"constance {args.command}")
    logger.info(f"Working directory: {os.getcwd()}")
    logger.info(f"Config - seed: {config.seed}, output: {config.out_dir}")
    logger.info("=" * 50)

    try:
        return HANDLERS[args.command](config)

    except (ConStanceError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return 1

    finally:
        logger.info(f"constance {args.command} finished")


if __name__ == "__main__":
    sys.exit(main())
