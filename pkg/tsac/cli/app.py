"""Command-line entry point."""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence

from tsac.cli.commands import COMMANDS
from tsac.core.args import APP_NAME, parse_args
from tsac.core.config import get_config
from tsac.core.errors import OutputError, TsacError
from tsac.core.logs import setup_logging

logger = logging.getLogger(__name__)


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, load configuration and dispatch. Returns the exit code."""
    args = parse_args(argv)

    try:
        config = get_config(args.config)
        config.override("global.seed", args.seed)
        config.override("global.out_dir", None if args.out_dir is None else str(args.out_dir))
        config.override("global.threads", args.threads)
        config.override("global.format", args.fmt)
        config.override("global.log_level", args.log_level)
        config.override("plant.name", args.plant)

        try:
            setup_logging(config.log_level)
        except OSError as e:
            raise OutputError(f"cannot open log file: {e}") from e

        logger.info("tsac %s", args.command)
        return COMMANDS[args.command](args, config)
    except TsacError as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"{APP_NAME}: error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        return 130
