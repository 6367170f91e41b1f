"""Command-line entry point: python -m app.cli <subcommand> [options]."""

import logging
import sys

from app.resources.config import get_settings
from app.tools.commands import build_parser, dispatch

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run the subcommand and return its exit code."""
    # Reports go to stdout; logs stay on stderr
    logging.basicConfig(
        level=get_settings().log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    logger.info(f"Running {args.command}")
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
