"""
Command-line entry point for the LCK Lie algebra toolkit.

Exit codes: 0 success, 1 failed verification, 2 parse or usage error,
3 mathematical invariant violation.
"""

import logging
import sys
from typing import Optional, Sequence

from app.cli.commands import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE
from app.cli.parser import build_parser
from app.utils.exceptions import (
    INVARIANT_ERRORS,
    BaseAppException,
    DocumentParseError,
    ValidationError,
)
from config.logging_config import setup_logging

logger = logging.getLogger(__name__)


def _report_error(kind: str, error: BaseAppException) -> None:
    print(f"[{kind}] {error.message}", file=sys.stderr)
    for key, value in error.details.items():
        print(f"  {key}: {value}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.log_level)
    logger.debug(f"Running command '{args.command}'")

    try:
        return args.handler(args)

    except (DocumentParseError, ValidationError) as e:
        logger.warning(f"Input error: {e.message}")
        _report_error("error", e)
        return EXIT_USAGE

    except INVARIANT_ERRORS as e:
        logger.warning(f"Invariant violation: {e.message}")
        _report_error("invariant", e)
        return EXIT_INVARIANT

    except BaseAppException as e:
        logger.warning(f"{type(e).__name__}: {e.message}")
        _report_error(e.error_code or "error", e)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
