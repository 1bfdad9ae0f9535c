"""Main CLI entry point with exit-code mapping."""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence

import click

from shiplabel_qi.core.errors import SlqiError

logger = logging.getLogger("shiplabel_qi")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def run_cli(argv: Sequence[str] | None = None) -> int:
    """
    Run one slqi command and return its exit code.

    0 on success, 1 on a usage error (the synopsis goes to stderr), 2 when
    the library raises on bad data, a bad model or a failed file operation,
    or when a non-PNM image is read without the `image` extra installed.
    """
    from shiplabel_qi.cli.app import create_app

    app = create_app()
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = app(args=args, prog_name="slqi", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except (SlqiError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_DATA
    except ImportError as e:
        # Optional image extra missing
        logger.error("%s", e)
        return EXIT_DATA
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    """Console-script entry point."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
