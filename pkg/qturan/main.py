import logging
import sys

import click

from qturan.cli import commands
from qturan.core.config import get_settings

settings = get_settings()

logger = logging.getLogger(__name__)


def configure_logging(verbosity: int = 0) -> None:
    """Logs go to stderr; each -v lowers the threshold one step from LOG_LEVEL."""
    base = logging.getLevelName(settings.LOG_LEVEL.upper())
    if not isinstance(base, int):
        base = logging.WARNING
    level = max(logging.DEBUG, base - 10 * verbosity)
    logging.basicConfig(
        level=level,
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


@click.group(help=settings.PROJECT_NAME)
@click.option("-v", "--verbose", count=True, help="Repeat for more log output")
def cli(verbose: int) -> None:
    configure_logging(verbose)


# Register subcommands
for command in commands.ALL_COMMANDS:
    cli.add_command(command)


def run(argv: list[str] | None = None) -> int:
    """Run the command line and return its exit code instead of exiting."""
    try:
        cli.main(args=argv, prog_name="qturan", standalone_mode=True)
    except SystemExit as exit_:
        code = exit_.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
