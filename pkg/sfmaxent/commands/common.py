"""Shared plumbing of the command blueprints: logging, errors and the run service."""
import functools
import logging
from typing import List, Optional

import click
from flask import current_app

from sfmaxent import __version__
from sfmaxent.errors import SfMaxEntError
from sfmaxent.services.run_service import RunService

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class CommandError(click.ClickException):
    """A failure reported on stderr with the exit code of its error class."""

    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def setup_logging(verbose: bool = False):
    level = 'DEBUG' if verbose else current_app.config['LOG_LEVEL']
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, str(level).upper(), logging.INFO))


def verbose_option(func):
    return click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')(func)


def handle_errors(func):
    """Turn library failures into exit codes: 2 config/data, 3 IO, 4 numerical."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SfMaxEntError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise CommandError(str(e), e.exit_code) from e
        except OSError as e:
            logger.error(f"IO failure: {e}")
            raise CommandError(str(e), 3) from e
    return wrapper


def get_run_service() -> RunService:
    """Run service configured from the current app."""
    return RunService(tool_version=__version__,
                      histogram_bins=current_app.config['HISTOGRAM_BINS'],
                      convergence_ks=current_app.config['CONVERGENCE_KS'])


def parse_years(text: Optional[str]) -> Optional[List[int]]:
    """'1990,2000,2010' -> [1990, 2000, 2010]; None or '' -> None."""
    if not text:
        return None
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated years, got {text!r}", param_hint='--years')


def default_out_dir(out_dir: Optional[str]) -> str:
    """The --out-dir value, else the configured OUTPUT_DIR."""
    return out_dir or current_app.config['OUTPUT_DIR']
