"""Command-line entry point: `python cli.py simulate bounded`, `python cli.py solve --mean-u 1`, ..."""
import os

import click
from flask.cli import FlaskGroup

from sfmaxent import __version__, create_app


def _create_app():
    return create_app(os.environ.get('SFMAXENT_ENV', 'default'))


@click.group(cls=FlaskGroup, create_app=_create_app, add_default_commands=False,
             add_version_option=False, load_dotenv=False)
@click.version_option(__version__, prog_name='sfmaxent')
def cli():
    """MaxEnt toolkit for scale-invariant growth: walkers, equilibria and census checks."""


if __name__ == '__main__':
    cli()
