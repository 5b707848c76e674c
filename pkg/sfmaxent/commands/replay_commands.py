"""Manifest replay command."""
from pathlib import Path

import click
from flask import Blueprint

from sfmaxent.commands.common import get_run_service, handle_errors, setup_logging, verbose_option
from sfmaxent.models.manifest import MANIFEST_NAME, RunManifest

replay_bp = Blueprint('replay', __name__, cli_group=None)


@replay_bp.cli.command('replay')
@click.argument('manifest_path', type=click.Path())
@click.option('--out-dir', type=click.Path(file_okay=False), required=True,
              help='Directory for the re-executed outputs.')
@verbose_option
@handle_errors
def replay(manifest_path, out_dir, verbose):
    """Re-execute the command recorded in MANIFEST_PATH (a manifest.json or its directory)."""
    setup_logging(verbose)
    path = Path(manifest_path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    manifest = RunManifest.read(path)
    get_run_service().replay(manifest, out_dir)
    click.echo(f"replayed {manifest.command} into {out_dir}")
