"""Multiplier solver command."""
import json
import math

import click
from flask import Blueprint

from sfmaxent.commands.common import default_out_dir, get_run_service, handle_errors, setup_logging, verbose_option
from sfmaxent.models.equilibrium import ConstraintSet
from sfmaxent.models.manifest import finite_json

solve_bp = Blueprint('solve', __name__, cli_group=None)


@solve_bp.cli.command('solve')
@click.option('--u-max', type=float, default=math.inf, show_default=True,
              help="Volume bound u_M = log(x_M/x0); 'inf' for an unbounded volume.")
@click.option('--mean-u', type=float, default=None, help='Target <u> (activates the mean rule).')
@click.option('--normalized/--no-normalized', default=None,
              help='Normalization rule; on by default unless only --mean-u is given.')
@click.option('--x0', type=float, default=1.0, show_default=True)
@click.option('--out-dir', type=click.Path(file_okay=False),
              help='Directory for model.json and manifest.json.')
@verbose_option
@handle_errors
def solve(u_max, mean_u, normalized, x0, out_dir, verbose):
    """Solve (mu, lambda) for the active conservation rules and print the model JSON."""
    setup_logging(verbose)
    if normalized is None:
        normalized = mean_u is None
    constraints = ConstraintSet(normalized=normalized, mean_u_target=mean_u, u_max=u_max)
    payload = get_run_service().solve(constraints, x0=x0, out_dir=default_out_dir(out_dir))
    click.echo(json.dumps(finite_json(payload), indent=2, sort_keys=True, allow_nan=False))
