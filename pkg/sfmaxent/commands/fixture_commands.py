"""Synthetic census table command."""
import math

import click
from flask import Blueprint, current_app

from sfmaxent.commands.common import (default_out_dir, get_run_service, handle_errors, parse_years,
                                      setup_logging, verbose_option)
from sfmaxent.errors import ConfigurationError
from sfmaxent.models.equilibrium import EquilibriumModel

fixture_bp = Blueprint('fixture', __name__, cli_group=None)

FAMILIES = ('zipf', 'power-law', 'benford', 'lognormal')
YEAR_SPACING = 10


def fixture_years(text, defaults):
    """Explicit years, or a count of decades starting at the first default year."""
    years = parse_years(text)
    if years is None:
        return list(defaults)
    if len(years) == 1 and 0 < years[0] < 1000:
        return [defaults[0] + YEAR_SPACING * i for i in range(years[0])]
    return years


def fixture_model(family: str, x0: float, lam: float, u_max: float,
                  mean_u: float, sd_u: float) -> EquilibriumModel:
    if family == 'zipf':
        return EquilibriumModel.power_law(1.0, x0)
    if family == 'power-law':
        return EquilibriumModel.power_law(lam, x0, u_max)
    if family == 'benford':
        if math.isinf(u_max):
            raise ConfigurationError("a benford fixture needs a finite --u-max")
        return EquilibriumModel.benford(u_max, x0)
    if sd_u is None or mean_u is None:
        raise ConfigurationError("a lognormal fixture needs --mean-u and --sd-u")
    return EquilibriumModel.log_normal(mean_u, sd_u, x0)


@fixture_bp.cli.command('fixture')
@click.option('--family', type=click.Choice(FAMILIES), default=None, help='Model of the first year.')
@click.option('--x0', type=float, default=None, help='Smallest size (reference scale).')
@click.option('--lam', type=float, default=None, help='Power-law lambda (power-law family).')
@click.option('--u-max', type=float, default=None, help="Volume bound; 'inf' for none.")
@click.option('--mean-u', type=float, default=None, help='Mean of u (lognormal family).')
@click.option('--sd-u', type=float, default=None, help='Standard deviation of u (lognormal family).')
@click.option('--n', 'n_places', type=int, default=None, help='Number of places.')
@click.option('--years', default=None, help="Comma-separated years, or a count of decades.")
@click.option('--K', 'k_var', type=float, default=None, help='Per-year variance of log growth.')
@click.option('--seed', type=int, default=None, help='Random seed (default: SFMAXENT_SEED).')
@click.option('--out-dir', type=click.Path(file_okay=False), help='Output directory.')
@verbose_option
@handle_errors
def fixture(family, x0, lam, u_max, mean_u, sd_u, n_places, years, k_var, seed, out_dir, verbose):
    """Write a synthetic multi-year population table (fixture.csv)."""
    setup_logging(verbose)
    defaults = current_app.config['FIXTURE_DEFAULTS']
    model = fixture_model(
        family or defaults['family'],
        x0=defaults['x0'] if x0 is None else x0,
        lam=defaults['lam'] if lam is None else lam,
        u_max=defaults['u_max'] if u_max is None else u_max,
        mean_u=mean_u, sd_u=sd_u)
    seed = current_app.config['DEFAULT_SEED'] if seed is None else seed
    manifest = get_run_service().fixture(
        model,
        n_places=defaults['n'] if n_places is None else n_places,
        years=fixture_years(years, defaults['years']),
        K=defaults['K'] if k_var is None else k_var,
        seed=seed,
        out_dir=default_out_dir(out_dir))
    click.echo(f"wrote {manifest.outputs[0]} ({manifest.diagnostics['n_places']} places, "
               f"years {manifest.config['years']}, seed {seed})")
