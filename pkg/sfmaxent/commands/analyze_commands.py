"""Empirical analysis command."""
import os

import click
from flask import Blueprint, current_app

from sfmaxent.commands.common import (default_out_dir, get_run_service, handle_errors, parse_years,
                                      setup_logging, verbose_option)
from sfmaxent.services import data_service
from sfmaxent.services.run_service import FIT_MODELS, UNAVAILABLE

analyze_bp = Blueprint('analyze', __name__, cli_group=None)


@analyze_bp.cli.command('analyze')
@click.argument('data_csv', type=click.Path(dir_okay=False))
@click.option('--schema', 'schema_path', type=click.Path(dir_okay=False),
              help='key = value file mapping id, name and year.<YYYY> columns.')
@click.option('--include', 'include_path', type=click.Path(dir_okay=False),
              help='File of place ids (one per line) to keep; others are dropped.')
@click.option('--model', 'models', type=click.Choice(FIT_MODELS), multiple=True,
              help='Model(s) for fit_correlation (repeatable; default benford and lognormal).')
@click.option('--top-n', type=int, default=None, help='Regime size for conservation sums and turnover.')
@click.option('--years', default=None, help='Comma-separated years to analyze (default: all).')
@click.option('--out-dir', type=click.Path(file_okay=False), help='Output directory.')
@verbose_option
@handle_errors
def analyze(data_csv, schema_path, include_path, models, top_n, years, out_dir, verbose):
    """Validate a census-style population table against the MaxEnt families."""
    setup_logging(verbose)
    top_n = top_n or current_app.config['TOP_N']
    if top_n < 1:
        raise click.BadParameter("must be >= 1", param_hint='--top-n')
    models = list(models) or ['benford', 'lognormal']
    series = data_service.load_table(data_csv, schema_path, include_path)
    source = {'data': os.path.abspath(data_csv),
              'schema': os.path.abspath(schema_path) if schema_path else None,
              'include': os.path.abspath(include_path) if include_path else None}
    report = get_run_service().analyze(series, models, top_n, parse_years(years),
                                       default_out_dir(out_dir), source)

    click.echo(f"analyzed {report['n_places']} places over {report['years']}")
    for year, value in report['conservation_sum'].items():
        if value is not UNAVAILABLE:
            click.echo(f"  conservation_sum[{year}] = {value:.4f}")
    pooled = report['correlation_u_udot'].get('pooled', UNAVAILABLE)
    click.echo(f"  correlation_u_udot[pooled] = {pooled}")
