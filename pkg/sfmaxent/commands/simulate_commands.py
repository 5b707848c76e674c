"""Walker experiment commands."""
import click
from flask import Blueprint, current_app

from sfmaxent.commands.common import default_out_dir, get_run_service, handle_errors, setup_logging, verbose_option
from sfmaxent.models.ensemble import SimMode
from sfmaxent.services.config_file import load_key_value
from sfmaxent.services.run_service import build_sim_config

simulate_bp = Blueprint('simulate', __name__, cli_group=None)

# flag name -> settings key
_FLAG_KEYS = {
    'n_walkers': 'n_walkers',
    'x_init': 'x_init',
    'k_var': 'K',
    'dt': 'dt',
    'drift': 'drift',
    'n_steps': 'n_steps',
    'snapshot_every': 'snapshot_every',
    'x0': 'x0',
    'x_max': 'x_max',
    'mean_u': 'mean_u_target',
    'rebalance_every': 'rebalance_every',
    'independent_k': 'independent_k',
    'exact_steps': 'exact_steps',
}


def collect_settings(mode: SimMode, config_path, seed, flags) -> dict:
    """Defaults, then the config file, then flags; the seed falls back to DEFAULT_SEED."""
    settings = dict(current_app.config['SIMULATION_DEFAULTS'])
    if mode is SimMode.BOUNDED:
        settings.update(current_app.config['BOUNDED_DEFAULTS'])
    elif mode is SimMode.ZIPF:
        settings.update(current_app.config['ZIPF_DEFAULTS'])
    settings['seed'] = current_app.config['DEFAULT_SEED']
    if config_path:
        settings.update(load_key_value(config_path))
    settings.update({_FLAG_KEYS[name]: value for name, value in flags.items() if value is not None})
    if seed is not None:
        settings['seed'] = seed
    return settings


@simulate_bp.cli.command('simulate')
@click.argument('mode', type=click.Choice([m.value for m in SimMode]))
@click.option('--config', 'config_path', type=click.Path(dir_okay=False),
              help='key = value run configuration; flags override it.')
@click.option('--seed', type=int, help='Random seed (default: SFMAXENT_SEED).')
@click.option('--out-dir', type=click.Path(file_okay=False), help='Output directory.')
@click.option('--n-walkers', type=int)
@click.option('--x-init', type=float)
@click.option('--K', 'k_var', type=float, help='Variance of the growth rate k.')
@click.option('--dt', type=float)
@click.option('--drift', type=float)
@click.option('--steps', 'n_steps', type=int)
@click.option('--snapshot-every', type=int)
@click.option('--x0', type=float, help='Lower bound / reference scale.')
@click.option('--x-max', type=float, help='Upper bound (bounded mode).')
@click.option('--mean-u', type=float, help='Conserved <u> (zipf mode).')
@click.option('--rebalance-every', type=int, help='Restore sum(u) every n exchange iterations.')
@click.option('--independent-k/--shared-k', default=None, help='Exchange legs draw separate rates.')
@click.option('--exact-steps/--euler-steps', default=None, help='Free steps use exp(k dt).')
@verbose_option
@handle_errors
def simulate(mode, config_path, seed, out_dir, verbose, **flags):
    """Run a walker experiment: free, bounded or zipf."""
    setup_logging(verbose)
    mode = SimMode(mode)
    settings = collect_settings(mode, config_path, seed, flags)
    cfg, n_steps, snapshot_every = build_sim_config(mode, settings)
    manifest = get_run_service().simulate(cfg, n_steps, snapshot_every, default_out_dir(out_dir))

    diagnostics = manifest.diagnostics
    click.echo(f"{mode.value}: {n_steps} steps, {len(manifest.outputs)} files, seed {cfg.seed}")
    for key in ('ks_distance', 'fit_correlation', 'sum_u_max_drift', 'conservation_bound',
                'convergence_step'):
        if key in diagnostics:
            click.echo(f"  {key} = {diagnostics[key]}")
