"""Reproducible runs: executes a command, writes its outputs and its manifest."""
import logging
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from sfmaxent.errors import ConfigurationError, InsufficientDataError, OutputError, SfMaxEntError
from sfmaxent.models.ensemble import BoundsConfig, ExchangeConfig, SimConfig, SimMode, WalkerEnsemble
from sfmaxent.models.equilibrium import ConstraintSet, EquilibriumModel
from sfmaxent.models.manifest import RunManifest, dump_json
from sfmaxent.models.series import SnapshotSeries
from sfmaxent.services import data_service, maxent_service, stats_service
from sfmaxent.services.walker_service import WalkerSimulator

logger = logging.getLogger(__name__)

UNAVAILABLE = 'unavailable'
FLOAT_FORMAT = '%.17g'
FIGURE_NUMBER = {SimMode.FREE: 1, SimMode.BOUNDED: 2, SimMode.ZIPF: 3}
FIT_MODELS = ('benford', 'lognormal', 'zipf')

_SIM_KEYS = {'n_walkers', 'x_init', 'K', 'dt', 'drift', 'seed', 'exact_steps'}
_BOUNDS_KEYS = {'x0', 'x_max'}
_EXCHANGE_KEYS = {'mean_u_target', 'x0', 'rebalance_every', 'independent_k'}
_RUN_KEYS = {'n_steps', 'snapshot_every'}


def build_sim_config(mode: SimMode, settings: Mapping[str, Any]) -> Tuple[SimConfig, int, int]:
    """SimConfig plus (n_steps, snapshot_every) from a flat settings mapping."""
    mode = SimMode(mode)
    allowed = _SIM_KEYS | _RUN_KEYS
    if mode is SimMode.BOUNDED:
        allowed |= _BOUNDS_KEYS
    elif mode is SimMode.ZIPF:
        allowed |= _EXCHANGE_KEYS
    unknown = set(settings) - allowed
    if unknown:
        raise ConfigurationError(f"unknown settings for {mode.value} run: {sorted(unknown)}")

    try:
        sim = {key: settings[key] for key in _SIM_KEYS if key in settings}
        if 'n_walkers' in sim:
            sim['n_walkers'] = int(sim['n_walkers'])
        if 'seed' in sim:
            sim['seed'] = int(sim['seed'])
        if mode is SimMode.BOUNDED:
            sim['bounds'] = BoundsConfig(**{k: float(settings[k]) for k in _BOUNDS_KEYS if k in settings})
        elif mode is SimMode.ZIPF:
            exchange = {k: settings[k] for k in _EXCHANGE_KEYS if k in settings}
            if 'rebalance_every' in exchange:
                exchange['rebalance_every'] = int(exchange['rebalance_every'])
            sim['exchange'] = ExchangeConfig(**exchange)
        cfg = SimConfig(**sim)
        n_steps = int(settings.get('n_steps', 1000))
        snapshot_every = int(settings.get('snapshot_every', n_steps))
    except (TypeError, ValueError) as e:
        if isinstance(e, SfMaxEntError):
            raise
        raise ConfigurationError(f"invalid {mode.value} settings: {e}") from e
    if n_steps < 1 or snapshot_every < 1:
        raise ConfigurationError("n_steps and snapshot_every must be >= 1")
    return cfg, n_steps, snapshot_every


def _write_csv(frame: pd.DataFrame, path: Path) -> str:
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")
    return path.name


def _ensure_dir(out_dir) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create {path}: {e}") from e
    return path


def _safe(fn, *args, **kwargs):
    """Value of a statistic, or 'unavailable' when the data cannot support it."""
    try:
        return fn(*args, **kwargs)
    except (InsufficientDataError, ValueError) as e:
        logger.warning(f"{getattr(fn, '__name__', fn)} unavailable: {e}")
        return UNAVAILABLE


class RunService:
    """Back end of the command line; one instance per command invocation."""

    def __init__(self, tool_version: str, histogram_bins='fd', convergence_ks: float = 0.01):
        self.tool_version = tool_version
        self.histogram_bins = histogram_bins
        self.convergence_ks = convergence_ks

    # -- simulate -----------------------------------------------------------

    def simulate(self, cfg: SimConfig, n_steps: int, snapshot_every: int, out_dir) -> RunManifest:
        """Run one walker experiment and write snapshots, histograms and the manifest to out_dir."""
        out = _ensure_dir(out_dir)
        simulator = WalkerSimulator(cfg, convergence_ks=self.convergence_ks)
        snapshots = simulator.run(n_steps, snapshot_every)
        final = snapshots[-1]
        figure = FIGURE_NUMBER[cfg.mode]
        x0 = simulator.x0

        outputs = [self._write_snapshots(snapshots, out / 'snapshots.csv')]
        hist = stats_service.u_histogram(final.positions, n_bins=self.histogram_bins, x0=x0)
        outputs.append(_write_csv(hist.to_frame(), out / f'fig{figure}_top_hist.csv'))

        diagnostics = simulator.diagnostics.to_dict()
        if cfg.mode is SimMode.FREE:
            diagnostics['lognormal_fits'] = self._free_fits(snapshots)
            for snap in snapshots[1:-1]:
                h = stats_service.u_histogram(snap.positions, n_bins=self.histogram_bins, x0=x0)
                outputs.append(_write_csv(h.to_frame(), out / f'fig1_top_hist_step{snap.step_count}.csv'))
        else:
            model = self.equilibrium_model(cfg)
            rs = stats_service.rank_size(final.positions)
            outputs.append(_write_csv(rs.to_frame(), out / f'fig{figure}_rank.csv'))
            model_curve = pd.DataFrame({'u': hist.centers, 'density': maxent_service.density_u(model, hist.centers)})
            outputs.append(_write_csv(model_curve, out / f'fig{figure}_top_model.csv'))
            diagnostics['model'] = maxent_service.model_to_dict(model)
            diagnostics['ks_distance'] = stats_service.ks_distance(final.positions, model)
            diagnostics['fit_correlation'] = _safe(stats_service.fit_correlation, rs, model, final.size)
            diagnostics['mean_u'] = float(np.mean(final.u(x0)))
            if cfg.mode is SimMode.ZIPF:
                diagnostics['rank_slope'] = _safe(lambda: asdict(stats_service.rank_loglog_slope(rs)))
                diagnostics['density_exponent'] = _safe(
                    lambda: -stats_service.density_exponent(final.positions, x0=x0).slope)

        manifest = RunManifest(
            command='simulate',
            config={'mode': cfg.mode.value, 'sim': cfg.to_dict(),
                    'n_steps': n_steps, 'snapshot_every': snapshot_every},
            seed=cfg.seed, tool_version=self.tool_version,
            outputs=outputs, diagnostics=diagnostics)
        manifest.write(out)
        logger.info(f"Simulation finished: {len(snapshots)} snapshots in {out}")
        return manifest

    @staticmethod
    def equilibrium_model(cfg: SimConfig) -> EquilibriumModel:
        """The MaxEnt prediction the run should converge to."""
        if cfg.mode is SimMode.BOUNDED:
            return EquilibriumModel.benford(cfg.bounds.u_max, cfg.bounds.x0)
        if cfg.mode is SimMode.ZIPF:
            return EquilibriumModel.power_law(1.0 / cfg.exchange.mean_u_target, cfg.exchange.x0)
        raise ConfigurationError("free diffusion has no equilibrium model")

    @staticmethod
    def _write_snapshots(snapshots: Sequence[WalkerEnsemble], path: Path) -> str:
        frame = pd.concat([
            pd.DataFrame({'step': snap.step_count, 'walker_id': np.arange(snap.size), 'x': snap.positions})
            for snap in snapshots
        ], ignore_index=True)
        return _write_csv(frame, path)

    @staticmethod
    def _free_fits(snapshots: Sequence[WalkerEnsemble]) -> List[Dict[str, Any]]:
        fits = []
        for snap in snapshots[1:]:
            mean_u, sd_u = stats_service.lognormal_fit(snap.positions)
            fits.append({'step': snap.step_count, 'mean_u': mean_u, 'sd_u': sd_u,
                         'jarque_bera_p': stats_service.normality_pvalue(snap.positions)})
        return fits

    # -- solve --------------------------------------------------------------

    def solve(self, constraints: ConstraintSet, x0: float = 1.0,
              out_dir: Optional[Path] = None) -> Dict[str, Any]:
        """Solve the multipliers; with out_dir also write model.json and a manifest."""
        solution = maxent_service.solve_multipliers(constraints)
        model = maxent_service.model_from_solution(solution, x0)
        payload = {**maxent_service.model_to_dict(model), 'residuals': solution.residuals}
        if out_dir is not None:
            out = _ensure_dir(out_dir)
            dump_json(payload, out / 'model.json')
            RunManifest(
                command='solve',
                config={'normalized': constraints.normalized, 'mean_u': constraints.mean_u_target,
                        'u_max': 'inf' if math.isinf(constraints.u_max) else constraints.u_max, 'x0': x0},
                seed=0, tool_version=self.tool_version,
                outputs=['model.json'], diagnostics={'residuals': solution.residuals},
            ).write(out)
        return payload

    # -- fixture ------------------------------------------------------------

    def fixture(self, model: EquilibriumModel, n_places: int, years: Sequence[int], K: float,
                seed: int, out_dir) -> RunManifest:
        """Write a synthetic census table drawn from `model` as fixture.csv."""
        out = _ensure_dir(out_dir)
        series = data_service.synthesize_fixture(model, n_places, years, K, seed)
        data_service.write_series_csv(series, out / 'fixture.csv')
        manifest = RunManifest(
            command='fixture',
            config={'model': maxent_service.model_to_dict(model), 'n': n_places,
                    'years': list(series.years), 'K': K},
            seed=seed, tool_version=self.tool_version, outputs=['fixture.csv'],
            diagnostics={'n_places': len(series.places)})
        manifest.write(out)
        return manifest

    # -- analyze ------------------------------------------------------------

    def analyze(self, series: SnapshotSeries, models: Sequence[str], top_n: int,
                years: Optional[Sequence[int]], out_dir, source: Dict[str, Any]) -> Dict[str, Any]:
        """Validation report for a census table; `source` records how the table was loaded."""
        out = _ensure_dir(out_dir)
        years = list(series.years) if not years else [int(y) for y in years]
        missing = [y for y in years if not series.has_year(y)]
        if missing:
            raise ConfigurationError(f"years {missing} not in data {list(series.years)}")
        unknown = set(models) - set(FIT_MODELS)
        if unknown:
            raise ConfigurationError(f"unknown models {sorted(unknown)}; choose from {FIT_MODELS}")

        report = self.build_report(series, models, top_n, years)
        outputs = []
        for year in years:
            values = series.values(year)
            if values.size:
                outputs.append(_write_csv(stats_service.rank_size(values).to_frame(), out / f'rank_{year}.csv'))
        report['rank_size'] = {str(y): f'rank_{y}.csv' if f'rank_{y}.csv' in outputs else UNAVAILABLE
                               for y in years}
        dump_json(report, out / 'report.json')
        outputs.insert(0, 'report.json')
        RunManifest(
            command='analyze',
            config={**source, 'models': list(models), 'top_n': top_n, 'years': years},
            seed=0, tool_version=self.tool_version, outputs=outputs,
            diagnostics={'n_places': len(series.places)},
        ).write(out)
        return report

    def build_report(self, series: SnapshotSeries, models: Sequence[str], top_n: int,
                     years: Sequence[int]) -> Dict[str, Any]:
        """Schema-stable report; every key is present, unsupported values are 'unavailable'."""
        report: Dict[str, Any] = {
            'years': list(years),
            'n_places': len(series.places),
            'top_n': top_n,
            'lognormal_fit': {},
            'rank_slope': {},
            'fit_correlation': {},
            'conservation_sum': {},
            'correlation_u_udot': {},
            'regime_turnover': {},
        }
        for year in years:
            key = str(year)
            values = series.values(year)
            fit = _safe(stats_service.lognormal_fit, values)
            report['lognormal_fit'][key] = (UNAVAILABLE if fit is UNAVAILABLE
                                            else {'mean_u': fit[0], 'sd_u': fit[1]})
            rs = _safe(stats_service.rank_size, values)
            if rs is UNAVAILABLE:
                report['rank_slope'][key] = UNAVAILABLE
                report['fit_correlation'][key] = {name: UNAVAILABLE for name in models}
                report['conservation_sum'][key] = UNAVAILABLE
                continue
            slope = _safe(stats_service.rank_loglog_slope, rs, top_n)
            report['rank_slope'][key] = slope if slope is UNAVAILABLE else asdict(slope)
            report['fit_correlation'][key] = {
                name: _safe(self._fit_against, name, rs, fit, top_n) for name in models}
            report['conservation_sum'][key] = (
                _safe(stats_service.conservation_sum, rs.sizes, top_n)
                if len(rs) >= top_n else UNAVAILABLE)

        pairs = list(zip(years, years[1:]))
        for t1, t2 in pairs:
            records = _safe(stats_service.growth_records, series, t1, t2)
            report['correlation_u_udot'][f'{t1}-{t2}'] = (
                records if records is UNAVAILABLE else _safe(stats_service.correlation_u_udot, records))
        if pairs:
            pooled = []
            for t1, t2 in pairs:
                records = _safe(stats_service.growth_records, series, t1, t2)
                if records is not UNAVAILABLE:
                    pooled.extend(records)
            report['correlation_u_udot']['pooled'] = _safe(stats_service.correlation_u_udot, pooled)
        else:
            report['correlation_u_udot']['pooled'] = UNAVAILABLE

        turnover_pairs = pairs + ([(years[0], years[-1])] if len(years) > 2 else [])
        for t1, t2 in turnover_pairs:
            early, late = series.top_ids(t1, top_n), series.top_ids(t2, top_n)
            result = _safe(stats_service.regime_turnover, early, late) if len(early) == len(late) == top_n \
                else UNAVAILABLE
            report['regime_turnover'][f'{t1}-{t2}'] = (
                result if result is UNAVAILABLE else {'exited': result[0], 'fraction': result[1]})
        if not turnover_pairs:
            report['regime_turnover']['all'] = UNAVAILABLE
        return report

    @staticmethod
    def _fit_against(name: str, rs, lognormal_params, top_n: int) -> float:
        sizes = rs.sizes
        if name == 'benford':
            x_min, x_max = float(sizes[-1]), float(sizes[0])
            if x_max <= x_min:
                raise InsufficientDataError("all sizes equal")
            model = EquilibriumModel.benford(math.log(x_max / x_min), x_min)
            return stats_service.fit_correlation(rs, model, len(rs))
        if name == 'lognormal':
            if lognormal_params is UNAVAILABLE or lognormal_params[1] == 0:
                raise InsufficientDataError("log-normal fit unavailable")
            model = EquilibriumModel.log_normal(*lognormal_params)
            return stats_service.fit_correlation(rs, model, len(rs))
        tail = rs.top(min(top_n, len(rs)))
        model = EquilibriumModel.zipf(float(tail.sizes[-1]))
        return stats_service.fit_correlation(tail, model, len(tail))

    # -- replay -------------------------------------------------------------

    def replay(self, manifest: RunManifest, out_dir) -> Any:
        """Re-execute a recorded command into out_dir."""
        config = manifest.config
        logger.info(f"Replaying '{manifest.command}' into {out_dir}")
        if manifest.command == 'simulate':
            cfg = SimConfig.from_dict(config['sim'])
            return self.simulate(cfg, int(config['n_steps']), int(config['snapshot_every']), out_dir)
        if manifest.command == 'fixture':
            model = maxent_service.model_from_dict(config['model'])
            return self.fixture(model, int(config['n']), config['years'], float(config['K']),
                                int(manifest.seed), out_dir)
        if manifest.command == 'solve':
            constraints = ConstraintSet(normalized=bool(config['normalized']),
                                        mean_u_target=config['mean_u'],
                                        u_max=float(config['u_max']))
            return self.solve(constraints, float(config['x0']), out_dir)
        if manifest.command == 'analyze':
            source = {key: config.get(key) for key in ('data', 'schema', 'include')}
            series = data_service.load_table(source['data'], source['schema'], source['include'])
            return self.analyze(series, config['models'], int(config['top_n']), config['years'],
                                out_dir, source)
        raise ConfigurationError(f"cannot replay command '{manifest.command}'")

