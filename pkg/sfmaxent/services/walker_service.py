"""Random-walker experiments for x' = k x.

Three dynamics share the multiplicative update x <- x (1 + k dt), k ~ N(drift, K):
free diffusion, a finite volume [x0, x_M] with rejected moves, and the
element-exchange algorithm that conserves sum(u) = N <u>.
"""
import logging
import math
from typing import List, Optional

import numpy as np
from scipy import stats

from sfmaxent.errors import ConfigurationError, NumericalError
from sfmaxent.models.ensemble import SimConfig, SimMode, StepDiagnostics, WalkerEnsemble

logger = logging.getLogger(__name__)

DEFAULT_CONVERGENCE_KS = 0.01
MAX_REDRAW_ROUNDS = 100


def _draw_rates(rng, cfg: SimConfig, size: int, diagnostics: StepDiagnostics,
                symmetric: bool = False) -> np.ndarray:
    """Draw k + drift, redrawing any value that would make a factor non-positive.

    With symmetric=True both 1 + r dt and 1 - r dt must stay positive. Gives up
    with NumericalError after MAX_REDRAW_ROUNDS rounds, e.g. when drift * dt <= -1.
    """
    rates = np.asarray(rng.normal(0.0, cfg.k_sd, size), dtype=float) + cfg.drift
    for _ in range(MAX_REDRAW_ROUNDS + 1):
        factor = rates * cfg.dt
        bad = np.abs(factor) >= 1.0 if symmetric else factor <= -1.0
        n_bad = int(np.count_nonzero(bad))
        if not n_bad:
            break
        diagnostics.k_redraws += n_bad
        logger.warning(f"Redrawing {n_bad} growth rates with non-positive factors")
        rates[bad] = np.asarray(rng.normal(0.0, cfg.k_sd, n_bad), dtype=float) + cfg.drift
    else:
        raise NumericalError(f"growth rates still give non-positive factors after {MAX_REDRAW_ROUNDS} "
                             f"redraw rounds (drift={cfg.drift}, K={cfg.K}, dt={cfg.dt})")
    if rates.size:
        diagnostics.max_k_squared = max(diagnostics.max_k_squared, float(np.max(rates ** 2)))
    return rates


def _advance(ensemble: WalkerEnsemble, positions: np.ndarray, dt: float, steps: int = 1) -> WalkerEnsemble:
    return WalkerEnsemble(positions, ensemble.time + steps * dt, ensemble.step_count + steps)


def gbm_step(ensemble: WalkerEnsemble, cfg: SimConfig, rng,
             diagnostics: Optional[StepDiagnostics] = None) -> WalkerEnsemble:
    """Free step: every walker x <- x (1 + (k + drift) dt)."""
    diagnostics = diagnostics if diagnostics is not None else StepDiagnostics()
    rates = _draw_rates(rng, cfg, ensemble.size, diagnostics)
    if cfg.exact_steps:
        positions = ensemble.positions * np.exp(rates * cfg.dt)
    else:
        positions = ensemble.positions * (1.0 + rates * cfg.dt)
    return _advance(ensemble, positions, cfg.dt)


def bounded_step(ensemble: WalkerEnsemble, cfg: SimConfig, rng,
                 diagnostics: Optional[StepDiagnostics] = None) -> WalkerEnsemble:
    """Free step proposal; a walker whose proposal leaves [x0, x_M] stays put.

    With exact_steps the proposal is x exp(k dt), whose log increment has zero
    mean; the Euler proposal x (1 + k dt) carries a -K dt^2/2 drift in u.
    """
    if cfg.bounds is None:
        raise ConfigurationError("bounded_step needs bounds")
    diagnostics = diagnostics if diagnostics is not None else StepDiagnostics()
    rates = _draw_rates(rng, cfg, ensemble.size, diagnostics)
    if cfg.exact_steps:
        proposal = ensemble.positions * np.exp(rates * cfg.dt)
    else:
        proposal = ensemble.positions * (1.0 + rates * cfg.dt)
    accept = (proposal >= cfg.bounds.x0) & (proposal <= cfg.bounds.x_max)
    diagnostics.bounded_rejections += int(ensemble.size - np.count_nonzero(accept))
    return _advance(ensemble, np.where(accept, proposal, ensemble.positions), cfg.dt)


def _exchange_iterations(positions: np.ndarray, n_iter: int, cfg: SimConfig, rng,
                         diagnostics: StepDiagnostics) -> np.ndarray:
    """Run n_iter exchange iterations serially; returns the new positions."""
    exchange = cfg.exchange
    n = positions.size
    x0, dt = exchange.x0, cfg.dt

    grow_idx = rng.integers(0, n, n_iter)
    drop_idx = rng.integers(0, n - 1, n_iter)
    drop_idx = drop_idx + (drop_idx >= grow_idx)
    grow = _draw_rates(rng, cfg, n_iter, diagnostics, symmetric=not exchange.independent_k)
    if exchange.independent_k:
        shrink = _draw_rates(rng, cfg, n_iter, diagnostics, symmetric=True)
    else:
        shrink = grow

    xs = positions.tolist()
    target_sum = n * exchange.mean_u_target
    rejections = 0
    done = diagnostics.exchange_iterations
    for it, (i, j, gi, gj) in enumerate(zip(grow_idx.tolist(), drop_idx.tolist(),
                                            grow.tolist(), shrink.tolist()), start=1):
        xi = xs[i] * (1.0 + gi * dt)
        # the removed walker re-enters at x'(1 - k dt)
        xj = xs[j] * (1.0 - gj * dt)
        if xi < x0 or xj < x0:
            rejections += 1
        else:
            xs[i] = xi
            xs[j] = xj
        if exchange.rebalance_every and (done + it) % exchange.rebalance_every == 0:
            sum_u = math.fsum(math.log(x / x0) for x in xs)
            factor = math.exp((target_sum - sum_u) / n)
            xs = [x * factor for x in xs]
            diagnostics.rebalances += 1

    diagnostics.exchange_iterations += n_iter
    diagnostics.exchange_rejections += rejections
    return np.array(xs, dtype=float)


def zipf_exchange_step(ensemble: WalkerEnsemble, cfg: SimConfig, rng,
                       diagnostics: Optional[StepDiagnostics] = None,
                       n_iter: int = 1) -> WalkerEnsemble:
    """One (or n_iter) exchange iterations.

    Each iteration grows a random walker i by (1 + k dt), removes another
    walker j and re-inserts it at x_j (1 - k dt) with the same k, so sum(u)
    changes only by log(1 - k^2 dt^2).
    """
    if cfg.exchange is None:
        raise ConfigurationError("zipf_exchange_step needs an exchange configuration")
    if ensemble.size < 2:
        raise ConfigurationError("exchange dynamics need at least 2 walkers")
    diagnostics = diagnostics if diagnostics is not None else StepDiagnostics()
    positions = _exchange_iterations(ensemble.positions, n_iter, cfg, rng, diagnostics)
    return _advance(ensemble, positions, cfg.dt, steps=n_iter)


def optional_rebalance(ensemble: WalkerEnsemble, mean_u_target: float, x0: float = 1.0) -> WalkerEnsemble:
    """Rescale all positions so that sum(u) = N * mean_u_target exactly."""
    n = ensemble.size
    factor = math.exp((n * mean_u_target - sum_u(ensemble, x0)) / n)
    if factor == 1.0:
        return ensemble.copy()
    return WalkerEnsemble(ensemble.positions * factor, ensemble.time, ensemble.step_count)


def sum_u(ensemble: WalkerEnsemble, x0: float = 1.0) -> float:
    """Compensated sum of u over all walkers."""
    return math.fsum(ensemble.u(x0).tolist())


def conservation_bound(n_iterations: int, max_k_squared: float, dt: float) -> float:
    """Worst-case |sum(u) drift| of shared-k exchange: n |log(1 - max(k^2) dt^2)|."""
    a2 = max_k_squared * dt * dt
    if a2 >= 1.0:
        return math.inf
    return -n_iterations * math.log1p(-a2)


class WalkerSimulator:
    """Owns the random stream, the diagnostics and the ensemble of one run."""

    def __init__(self, cfg: SimConfig, convergence_ks: float = DEFAULT_CONVERGENCE_KS):
        self.cfg = cfg
        self.convergence_ks = convergence_ks
        self.rng = np.random.default_rng(cfg.seed)
        self.diagnostics = StepDiagnostics()
        self.ensemble = WalkerEnsemble.initial(cfg)

    @property
    def x0(self) -> float:
        if self.cfg.exchange is not None:
            return self.cfg.exchange.x0
        if self.cfg.bounds is not None:
            return self.cfg.bounds.x0
        return 1.0

    def step(self) -> WalkerEnsemble:
        """Advance one step; in exchange mode a step is one sweep of N iterations."""
        mode = self.cfg.mode
        if mode is SimMode.FREE:
            self.ensemble = gbm_step(self.ensemble, self.cfg, self.rng, self.diagnostics)
        elif mode is SimMode.BOUNDED:
            self.ensemble = bounded_step(self.ensemble, self.cfg, self.rng, self.diagnostics)
        else:
            sweep = zipf_exchange_step(self.ensemble, self.cfg, self.rng, self.diagnostics,
                                       n_iter=self.ensemble.size)
            self.ensemble = WalkerEnsemble(sweep.positions, self.ensemble.time + self.cfg.dt,
                                           self.ensemble.step_count + 1)
        return self.ensemble

    def run(self, n_steps: int, snapshot_every: int) -> List[WalkerEnsemble]:
        if n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {n_steps}")
        if snapshot_every < 1:
            raise ConfigurationError(f"snapshot_every must be >= 1, got {snapshot_every}")

        logger.info(f"Running {self.cfg.mode.value} experiment: N={self.cfg.n_walkers} "
                    f"steps={n_steps} seed={self.cfg.seed}")
        snapshots = [self.ensemble.copy()]
        initial_sum = sum_u(self.ensemble, self.x0)
        max_drift = 0.0
        convergence_step = None
        for _ in range(n_steps):
            self.step()
            if self.cfg.mode is SimMode.ZIPF:
                max_drift = max(max_drift, abs(sum_u(self.ensemble, self.x0) - initial_sum))
            if self.ensemble.step_count % snapshot_every == 0 or self.ensemble.step_count == n_steps:
                previous = snapshots[-1]
                snapshots.append(self.ensemble.copy())
                if convergence_step is None and self._converged(previous, self.ensemble):
                    convergence_step = self.ensemble.step_count
                logger.debug(f"Snapshot at step {self.ensemble.step_count}")

        self.diagnostics.extra['convergence_step'] = convergence_step
        if convergence_step is None:
            logger.warning("Run ended without meeting the convergence criterion")
        if self.cfg.mode is SimMode.ZIPF:
            final_sum = sum_u(self.ensemble, self.x0)
            self.diagnostics.extra.update({
                'sum_u_initial': initial_sum,
                'sum_u_final': final_sum,
                'sum_u_max_drift': max_drift,
                'conservation_bound': conservation_bound(
                    self.diagnostics.exchange_iterations, self.diagnostics.max_k_squared, self.cfg.dt),
            })
        return snapshots

    def _converged(self, previous: WalkerEnsemble, current: WalkerEnsemble) -> bool:
        distance = stats.ks_2samp(previous.u(self.x0), current.u(self.x0)).statistic
        return bool(distance < self.convergence_ks)


def run_experiment(cfg: SimConfig, n_steps: int, snapshot_every: int) -> List[WalkerEnsemble]:
    """Run the experiment selected by cfg; snapshots include initial and final states."""
    return WalkerSimulator(cfg).run(n_steps, snapshot_every)
