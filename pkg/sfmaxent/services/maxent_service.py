"""MaxEnt equilibrium solutions p_U(u) = exp(-mu - lam*u) on [0, u_max] and friends.

The multipliers come from the conservation rules
    1     = int_0^u_M exp(-mu - lam*u) du          (normalization, mu)
    <u>   = int_0^u_M u exp(-mu - lam*u) du        (mean rule, lam)
Normalization gives mu(lam) in closed form, leaving one bracketable equation
in lam. Without normalization mu is fixed at 0 and the mean rule is read as a
ratio, which gives <u> = 1/lam for an infinite volume.
"""
import logging
import math
from typing import Any, Dict

import numpy as np
from scipy import integrate, optimize, stats

from sfmaxent.errors import DomainError, InfeasibleConstraintError, NumericalError
from sfmaxent.models.equilibrium import (ConstraintSet, EquilibriumModel, ModelFamily,
                                         MultiplierSolution)
from sfmaxent.models.transform import TransformKind, TransformSpec
from sfmaxent.services.scale_transform import from_log_space, jacobian, to_log_space

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
LAMBDA_BRACKET = 50.0
LAMBDA_LIMIT = 1e6
_SERIES_CUTOFF = 1e-4
_EXP_CUTOFF = 700.0


def log_mass(lam: float, u_max: float) -> float:
    """log of int_0^u_max exp(-lam*u) du."""
    if math.isinf(u_max):
        if lam <= 0:
            raise DomainError(f"exp(-{lam} u) is not integrable on an infinite volume")
        return -math.log(lam)
    if lam == 0:
        return math.log(u_max)
    if lam > 0:
        return math.log(-math.expm1(-lam * u_max)) - math.log(lam)
    a = -lam
    return a * u_max + math.log(-math.expm1(-a * u_max)) - math.log(a)


def truncated_mean_u(lam: float, u_max: float) -> float:
    """<u> under exp(-lam*u) on [0, u_max]; u_max/2 at lam = 0."""
    if math.isinf(u_max):
        if lam <= 0:
            raise DomainError(f"<u> diverges for lambda={lam} on an infinite volume")
        return 1.0 / lam
    z = lam * u_max
    if abs(z) < _SERIES_CUTOFF:
        return u_max * (0.5 - z / 12.0 + z ** 3 / 720.0)
    if z > _EXP_CUTOFF:
        return 1.0 / lam - u_max * math.exp(-z)
    return 1.0 / lam - u_max / math.expm1(z)


def _solve_lambda(mean_u: float, u_max: float) -> float:
    if math.isinf(u_max):
        return 1.0 / mean_u

    def excess(lam):
        return truncated_mean_u(lam, u_max) - mean_u

    lo, hi = -LAMBDA_BRACKET, LAMBDA_BRACKET
    while excess(hi) > 0:
        hi *= 2
        if hi > LAMBDA_LIMIT:
            raise NumericalError(f"no lambda bracket for <u>={mean_u} near 0", residual=excess(hi / 2))
    while excess(lo) < 0:
        lo *= 2
        if -lo > LAMBDA_LIMIT:
            raise NumericalError(f"no lambda bracket for <u>={mean_u} near u_max={u_max}",
                                 residual=excess(lo / 2))

    lam, result = optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                                  maxiter=500, full_output=True)
    if not result.converged:
        raise NumericalError(f"lambda root finding stopped: {result.flag}", residual=excess(lam))
    return lam


def _quad(func, u_max: float) -> float:
    value, _ = integrate.quad(func, 0.0, u_max, epsabs=1e-13, epsrel=1e-13, limit=500)
    return value


def conservation_residuals(mu: float, lam: float, constraints: ConstraintSet) -> Dict[str, float]:
    """Quadrature residual of each active conservation rule."""
    u_max = constraints.u_max
    residuals = {}
    if constraints.normalized:
        mass = _quad(lambda u: math.exp(-mu - lam * u), u_max)
        residuals['normalization'] = mass - 1.0
        if constraints.mean_u_target is not None:
            first = _quad(lambda u: u * math.exp(-mu - lam * u), u_max)
            residuals['mean_u'] = first - constraints.mean_u_target
    else:
        shift = log_mass(lam, u_max)
        mass = _quad(lambda u: math.exp(-shift - lam * u), u_max)
        first = _quad(lambda u: u * math.exp(-shift - lam * u), u_max)
        residuals['mean_u'] = first / mass - constraints.mean_u_target
    return residuals


def solve_multipliers(constraints: ConstraintSet) -> MultiplierSolution:
    """Solve (mu, lambda) for the active conservation rules on [0, u_max]."""
    u_max = constraints.u_max
    target = constraints.mean_u_target
    if target is None:
        if math.isinf(u_max):
            raise InfeasibleConstraintError('normalization', "uniform density on an infinite volume")
        mu, lam = math.log(u_max), 0.0
    else:
        if not 0 < target < u_max:
            raise InfeasibleConstraintError('mean_u', f"<u>={target} outside (0, {u_max})")
        lam = _solve_lambda(target, u_max)
        mu = log_mass(lam, u_max) if constraints.normalized else 0.0

    residuals = conservation_residuals(mu, lam, constraints)
    solution = MultiplierSolution(mu=mu, lam=lam, constraints=constraints, residuals=residuals)
    if solution.max_residual > RESIDUAL_TOL:
        logger.error(f"Multiplier residuals too large: {residuals}")
        raise NumericalError("conservation rules not met", residual=solution.max_residual)
    logger.debug(f"Solved multipliers mu={mu:.12g} lambda={lam:.12g} residuals={residuals}")
    return solution


def model_from_solution(solution: MultiplierSolution, x0: float = 1.0) -> EquilibriumModel:
    """Exponential-in-u model carrying the solved multipliers and the constraint volume."""
    return EquilibriumModel(ModelFamily.EXPONENTIAL_IN_U, x0=x0, mu=solution.mu, lam=solution.lam,
                            u_max=solution.constraints.u_max,
                            normalized=solution.constraints.normalized)


def model_from_constraints(constraints: ConstraintSet, x0: float = 1.0) -> EquilibriumModel:
    """Solve the multipliers and wrap them in a model."""
    return model_from_solution(solve_multipliers(constraints), x0)


# ---------------------------------------------------------------------------
# densities

def _log_spec(model: EquilibriumModel) -> TransformSpec:
    return TransformSpec(TransformKind.SCALE_INVARIANT, model.x0)


def density_u(model: EquilibriumModel, u):
    """p_U(u); zero outside the support."""
    u_arr = np.asarray(u, dtype=float)
    if model.family is ModelFamily.LOG_NORMAL:
        out = stats.norm.pdf(u_arr, loc=model.mean_u, scale=model.sd_u)
    else:
        inside = (u_arr >= 0) & (u_arr <= model.u_max)
        with np.errstate(over='ignore'):
            out = np.where(inside, np.exp(-model.mu - model.lam * np.where(inside, u_arr, 0.0)), 0.0)
    return float(out) if np.ndim(u) == 0 else out


def density_x(model: EquilibriumModel, x):
    """p_X(x) = p_U(u(x)) du/dx, i.e. exp(-mu) x0^lam / x^(lam+1) for the exponential family."""
    x_arr = np.asarray(x, dtype=float)
    positive = x_arr > 0
    safe = np.where(positive, x_arr, model.x0)
    spec = _log_spec(model)
    out = np.where(positive, density_u(model, to_log_space(safe, spec)) * jacobian(safe, spec), 0.0)
    return float(out) if np.ndim(x) == 0 else out


def element_density(model: EquilibriumModel, x, n_total: int):
    """rho(x) = N p_X(x)."""
    return n_total * density_x(model, x)


def thermodynamic_density(n_total: int, u_max: float) -> float:
    """rho_0 = N / u_M, the constant kept fixed in the thermodynamic limit."""
    return n_total / u_max


# ---------------------------------------------------------------------------
# distribution functions (shape-normalized for mu = 0 models)

def _require_cdf(model: EquilibriumModel):
    if not model.has_cdf:
        raise DomainError(f"density shape of lambda={model.lam} on an infinite volume is not normalizable")


def cdf_u(model: EquilibriumModel, u):
    """P(U <= u) of the density shape; raises DomainError when it is not normalizable."""
    _require_cdf(model)
    u_arr = np.asarray(u, dtype=float)
    if model.family is ModelFamily.LOG_NORMAL:
        out = stats.norm.cdf(u_arr, loc=model.mean_u, scale=model.sd_u)
        return float(out) if np.ndim(u) == 0 else out

    lam, u_max = model.lam, model.u_max
    v = np.clip(u_arr, 0.0, u_max)
    if lam == 0:
        out = v / u_max
    elif math.isinf(u_max):
        out = -np.expm1(-lam * v)
    elif lam > 0:
        out = np.expm1(-lam * v) / math.expm1(-lam * u_max)
    else:
        a = -lam
        out = np.exp(a * (v - u_max)) * np.expm1(-a * v) / math.expm1(-a * u_max)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(u) == 0 else out


def quantile_u(model: EquilibriumModel, q):
    """Inverse of cdf_u."""
    _require_cdf(model)
    q_arr = np.asarray(q, dtype=float)
    if np.any((q_arr < 0) | (q_arr > 1)):
        raise DomainError("quantile levels must lie in [0, 1]")
    if model.family is ModelFamily.LOG_NORMAL:
        out = stats.norm.ppf(q_arr, loc=model.mean_u, scale=model.sd_u)
        return float(out) if np.ndim(q) == 0 else out

    lam, u_max = model.lam, model.u_max
    with np.errstate(divide='ignore'):
        if lam == 0:
            out = q_arr * u_max
        elif lam > 0:
            tail = -1.0 if math.isinf(u_max) else math.expm1(-lam * u_max)
            out = -np.log1p(q_arr * tail) / lam
        else:
            a = -lam
            out = u_max + np.log(q_arr + (1.0 - q_arr) * math.exp(-a * u_max)) / a
    out = np.clip(out, 0.0, u_max)
    return float(out) if np.ndim(q) == 0 else out


def cdf_x(model: EquilibriumModel, x):
    """P(X <= x); zero for non-positive x."""
    x_arr = np.asarray(x, dtype=float)
    positive = x_arr > 0
    safe = np.where(positive, x_arr, model.x0)
    out = np.where(positive, cdf_u(model, to_log_space(safe, _log_spec(model))), 0.0)
    return float(out) if np.ndim(x) == 0 else out


def quantile_x(model: EquilibriumModel, q):
    """Inverse of cdf_x."""
    return from_log_space(quantile_u(model, q), _log_spec(model))


def predicted_rank(model: EquilibriumModel, x, n_total: int):
    """Expected number of elements at or above x among n_total."""
    return n_total * (1.0 - cdf_x(model, x))


def size_at_rank(model: EquilibriumModel, rank, n_total: int):
    """Size whose predicted rank is the mid-rank position rank - 1/2."""
    rank_arr = np.asarray(rank, dtype=float)
    if np.any((rank_arr < 1) | (rank_arr > n_total)):
        raise DomainError(f"ranks must lie in [1, {n_total}]")
    return quantile_x(model, 1.0 - (rank_arr - 0.5) / n_total)


def sample(model: EquilibriumModel, n: int, seed: int) -> np.ndarray:
    """n inverse-CDF draws; deterministic per (seed, n)."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return np.asarray(quantile_x(model, rng.random(n)), dtype=float)


def shannon_entropy_u(model: EquilibriumModel) -> float:
    """Differential entropy S = -int p_U log p_U du (conventional sign)."""
    if model.family is ModelFamily.LOG_NORMAL:
        return 0.5 * math.log(2 * math.pi * math.e * model.var_u)
    if not model.normalized:
        raise DomainError("entropy undefined without normalization")
    # log p_U = -mu - lam u, so S = mu + lam <u>
    mean_u = model.u_max / 2 if model.lam == 0 else truncated_mean_u(model.lam, model.u_max)
    return model.mu + model.lam * mean_u


# ---------------------------------------------------------------------------
# JSON form

def model_to_dict(model: EquilibriumModel) -> Dict[str, Any]:
    """JSON-safe form; an infinite u_max becomes the string 'inf'."""
    return {
        'family': model.family.value,
        'mu': model.mu,
        'lambda': model.lam,
        'x0': model.x0,
        'u_max': 'inf' if math.isinf(model.u_max) else model.u_max,
        'normalized': model.normalized,
        'mean_u': model.mean_u,
        'var_u': model.var_u,
    }


def model_from_dict(data: Dict[str, Any]) -> EquilibriumModel:
    try:
        return EquilibriumModel(
            family=ModelFamily(data['family']),
            x0=float(data.get('x0', 1.0)),
            mu=float(data.get('mu', 0.0)),
            lam=float(data.get('lambda', 0.0)),
            u_max=float(data.get('u_max', math.inf)),
            normalized=bool(data.get('normalized', True)),
            mean_u=float(data.get('mean_u', 0.0)),
            var_u=float(data.get('var_u', 1.0)),
        )
    except (KeyError, ValueError) as e:
        raise DomainError(f"invalid model document: {e}") from e
