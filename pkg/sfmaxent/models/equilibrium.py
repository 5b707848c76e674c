"""Constraint sets and the analytic MaxEnt equilibrium families."""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from sfmaxent.errors import ConfigurationError, DomainError, InfeasibleConstraintError


@dataclass(frozen=True)
class ConstraintSet:
    """Active conservation rules f_i(u) = u^i, i in {0, 1}, on Omega = [0, u_max].

    Attributes:
        normalized: normalization rule (multiplier mu) is active
        mean_u_target: target for <u> (multiplier lambda), or None
        u_max: volume bound u_M; math.inf for an unbounded volume
    """
    normalized: bool = True
    mean_u_target: Optional[float] = None
    u_max: float = math.inf

    def __post_init__(self):
        if not self.normalized and self.mean_u_target is None:
            raise ConfigurationError("at least one of normalization or a <u> target must be active")
        if not self.u_max > 0:
            raise ConfigurationError(f"u_max must be positive, got {self.u_max}")
        if self.mean_u_target is not None:
            if not self.mean_u_target > 0:
                raise InfeasibleConstraintError(
                    'mean_u', f"<u> target must be positive, got {self.mean_u_target}")
            if self.mean_u_target >= self.u_max:
                raise InfeasibleConstraintError(
                    'mean_u', f"<u> target {self.mean_u_target} not below u_max {self.u_max}")
        if self.normalized and self.mean_u_target is None and math.isinf(self.u_max):
            raise InfeasibleConstraintError(
                'normalization', "a uniform density in u cannot be normalized on an infinite volume")

    @property
    def finite_volume(self) -> bool:
        return math.isfinite(self.u_max)


class ModelFamily(str, Enum):
    LOG_NORMAL = 'log_normal'
    EXPONENTIAL_IN_U = 'exponential_in_u'


@dataclass(frozen=True)
class EquilibriumModel:
    """An equilibrium density p_U(u), with x = x0 * exp(u).

    The exponential family is p_U(u) = exp(-mu - lam*u) on [0, u_max]; lam = 0
    with mu = log(u_max) is the Benford case and mu = 0, lam = 1, u_max = inf
    is Zipf's law. The log-normal family is a Gaussian in u with mean_u, var_u.
    """
    family: ModelFamily
    x0: float = 1.0
    mu: float = 0.0
    lam: float = 0.0
    u_max: float = math.inf
    normalized: bool = True
    mean_u: float = 0.0
    var_u: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'family', ModelFamily(self.family))
        if not self.x0 > 0:
            raise DomainError(f"x0 must be positive, got {self.x0}")
        if self.family is ModelFamily.LOG_NORMAL and not self.var_u > 0:
            raise DomainError(f"log-normal variance must be positive, got {self.var_u}")
        if self.family is ModelFamily.EXPONENTIAL_IN_U and not self.u_max > 0:
            raise DomainError(f"u_max must be positive, got {self.u_max}")

    @classmethod
    def benford(cls, u_max: float, x0: float = 1.0) -> 'EquilibriumModel':
        """lambda = 0 normalized solution: p_X(x) = 1/(u_M x)."""
        return cls(ModelFamily.EXPONENTIAL_IN_U, x0=x0, mu=math.log(u_max), lam=0.0, u_max=u_max)

    @classmethod
    def zipf(cls, x0: float = 1.0) -> 'EquilibriumModel':
        """mu = 0, lambda = 1 solution: p_X(x) = x0/x^2."""
        return cls(ModelFamily.EXPONENTIAL_IN_U, x0=x0, mu=0.0, lam=1.0, normalized=False)

    @classmethod
    def power_law(cls, lam: float, x0: float = 1.0, u_max: float = math.inf) -> 'EquilibriumModel':
        """Normalized power law p_X ~ 1/x^(lam+1) on [x0, x0*exp(u_max)]."""
        if lam == 0:
            return cls.benford(u_max, x0)
        if lam < 0 and math.isinf(u_max):
            raise DomainError("a power law with lambda <= 0 needs a finite u_max")
        mass = -math.expm1(-lam * u_max) / lam if math.isfinite(u_max) else 1.0 / lam
        return cls(ModelFamily.EXPONENTIAL_IN_U, x0=x0, mu=math.log(mass), lam=lam, u_max=u_max)

    @classmethod
    def log_normal(cls, mean_u: float, sd_u: float, x0: float = 1.0) -> 'EquilibriumModel':
        return cls(ModelFamily.LOG_NORMAL, x0=x0, mean_u=mean_u, var_u=sd_u ** 2)

    @property
    def is_exponential(self) -> bool:
        return self.family is ModelFamily.EXPONENTIAL_IN_U

    @property
    def sd_u(self) -> float:
        return math.sqrt(self.var_u)

    @property
    def x_max(self) -> float:
        if not self.is_exponential or math.isinf(self.u_max):
            return math.inf
        return self.x0 * math.exp(self.u_max)

    @property
    def has_cdf(self) -> bool:
        """Whether the density shape integrates to a finite mass."""
        if not self.is_exponential:
            return True
        return math.isfinite(self.u_max) or self.lam > 0


@dataclass(frozen=True)
class MultiplierSolution:
    """Solved Lagrange multipliers with the quadrature residual of each active rule."""
    mu: float
    lam: float
    constraints: ConstraintSet
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals.values()), default=0.0)
