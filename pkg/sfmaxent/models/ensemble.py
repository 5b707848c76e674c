"""Walker ensembles and the configuration of the three walker experiments."""
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from sfmaxent.errors import ConfigurationError
from sfmaxent.models.transform import TransformKind, TransformSpec


class SimMode(str, Enum):
    FREE = 'free'
    BOUNDED = 'bounded'
    ZIPF = 'zipf'


def _coerce_floats(obj, *names):
    # config files give ints, manifests give "inf"; both are stored as floats
    for name in names:
        object.__setattr__(obj, name, float(getattr(obj, name)))


@dataclass(frozen=True)
class BoundsConfig:
    """Finite volume [x0, x_max]; moves leaving it are rejected."""
    x0: float = 1.0
    x_max: float = 1e4

    def __post_init__(self):
        _coerce_floats(self, 'x0', 'x_max')

    @property
    def u_max(self) -> float:
        return math.log(self.x_max / self.x0)


@dataclass(frozen=True)
class ExchangeConfig:
    """Element-exchange dynamics conserving sum(u) = N * mean_u_target."""
    mean_u_target: float = 1.0
    x0: float = 1.0
    rebalance_every: int = 0
    independent_k: bool = False

    def __post_init__(self):
        _coerce_floats(self, 'mean_u_target', 'x0')


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one walker experiment.

    K is the variance of the Gaussian growth rate k (draws use sd sqrt(K));
    drift is added to every draw.
    """
    n_walkers: int = 10000
    x_init: float = 100.0
    K: float = 10.0
    dt: float = 1e-5
    drift: float = 0.0
    seed: int = 0
    bounds: Optional[BoundsConfig] = None
    exchange: Optional[ExchangeConfig] = None
    exact_steps: bool = False

    def __post_init__(self):
        _coerce_floats(self, 'x_init', 'K', 'dt', 'drift')
        if self.n_walkers < 1:
            raise ConfigurationError(f"n_walkers must be >= 1, got {self.n_walkers}")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not self.K > 0:
            raise ConfigurationError(f"K must be positive, got {self.K}")
        if not self.x_init > 0:
            raise ConfigurationError(f"x_init must be positive, got {self.x_init}")
        if self.bounds is not None and self.exchange is not None:
            raise ConfigurationError("bounded and exchange dynamics cannot be combined")
        if self.bounds is not None:
            if not 0 < self.bounds.x0 < self.x_init <= self.bounds.x_max:
                raise ConfigurationError(
                    f"bounded run needs x0 < x_init <= x_max, got "
                    f"{self.bounds.x0} < {self.x_init} <= {self.bounds.x_max}")
        if self.exchange is not None:
            if self.n_walkers < 2:
                raise ConfigurationError("exchange dynamics need at least 2 walkers")
            if not self.exchange.mean_u_target > 0:
                raise ConfigurationError("exchange mean_u_target must be positive")
            if not self.exchange.x0 > 0:
                raise ConfigurationError("exchange x0 must be positive")

    @property
    def mode(self) -> SimMode:
        if self.bounds is not None:
            return SimMode.BOUNDED
        if self.exchange is not None:
            return SimMode.ZIPF
        return SimMode.FREE

    @property
    def k_sd(self) -> float:
        return math.sqrt(self.K)

    def with_seed(self, seed: int) -> 'SimConfig':
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['mode'] = self.mode.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimConfig':
        data = {k: v for k, v in data.items() if k != 'mode'}
        bounds = data.pop('bounds', None)
        exchange = data.pop('exchange', None)
        return cls(
            bounds=BoundsConfig(**bounds) if bounds else None,
            exchange=ExchangeConfig(**exchange) if exchange else None,
            **data,
        )


@dataclass
class WalkerEnsemble:
    """Walker positions in x-space plus the simulation clock.

    Owned by a single running experiment; steppers return a new ensemble.
    """
    positions: np.ndarray
    time: float = 0.0
    step_count: int = 0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)

    @classmethod
    def initial(cls, cfg: SimConfig) -> 'WalkerEnsemble':
        x_init = cfg.x_init
        if cfg.exchange is not None:
            x_init = cfg.exchange.x0 * math.exp(cfg.exchange.mean_u_target)
        return cls(positions=np.full(cfg.n_walkers, x_init, dtype=float))

    @property
    def size(self) -> int:
        return int(self.positions.size)

    def copy(self) -> 'WalkerEnsemble':
        return WalkerEnsemble(self.positions.copy(), self.time, self.step_count)

    def u(self, x0: float = 1.0) -> np.ndarray:
        """Log-space positions u = log(x/x0)."""
        from sfmaxent.services.scale_transform import to_log_space
        return to_log_space(self.positions, TransformSpec(TransformKind.SCALE_INVARIANT, x0))


@dataclass
class StepDiagnostics:
    """Counters accumulated by the steppers of one run."""
    k_redraws: int = 0
    bounded_rejections: int = 0
    exchange_rejections: int = 0
    exchange_iterations: int = 0
    max_k_squared: float = 0.0
    rebalances: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.update(data.pop('extra'))
        return data
