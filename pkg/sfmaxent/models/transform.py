"""Change of variable u = u(x) with du/dx = 1/g(x)."""
from dataclasses import dataclass
from enum import Enum

from sfmaxent.errors import DomainError


class TransformKind(str, Enum):
    """Symmetry of the underlying dynamics x' = k g(x)."""
    SCALE_INVARIANT = 'scale_invariant'   # g(x) = x, u = log(x/x0)
    TRANSLATIONAL = 'translational'       # g(x) = 1, u = x - x0


@dataclass(frozen=True)
class TransformSpec:
    """The function g(x) together with the reference scale x0 where u vanishes."""
    kind: TransformKind = TransformKind.SCALE_INVARIANT
    x0: float = 1.0

    def __post_init__(self):
        if not self.x0 > 0:
            raise DomainError(f"x0 must be positive, got {self.x0}")
        object.__setattr__(self, 'kind', TransformKind(self.kind))

    @property
    def is_scale_invariant(self) -> bool:
        return self.kind is TransformKind.SCALE_INVARIANT
