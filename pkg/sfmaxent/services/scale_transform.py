"""The u-transform u(x) with Jacobian du/dx = 1/g(x).

All logarithms are natural: x = 100 with x0 = 1 gives u = 2 ln 10.
Functions accept scalars or numpy arrays.
"""
import numpy as np

from sfmaxent.errors import DomainError
from sfmaxent.models.transform import TransformKind, TransformSpec

SCALE_INVARIANT = TransformSpec(TransformKind.SCALE_INVARIANT, 1.0)


def _as_float(value, like):
    return float(value) if np.ndim(like) == 0 else value


def _check_positive(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"x must be positive, got min {np.min(arr)}")
    return arr


def to_log_space(x, spec: TransformSpec = SCALE_INVARIANT):
    """u = log(x/x0) for scale-invariant dynamics, u = x - x0 for translational."""
    if spec.is_scale_invariant:
        arr = _check_positive(x)
        return _as_float(np.log(arr / spec.x0), x)
    return _as_float(np.asarray(x, dtype=float) - spec.x0, x)


def from_log_space(u, spec: TransformSpec = SCALE_INVARIANT):
    """Inverse of to_log_space."""
    arr = np.asarray(u, dtype=float)
    if spec.is_scale_invariant:
        return _as_float(spec.x0 * np.exp(arr), u)
    return _as_float(arr + spec.x0, u)


def jacobian(x, spec: TransformSpec = SCALE_INVARIANT):
    """du/dx = 1/g(x): 1/x when g(x) = x, 1 when g(x) = 1."""
    if spec.is_scale_invariant:
        return _as_float(1.0 / _check_positive(x), x)
    return _as_float(np.ones_like(np.asarray(x, dtype=float)), x)
