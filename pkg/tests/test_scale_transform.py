import math

import numpy as np
import pytest

from sfmaxent.errors import DomainError
from sfmaxent.models.ensemble import WalkerEnsemble
from sfmaxent.models.transform import TransformKind, TransformSpec
from sfmaxent.services.scale_transform import from_log_space, jacobian, to_log_space

TRANSLATIONAL = TransformSpec(TransformKind.TRANSLATIONAL, 1.0)


@pytest.mark.parametrize('x, expected', [
    (1.0, 0.0),
    (100.0, 2 * math.log(10)),
    (1e4, 4 * math.log(10)),
])
def test_to_log_space(x, expected):
    assert to_log_space(x) == pytest.approx(expected, abs=1e-12)


def test_reference_scale_maps_to_zero():
    for kind in TransformKind:
        spec = TransformSpec(kind, 7.5)
        assert to_log_space(7.5, spec) == 0.0


def test_from_log_space():
    assert from_log_space(0.0) == 1.0
    assert from_log_space(1.0) == pytest.approx(math.e)
    assert from_log_space(1.0, TransformSpec(x0=3.0)) == pytest.approx(3 * math.e)


def test_round_trip():
    xs = np.array([0.5, 7.0, 1e6])
    np.testing.assert_allclose(from_log_space(to_log_space(xs)), xs, rtol=1e-12)


def test_scale_covariance_and_monotonicity():
    xs = np.logspace(-3, 6, 50)
    c = 37.0
    np.testing.assert_allclose(to_log_space(c * xs), to_log_space(xs) + math.log(c), atol=1e-12)
    assert np.all(np.diff(to_log_space(xs)) > 0)


def test_translational_kind():
    assert to_log_space(3.0, TRANSLATIONAL) == 2.0
    assert from_log_space(2.0, TRANSLATIONAL) == 3.0
    assert jacobian(2.0, TRANSLATIONAL) == 1.0


def test_jacobian_matches_finite_differences():
    assert jacobian(2.0) == 0.5
    xs = np.logspace(-3, 6, 40)
    h = xs * 1e-6
    numeric = (to_log_space(xs + h) - to_log_space(xs - h)) / (2 * h)
    np.testing.assert_allclose(jacobian(xs), numeric, rtol=1e-6)


@pytest.mark.parametrize('bad', [0.0, -1.0, [1.0, -2.0]])
def test_non_positive_x_is_rejected(bad):
    with pytest.raises(DomainError):
        to_log_space(bad)
    with pytest.raises(DomainError):
        jacobian(bad)


def test_ensemble_u_uses_the_transform():
    ensemble = WalkerEnsemble(np.array([2.0, 20.0, 200.0]))
    np.testing.assert_allclose(ensemble.u(2.0), to_log_space(ensemble.positions, TransformSpec(x0=2.0)))
    assert ensemble.u(2.0)[0] == 0.0
    with pytest.raises(DomainError):
        WalkerEnsemble(np.array([1.0, 0.0])).u()


def test_x0_must_be_positive():
    with pytest.raises(DomainError):
        TransformSpec(x0=0.0)
