import math

import numpy as np
import pytest
from scipy import integrate, optimize, stats

from sfmaxent.errors import ConfigurationError, DomainError, InfeasibleConstraintError
from sfmaxent.models.equilibrium import ConstraintSet, EquilibriumModel
from sfmaxent.models.transform import TransformSpec
from sfmaxent.services import maxent_service as ms
from sfmaxent.services.scale_transform import from_log_space, jacobian, to_log_space

U_MAX = 4 * math.log(10)


class TestSolveMultipliers:

    def test_normalization_only_gives_benford(self):
        solution = ms.solve_multipliers(ConstraintSet(normalized=True, u_max=U_MAX))
        assert solution.lam == 0.0
        assert solution.mu == pytest.approx(math.log(U_MAX), abs=1e-12)
        assert math.exp(solution.mu) == pytest.approx(U_MAX)

    def test_unnormalized_unit_mean_gives_zipf(self):
        solution = ms.solve_multipliers(ConstraintSet(normalized=False, mean_u_target=1.0))
        assert solution.mu == 0.0
        assert solution.lam == pytest.approx(1.0, abs=1e-12)

    def test_infinite_volume_mean_rule(self):
        solution = ms.solve_multipliers(ConstraintSet(normalized=True, mean_u_target=2.0))
        assert solution.lam == pytest.approx(0.5, abs=1e-12)
        assert solution.mu == pytest.approx(math.log(2.0), abs=1e-12)
        # <u> = e^mu = 1/lambda
        assert math.exp(solution.mu) == pytest.approx(1 / solution.lam, rel=1e-10)

    def test_finite_volume_residuals(self):
        constraints = ConstraintSet(normalized=True, mean_u_target=1.5, u_max=4.0)
        solution = ms.solve_multipliers(constraints)
        assert solution.max_residual < 1e-10
        mass, _ = integrate.quad(lambda u: math.exp(-solution.mu - solution.lam * u), 0, 4.0)
        first, _ = integrate.quad(lambda u: u * math.exp(-solution.mu - solution.lam * u), 0, 4.0)
        assert mass == pytest.approx(1.0, abs=1e-10)
        assert first == pytest.approx(1.5, abs=1e-10)

    def test_half_volume_mean_is_benford(self):
        solution = ms.solve_multipliers(ConstraintSet(normalized=True, mean_u_target=U_MAX / 2, u_max=U_MAX))
        assert solution.lam == pytest.approx(0.0, abs=1e-10)
        assert solution.mu == pytest.approx(math.log(U_MAX), abs=1e-10)

    @pytest.mark.parametrize('mean_u', [0.3, 0.9, 1.7, 2.6, 3.4])
    @pytest.mark.parametrize('u_max', [1.0, 2.5, 4.0, 6.0, 9.2])
    def test_grid_against_bisection_oracle(self, mean_u, u_max):
        if mean_u >= u_max:
            with pytest.raises(InfeasibleConstraintError):
                ConstraintSet(normalized=True, mean_u_target=mean_u, u_max=u_max)
            return

        def mean_under(lam):
            mass, _ = integrate.quad(lambda u: math.exp(-lam * u), 0, u_max, epsabs=1e-14, epsrel=1e-14)
            first, _ = integrate.quad(lambda u: u * math.exp(-lam * u), 0, u_max, epsabs=1e-14, epsrel=1e-14)
            return first / mass - mean_u

        lam_oracle = optimize.bisect(mean_under, -60, 60, xtol=1e-13, maxiter=500)
        mass_oracle, _ = integrate.quad(lambda u: math.exp(-lam_oracle * u), 0, u_max, epsabs=1e-14, epsrel=1e-14)
        solution = ms.solve_multipliers(ConstraintSet(normalized=True, mean_u_target=mean_u, u_max=u_max))
        assert solution.lam == pytest.approx(lam_oracle, abs=1e-8)
        assert solution.mu == pytest.approx(math.log(mass_oracle), abs=1e-8)

    def test_large_volume_recovers_infinite_limit(self):
        solution = ms.solve_multipliers(ConstraintSet(normalized=True, mean_u_target=2.0, u_max=1e3))
        assert solution.lam == pytest.approx(0.5, abs=1e-6)
        assert solution.mu == pytest.approx(math.log(2.0), abs=1e-6)

    def test_infeasible_targets_name_the_rule(self):
        with pytest.raises(InfeasibleConstraintError) as info:
            ConstraintSet(normalized=True, mean_u_target=5.0, u_max=4.0)
        assert info.value.rule == 'mean_u'
        with pytest.raises(InfeasibleConstraintError) as info:
            ConstraintSet(normalized=True)
        assert info.value.rule == 'normalization'

    def test_no_active_rule(self):
        with pytest.raises(ConfigurationError):
            ConstraintSet(normalized=False)


class TestClosedForms:

    @pytest.mark.parametrize('lam', [-0.7, -1e-5, 1e-5, 0.3, 2.0])
    def test_log_mass_matches_quadrature(self, lam):
        mass, _ = integrate.quad(lambda u: math.exp(-lam * u), 0, 4.0, epsabs=1e-14, epsrel=1e-14)
        assert ms.log_mass(lam, 4.0) == pytest.approx(math.log(mass), abs=1e-12)

    def test_mean_is_continuous_across_series_limit(self):
        below = ms.truncated_mean_u(0.99e-4 / 4.0, 4.0)
        above = ms.truncated_mean_u(1.01e-4 / 4.0, 4.0)
        assert below == pytest.approx(above, abs=1e-8)
        assert ms.truncated_mean_u(0.0, 4.0) == 2.0

    def test_infinite_volume_needs_positive_lambda(self):
        with pytest.raises(DomainError):
            ms.log_mass(0.0, math.inf)
        assert ms.truncated_mean_u(0.25, math.inf) == 4.0

    def test_model_from_constraints_builds_zipf(self):
        model = ms.model_from_constraints(ConstraintSet(normalized=False, mean_u_target=1.0), x0=10.0)
        assert model.lam == pytest.approx(1.0)
        assert model.mu == 0.0
        assert ms.density_x(model, 20.0) == pytest.approx(10.0 / 400.0)


class TestDensities:

    def test_benford_density_is_uniform_in_u(self, benford_model):
        u = np.linspace(0, U_MAX, 11)
        np.testing.assert_allclose(ms.density_u(benford_model, u), 1 / U_MAX, rtol=1e-12)
        assert ms.density_u(benford_model, U_MAX + 0.1) == 0.0
        mass, _ = integrate.quad(lambda v: ms.density_u(benford_model, v), 0, U_MAX)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_zipf_density(self, zipf_model):
        assert ms.density_u(zipf_model, 0.0) == 1.0
        assert ms.density_u(zipf_model, 1.0) == pytest.approx(math.exp(-1))
        assert ms.density_x(zipf_model, 2.0) == pytest.approx(0.25)

    def test_benford_density_x(self, benford_model):
        assert ms.density_x(benford_model, 10.0) == pytest.approx(1 / (U_MAX * 10), rel=1e-12)

    def test_jacobian_identity(self):
        model = EquilibriumModel.power_law(0.7, 2.0, 8.0)
        spec = TransformSpec(x0=2.0)
        xs = np.logspace(math.log10(2.0), math.log10(2.0 * math.exp(8.0)) - 1e-9, 100)
        expected = ms.density_u(model, to_log_space(xs, spec)) * jacobian(xs, spec)
        np.testing.assert_allclose(ms.density_x(model, xs), expected, rtol=1e-12)
        np.testing.assert_allclose(ms.cdf_x(model, xs), ms.cdf_u(model, to_log_space(xs, spec)), rtol=1e-12)
        np.testing.assert_allclose(ms.quantile_x(model, [0.2, 0.9]),
                                   from_log_space(ms.quantile_u(model, np.array([0.2, 0.9])), spec), rtol=1e-12)

    def test_non_positive_x_has_no_mass(self, zipf_model):
        np.testing.assert_array_equal(ms.density_x(zipf_model, np.array([-1.0, 0.0])), [0.0, 0.0])
        assert ms.cdf_x(zipf_model, 0.0) == 0.0
        assert ms.cdf_x(zipf_model, -5.0) == 0.0

    @pytest.mark.parametrize('lam', [0.5, 1.0, 2.0])
    def test_power_law_exponent(self, lam):
        model = EquilibriumModel.power_law(lam, 1.0)
        x1, x2 = 3.0, 300.0
        slope = (math.log(ms.density_x(model, x2)) - math.log(ms.density_x(model, x1))) / math.log(x2 / x1)
        assert slope == pytest.approx(-(lam + 1), rel=1e-12)

    def test_element_density_and_thermodynamic_limit(self, benford_model):
        assert ms.element_density(benford_model, 10.0, 100) == pytest.approx(100 * ms.density_x(benford_model, 10.0))
        assert ms.thermodynamic_density(10000, U_MAX) == pytest.approx(10000 / U_MAX)


class TestRanksAndSampling:

    def test_zipf_predicted_rank(self, zipf_model):
        assert ms.predicted_rank(zipf_model, 100.0, 100) == pytest.approx(1.0)

    def test_benford_predicted_rank(self, benford_model):
        assert ms.predicted_rank(benford_model, 1.0, 10000) == pytest.approx(10000)
        assert ms.predicted_rank(benford_model, 100.0, 10000) == pytest.approx(5000)

    def test_predicted_rank_is_nonincreasing(self):
        model = EquilibriumModel.power_law(1.5, 1.0, 6.0)
        ranks = ms.predicted_rank(model, np.logspace(0, 6 / math.log(10), 200), 500)
        assert np.all(np.diff(ranks) <= 0)

    def test_quantiles(self, zipf_model, benford_model):
        assert ms.quantile_x(zipf_model, 0.0) == pytest.approx(1.0)
        assert ms.quantile_x(zipf_model, 0.5) == pytest.approx(2.0)
        assert ms.quantile_x(benford_model, 0.5) == pytest.approx(100.0)
        negative = EquilibriumModel.power_law(-0.8, 1.0, 5.0)
        assert ms.cdf_u(negative, ms.quantile_u(negative, 0.3)) == pytest.approx(0.3, abs=1e-12)

    def test_size_at_rank_inverts_predicted_rank(self, benford_model):
        sizes = ms.size_at_rank(benford_model, np.arange(1, 11), 10)
        np.testing.assert_allclose(ms.predicted_rank(benford_model, sizes, 10), np.arange(1, 11) - 0.5)

    def test_sample_is_deterministic(self, benford_model):
        np.testing.assert_array_equal(ms.sample(benford_model, 100, 4), ms.sample(benford_model, 100, 4))

    @pytest.mark.parametrize('model', [
        EquilibriumModel.benford(U_MAX, 1.0),
        EquilibriumModel.zipf(1.0),
        EquilibriumModel.power_law(0.5, 2.0, 10.0),
        EquilibriumModel.log_normal(2.0, 1.7),
    ])
    def test_sampling_fidelity(self, model):
        n = 10000
        draws = ms.sample(model, n, seed=17)
        statistic = stats.kstest(draws, lambda x: ms.cdf_x(model, x)).statistic
        assert statistic < 1.63 / math.sqrt(n)


class TestEntropy:

    def test_uniform_entropy(self, benford_model):
        assert ms.shannon_entropy_u(benford_model) == pytest.approx(math.log(U_MAX))

    def test_exponential_entropy(self):
        model = EquilibriumModel.power_law(2.0, 1.0)
        assert ms.shannon_entropy_u(model) == pytest.approx(1 - math.log(2.0))

    def test_monte_carlo_estimate(self):
        model = EquilibriumModel.power_law(0.8, 1.0, 5.0)
        u = np.log(ms.sample(model, 100000, seed=2))
        estimate = -np.mean(np.log(ms.density_u(model, u)))
        assert estimate == pytest.approx(ms.shannon_entropy_u(model), abs=0.01)

    def test_unnormalized_model_has_no_entropy(self, zipf_model):
        with pytest.raises(DomainError, match='normalization'):
            ms.shannon_entropy_u(zipf_model)


def test_model_dict_round_trip(zipf_model):
    restored = ms.model_from_dict(ms.model_to_dict(zipf_model))
    assert restored == zipf_model
    assert ms.model_to_dict(zipf_model)['u_max'] == 'inf'
