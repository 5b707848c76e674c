import math

import numpy as np
import pytest

from sfmaxent.errors import DomainError, InsufficientDataError
from sfmaxent.models.equilibrium import EquilibriumModel, ModelFamily
from sfmaxent.models.series import Place, SnapshotSeries
from sfmaxent.models.stats import GrowthRecord
from sfmaxent.services import data_service, maxent_service
from sfmaxent.services import stats_service as ss
from tests.conftest import exact_zipf_sizes


def two_year_series(early, late, years=(2000, 2010)):
    places = tuple(Place(f"p{i}") for i in range(len(early)))
    populations = {}
    for place, a, b in zip(places, early, late):
        populations[(place.place_id, years[0])] = a
        populations[(place.place_id, years[1])] = b
    return SnapshotSeries(places, years, populations)


class TestGrowth:

    def test_growth_rates(self):
        series = two_year_series([100, 100, 50], [100, 200, 50])
        records = {r.place_id: r for r in ss.growth_records(series, 2000, 2010)}
        assert records['p0'].u_dot == 0.0
        assert records['p1'].u_dot == pytest.approx(math.log(2) / 10)
        assert records['p1'].u_early == pytest.approx(math.log(100))

    def test_missing_years_are_skipped(self):
        series = SnapshotSeries(
            (Place('a'), Place('b'), Place('c')), (2000, 2010),
            {('a', 2000): 10, ('a', 2010): 20, ('b', 2000): 5, ('c', 2000): 7, ('c', 2010): 7})
        assert [r.place_id for r in ss.growth_records(series, 2000, 2010)] == ['a', 'c']

    def test_perfectly_linear_records(self):
        records = [GrowthRecord(str(i), u, du) for i, (u, du) in enumerate([(1, 0.1), (2, 0.2), (3, 0.3)])]
        assert ss.correlation_u_udot(records) == pytest.approx(1.0)

    def test_correlation_is_affine_invariant(self):
        rng = np.random.default_rng(0)
        u, du = rng.normal(size=50), rng.normal(size=50)
        base = [GrowthRecord(str(i), a, b) for i, (a, b) in enumerate(zip(u, du))]
        shifted = [GrowthRecord(str(i), 3 * a + 1, 0.5 * b - 2) for i, (a, b) in enumerate(zip(u, du))]
        assert ss.correlation_u_udot(shifted) == pytest.approx(ss.correlation_u_udot(base))

    def test_zero_variance_is_insufficient(self):
        records = [GrowthRecord(str(i), float(i), 0.0) for i in range(5)]
        with pytest.raises(InsufficientDataError):
            ss.correlation_u_udot(records)

    def test_proportional_growth_fixture(self):
        model = EquilibriumModel.power_law(1.0, 1000.0)
        series = data_service.synthesize_fixture(model, 4000, (2000, 2010), K=0.01, seed=12)
        r = ss.correlation_u_udot(ss.growth_records(series, 2000, 2010))
        assert abs(r) < 0.05

    def test_pooled_records_cover_every_interval(self):
        model = EquilibriumModel.power_law(1.0, 1000.0)
        series = data_service.synthesize_fixture(model, 50, (1990, 2000, 2010), K=0.01, seed=1)
        pooled = ss.pooled_growth_records(series)
        assert len(pooled) == 100
        assert {r.interval for r in pooled} == {(1990, 2000), (2000, 2010)}


class TestFits:

    def test_lognormal_fit_constant(self):
        mean_u, sd_u = ss.lognormal_fit([math.e] * 3)
        assert mean_u == pytest.approx(1.0)
        assert sd_u == pytest.approx(0.0, abs=1e-15)

    def test_lognormal_fit_recovers_parameters(self):
        draws = np.random.default_rng(3).lognormal(2.0, 1.7, 100000)
        mean_u, sd_u = ss.lognormal_fit(draws)
        assert mean_u == pytest.approx(2.0, abs=0.02)
        assert sd_u == pytest.approx(1.7, abs=0.02)

    def test_non_positive_values_are_rejected(self):
        with pytest.raises(DomainError):
            ss.lognormal_fit([1.0, 0.0, 2.0])

    def test_ks_distance_of_model_sample(self, benford_model):
        n = 10000
        assert ss.ks_distance(maxent_service.sample(benford_model, n, 9), benford_model) < 1.63 / math.sqrt(n)

    def test_ks_distance_needs_normalizable_model(self):
        with pytest.raises(DomainError):
            ss.ks_distance([1.0, 2.0], EquilibriumModel(ModelFamily.EXPONENTIAL_IN_U, lam=-1.0, normalized=False))


class TestRankSize:

    def test_rank_size_sorts_descending(self):
        rs = ss.rank_size([3, 1, 2])
        assert rs.ranks.tolist() == [1, 2, 3]
        assert rs.sizes.tolist() == [3, 2, 1]

    def test_rank_size_is_a_permutation(self):
        values = np.random.default_rng(1).random(40)
        assert sorted(ss.rank_size(values).sizes.tolist()) == sorted(values.tolist())

    def test_exact_zipf_slope(self):
        fit = ss.rank_loglog_slope(ss.rank_size(exact_zipf_sizes(500)))
        assert fit.slope == pytest.approx(-1.0, abs=1e-10)
        assert fit.r == pytest.approx(-1.0, abs=1e-10)

    def test_exact_power_law_slope(self):
        sizes = 1e6 / np.arange(1, 301, dtype=float) ** (1 / 0.5)
        assert ss.rank_loglog_slope(ss.rank_size(sizes)).slope == pytest.approx(-2.0, abs=1e-10)

    def test_zipf_sample_slope(self, zipf_model):
        draws = maxent_service.sample(zipf_model, 5000, seed=4)
        assert ss.rank_loglog_slope(ss.rank_size(draws)).slope == pytest.approx(-1.0, abs=0.1)

    def test_fit_correlation_on_model_quantiles(self, benford_model):
        sizes = maxent_service.size_at_rank(benford_model, np.arange(1, 155), 154)
        assert ss.fit_correlation(ss.rank_size(sizes), benford_model, 154) == pytest.approx(1.0, abs=1e-12)

    def test_fit_correlation_on_benford_samples(self, benford_model):
        sizes = maxent_service.sample(benford_model, 154, seed=6)
        assert ss.fit_correlation(ss.rank_size(sizes), benford_model, 154) > 0.98

    def test_fit_correlation_linear_space(self, benford_model):
        sizes = maxent_service.size_at_rank(benford_model, np.arange(1, 51), 50)
        rs = ss.rank_size(sizes)
        assert ss.fit_correlation(rs, benford_model, 50, log_space=False) == pytest.approx(1.0, abs=1e-12)


class TestConservationAndTurnover:

    def test_equal_values_sum_to_zero(self):
        assert ss.conservation_sum([5.0] * 10, 10) == 0.0

    def test_exact_zipf_ranks(self):
        expected = 150 * math.log(150) - math.lgamma(151)
        assert ss.conservation_sum(exact_zipf_sizes(150), 150) == pytest.approx(expected, abs=1e-9)

    def test_scale_invariance(self):
        sizes = exact_zipf_sizes(150)
        assert ss.conservation_sum(42 * sizes, 150) == pytest.approx(ss.conservation_sum(sizes, 150), abs=1e-9)

    def test_requires_sorted_values(self):
        with pytest.raises(DomainError):
            ss.conservation_sum([1.0, 2.0, 3.0], 3)
        with pytest.raises(DomainError):
            ss.conservation_sum([3.0, 2.0], 3)

    def test_turnover(self):
        ids = [f"m{i}" for i in range(150)]
        assert ss.regime_turnover(ids, ids) == (0, 0.0)
        assert ss.regime_turnover(ids, [f"n{i}" for i in range(150)]) == (150, 1.0)
        late = ids[:140] + [f"n{i}" for i in range(10)]
        exited, fraction = ss.regime_turnover(ids, late)
        assert exited == 10
        assert fraction == pytest.approx(0.0667, abs=1e-4)


class TestHistograms:

    def test_single_value_has_one_bin(self):
        histogram = ss.u_histogram([5.0])
        assert np.count_nonzero(histogram.counts) == 1

    def test_density_integrates_to_one(self):
        draws = np.random.default_rng(2).lognormal(0, 1, 3000)
        histogram = ss.u_histogram(draws)
        assert np.sum(histogram.density * histogram.widths) == pytest.approx(1.0)
        assert ss.u_histogram(draws, n_bins=12).counts.size == 12

    def test_uniform_sample_is_flat(self, benford_model):
        histogram = ss.u_histogram(maxent_service.sample(benford_model, 10000, seed=10), n_bins=20)
        assert ss.uniformity_pvalue(histogram) > 0.01

    def test_density_exponent_of_power_law(self):
        model = EquilibriumModel.power_law(0.5, 1.0)
        fit = ss.density_exponent(maxent_service.sample(model, 20000, seed=5))
        assert -fit.slope == pytest.approx(1.5, rel=0.05)
