"""Statistics used to validate simulated and census data against the MaxEnt families."""
import logging
import math
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy import stats

from sfmaxent.errors import DomainError, InsufficientDataError
from sfmaxent.models.equilibrium import EquilibriumModel
from sfmaxent.models.series import SnapshotSeries
from sfmaxent.models.stats import GrowthRecord, Histogram, LineFit, RankSize
from sfmaxent.models.transform import TransformKind, TransformSpec
from sfmaxent.services import maxent_service
from sfmaxent.services.scale_transform import to_log_space

logger = logging.getLogger(__name__)

Bins = Union[int, str, None]


def _positive_array(values, what: str = 'values') -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InsufficientDataError(f"no {what} given")
    if not np.all(arr > 0):
        raise DomainError(f"{what} must be positive, got min {arr.min()}")
    return arr


def _pearson(a: np.ndarray, b: np.ndarray, what: str) -> float:
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise InsufficientDataError(f"correlation of {what} is undefined for zero variance")
    return float(np.clip(stats.pearsonr(a, b)[0], -1.0, 1.0))


# ---------------------------------------------------------------------------
# growth

def growth_records(series: SnapshotSeries, t1: int, t2: int) -> List[GrowthRecord]:
    """Two-point growth rates u_dot = (u(t2) - u(t1)) / (t2 - t1) for places seen both years."""
    if not (series.has_year(t1) and series.has_year(t2)):
        raise DomainError(f"years {t1}, {t2} not both in series {list(series.years)}")
    if t2 <= t1:
        raise DomainError(f"need t1 < t2, got {t1}, {t2}")
    early, late = series.observed(t1), series.observed(t2)
    records = [
        GrowthRecord(place_id=pid,
                     u_early=math.log(early[pid]),
                     u_dot=(math.log(late[pid]) - math.log(early[pid])) / (t2 - t1),
                     interval=(t1, t2))
        for pid in series.place_ids if pid in early and pid in late
    ]
    if len(records) < 2:
        raise InsufficientDataError(f"only {len(records)} places observed in both {t1} and {t2}")
    return records


def pooled_growth_records(series: SnapshotSeries) -> List[GrowthRecord]:
    """Growth records of every consecutive year pair, pooled."""
    if len(series.years) < 2:
        raise InsufficientDataError("growth needs at least two observation years")
    pooled = []
    for t1, t2 in series.year_pairs():
        pooled.extend(growth_records(series, t1, t2))
    return pooled


def correlation_u_udot(records: Sequence[GrowthRecord]) -> float:
    """Pearson correlation between log size and its growth rate (Gibrat check)."""
    if len(records) < 3:
        raise InsufficientDataError(f"need >= 3 growth records, got {len(records)}")
    u = np.array([r.u_early for r in records])
    u_dot = np.array([r.u_dot for r in records])
    return _pearson(u, u_dot, 'u vs u_dot')


# ---------------------------------------------------------------------------
# distribution fits

def lognormal_fit(values) -> Tuple[float, float]:
    """Mean and population standard deviation (divisor n) of log(values)."""
    arr = _positive_array(values)
    if arr.size < 2:
        raise InsufficientDataError("log-normal fit needs at least 2 values")
    logs = np.log(arr)
    return float(np.mean(logs)), float(np.std(logs, ddof=0))


def normality_pvalue(values, x0: float = 1.0) -> float:
    """Jarque-Bera p-value of u = log(values/x0)."""
    u = to_log_space(_positive_array(values), TransformSpec(TransformKind.SCALE_INVARIANT, x0))
    return float(stats.jarque_bera(u).pvalue)


def ks_distance(values, model: EquilibriumModel) -> float:
    """Sup distance between the empirical CDF of values and the model CDF."""
    arr = _positive_array(values)
    if not model.has_cdf:
        raise DomainError("model has no normalizable CDF for a KS distance")
    return float(stats.kstest(arr, lambda x: maxent_service.cdf_x(model, x)).statistic)


# ---------------------------------------------------------------------------
# rank-size

def rank_size(values) -> RankSize:
    """Sizes sorted nonincreasing with 1-based ranks; ties keep input order."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InsufficientDataError("rank-size needs at least one value")
    order = np.argsort(-arr, kind='stable')
    return RankSize(ranks=np.arange(1, arr.size + 1), sizes=arr[order])


def rank_loglog_slope(rs: RankSize, top_n: Optional[int] = None) -> LineFit:
    """Least-squares line of log(size) against log(rank) over the top_n entries."""
    selected = rs if top_n is None else rs.top(top_n)
    sizes = _positive_array(selected.sizes, 'sizes')
    if np.unique(sizes).size < 3:
        raise InsufficientDataError("rank-size fit needs at least 3 distinct sizes")
    fit = stats.linregress(np.log(selected.ranks.astype(float)), np.log(sizes))
    return LineFit(slope=float(fit.slope), intercept=float(fit.intercept), r=float(fit.rvalue))


def fit_correlation(rs: RankSize, model: EquilibriumModel, n_total: Optional[int] = None,
                    log_space: bool = True) -> float:
    """Pearson correlation between observed and model-predicted sizes at equal ranks."""
    if len(rs) < 3:
        raise InsufficientDataError("fit correlation needs at least 3 ranked sizes")
    n_total = len(rs) if n_total is None else n_total
    predicted = np.asarray(maxent_service.size_at_rank(model, rs.ranks, n_total), dtype=float)
    observed = _positive_array(rs.sizes, 'sizes')
    if log_space:
        return _pearson(np.log(observed), np.log(predicted), 'log sizes')
    return _pearson(observed, predicted, 'sizes')


def conservation_sum(values, reference_index: int) -> float:
    """sum_{i <= m} log(x_i / x_m) for values sorted nonincreasing, m = reference_index."""
    arr = _positive_array(values)
    if not 1 <= reference_index <= arr.size:
        raise DomainError(f"reference_index must lie in [1, {arr.size}], got {reference_index}")
    if np.any(np.diff(arr) > 0):
        raise DomainError("values must be sorted nonincreasing")
    head = np.log(arr[:reference_index])
    return math.fsum((head - head[-1]).tolist())


def regime_turnover(top_early: Iterable[str], top_late: Iterable[str]) -> Tuple[int, float]:
    """How many of the early top-n ids are absent from the late top-n."""
    early: Set[str] = set(top_early)
    late: Set[str] = set(top_late)
    if not early or not late:
        raise InsufficientDataError("turnover needs two nonempty sets")
    if len(early) != len(late):
        raise DomainError(f"top sets differ in size: {len(early)} vs {len(late)}")
    exited = len(early - late)
    return exited, exited / len(early)


# ---------------------------------------------------------------------------
# histograms

def u_histogram(values, n_bins: Bins = None, value_range: Optional[Tuple[float, float]] = None,
                x0: float = 1.0) -> Histogram:
    """Histogram of u = log(values/x0) on uniform bins (Freedman-Diaconis by default)."""
    u = to_log_space(_positive_array(values), TransformSpec(TransformKind.SCALE_INVARIANT, x0))
    bins = 'fd' if n_bins is None else n_bins
    if isinstance(bins, int) and bins < 1:
        raise DomainError(f"n_bins must be >= 1, got {bins}")
    if isinstance(bins, str) and np.ptp(u) == 0 and value_range is None:
        bins = 1
    edges = np.histogram_bin_edges(u, bins=bins, range=value_range)
    counts, edges = np.histogram(u, bins=edges)
    density = counts / (u.size * np.diff(edges))
    return Histogram(edges=edges, counts=counts, density=density)


def uniformity_pvalue(histogram: Histogram) -> float:
    """Chi-square p-value of the counts against a flat density over equal-width bins."""
    counts = histogram.counts.astype(float)
    expected = np.full_like(counts, counts.sum() / counts.size)
    return float(stats.chisquare(counts, expected).pvalue)


def density_exponent(values, x0: float = 1.0, n_bins: int = 30, min_count: int = 20) -> LineFit:
    """Fit p_X(x) ~ x^-(lambda+1) through well-populated u-histogram bins.

    Returns the fitted line of log p_X against log x; the exponent is -slope.
    """
    histogram = u_histogram(values, n_bins=n_bins, x0=x0)
    keep = histogram.counts >= min_count
    if np.count_nonzero(keep) < 3:
        raise InsufficientDataError("fewer than 3 histogram bins reach the minimum count")
    u = histogram.centers[keep]
    log_x = u + math.log(x0)
    # p_X = p_U / x
    log_px = np.log(histogram.density[keep]) - log_x
    fit = stats.linregress(log_x, log_px)
    return LineFit(slope=float(fit.slope), intercept=float(fit.intercept), r=float(fit.rvalue))
