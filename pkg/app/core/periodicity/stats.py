"""
擾動分布分析：直方圖與高斯擬合、偏態、常態性與雙樣本檢定
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sp_stats
from statsmodels.stats.diagnostic import lilliefors

from app.core.periodicity.errors import (
    DegenerateSample,
    InvalidConfig,
    SampleTooLarge,
    SampleTooSmall,
)
from app.models.periodicity import HistogramFit, TestName, TestResult

logger = logging.getLogger(__name__)

# ks_2samp switches to the asymptotic distribution above this n_a * n_b
EXACT_KS_LIMIT = 10000
SHAPIRO_MAX_N = 5000


def _as_sample(values: Sequence[float]) -> np.ndarray:
    return np.asarray(values, dtype=np.float64).ravel()


def _require_spread(x: np.ndarray) -> None:
    if len(x) < 2 or np.all(x == x[0]):
        raise DegenerateSample("all values are equal", n=len(x))


def histogram_gauss_fit(values: Sequence[float], bin_count: Optional[int] = None) -> HistogramFit:
    """Equal-width histogram over [min, max] with moment-fitted Gaussian.

    ``bin_count`` None picks the Freedman-Diaconis bin count (at least 2).
    Skewness is the adjusted Fisher-Pearson coefficient.
    """
    x = _as_sample(values)
    if len(x) == 0:
        raise SampleTooSmall("histogram needs at least one value", n=0)
    _require_spread(x)

    if bin_count is None:
        bin_count = max(2, len(np.histogram_bin_edges(x, bins="fd")) - 1)
    elif bin_count < 2:
        raise InvalidConfig("bin_count must be at least 2", bin_count=bin_count)

    edges = np.linspace(x.min(), x.max(), bin_count + 1)
    counts, _ = np.histogram(x, bins=edges)
    return HistogramFit(
        bin_edges=edges.tolist(),
        counts=counts.tolist(),
        gauss_mu=float(np.mean(x)),
        gauss_sigma=float(np.std(x, ddof=1)),
        skewness=float(sp_stats.skew(x, bias=False)),
        n=len(x),
        positive_count=int(np.sum(x > 0)),
        negative_count=int(np.sum(x < 0)),
    )


def gaussian_expected_counts(fit: HistogramFit, points: Optional[Sequence[float]] = None) -> np.ndarray:
    """Fitted Gaussian scaled to histogram counts at ``points`` (bin centers by default)"""
    width = fit.bin_edges[1] - fit.bin_edges[0]
    at = np.asarray(points if points is not None else fit.bin_centers, dtype=np.float64)
    return fit.n * width * sp_stats.norm.pdf(at, loc=fit.gauss_mu, scale=fit.gauss_sigma)


def _normal_ks_statistics(samples: np.ndarray) -> np.ndarray:
    """Lilliefors statistic of every row of ``samples``"""
    n = samples.shape[1]
    z = np.sort(samples, axis=1)
    z = (z - z.mean(axis=1, keepdims=True)) / z.std(axis=1, ddof=1, keepdims=True)
    cdf = sp_stats.norm.cdf(z)
    ranks = np.arange(1, n + 1) / n
    d_plus = np.max(ranks - cdf, axis=1)
    d_minus = np.max(cdf - (ranks - 1.0 / n), axis=1)
    return np.maximum(d_plus, d_minus)


def lilliefors_null(n: int, replicates: int, seed: int = 0, batch: int = 1000) -> np.ndarray:
    """Sorted Monte Carlo null distribution of the Lilliefors statistic.

    Replicates are drawn in fixed-size batches from one PCG64 stream, so the
    result depends on (n, replicates, seed) only.
    """
    if replicates < 1:
        raise InvalidConfig("replicates must be positive", replicates=replicates)
    rng = np.random.Generator(np.random.PCG64(seed))
    chunks = []
    remaining = replicates
    while remaining > 0:
        size = min(batch, remaining)
        chunks.append(_normal_ks_statistics(rng.standard_normal((size, n))))
        remaining -= size
    null = np.sort(np.concatenate(chunks))
    logger.debug("lilliefors null: n=%d, %d replicates, seed %d", n, replicates, seed)
    return null


def lilliefors_critical_value(n: int, alpha: float = 0.05, replicates: int = 10000, seed: int = 0) -> float:
    return float(np.quantile(lilliefors_null(n, replicates, seed), 1.0 - alpha))


def lilliefors_test(
    values: Sequence[float],
    alpha: float = 0.05,
    replicates: int = 0,
    seed: int = 0,
) -> TestResult:
    """Kolmogorov-Smirnov normality test with estimated mean and variance.

    With ``replicates`` 0 the p-value comes from the Dallal-Wilkinson table
    bundled with statsmodels; otherwise from a seeded Monte Carlo null, which
    also yields the critical value.
    """
    x = _as_sample(values)
    if len(x) < 5:
        raise SampleTooSmall("lilliefors test needs n >= 5", n=len(x))
    _require_spread(x)

    if replicates <= 0:
        statistic, p_value = lilliefors(x, dist="norm", pvalmethod="table")
        return TestResult(
            test_name=TestName.LILLIEFORS,
            statistic=float(statistic),
            p_value=float(np.clip(p_value, 0.0, 1.0)),
            reject_at_05=bool(p_value < alpha),
            alpha=alpha,
            n=len(x),
        )

    statistic = float(_normal_ks_statistics(x[None, :])[0])
    null = lilliefors_null(len(x), replicates, seed)
    critical = float(np.quantile(null, 1.0 - alpha))
    exceed = len(null) - np.searchsorted(null, statistic, side="left")
    return TestResult(
        test_name=TestName.LILLIEFORS,
        statistic=statistic,
        p_value=float((exceed + 1) / (len(null) + 1)),
        reject_at_05=statistic > critical,
        alpha=alpha,
        critical_value=critical,
        n=len(x),
    )


def shapiro_wilk_test(values: Sequence[float], alpha: float = 0.05) -> TestResult:
    x = _as_sample(values)
    if len(x) < 3:
        raise SampleTooSmall("shapiro-wilk test needs n >= 3", n=len(x))
    if len(x) > SHAPIRO_MAX_N:
        raise SampleTooLarge("shapiro-wilk approximation holds up to n = 5000", n=len(x))
    _require_spread(x)

    # scipy implements Royston's weights and normalizing transform
    w, p_value = sp_stats.shapiro(x)
    return TestResult(
        test_name=TestName.SHAPIRO_WILK,
        statistic=float(min(w, 1.0)),
        p_value=float(np.clip(p_value, 0.0, 1.0)),
        reject_at_05=bool(p_value < alpha),
        alpha=alpha,
        n=len(x),
    )


def ks_two_sample(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TestResult:
    """Two-sample KS; exact p-value when n_a * n_b <= 10000, asymptotic beyond"""
    a = _as_sample(a)
    b = _as_sample(b)
    if len(a) == 0 or len(b) == 0:
        raise SampleTooSmall("both samples must be non-empty", n_a=len(a), n_b=len(b))

    method = "exact" if len(a) * len(b) <= EXACT_KS_LIMIT else "asymp"
    result = sp_stats.ks_2samp(a, b, alternative="two-sided", method=method)
    p_value = float(np.clip(result.pvalue, 0.0, 1.0))
    return TestResult(
        test_name=TestName.KS_TWO_SAMPLE,
        statistic=float(result.statistic),
        p_value=p_value,
        reject_at_05=p_value < alpha,
        alpha=alpha,
        n=len(a) + len(b),
    )


def compare_hemispheres(north: Sequence[float], south: Sequence[float], alpha: float = 0.05) -> TestResult:
    """南北半球擾動分布是否相同（雙樣本 KS）"""
    return ks_two_sample(north, south, alpha)
