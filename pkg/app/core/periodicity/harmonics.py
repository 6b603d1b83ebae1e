"""
倍週期關係 tau_k ~ k * tau 的迴歸與兩種方法的一致性

Peak pairs come out of the ACF survey: the short-window lag against the
mid-window (k=2) or long-window (k=3) lag of the same hemisphere-cycle.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as sp_stats

from app.core.periodicity.errors import DegenerateAbscissae, TooFewPoints
from app.models.periodicity import (
    DEFAULT_WINDOWS,
    AcfSurvey,
    AgreementSummary,
    Hemisphere,
    LagWindow,
    MatchedPeak,
    PairCollection,
    PairingRule,
    PeakPair,
    RegressionFit,
    SeriesKind,
    WaveletAnalysis,
)

logger = logging.getLogger(__name__)

BAND_SAMPLES = 21


def _passes(value: float, se: float, rule: PairingRule) -> bool:
    return rule.argmax_only or value >= rule.floor * se


def collect_pairs(
    survey: AcfSurvey,
    kind: SeriesKind,
    k: int,
    rule: PairingRule = PairingRule(),
    windows: Sequence[LagWindow] = DEFAULT_WINDOWS,
) -> PairCollection:
    short_name, target_name = windows[0].name, windows[k - 1].name
    pairs: List[PeakPair] = []
    cases = 0
    for analysis in survey.of_kind(kind):
        short, target = analysis.peak(short_name), analysis.peak(target_name)
        if short is None or target is None:
            continue
        cases += 1
        if _passes(short.value, short.se, rule) and _passes(target.value, target.se, rule):
            pairs.append(PeakPair(
                hemisphere=analysis.hemisphere,
                cycle_number=analysis.cycle_number,
                kind=kind,
                tau=short.lag,
                tau_k=target.lag,
                k=k,
            ))
    logger.debug("%s k=%d: %d pairs, %d excluded", kind.value, k, len(pairs), cases - len(pairs))
    return PairCollection(kind=kind, k=k, pairs=pairs, excluded=cases - len(pairs))


def fit_line(x: Sequence[float], y: Sequence[float], level: float = 0.95) -> RegressionFit:
    """OLS of y on x with the mean-response confidence band.

    The band is sampled at the data abscissae plus an even grid over their
    range.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(x)
    if n < 3:
        raise TooFewPoints("regression needs at least 3 points", n=n)
    if np.all(x == x[0]):
        raise DegenerateAbscissae("all abscissae are equal", n=n, x=float(x[0]))

    fit = sp_stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    residual_se = float(np.sqrt(np.sum(residuals ** 2) / (n - 2)))
    t_critical = float(sp_stats.t.ppf(0.5 + level / 2.0, n - 2))

    mean_x = float(np.mean(x))
    sxx = float(np.sum((x - mean_x) ** 2))
    band_x = np.union1d(x, np.linspace(x.min(), x.max(), BAND_SAMPLES))
    half_width = t_critical * residual_se * np.sqrt(1.0 / n + (band_x - mean_x) ** 2 / sxx)

    return RegressionFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r=float(np.clip(fit.rvalue, -1.0, 1.0)),
        n_points=n,
        level=level,
        t_critical=t_critical,
        residual_se=residual_se,
        mean_x=mean_x,
        band_x=band_x.tolist(),
        band_half_width=half_width.tolist(),
    )


def fit_regression(pairs: Sequence[PeakPair], level: float = 0.95) -> RegressionFit:
    return fit_line([p.tau for p in pairs], [p.tau_k for p in pairs], level)


def dominant_periods(
    survey: AcfSurvey,
    hemisphere: Hemisphere,
    kind: SeriesKind = SeriesKind.ORIGINAL,
    window: str = "short",
) -> List[int]:
    """每個週期的短視窗峰值延遲（依週期排序）"""
    analyses = sorted(
        (a for a in survey.of_kind(kind) if a.hemisphere is hemisphere),
        key=lambda a: a.cycle_number,
    )
    peaks = [a.peak(window) for a in analyses]
    return [p.lag for p in peaks if p is not None]


def _wavelet_period(analysis: WaveletAnalysis, low: float, high: float) -> Optional[float]:
    """Strongest global-spectrum peak in [low, high], else the in-band argmax"""
    for peak in analysis.global_peaks:
        if low <= peak.period <= high:
            return peak.period
    if analysis.global_spectrum is None:
        return None
    in_band = (analysis.periods >= low) & (analysis.periods <= high)
    if not in_band.any():
        return None
    candidates = np.flatnonzero(in_band)
    return float(analysis.periods[candidates[np.argmax(analysis.global_spectrum[candidates])]])


def _pearson(x: List[float], y: List[float]) -> Optional[float]:
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.clip(sp_stats.pearsonr(x, y)[0], -1.0, 1.0))


def method_agreement(
    survey: AcfSurvey,
    wavelets: Sequence[WaveletAnalysis],
    floor: float = 1.0,
    tolerance: float = 1.0,
    windows: Sequence[LagWindow] = DEFAULT_WINDOWS,
) -> List[AgreementSummary]:
    """ACF short-window peaks against wavelet global-spectrum peaks, per kind.

    Only ACF peaks at or above ``floor`` standard errors take part. The
    agreement fraction counts peaks whose wavelet period lies within
    ``tolerance`` rotations; it is None when no ACF peak qualifies.
    """
    short = windows[0]
    by_case: Dict[Tuple, WaveletAnalysis] = {
        (w.hemisphere, w.cycle_number, w.series_kind): w for w in wavelets
    }
    summaries: List[AgreementSummary] = []
    for kind in SeriesKind:
        acf_peaks = []
        for analysis in survey.of_kind(kind):
            peak = analysis.peak(short.name)
            if peak is not None and peak.value >= floor * peak.se:
                acf_peaks.append((analysis, peak))

        matched: List[MatchedPeak] = []
        for analysis, peak in acf_peaks:
            wavelet = by_case.get((analysis.hemisphere, analysis.cycle_number, kind))
            period = _wavelet_period(wavelet, short.low, short.high) if wavelet is not None else None
            if period is None:
                continue
            matched.append(MatchedPeak(
                hemisphere=analysis.hemisphere,
                cycle_number=analysis.cycle_number,
                acf_lag=peak.lag,
                wavelet_period=period,
            ))

        agreeing = sum(abs(m.acf_lag - m.wavelet_period) <= tolerance for m in matched)
        summaries.append(AgreementSummary(
            kind=kind,
            n_acf_peaks=len(acf_peaks),
            matched=matched,
            pearson_r=_pearson([m.acf_lag for m in matched], [m.wavelet_period for m in matched]),
            agreement_fraction=agreeing / len(acf_peaks) if acf_peaks else None,
        ))
    return summaries
