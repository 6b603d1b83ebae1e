"""
分段自相關、Bartlett 標準誤與視窗峰值

Each solar-cycle segment of the original, positive and negative fluctuation
series gets its own autocorrelation function; peaks are picked per lag window
and graded against the standard-error band.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from statsmodels.tsa.stattools import acf as sm_acf

from app.core.periodicity.errors import ConstantSeries, SegmentTooShort, SeriesTooShort
from app.models.periodicity import (
    DEFAULT_WINDOWS,
    AcfAnalysis,
    AcfPeak,
    AcfSurvey,
    CycleSegment,
    FluctuationSeries,
    Hemisphere,
    KindSummary,
    LagWindow,
    SeriesKind,
    Significance,
    SkippedSegment,
)

logger = logging.getLogger(__name__)

RELIABLE_MAX_LAG = 27


def autocorrelation(x: Sequence[float], max_lag: int = 27) -> Tuple[np.ndarray, np.ndarray]:
    """Biased (1/n) autocorrelation and Bartlett standard errors for lags 0..max_lag"""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n < max_lag + 2:
        raise SeriesTooShort("series shorter than max_lag + 2", module="acf", n=n, max_lag=max_lag)
    if np.all(x == x[0]):
        raise ConstantSeries("autocorrelation of a constant series", module="acf", n=n)

    c = sm_acf(x, nlags=max_lag, adjusted=False, fft=False)
    c[0] = 1.0

    variance = np.ones(max_lag + 1) / n
    variance[0] = 0.0
    variance[2:] *= 1.0 + 2.0 * np.cumsum(c[1:-1] ** 2)
    return c, np.sqrt(variance)


def classify(value: float, se: float) -> Significance:
    if value > 2.0 * se:
        return Significance.ABOVE_2SE
    if value > se:
        return Significance.BETWEEN_1SE_2SE
    return Significance.BELOW_1SE


def detect_peaks(
    c: np.ndarray,
    se: np.ndarray,
    windows: Sequence[LagWindow] = DEFAULT_WINDOWS,
) -> List[AcfPeak]:
    """One peak per window: the largest local maximum, else the window argmax.

    A local maximum exceeds both neighbours, which may lie outside the
    window; ties go to the smaller lag.
    """
    max_lag = len(c) - 1
    peaks: List[AcfPeak] = []
    for window in windows:
        lags = np.arange(window.low, min(window.high, max_lag) + 1)
        if len(lags) == 0:
            continue
        interior = lags[lags < max_lag]
        local = interior[(c[interior] > c[interior - 1]) & (c[interior] > c[interior + 1])]
        if len(local):
            lag = int(local[np.argmax(c[local])])
            is_local = True
        else:
            lag = int(lags[np.argmax(c[lags])])
            is_local = False
        peaks.append(AcfPeak(
            lag=lag,
            value=float(c[lag]),
            se=float(se[lag]),
            window=window.name,
            significance=classify(c[lag], se[lag]),
            local_maximum=is_local,
        ))
    return peaks


def analyze_segment(
    x: Sequence[float],
    hemisphere: Hemisphere,
    cycle_number: int,
    series_kind: SeriesKind,
    max_lag: int = 27,
    windows: Sequence[LagWindow] = DEFAULT_WINDOWS,
) -> AcfAnalysis:
    x = np.asarray(x, dtype=np.float64)
    if len(x) < max_lag + 2:
        raise SegmentTooShort(
            "cycle segment shorter than max_lag + 2",
            hemisphere=hemisphere.value, cycle=cycle_number, length=len(x),
        )
    c, se = autocorrelation(x - x.mean(), max_lag)
    return AcfAnalysis(
        hemisphere=hemisphere,
        cycle_number=cycle_number,
        series_kind=series_kind,
        n=len(x),
        lags=np.arange(max_lag + 1),
        c=c,
        se=se,
        peaks=detect_peaks(c, se, windows),
        reliable_max_lag=RELIABLE_MAX_LAG,
    )


def _mean(values: List[int]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def summarize(analyses: List[AcfAnalysis], kind: SeriesKind, short_window: str = "short") -> KindSummary:
    peaks = [a.peak(short_window) for a in analyses if a.series_kind is kind]
    peaks = [p for p in peaks if p is not None]
    cases = len(peaks)
    above = [p for p in peaks if p.significance is Significance.ABOVE_2SE]
    between = [p for p in peaks if p.significance is Significance.BETWEEN_1SE_2SE]
    taus = [p.lag for p in above]
    return KindSummary(
        kind=kind,
        cases=cases,
        above_2se_share=len(above) / cases if cases else None,
        between_share=len(between) / cases if cases else None,
        mean_significant_tau=_mean(taus),
        significant_taus=taus,
    )


def cycle_acf_survey(
    series: Dict[Hemisphere, FluctuationSeries],
    segments: Dict[Hemisphere, List[CycleSegment]],
    max_lag: int = 27,
    windows: Sequence[LagWindow] = DEFAULT_WINDOWS,
) -> AcfSurvey:
    """所有半球、週期與序列種類的自相關分析與顯著比例

    Segments too short for ``max_lag`` and constant kinds (e.g. a positive
    part that is zero throughout) are skipped and left out of the shares.
    """
    analyses: List[AcfAnalysis] = []
    skipped: List[SkippedSegment] = []
    for hemisphere in sorted(series, key=lambda h: h.value):
        fs = series[hemisphere]
        for segment in segments[hemisphere]:
            if segment.length < max_lag + 2:
                logger.warning(
                    "%s cycle %d: %d rotations < %d, skipped",
                    hemisphere.value, segment.cycle_number, segment.length, max_lag + 2,
                )
                skipped.append(SkippedSegment(
                    hemisphere=hemisphere,
                    cycle_number=segment.cycle_number,
                    length=segment.length,
                    reason="segment too short",
                ))
                continue
            for kind in SeriesKind:
                try:
                    analyses.append(analyze_segment(
                        fs.segment(segment, kind), hemisphere, segment.cycle_number, kind, max_lag, windows,
                    ))
                except ConstantSeries:
                    logger.warning("%s cycle %d: constant %s series, skipped", hemisphere.value, segment.cycle_number, kind.value)
                    skipped.append(SkippedSegment(
                        hemisphere=hemisphere,
                        cycle_number=segment.cycle_number,
                        series_kind=kind,
                        length=segment.length,
                        reason="constant series",
                    ))

    short_window = windows[0].name
    summaries = [summarize(analyses, kind, short_window) for kind in SeriesKind]
    all_taus = [tau for s in summaries for tau in s.significant_taus]
    logger.info("acf survey: %d analyses, %d skipped", len(analyses), len(skipped))
    return AcfSurvey(
        analyses=analyses,
        skipped=skipped,
        summaries=summaries,
        mean_significant_tau_all=_mean(all_taus),
    )
