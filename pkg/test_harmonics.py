"""
倍週期迴歸與方法一致性測試
"""

import numpy as np
import pytest

from app.core.periodicity.acf import analyze_segment, summarize
from app.core.periodicity.errors import DegenerateAbscissae, TooFewPoints
from app.core.periodicity.harmonics import (
    collect_pairs,
    dominant_periods,
    fit_line,
    fit_regression,
    method_agreement,
)
from app.core.periodicity.wavelet import wavelet_analysis
from app.models.periodicity import (
    AcfAnalysis,
    AcfPeak,
    AcfSurvey,
    Hemisphere,
    PairingRule,
    PeakPair,
    SeriesKind,
    Significance,
)
from test_config import sinusoid


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _peak(window: str, lag: int, value: float, se: float = 0.1) -> AcfPeak:
    significance = Significance.ABOVE_2SE if value > 2 * se else (
        Significance.BETWEEN_1SE_2SE if value > se else Significance.BELOW_1SE
    )
    return AcfPeak(lag=lag, value=value, se=se, window=window, significance=significance)


def _analysis(hemisphere, cycle, kind, peaks) -> AcfAnalysis:
    return AcfAnalysis(
        hemisphere=hemisphere,
        cycle_number=cycle,
        series_kind=kind,
        n=140,
        lags=np.arange(28),
        c=np.zeros(28),
        se=np.full(28, 0.1),
        peaks=peaks,
    )


def _survey(analyses) -> AcfSurvey:
    return AcfSurvey(
        analyses=analyses,
        skipped=[],
        summaries=[summarize(analyses, kind) for kind in SeriesKind],
        mean_significant_tau_all=None,
    )


class TestFitLine:
    def test_exact_line(self):
        x = np.array([8.0, 9.0, 10.0, 11.0, 12.0])
        fit = fit_line(x, 2.0 * x)
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(0.0, abs=1e-9)
        assert fit.r == pytest.approx(1.0)
        assert fit.n_points == 5
        assert max(fit.band_half_width) == pytest.approx(0.0, abs=1e-9)
        assert fit.predict(10.0) == pytest.approx(20.0)

    def test_band_is_narrowest_at_mean(self):
        x = np.array([7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0])
        y = 2.0 * x + np.array([0.5, -0.3, 0.2, -0.6, 0.4, 0.1, -0.2])
        fit = fit_line(x, y)
        assert set(x.tolist()) <= set(fit.band_x)
        assert len(fit.band_x) >= 21
        narrowest = fit.band_x[int(np.argmin(fit.band_half_width))]
        assert narrowest == pytest.approx(fit.mean_x, abs=0.4)
        assert fit.band_half_width[0] > min(fit.band_half_width)
        assert fit.t_critical > 2.0

    def test_wider_level_wider_band(self):
        x = np.arange(10, dtype=float)
        y = x + _rng(0).standard_normal(10)
        assert max(fit_line(x, y, 0.99).band_half_width) > max(fit_line(x, y, 0.90).band_half_width)

    def test_affine_equivariance(self):
        rng = _rng(5)
        x = rng.uniform(7.0, 13.0, 20)
        y = 2.0 * x + rng.standard_normal(20)
        base = fit_line(x, y)
        moved = fit_line(1.5 * x + 4.0, 3.0 * y - 2.0)
        assert moved.slope == pytest.approx(base.slope * 3.0 / 1.5)
        assert moved.intercept == pytest.approx(3.0 * base.intercept - 2.0 - moved.slope * 4.0)
        assert moved.r == pytest.approx(base.r)
        assert moved.residual_se == pytest.approx(3.0 * base.residual_se)

    def test_r_is_normalized_covariance(self):
        rng = _rng(6)
        x = rng.uniform(7.0, 13.0, 25)
        y = 1.8 * x + 2.0 * rng.standard_normal(25)
        dx, dy = x - x.mean(), y - y.mean()
        expected = np.sum(dx * dy) / np.sqrt(np.sum(dx ** 2) * np.sum(dy ** 2))
        assert fit_line(x, y).r == pytest.approx(expected)

    def test_degenerate(self):
        with pytest.raises(TooFewPoints):
            fit_line([1.0, 2.0], [2.0, 4.0])
        with pytest.raises(DegenerateAbscissae):
            fit_line([10.0, 10.0, 10.0], [19.0, 20.0, 21.0])

    def test_fit_regression_uses_tau_pairs(self):
        pairs = [
            PeakPair(hemisphere=Hemisphere.NORTH, cycle_number=c, kind=SeriesKind.NEGATIVE, tau=t, tau_k=2 * t, k=2)
            for c, t in zip(range(12, 16), (9, 10, 11, 12))
        ]
        assert fit_regression(pairs).slope == pytest.approx(2.0)

    def test_pair_rejects_other_harmonics(self):
        with pytest.raises(ValueError):
            PeakPair(hemisphere=Hemisphere.NORTH, cycle_number=12, kind=SeriesKind.ORIGINAL, tau=10, tau_k=40, k=4)


class TestCollectPairs:
    def setup_method(self):
        self.survey = _survey([
            _analysis(Hemisphere.NORTH, 12, SeriesKind.NEGATIVE,
                      [_peak("short", 10, 0.5), _peak("mid", 19, 0.3), _peak("long", 27, 0.05)]),
            _analysis(Hemisphere.NORTH, 13, SeriesKind.NEGATIVE,
                      [_peak("short", 11, 0.05), _peak("mid", 17, 0.3), _peak("long", 22, 0.3)]),
            _analysis(Hemisphere.SOUTH, 12, SeriesKind.NEGATIVE,
                      [_peak("short", 9, 0.15), _peak("mid", 18, 0.12), _peak("long", 26, 0.25)]),
            _analysis(Hemisphere.SOUTH, 12, SeriesKind.ORIGINAL,
                      [_peak("short", 8, 0.5), _peak("mid", 16, 0.5), _peak("long", 24, 0.5)]),
        ])

    def test_floor_filters_both_peaks(self):
        pairs = collect_pairs(self.survey, SeriesKind.NEGATIVE, 2)
        assert [(p.hemisphere, p.cycle_number, p.tau, p.tau_k) for p in pairs.pairs] == [
            (Hemisphere.NORTH, 12, 10, 19), (Hemisphere.SOUTH, 12, 9, 18),
        ]
        assert pairs.excluded == 1

    def test_long_window_for_k3(self):
        pairs = collect_pairs(self.survey, SeriesKind.NEGATIVE, 3)
        assert [(p.tau, p.tau_k) for p in pairs.pairs] == [(9, 26)]
        assert pairs.excluded == 2

    def test_stricter_floor(self):
        pairs = collect_pairs(self.survey, SeriesKind.NEGATIVE, 2, PairingRule(floor=2.0))
        assert [p.cycle_number for p in pairs.pairs] == [12]
        assert pairs.pairs[0].hemisphere is Hemisphere.NORTH

    def test_argmax_only_keeps_everything(self):
        pairs = collect_pairs(self.survey, SeriesKind.NEGATIVE, 3, PairingRule(argmax_only=True))
        assert len(pairs.pairs) == 3
        assert pairs.excluded == 0

    def test_white_noise_yields_few_pairs(self):
        analyses = [
            analyze_segment(_rng(seed).standard_normal(140), Hemisphere.NORTH, seed, SeriesKind.ORIGINAL)
            for seed in range(1, 41)
        ]
        pairs = collect_pairs(_survey(analyses), SeriesKind.ORIGINAL, 2)
        assert len(pairs.pairs) <= 12


def test_dominant_periods_by_cycle():
    survey = _survey([
        _analysis(Hemisphere.NORTH, 14, SeriesKind.ORIGINAL, [_peak("short", 12, 0.3)]),
        _analysis(Hemisphere.NORTH, 12, SeriesKind.ORIGINAL, [_peak("short", 10, 0.3)]),
        _analysis(Hemisphere.SOUTH, 12, SeriesKind.ORIGINAL, [_peak("short", 9, 0.3)]),
        _analysis(Hemisphere.NORTH, 13, SeriesKind.NEGATIVE, [_peak("short", 7, 0.3)]),
    ])
    assert dominant_periods(survey, Hemisphere.NORTH) == [10, 12]
    assert dominant_periods(survey, Hemisphere.SOUTH) == [9]
    assert dominant_periods(survey, Hemisphere.NORTH, SeriesKind.NEGATIVE) == [7]


class TestMethodAgreement:
    def test_injected_periods_recovered(self):
        analyses, wavelets = [], []
        for cycle, period in zip(range(12, 22), (8, 9, 10, 11, 12, 8, 9, 10, 11, 12)):
            x = sinusoid(140, float(period)) + 0.1 * _rng(cycle).standard_normal(140)
            analyses.append(analyze_segment(x, Hemisphere.NORTH, cycle, SeriesKind.ORIGINAL))
            wavelets.append(wavelet_analysis(x, Hemisphere.NORTH, cycle, SeriesKind.ORIGINAL))

        summaries = {s.kind: s for s in method_agreement(_survey(analyses), wavelets)}
        original = summaries[SeriesKind.ORIGINAL]
        assert original.n_acf_peaks == 10
        assert len(original.matched) == 10
        assert original.agreement_fraction == 1.0
        assert original.pearson_r >= 0.95
        assert [m.acf_lag for m in original.matched] == [8, 9, 10, 11, 12, 8, 9, 10, 11, 12]

    def test_no_qualifying_peaks(self):
        survey = _survey([_analysis(Hemisphere.NORTH, 12, SeriesKind.NEGATIVE, [_peak("short", 10, 0.01)])])
        summaries = {s.kind: s for s in method_agreement(survey, [])}
        negative = summaries[SeriesKind.NEGATIVE]
        assert negative.n_acf_peaks == 0
        assert negative.matched == []
        assert negative.agreement_fraction is None
        assert negative.pearson_r is None
        assert summaries[SeriesKind.POSITIVE].agreement_fraction is None

    def test_missing_wavelet_counts_as_disagreement(self):
        survey = _survey([_analysis(Hemisphere.NORTH, 12, SeriesKind.ORIGINAL, [_peak("short", 10, 0.5)])])
        original = {s.kind: s for s in method_agreement(survey, [])}[SeriesKind.ORIGINAL]
        assert original.n_acf_peaks == 1
        assert original.matched == []
        assert original.agreement_fraction == 0.0
