"""
完整分析流程

ingest -> calendar -> fluct -> {stats, acf, wavelet} -> harmonics, then
tables, plot data, the run report and the manifest.
"""

import io
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import RunConfig
from app.core.periodicity.acf import cycle_acf_survey
from app.core.periodicity.calendar import clip_to_table, load_cycle_table, segment_dates
from app.core.periodicity.errors import AnalysisError, PeriodicityError, SampleTooLarge
from app.core.periodicity.fluct import fluctuations, rotation_means
from app.core.periodicity.harmonics import (
    collect_pairs,
    dominant_periods,
    fit_regression,
    method_agreement,
)
from app.core.periodicity.ingest import (
    canonical_csv_bytes,
    fill_gaps,
    parse_canonical_csv,
    read_daily_file,
)
from app.core.periodicity.output import OutputTree, write_failure_manifest
from app.core.periodicity.stats import (
    compare_hemispheres,
    gaussian_expected_counts,
    histogram_gauss_fit,
    ks_two_sample,
    lilliefors_test,
    shapiro_wilk_test,
)
from app.core.periodicity.synth import load_fixture_spec, synthesize_daily_records
from app.core.periodicity.wavelet import wavelet_analysis
from app.models.periodicity import (
    AcfSurvey,
    CycleSegment,
    DailyAreaRecord,
    FluctuationSeries,
    Hemisphere,
    HemisphereDistribution,
    PairCollection,
    RegressionSummary,
    RunReport,
    SeriesKind,
    WaveletAnalysis,
)

logger = logging.getLogger(__name__)

FIXTURE_INPUT = "input/fixture_daily.csv"
GAUSS_CURVE_SAMPLES = 101
HARMONICS = (2, 3)


class RunOutputs(BaseModel):
    """Everything one run computes, before it is written out"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    input: str
    series: Dict[Hemisphere, FluctuationSeries]
    segments: Dict[Hemisphere, List[CycleSegment]]
    distributions: List[HemisphereDistribution]
    survey: AcfSurvey
    wavelets: List[WaveletAnalysis]
    collections: List[PairCollection]
    regressions: List[RegressionSummary]


def load_records(config: RunConfig, tree: Optional[OutputTree] = None) -> Tuple[List[DailyAreaRecord], str]:
    """Daily records from the input file, or from the bundled synthetic fixture.

    The fixture goes through the canonical CSV so the parser is exercised on
    every fixture run; the CSV itself is part of the output tree.
    """
    if config.fixture:
        fixture = load_fixture_spec(config.fixture_spec_path)
        content = canonical_csv_bytes(synthesize_daily_records(fixture, config.ephemeris))
        if tree is not None:
            tree.add_bytes(FIXTURE_INPUT, content)
        return parse_canonical_csv(io.BytesIO(content)), "fixture"

    records = read_daily_file(config.input_path, config.column_map)
    return records, str(config.input_path)


def _distribution(fs: FluctuationSeries, config: RunConfig) -> HemisphereDistribution:
    values = fs.values
    tests = [lilliefors_test(values, config.alpha, config.lilliefors_replicates, config.seed)]
    try:
        tests.append(shapiro_wilk_test(values, config.alpha))
    except SampleTooLarge as e:
        logger.warning("%s: %s", fs.hemisphere.value, e)
    return HemisphereDistribution(
        hemisphere=fs.hemisphere,
        n=fs.n,
        histogram=histogram_gauss_fit(values, config.bin_count),
        tests=tests,
    )


def analyze(config: RunConfig, tree: Optional[OutputTree] = None) -> RunOutputs:
    records, source = load_records(config, tree)
    records = fill_gaps(records, config.gap_policy)
    table = load_cycle_table(config.cycle_table_path)

    series: Dict[Hemisphere, FluctuationSeries] = {}
    segments: Dict[Hemisphere, List[CycleSegment]] = {}
    for hemisphere in config.hemispheres.hemispheres():
        rotations = clip_to_table(rotation_means(records, hemisphere, config.ephemeris, config.gap_policy), table)
        fs = fluctuations(rotations, config.edge_policy)
        series[hemisphere] = fs
        segments[hemisphere] = segment_dates(fs.rotation_indices.tolist(), fs.date_mid, table)
        logger.info("%s: N=%d over %d cycles", hemisphere.value, fs.n, len(segments[hemisphere]))

    distributions = [_distribution(fs, config) for fs in series.values()]
    survey = cycle_acf_survey(series, segments, config.max_lag, config.windows)

    wavelets = [
        wavelet_analysis(
            series[a.hemisphere].segment(segment, a.series_kind),
            hemisphere=a.hemisphere,
            cycle_number=a.cycle_number,
            series_kind=a.series_kind,
            omega0=config.omega0,
            s0=config.s0,
            dj=config.dj,
            background=config.background,
            level=config.significance_level,
            coi_policy=config.coi_policy,
        )
        for a in survey.analyses
        for segment in segments[a.hemisphere]
        if segment.cycle_number == a.cycle_number
    ]

    collections: List[PairCollection] = []
    regressions: List[RegressionSummary] = []
    for kind in SeriesKind:
        for k in HARMONICS:
            collection = collect_pairs(survey, kind, k, config.pairing, config.windows)
            collections.append(collection)
            fit = None
            try:
                fit = fit_regression(collection.pairs)
            except AnalysisError as e:
                logger.warning("no regression for %s k=%d: %s", kind.value, k, e)
            regressions.append(RegressionSummary(
                kind=kind, k=k, n_pairs=len(collection.pairs), excluded=collection.excluded, fit=fit,
            ))

    return RunOutputs(
        input=source,
        series=series,
        segments=segments,
        distributions=distributions,
        survey=survey,
        wavelets=wavelets,
        collections=collections,
        regressions=regressions,
    )


def build_report(outputs: RunOutputs, config: RunConfig) -> RunReport:
    dominant_ks = None
    distribution_ks = None
    if len(outputs.series) == 2:
        north = dominant_periods(outputs.survey, Hemisphere.NORTH, config.dominant_period_kind)
        south = dominant_periods(outputs.survey, Hemisphere.SOUTH, config.dominant_period_kind)
        if north and south:
            dominant_ks = ks_two_sample(north, south, config.alpha)
        distribution_ks = compare_hemispheres(
            outputs.series[Hemisphere.NORTH].values, outputs.series[Hemisphere.SOUTH].values, config.alpha,
        )

    return RunReport(
        status="ok",
        input=outputs.input,
        n_per_hemisphere={h.value: fs.n for h, fs in outputs.series.items()},
        cycles_per_hemisphere={h.value: len(s) for h, s in outputs.segments.items()},
        distributions=outputs.distributions,
        survey=outputs.survey.summaries,
        mean_significant_tau_all=outputs.survey.mean_significant_tau_all,
        skipped_segments=outputs.survey.skipped,
        regressions=outputs.regressions,
        agreement=method_agreement(outputs.survey, outputs.wavelets, config.pairing.floor, windows=config.windows),
        dominant_period_ks=dominant_ks,
        distribution_ks=distribution_ks,
    )


def _case_name(hemisphere: Hemisphere, cycle_number: int, kind: SeriesKind) -> str:
    return f"{hemisphere.value}_{cycle_number}_{kind.value}"


def emit_tables(outputs: RunOutputs, report: RunReport, tree: OutputTree) -> None:
    for hemisphere, fs in outputs.series.items():
        tree.add_csv(
            f"fluctuations_{hemisphere.value}.csv",
            ["rotation_index", "date_mid", "S", "S_bar", "F", "F_plus", "F_minus"],
            zip(fs.rotation_indices, fs.date_mid, fs.mean_area, fs.smoothed, fs.values,
                fs.positive_part, fs.negative_part),
        )
    for distribution in outputs.distributions:
        tree.add_json(f"distribution_{distribution.hemisphere.value}.json", distribution.model_dump(mode="json"))

    for a in outputs.survey.analyses:
        tree.add_csv(
            f"acf/acf_{_case_name(a.hemisphere, a.cycle_number, a.series_kind)}.csv",
            ["lag", "c", "se"],
            zip(a.lags, a.c, a.se),
        )
    tree.add_json("acf_summary.json", {
        "analyses": [
            {
                "hemisphere": a.hemisphere.value,
                "cycle": a.cycle_number,
                "kind": a.series_kind.value,
                "n": a.n,
                "reliable_max_lag": a.reliable_max_lag,
                "peaks": [p.model_dump(mode="json") for p in a.peaks],
            }
            for a in outputs.survey.analyses
        ],
        "summaries": [s.model_dump(mode="json") for s in outputs.survey.summaries],
        "skipped": [s.model_dump(mode="json") for s in outputs.survey.skipped],
        "mean_significant_tau_all": outputs.survey.mean_significant_tau_all,
    })

    for w in outputs.wavelets:
        name = _case_name(w.hemisphere, w.cycle_number, w.series_kind)
        coi_mask = w.in_coi()
        tree.add_csv(
            f"wavelet/cwt_{name}.csv",
            ["time_index", "period", "power", "significant", "in_coi"],
            (
                (t, w.periods[j], w.power[j, t], w.significant[j, t], coi_mask[j, t])
                for t in range(w.n)
                for j in range(len(w.periods))
            ),
        )
        tree.add_csv(f"wavelet/gws_{name}.csv", ["period", "power"], zip(w.periods, w.global_spectrum))

    fits = {(r.kind, r.k): r.fit for r in outputs.regressions}
    for collection in outputs.collections:
        fit = fits[(collection.kind, collection.k)]
        rows = [
            ("pair", p.hemisphere, p.cycle_number, p.tau, p.tau_k, fit.predict(p.tau) if fit else None, None)
            for p in collection.pairs
        ]
        if fit is not None:
            rows += [
                ("band", None, None, x, None, fit.predict(x), half)
                for x, half in zip(fit.band_x, fit.band_half_width)
            ]
        tree.add_csv(
            f"harmonics_{collection.kind.value}_k{collection.k}.csv",
            ["record", "hemisphere", "cycle", "x", "y", "fit", "half_width"],
            rows,
        )

    tree.add_json("method_agreement.json", [a.model_dump(mode="json") for a in report.agreement])
    tree.add_json("report.json", report.model_dump(mode="json"))


def emit_plot_data(outputs: RunOutputs, tree: OutputTree) -> None:
    """Figure-ready CSVs under ``plots/``; empty inputs give header-only files"""
    for distribution in outputs.distributions:
        fit = distribution.histogram
        hemisphere = distribution.hemisphere.value
        expected = gaussian_expected_counts(fit)
        tree.add_csv(
            f"plots/fig1a_histogram_{hemisphere}.csv",
            ["bin_left", "bin_right", "bin_center", "count", "gauss_count"],
            zip(fit.bin_edges[:-1], fit.bin_edges[1:], fit.bin_centers, fit.counts, expected),
        )
        curve_x = np.linspace(fit.bin_edges[0], fit.bin_edges[-1], GAUSS_CURVE_SAMPLES)
        tree.add_csv(
            f"plots/fig1a_gauss_{hemisphere}.csv",
            ["x", "gauss_count"],
            zip(curve_x, gaussian_expected_counts(fit, curve_x)),
        )

    for a in outputs.survey.analyses:
        tree.add_csv(
            f"plots/fig1b_acf_{_case_name(a.hemisphere, a.cycle_number, a.series_kind)}.csv",
            ["lag", "c", "upper_2se", "lower_2se", "reliable"],
            zip(a.lags, a.c, 2.0 * a.se, -2.0 * a.se, a.lags <= a.reliable_max_lag),
        )

    by_kind: Dict[SeriesKind, Dict[int, PairCollection]] = {}
    for collection in outputs.collections:
        by_kind.setdefault(collection.kind, {})[collection.k] = collection
    fits = {(r.kind, r.k): r.fit for r in outputs.regressions}
    header = ["x", "tau_k2", "tau_k3"] + [f"{col}_k{k}" for k in HARMONICS for col in ("fit", "lower", "upper")]
    for kind, collections in by_kind.items():
        rows = []
        for k, collection in sorted(collections.items()):
            for p in collection.pairs:
                row = [p.tau, None, None] + [None] * 6
                row[HARMONICS.index(k) + 1] = p.tau_k
                rows.append(row)
            fit = fits.get((kind, k))
            if fit is None:
                continue
            offset = 3 + 3 * HARMONICS.index(k)
            for x, half in zip(fit.band_x, fit.band_half_width):
                row = [x] + [None] * 8
                center = fit.predict(x)
                row[offset:offset + 3] = [center, center - half, center + half]
                rows.append(row)
        tree.add_csv(f"plots/fig1cd_regression_{kind.value}.csv", header, rows)

    for hemisphere, fs in outputs.series.items():
        for segment in outputs.segments[hemisphere]:
            window = slice(segment.start, segment.stop)
            tree.add_csv(
                f"plots/fig2d_series_{hemisphere.value}_{segment.cycle_number}.csv",
                ["rotation_index", "date_mid", "F", "F_plus", "F_minus"],
                zip(fs.rotation_indices[window], fs.date_mid[window], fs.values[window],
                    fs.positive_part[window], fs.negative_part[window]),
            )


def run_pipeline(config: RunConfig) -> RunReport:
    """Run every stage and write the output tree under ``config.output_dir``.

    Any module error leaves only a failed manifest and is re-raised.
    """
    tree = OutputTree()
    try:
        outputs = analyze(config, tree)
        report = build_report(outputs, config)
        emit_tables(outputs, report, tree)
        emit_plot_data(outputs, tree)
    except PeriodicityError as e:
        logger.error("run failed: %s", e)
        write_failure_manifest(config.output_dir, e)
        raise

    tree.write(config.output_dir, "ok", input=report.input)
    logger.info(
        "run complete: N=%s, mean significant tau=%s",
        report.n_per_hemisphere, report.mean_significant_tau_all,
    )
    return report
