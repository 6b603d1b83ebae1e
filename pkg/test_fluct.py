"""
自轉平均與擾動序列測試
"""

from datetime import date, timedelta

import numpy as np
import pytest

from app.core.periodicity.calendar import date_from_julian, rotation_number, rotation_start
from app.core.periodicity.errors import EmptyRotation, SeriesTooShort
from app.core.periodicity.fluct import (
    HALF_WINDOW,
    fluctuations,
    rotation_means,
    running_mean,
    split_signed,
)
from app.models.periodicity import (
    DailyAreaRecord,
    EdgePolicy,
    GapPolicy,
    Hemisphere,
    RotationMean,
    RotationSeries,
)
from test_config import sinusoid


def _days_of(rotation: int):
    """All calendar days whose noon falls in ``rotation``"""
    day = date_from_julian(rotation_start(rotation)) - timedelta(days=1)
    days = []
    while rotation_number(day) <= rotation:
        if rotation_number(day) == rotation:
            days.append(day)
        day += timedelta(days=1)
    return days


def _series(values) -> RotationSeries:
    return RotationSeries(hemisphere=Hemisphere.NORTH, rotations=[
        RotationMean(rotation_index=1000 + i, mean_area=float(v), day_count=27, date_mid=date(1900, 1, 1) + timedelta(days=27 * i))
        for i, v in enumerate(values)
    ])


class TestRotationMeans:
    def test_constant_rotation(self):
        days = _days_of(1000)
        records = [DailyAreaRecord(date=d, area_total=100, area_north=100, area_south=0) for d in days]
        series = rotation_means(records, Hemisphere.NORTH)
        assert len(series) == 1
        assert series.rotations[0].mean_area == 100.0
        assert series.rotations[0].day_count == len(days)
        assert len(days) in (27, 28)

    def test_arithmetic_mean(self):
        days = _days_of(1000)[:3]
        records = [
            DailyAreaRecord(date=d, area_total=a, area_north=0, area_south=a)
            for d, a in zip(days, [0.0, 0.0, 300.0])
        ]
        series = rotation_means(records, Hemisphere.SOUTH)
        assert series.rotations[0].mean_area == 100.0
        assert series.rotations[0].day_count == 3

    def test_two_rotations(self):
        records = [
            DailyAreaRecord(date=d, area_total=value, area_north=value, area_south=0)
            for rotation, value in ((1000, 40.0), (1001, 70.0))
            for d in _days_of(rotation)
        ]
        series = rotation_means(records, Hemisphere.NORTH)
        assert series.indices.tolist() == [1000, 1001]
        assert series.means.tolist() == [40.0, 70.0]
        assert rotation_number(series.rotations[0].date_mid) == 1000

    def test_every_day_lands_in_its_rotation(self):
        start = date(1900, 1, 1)
        records = [
            DailyAreaRecord(date=d, area_total=0, area_north=float(rotation_number(d)), area_south=0)
            for d in (start + timedelta(days=i) for i in range(300))
        ]
        series = rotation_means(records, Hemisphere.NORTH)
        assert np.array_equal(series.means, series.indices.astype(float))
        assert sum(r.day_count for r in series.rotations) == 300

    def test_empty_rotation(self):
        records = [
            DailyAreaRecord(date=d, area_total=5, area_north=5, area_south=0)
            for rotation in (1000, 1002)
            for d in _days_of(rotation)
        ]
        series = rotation_means(records, Hemisphere.NORTH, gap_policy=GapPolicy.SKIP)
        assert series.indices.tolist() == [1000, 1001, 1002]
        assert series.rotations[1].day_count == 0
        assert series.rotations[1].mean_area == 5.0

        with pytest.raises(EmptyRotation):
            rotation_means(records, Hemisphere.NORTH, gap_policy=GapPolicy.ERROR)

    def test_empty_rotation_interpolated(self):
        records = [
            DailyAreaRecord(date=d, area_total=value, area_north=value, area_south=0)
            for rotation, value in ((1000, 40.0), (1003, 70.0))
            for d in _days_of(rotation)
        ]
        series = rotation_means(records, Hemisphere.NORTH)
        assert series.means.tolist() == pytest.approx([40.0, 50.0, 60.0, 70.0])
        assert [r.day_count for r in series.rotations][1:3] == [0, 0]

    def test_missing_rotation_leaves_constant_flat(self):
        records = [
            DailyAreaRecord(date=d, area_total=100, area_north=100, area_south=0)
            for rotation in range(1000, 1020) if rotation != 1010
            for d in _days_of(rotation)
        ]
        series = rotation_means(records, Hemisphere.NORTH)
        assert len(series) == 20
        assert series.rotations[10].day_count == 0
        fs = fluctuations(series)
        assert np.allclose(fs.values, 0.0)

    def test_no_records(self):
        assert len(rotation_means([], Hemisphere.NORTH)) == 0


class TestRunningMean:
    @pytest.mark.parametrize("policy", list(EdgePolicy))
    def test_constant(self, policy):
        smoothed = running_mean(np.full(30, 4.0), policy)
        finite = smoothed[~np.isnan(smoothed)]
        assert np.allclose(finite, 4.0)
        assert len(finite) == (30 if policy is EdgePolicy.SHRINK else 30 - 2 * HALF_WINDOW)

    def test_impulse_response(self):
        values = np.zeros(40)
        values[20] = 13.0
        smoothed = running_mean(values)
        assert np.allclose(smoothed[14:27], 1.0)
        assert np.allclose(smoothed[:14], 0.0)
        assert np.allclose(smoothed[27:], 0.0)

    def test_ramp_interior_and_shrunk_edges(self):
        values = np.arange(30, dtype=float)
        smoothed = running_mean(values, EdgePolicy.SHRINK)
        assert np.allclose(smoothed[HALF_WINDOW:30 - HALF_WINDOW], values[HALF_WINDOW:30 - HALF_WINDOW])
        assert smoothed[0] == pytest.approx(3.0)
        assert smoothed[-1] == pytest.approx(26.0)

    def test_trim_edges(self):
        smoothed = running_mean(np.arange(20, dtype=float), EdgePolicy.TRIM)
        assert np.isnan(smoothed[:HALF_WINDOW]).all()
        assert np.isnan(smoothed[-HALF_WINDOW:]).all()
        assert not np.isnan(smoothed[HALF_WINDOW:-HALF_WINDOW]).any()

    def test_trim_matches_shrink_inside(self):
        values = sinusoid(40, 9.0) + np.arange(40) * 0.1
        trimmed = running_mean(values, EdgePolicy.TRIM)
        shrunk = running_mean(values, EdgePolicy.SHRINK)
        inside = slice(HALF_WINDOW, 40 - HALF_WINDOW)
        assert np.allclose(trimmed[inside], shrunk[inside])

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            running_mean(np.ones(12), EdgePolicy.TRIM)
        with pytest.raises(SeriesTooShort):
            running_mean(np.array([]))
        assert running_mean([5.0]).tolist() == [5.0]


def test_split_signed():
    values = np.array([-2.0, 0.0, 3.0, -0.5])
    positive, negative = split_signed(values)
    assert positive.tolist() == [0.0, 0.0, 3.0, 0.0]
    assert negative.tolist() == [-2.0, 0.0, 0.0, -0.5]
    assert np.array_equal(positive + negative, values)


class TestFluctuations:
    def test_constant_series(self):
        fs = fluctuations(_series([7.0] * 20))
        assert np.allclose(fs.values, 0.0)
        assert not fs.positive_part.any()
        assert np.allclose(fs.negative_part, 0.0)

    def test_impulse(self):
        values = [0.0] * 30
        values[15] = 13.0
        fs = fluctuations(_series(values))
        assert fs.values[15] == pytest.approx(12.0)
        assert fs.positive_part[15] == pytest.approx(12.0)
        assert fs.negative_part[15] == 0.0
        assert fs.values[14] == pytest.approx(-1.0)

    def test_trim_drops_edges(self):
        series = _series(100 + 10 * sinusoid(60, 10.0))
        shrink = fluctuations(series, EdgePolicy.SHRINK)
        trim = fluctuations(series, EdgePolicy.TRIM)
        assert shrink.n == 60
        assert trim.n == 60 - 2 * HALF_WINDOW
        assert trim.rotation_indices[0] == series.indices[HALF_WINDOW]
        assert np.allclose(trim.values, shrink.values[HALF_WINDOW:-HALF_WINDOW])
        assert not np.isnan(trim.values).any()

    def test_parts_add_up(self):
        series = _series(50 + 20 * sinusoid(80, 9.0))
        fs = fluctuations(series)
        assert np.allclose(fs.positive_part + fs.negative_part, fs.values)
        assert np.allclose(fs.mean_area - fs.smoothed, fs.values)
        assert fs.date_mid == series.dates
