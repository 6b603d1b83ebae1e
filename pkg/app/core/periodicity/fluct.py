"""
自轉平均面積、13 自轉滑動平均與擾動序列

S_i is the mean daily area over the days falling in rotation i, S_bar_i the
centered 13-rotation boxcar of S, and F_i = S_i - S_bar_i.
"""

import logging
from typing import Iterable, List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.core.periodicity.calendar import DEFAULT_EPHEMERIS, rotation_mid_date, rotation_number
from app.core.periodicity.errors import EmptyRotation, SeriesTooShort
from app.models.periodicity import (
    CarringtonEphemeris,
    DailyAreaRecord,
    EdgePolicy,
    FluctuationSeries,
    GapPolicy,
    Hemisphere,
    RotationMean,
    RotationSeries,
)

logger = logging.getLogger(__name__)

WINDOW = 13
HALF_WINDOW = WINDOW // 2


def rotation_means(
    records: Iterable[DailyAreaRecord],
    hemisphere: Hemisphere,
    eph: CarringtonEphemeris = DEFAULT_EPHEMERIS,
    gap_policy: GapPolicy = GapPolicy.SKIP,
) -> RotationSeries:
    """Average one hemisphere's daily areas per Carrington rotation.

    Rotations between the first and last observed day that hold no day at
    all raise ``EmptyRotation`` under the error policy; otherwise they are
    kept with ``day_count`` 0 and a mean interpolated linearly from the
    nearest observed rotations.
    """
    records = list(records)
    if not records:
        return RotationSeries(hemisphere=hemisphere, rotations=[])

    field = "area_north" if hemisphere is Hemisphere.NORTH else "area_south"
    numbers = np.array([rotation_number(r.date, eph) for r in records], dtype=np.int64)
    areas = np.array([getattr(r, field) for r in records], dtype=np.float64)

    first = int(numbers[0])
    offsets = numbers - first
    sums = np.bincount(offsets, weights=areas)
    counts = np.bincount(offsets)

    observed = counts > 0
    empty = int(np.count_nonzero(~observed))
    if empty and gap_policy is GapPolicy.ERROR:
        offset = int(np.flatnonzero(~observed)[0])
        raise EmptyRotation(
            "rotation has no observed day", rotation_index=first + offset, hemisphere=hemisphere.value,
        )

    positions = np.arange(len(counts))
    means = np.zeros(len(counts))
    means[observed] = sums[observed] / counts[observed]
    # first and last rotations always hold a day
    means[~observed] = np.interp(positions[~observed], positions[observed], means[observed])

    rotations: List[RotationMean] = []
    for offset, (mean, count) in enumerate(zip(means, counts)):
        index = first + offset
        rotations.append(RotationMean(
            rotation_index=index,
            mean_area=float(mean),
            day_count=int(count),
            date_mid=rotation_mid_date(index, eph),
        ))

    if empty:
        logger.warning("%s: %d rotations without observed days interpolated", hemisphere.value, empty)
    logger.debug("%s: %d rotation means from %d days", hemisphere.value, len(rotations), len(records))
    return RotationSeries(hemisphere=hemisphere, rotations=rotations)


def running_mean(values: np.ndarray, edge_policy: EdgePolicy = EdgePolicy.SHRINK) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if edge_policy is EdgePolicy.TRIM and n < WINDOW:
        raise SeriesTooShort("trim smoothing needs at least 13 rotations", module="fluct", n=n)
    if n < 1:
        raise SeriesTooShort("cannot smooth an empty series", module="fluct", n=n)

    padded = np.pad(values, HALF_WINDOW, constant_values=np.nan)
    windows = sliding_window_view(padded, WINDOW)
    smoothed = np.nansum(windows, axis=1) / np.sum(~np.isnan(windows), axis=1)
    if edge_policy is EdgePolicy.TRIM:
        smoothed[:HALF_WINDOW] = np.nan
        smoothed[n - HALF_WINDOW:] = np.nan
    return smoothed


def smooth_13(series: RotationSeries, edge_policy: EdgePolicy = EdgePolicy.SHRINK) -> np.ndarray:
    """13 自轉置中滑動平均；trim 時兩端各 6 點為 NaN"""
    return running_mean(series.means, edge_policy)


def split_signed(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(F+, F-): positive values and zero, then non-positive values and zero"""
    values = np.asarray(values, dtype=np.float64)
    positive = np.where(values > 0, values, 0.0)
    negative = np.where(values > 0, 0.0, values)
    return positive, negative


def fluctuations(series: RotationSeries, edge_policy: EdgePolicy = EdgePolicy.SHRINK) -> FluctuationSeries:
    smoothed = smooth_13(series, edge_policy)
    means = series.means
    keep = slice(None)
    if edge_policy is EdgePolicy.TRIM:
        keep = slice(HALF_WINDOW, len(series) - HALF_WINDOW)

    means = means[keep]
    smoothed = smoothed[keep]
    values = means - smoothed
    positive, negative = split_signed(values)
    return FluctuationSeries(
        hemisphere=series.hemisphere,
        rotation_indices=series.indices[keep],
        date_mid=series.dates[keep],
        mean_area=means,
        smoothed=smoothed,
        values=values,
        positive_part=positive,
        negative_part=negative,
        n=len(values),
    )
