"""
卡林頓自轉編號與太陽週期切分

Dates are mapped to Julian day numbers at noon UT, so a calendar day
belongs to the rotation that is running at its midday.
"""

import csv
import logging
import math
from datetime import date
from pathlib import Path
from typing import List, Sequence, Union

from dateutil.parser import isoparse
from pydantic import ValidationError

from app.core.periodicity.errors import DateBeforeEpoch, InvalidCycleTable, UncoveredRotation
from app.models.periodicity import (
    CarringtonEphemeris,
    CycleEntry,
    CycleSegment,
    CycleTable,
    RotationSeries,
)

logger = logging.getLogger(__name__)

# JDN(noon of day) - proleptic Gregorian ordinal
_ORDINAL_TO_JDN = 1721425

DEFAULT_EPHEMERIS = CarringtonEphemeris()


def julian_day(day: date) -> float:
    return float(day.toordinal() + _ORDINAL_TO_JDN)


def date_from_julian(jd: float) -> date:
    """UT calendar date containing ``jd``"""
    return date.fromordinal(math.floor(jd + 0.5) - _ORDINAL_TO_JDN)


def rotation_number(day: date, eph: CarringtonEphemeris = DEFAULT_EPHEMERIS) -> int:
    """Rotation running at noon of ``day``; the epoch day itself counts as rotation 1"""
    if day < date_from_julian(eph.epoch_julian_date):
        raise DateBeforeEpoch(
            "date precedes the Carrington epoch",
            date=day.isoformat(),
            epoch_julian_date=eph.epoch_julian_date,
        )
    return max(1, math.floor((julian_day(day) - eph.epoch_julian_date) / eph.synodic_period_days) + 1)


def rotation_start(rotation: int, eph: CarringtonEphemeris = DEFAULT_EPHEMERIS) -> float:
    return eph.epoch_julian_date + (rotation - 1) * eph.synodic_period_days


def rotation_mid_date(rotation: int, eph: CarringtonEphemeris = DEFAULT_EPHEMERIS) -> date:
    return date_from_julian(rotation_start(rotation, eph) + 0.5 * eph.synodic_period_days)


def load_cycle_table(path: Union[str, Path]) -> CycleTable:
    """讀取 ``cycle,start_date,end_date[,end_basis]`` 週期表"""
    path = Path(path)
    if not path.is_file():
        raise InvalidCycleTable("cycle table not found", path=str(path))

    entries: List[CycleEntry] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = {"cycle", "start_date", "end_date"} - set(reader.fieldnames or [])
        if missing:
            raise InvalidCycleTable("cycle table lacks columns", path=str(path), missing=sorted(missing))
        for row_number, row in enumerate(reader, start=2):
            try:
                entries.append(CycleEntry(
                    cycle_number=int(row["cycle"]),
                    start_date=isoparse(row["start_date"].strip()).date(),
                    end_date=isoparse(row["end_date"].strip()).date(),
                    end_basis=(row.get("end_basis") or "minimum").strip(),
                ))
            except (TypeError, ValueError, ValidationError) as e:
                raise InvalidCycleTable(f"bad cycle table row: {e}", path=str(path), row=row_number) from e

    try:
        table = CycleTable(entries=entries)
    except ValidationError as e:
        raise InvalidCycleTable(f"inconsistent cycle table: {e}", path=str(path)) from e
    for entry in table.entries:
        if entry.end_basis == "fitted":
            logger.info("cycle %d end %s is fitted, not an observed minimum", entry.cycle_number, entry.end_date)
    logger.debug(
        "loaded %d cycles (%s .. %s) from %s",
        len(table.entries), table.start_date, table.end_date, path,
    )
    return table


def clip_to_table(series: RotationSeries, table: CycleTable) -> RotationSeries:
    """Keep the rotations whose mid-date the table covers"""
    kept = [r for r in series.rotations if table.start_date <= r.date_mid < table.end_date]
    return RotationSeries(hemisphere=series.hemisphere, rotations=kept)


def segment_cycles(series: RotationSeries, table: CycleTable) -> List[CycleSegment]:
    """Split a rotation series into per-cycle position ranges.

    A rotation straddling a boundary goes to the cycle holding its mid-date.
    """
    return segment_dates(series.indices.tolist(), series.dates, table)


def segment_dates(rotation_indices: Sequence[int], dates: Sequence[date], table: CycleTable) -> List[CycleSegment]:
    segments: List[CycleSegment] = []
    current_cycle = None
    start = 0
    for position, (rotation_index, date_mid) in enumerate(zip(rotation_indices, dates)):
        cycle = table.cycle_for(date_mid)
        if cycle is None:
            raise UncoveredRotation(
                "rotation mid-date outside the cycle table",
                rotation_index=int(rotation_index),
                date_mid=date_mid.isoformat(),
            )
        if cycle != current_cycle:
            if current_cycle is not None:
                segments.append(CycleSegment(cycle_number=current_cycle, start=start, stop=position))
            current_cycle = cycle
            start = position
    if current_cycle is not None:
        segments.append(CycleSegment(cycle_number=current_cycle, start=start, stop=len(dates)))
    return segments
