"""
每日半球黑子面積檔案解析

Parses line-oriented daily hemispheric area files (Greenwich/NGDC layout by
default) into DailyAreaRecord lists, fills calendar gaps, and writes the
canonical CSV.
"""

import csv
import io
import logging
from datetime import date, timedelta
from pathlib import Path
from typing import BinaryIO, Iterable, List, Optional, TextIO, Union

from dateutil.parser import isoparse

from app.core.periodicity.errors import (
    GapFound,
    InputNotFound,
    MalformedLine,
    NegativeArea,
    NonMonotonicDate,
)
from app.models.periodicity import (
    CANONICAL_COLUMN_MAP,
    DEFAULT_COLUMN_MAP,
    ColumnMap,
    DailyAreaRecord,
    GapPolicy,
    ParseStats,
)

logger = logging.getLogger(__name__)

CANONICAL_HEADER = ["date", "area_total", "area_north", "area_south"]


def _is_data_line(tokens: List[str]) -> bool:
    """Header/comment lines start with a non-numeric token"""
    if not tokens:
        return False
    head = tokens[0].strip()
    if not head or head.startswith("#"):
        return False
    return head[0].isdigit() or (head[0] in "+-." and len(head) > 1 and head[1].isdigit())


def _tokens(line: str, column_map: ColumnMap) -> List[str]:
    if column_map.delimiter is None:
        return line.split()
    return [token.strip() for token in line.split(column_map.delimiter)]


def _parse_date(tokens: List[str], column_map: ColumnMap) -> date:
    if len(column_map.date_columns) == 1:
        return isoparse(tokens[column_map.date_columns[0]]).date()
    year, month, day = (int(tokens[i]) for i in column_map.date_columns)
    return date(year, month, day)


def parse_daily_lines(
    lines: Iterable[str],
    column_map: ColumnMap = DEFAULT_COLUMN_MAP,
    stats: Optional[ParseStats] = None,
) -> List[DailyAreaRecord]:
    """Parse decoded text lines; see ``parse_daily_file``"""
    stats = stats if stats is not None else ParseStats()
    records: List[DailyAreaRecord] = []
    previous: Optional[date] = None

    for line_number, raw in enumerate(lines, start=1):
        stats.lines += 1
        line = raw.rstrip("\r\n")
        tokens = _tokens(line, column_map)
        if not _is_data_line(tokens):
            stats.skipped_header += 1
            continue
        if len(tokens) < column_map.width:
            raise MalformedLine(line_number, line, reason="too few fields")

        try:
            day = _parse_date(tokens, column_map)
        except (ValueError, OverflowError) as e:
            raise MalformedLine(line_number, line, reason=f"bad date: {e}") from e

        if previous is not None and day <= previous:
            raise NonMonotonicDate(line_number, line)
        previous = day

        area_tokens = [tokens[column_map.north_column], tokens[column_map.south_column]]
        if column_map.total_column is not None:
            area_tokens.append(tokens[column_map.total_column])
        if column_map.missing_sentinel is not None and column_map.missing_sentinel in area_tokens:
            stats.skipped_missing += 1
            logger.debug("line %d: missing area value, day skipped", line_number)
            continue

        try:
            areas = [float(token) for token in area_tokens]
        except ValueError as e:
            raise MalformedLine(line_number, line) from e
        if any(area < 0 for area in areas):
            raise NegativeArea(line_number, line)

        north, south = areas[0], areas[1]
        total = areas[2] if column_map.total_column is not None else north + south
        records.append(DailyAreaRecord(date=day, area_total=total, area_north=north, area_south=south))
        stats.parsed += 1

    logger.info(
        "parsed %d daily records (%d header lines, %d missing days)",
        stats.parsed, stats.skipped_header, stats.skipped_missing,
    )
    return records


def parse_daily_file(
    source: BinaryIO,
    column_map: ColumnMap = DEFAULT_COLUMN_MAP,
    stats: Optional[ParseStats] = None,
) -> List[DailyAreaRecord]:
    """Parse a daily-area byte stream into date-ordered records.

    Every line is accounted for in ``stats``: parsed, header/comment, or a
    data line whose area carries the missing sentinel.
    """
    text = io.TextIOWrapper(source, encoding="utf-8", errors="replace", newline="")
    try:
        return parse_daily_lines(text, column_map, stats)
    finally:
        text.detach()


def read_daily_file(
    path: Union[str, Path],
    column_map: ColumnMap = DEFAULT_COLUMN_MAP,
    stats: Optional[ParseStats] = None,
) -> List[DailyAreaRecord]:
    path = Path(path)
    if not path.is_file():
        raise InputNotFound("daily area file not found", path=str(path))
    with path.open("rb") as handle:
        return parse_daily_file(handle, column_map, stats)


def fill_gaps(records: List[DailyAreaRecord], policy: GapPolicy = GapPolicy.SKIP) -> List[DailyAreaRecord]:
    """依缺值策略處理缺少的日期"""
    if policy is GapPolicy.SKIP or len(records) < 2:
        return list(records)

    filled: List[DailyAreaRecord] = []
    for previous, current in zip(records, records[1:]):
        filled.append(previous)
        missing = previous.date + timedelta(days=1)
        if missing == current.date:
            continue
        if policy is GapPolicy.ERROR:
            raise GapFound(missing)
        while missing < current.date:
            filled.append(DailyAreaRecord(date=missing, area_total=0.0, area_north=0.0, area_south=0.0))
            missing += timedelta(days=1)
    filled.append(records[-1])

    inserted = len(filled) - len(records)
    if inserted:
        logger.warning("inserted %d zero-area days", inserted)
    return filled


def write_canonical_csv(records: Iterable[DailyAreaRecord], stream: TextIO) -> None:
    """Write ``date,area_total,area_north,area_south`` with repr floats"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CANONICAL_HEADER)
    for record in records:
        writer.writerow([
            record.date.isoformat(),
            repr(record.area_total),
            repr(record.area_north),
            repr(record.area_south),
        ])


def canonical_csv_bytes(records: Iterable[DailyAreaRecord]) -> bytes:
    buffer = io.StringIO()
    write_canonical_csv(records, buffer)
    return buffer.getvalue().encode("utf-8")


def parse_canonical_csv(source: BinaryIO, stats: Optional[ParseStats] = None) -> List[DailyAreaRecord]:
    return parse_daily_file(source, CANONICAL_COLUMN_MAP, stats)
