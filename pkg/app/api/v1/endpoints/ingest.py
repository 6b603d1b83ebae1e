"""
每日面積檔上傳解析端點
"""

import io

from fastapi import APIRouter, File, UploadFile

from app.core.periodicity.errors import PeriodicityError
from app.core.periodicity.ingest import fill_gaps, parse_daily_file
from app.models.periodicity import DEFAULT_COLUMN_MAP, GapPolicy, ParseStats

from .common import http_error

router = APIRouter()

@router.post("/")
async def ingest_daily_file(file: UploadFile = File(...), gap_policy: GapPolicy = GapPolicy.SKIP):
    """解析上傳的 Greenwich 每日半球面積檔"""
    stats = ParseStats()
    content = await file.read()
    try:
        records = fill_gaps(parse_daily_file(io.BytesIO(content), DEFAULT_COLUMN_MAP, stats), gap_policy)
    except PeriodicityError as e:
        raise http_error(e)
    return {
        "filename": file.filename,
        "records": len(records),
        "first_date": records[0].date.isoformat() if records else None,
        "last_date": records[-1].date.isoformat() if records else None,
        "stats": stats.model_dump(),
    }
