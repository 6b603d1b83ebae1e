"""
已完成分析的報告讀取端點
"""

import aiofiles
import orjson
from fastapi import APIRouter, HTTPException

from app.core.config import settings

router = APIRouter()

@router.get("/report")
async def latest_report():
    """讀取 OUTPUT_DIR 下的 report.json"""
    path = settings.OUTPUT_DIR / "report.json"
    if not path.is_file():
        raise HTTPException(status_code=404, detail="No report found; run the analysis first")
    async with aiofiles.open(path, "rb") as handle:
        content = await handle.read()
    return orjson.loads(content)
