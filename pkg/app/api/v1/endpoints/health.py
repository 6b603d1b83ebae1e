from fastapi import APIRouter
from fastapi.responses import ORJSONResponse

from app.core.config import settings

router = APIRouter()

@router.get("/")
async def health_check():
    """Health check endpoint"""
    data_file = settings.daily_area_path
    return ORJSONResponse({
        "status": "ok",
        "data_dir": str(settings.SUNSPOT_DATA_DIR),
        "daily_area_file": "present" if data_file.is_file() else "missing",
        "service": settings.PROJECT_NAME,
    }, headers={"Cache-Control": "public, max-age=5"})
