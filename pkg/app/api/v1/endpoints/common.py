"""
端點共用：分析錯誤轉 HTTP 錯誤
"""

from fastapi import HTTPException

from app.core.periodicity.errors import AnalysisError, PeriodicityError


def http_error(error: PeriodicityError) -> HTTPException:
    """Analysis degeneracy -> 422, bad data or configuration -> 400"""
    status_code = 422 if isinstance(error, AnalysisError) else 400
    return HTTPException(status_code=status_code, detail=str(error))
