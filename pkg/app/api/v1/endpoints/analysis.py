"""
單一序列分析 API 端點
"""

from typing import List, Optional

import numpy as np
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.core.periodicity.acf import autocorrelation, detect_peaks
from app.core.periodicity.errors import PeriodicityError, SampleTooLarge
from app.core.periodicity.stats import histogram_gauss_fit, lilliefors_test, shapiro_wilk_test
from app.core.periodicity.wavelet import significant_regions, wavelet_analysis
from app.models.periodicity import Background, CoiPolicy

from .common import http_error

router = APIRouter()

# Pydantic 模型
class AcfRequest(BaseModel):
    values: List[float]
    max_lag: int = Field(default=27, ge=1)

class WaveletRequest(BaseModel):
    values: List[float]
    background: Background = Background.RED
    coi_policy: CoiPolicy = CoiPolicy.ALL
    level: float = Field(default=0.95, gt=0, lt=1)
    omega0: float = 6.0
    dj: float = Field(default=0.125, gt=0)

class DistributionRequest(BaseModel):
    values: List[float]
    bin_count: Optional[int] = None
    alpha: float = Field(default=0.05, gt=0, lt=1)

@router.post("/acf")
async def analyze_acf(request: AcfRequest):
    """自相關函數、標準誤與視窗峰值"""
    try:
        c, se = autocorrelation(request.values, request.max_lag)
    except PeriodicityError as e:
        raise http_error(e)
    return {
        "n": len(request.values),
        "c": c.tolist(),
        "se": se.tolist(),
        "peaks": [p.model_dump(mode="json") for p in detect_peaks(c, se)],
    }

@router.post("/wavelet")
async def analyze_wavelet(request: WaveletRequest):
    """Morlet 小波功率與全域頻譜"""
    try:
        analysis = wavelet_analysis(
            request.values,
            omega0=request.omega0,
            dj=request.dj,
            background=request.background,
            level=request.level,
            coi_policy=request.coi_policy,
        )
    except PeriodicityError as e:
        raise http_error(e)
    outside = ~analysis.in_coi()
    significant = analysis.significant & outside
    return {
        "n": analysis.n,
        "periods": analysis.periods.tolist(),
        "global_spectrum": analysis.global_spectrum.tolist(),
        "peaks": [p.model_dump() for p in analysis.global_peaks],
        "lag1": analysis.lag1,
        "significant_fraction": float(significant.sum() / max(outside.sum(), 1)),
        "significant_periods": significant_regions(analysis),
    }

@router.post("/distribution")
async def analyze_distribution(request: DistributionRequest):
    """直方圖、高斯擬合與常態性檢定"""
    if not request.values:
        raise HTTPException(status_code=400, detail="values must not be empty")
    try:
        histogram = histogram_gauss_fit(request.values, request.bin_count)
        tests = [lilliefors_test(request.values, request.alpha)]
        try:
            tests.append(shapiro_wilk_test(request.values, request.alpha))
        except SampleTooLarge:
            pass
    except PeriodicityError as e:
        raise http_error(e)
    return {
        "histogram": histogram.model_dump(mode="json"),
        "tests": [t.model_dump(mode="json") for t in tests],
        "mean": float(np.mean(request.values)),
    }
