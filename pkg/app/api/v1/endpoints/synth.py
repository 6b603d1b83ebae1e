"""
合成序列 API 端點
"""

from fastapi import APIRouter

from app.core.periodicity.synth import generate
from app.models.periodicity import SynthSpec

router = APIRouter()

@router.post("/")
async def synthesize(spec: SynthSpec):
    """依規格產生合成序列（同一 seed 結果相同）"""
    values = generate(spec)
    return {"n": spec.n, "seed": spec.seed, "values": values.tolist()}
