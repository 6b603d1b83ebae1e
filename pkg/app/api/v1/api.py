from fastapi import APIRouter
from app.api.v1.endpoints import analysis, health, ingest, runs, synth

api_router = APIRouter()

api_router.include_router(health.router, prefix="/health", tags=["health"])
api_router.include_router(analysis.router, prefix="/analysis", tags=["analysis"])
api_router.include_router(synth.router, prefix="/synth", tags=["synth"])
api_router.include_router(ingest.router, prefix="/ingest", tags=["ingest"])
api_router.include_router(runs.router, prefix="/runs", tags=["runs"])
