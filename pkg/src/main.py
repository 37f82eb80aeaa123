# src/main.py - HTTP front end over the report builder
from fastapi import FastAPI, HTTPException, Query
from pydantic import ValidationError
import logging

from src.core.config import settings
from src.core.exceptions import DomainError, KoszulScopeError, UsageError
from src.schemas.reports import RunConfig
from src.services.report_builder import ReportBuilder

# Configure logging
logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="KoszulScope API",
    version=settings.version,
    description="Exact cohomology dimensions for foliations on complete-intersection K3 surfaces",
)

report_builder = ReportBuilder(settings)

SURFACE_PATTERN = "^(quartic|2-3|2-2-2|all)$"


def _run(command: str, surface: str, d_min: int, d_max: int, with_trace: bool = False) -> dict:
    try:
        config = RunConfig(command=command, surface=surface, d_min=d_min, d_max=d_max, with_trace=with_trace)
        report = report_builder.build(config)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=e.errors()[0]["msg"])
    except (DomainError, UsageError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except KoszulScopeError as e:
        logger.error(f"❌ {command} failed: {str(e)}")
        raise HTTPException(status_code=500, detail=str(e))

    return {
        "status": "success",
        "count": len(report.records),
        "filters": {"surface": surface, "d_min": d_min, "d_max": d_max},
        "data": [record.model_dump() for record in report.records],
        "trace": report.trace,
    }


@app.get("/")
async def root():
    return {
        "message": "KoszulScope API",
        "status": "operational",
        "version": settings.version,
        "endpoints": {
            "health": "/health",
            "dimensions": "/api/v1/dims",
            "uniqueness": "/api/v1/uniqueness",
            "singular_scheme_degree": "/api/v1/singdeg",
            "api_docs": "/docs",
        },
    }


@app.get("/health")
async def health_check():
    models = {
        surface.value: report_builder.repository.path_for(surface).is_file()
        for surface in report_builder.repository.surfaces()
    }
    return {
        "status": "healthy" if all(models.values()) else "degraded",
        "model_dir": str(report_builder.repository.model_dir),
        "models": models,
    }


@app.get("/api/v1/dims")
def get_dimensions(
    surface: str = Query("all", pattern=SURFACE_PATTERN, description="Surface type"),
    d_min: int = Query(0, ge=0, description="Smallest degree"),
    d_max: int = Query(12, ge=0, description="Largest degree"),
    with_trace: bool = Query(False, description="Include chase traces"),
):
    """h0 of foliations, pulled-back cotangent sheaf and structure terms"""
    return _run("dims", surface, d_min, d_max, with_trace)


@app.get("/api/v1/uniqueness")
def get_uniqueness(
    surface: str = Query("all", pattern=SURFACE_PATTERN, description="Surface type"),
    d_min: int = Query(3, ge=0, description="Smallest degree"),
    d_max: int = Query(12, ge=0, description="Largest degree"),
):
    """Uniqueness thresholds and per-degree certificates"""
    return _run("uniqueness", surface, d_min, d_max)


@app.get("/api/v1/singdeg")
def get_singular_scheme_degree(
    surface: str = Query("all", pattern=SURFACE_PATTERN, description="Surface type"),
    d_min: int = Query(0, ge=0, description="Smallest degree"),
    d_max: int = Query(12, ge=0, description="Largest degree"),
):
    """Degree of the singular scheme of a generic foliation"""
    return _run("singdeg", surface, d_min, d_max)
