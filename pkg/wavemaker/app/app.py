from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from prometheus_fastapi_instrumentator import Instrumentator

from .config import settings
from .errors import WavemakerError
from .health import router as health_router
from .logging_utils import setup_logging
from .middleware import TraceLogMiddleware
from .routers.solutions import router as solutions_router
from .routers.spectral import router as spectral_router
from .schemas.run_schemas import StdResp

setup_logging(
    service_name="halfline",
    log_dir=settings.LOG_DIR,
    level=settings.LOG_LEVEL,
    retention_days=settings.LOG_RETENTION_DAYS,
)
logger = logging.getLogger("wavemaker")


def _plain(payload: dict) -> dict:
    out = {}
    for key, value in payload.items():
        if isinstance(value, (bool, int, str)) or value is None:
            out[key] = value
        elif isinstance(value, float) and math.isfinite(value):
            out[key] = value
        else:
            out[key] = str(value)
    return out


@asynccontextmanager
async def lifespan(app: FastAPI):
    # 样本级线程池，随服务生命周期创建与回收
    pool = ThreadPoolExecutor(max_workers=max(1, settings.HALFLINE_THREADS))
    app.state.pool = pool
    app.state.threads = settings.HALFLINE_THREADS
    logger.info({"event": "service.start", "threads": settings.HALFLINE_THREADS})
    try:
        yield
    finally:
        pool.shutdown(wait=True)


def create_app() -> FastAPI:
    app = FastAPI(
        title="Half-line Wavemaker",
        version="0.1.0",
        lifespan=lifespan,
    )
    app.add_middleware(TraceLogMiddleware)

    @app.exception_handler(WavemakerError)
    def wavemaker_error_handler(request: Request, exc: WavemakerError):
        logger.warning({"event": "api.error", "path": request.url.path, **exc.to_dict()})
        return JSONResponse(StdResp(code=422, message=exc.code, data=_plain(exc.to_dict())).model_dump(), status_code=422)

    # 指标
    if settings.ENABLE_METRICS:
        Instrumentator().instrument(app).expose(app)

    app.include_router(health_router, tags=["health"])
    app.include_router(spectral_router, tags=["spectral"])
    app.include_router(solutions_router, tags=["solutions"])
    return app


app = create_app()
