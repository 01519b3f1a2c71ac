import logging
import time
import uuid

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

logger = logging.getLogger("wavemaker")


def trace_id_of(request: Request) -> str | None:
    return getattr(request.state, "trace_id", None)


class TraceLogMiddleware(BaseHTTPMiddleware):
    """Tags each request with a trace id (routers log it next to their own events)
    and reports the wall time of the evaluation in ``X-Elapsed-Ms``."""

    async def dispatch(self, request: Request, call_next):
        trace_id = request.headers.get("X-Trace-Id") or uuid.uuid4().hex
        request.state.trace_id = trace_id
        start = time.perf_counter()
        try:
            response = await call_next(request)
        except Exception as e:
            elapsed = round((time.perf_counter() - start) * 1000, 2)
            logger.exception({"event": "http.error", "trace_id": trace_id, "path": request.url.path, "err": str(e), "ms": elapsed})
            raise
        elapsed = round((time.perf_counter() - start) * 1000, 2)
        logger.info(
            {
                "event": "http.request",
                "trace_id": trace_id,
                "path": request.url.path,
                "method": request.method,
                "status": response.status_code,
                "ms": elapsed,
            }
        )
        response.headers["X-Trace-Id"] = trace_id
        response.headers["X-Elapsed-Ms"] = str(elapsed)
        return response
