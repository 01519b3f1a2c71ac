from __future__ import annotations

from fastapi import APIRouter, Request

router = APIRouter()


@router.get("/health")
def health(request: Request):
    pool_ok = getattr(request.app.state, "pool", None) is not None
    return {"status": "ok", "service": "halfline", "pool": pool_ok, "threads": getattr(request.app.state, "threads", 0)}
