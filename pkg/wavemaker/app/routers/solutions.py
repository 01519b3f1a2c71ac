from __future__ import annotations

import logging
import math

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse

from ..config import settings
from ..middleware import trace_id_of
from ..schemas.model_schemas import Equation
from ..schemas.run_schemas import EvaluateRequest, PhaseDiagramRequest, StdResp
from ..services import sampling
from ..services.asymptotics import phase_diagram

router = APIRouter()
logger = logging.getLogger("wavemaker")

MAX_POINTS = 10_000


def _json_safe(value):
    # nan and inf are not valid JSON
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@router.post("/api/evaluate")
def evaluate(req: EvaluateRequest, request: Request):
    points = req.all_points()
    if len(points) > MAX_POINTS:
        return JSONResponse(
            StdResp(code=422, message="too_many_points", data={"limit": MAX_POINTS}).model_dump(), status_code=422
        )
    rows = sampling.evaluate(
        req,
        req.omega0,
        points,
        req.method,
        quadrature=req.quadrature,
        saddle_form=req.saddle_form,
        threads=settings.HALFLINE_THREADS,
        pool=getattr(request.app.state, "pool", None),
    )
    failures = sum(1 for r in rows if not r.ok)
    logger.info({"event": "api.evaluate", "trace_id": trace_id_of(request), "model": req.model, "method": req.method, "rows": len(rows), "failures": failures})
    data = [{k: _json_safe(v) for k, v in r.to_dict().items()} for r in rows]
    return StdResp(code=0, data=data).model_dump()


@router.post("/api/phase-diagram")
def diagram(req: PhaseDiagramRequest):
    result = phase_diagram(Equation(req.model), req.omega0_range, req.xi_range, req.resolution)
    data = {
        "model": req.model,
        "labels": [{"omega0": w, "xi": xi, "label": label} for w, xi, label in result.rows()],
        "curves": {name: [list(p) for p in pts] for name, pts in result.curves.items()},
    }
    return StdResp(code=0, data=data).model_dump()
