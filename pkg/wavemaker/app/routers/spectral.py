from __future__ import annotations

import logging

from fastapi import APIRouter, Request

from ..middleware import trace_id_of
from ..schemas.model_schemas import FourierBoundary
from ..schemas.run_schemas import DNMapRequest, RootsRequest, StdResp
from ..services.dispersion import describe_roots
from ..services.dnmap import describe, dn_coefficients

router = APIRouter()
logger = logging.getLogger("wavemaker")


@router.post("/api/roots")
def roots(req: RootsRequest, request: Request):
    report = describe_roots(req.coeffs(), req.n, req.omega0)
    logger.info({"event": "api.roots", "trace_id": trace_id_of(request), "model": req.model, "omega0": req.omega0, "n": req.n})
    return StdResp(code=0, data=report).model_dump()


@router.post("/api/dnmap")
def dnmap(req: DNMapRequest, request: Request):
    if req.harmonics:
        boundary = FourierBoundary.from_pairs(req.omega0, req.harmonics)
    else:
        boundary = FourierBoundary.sinusoid(req.omega0)
    result = dn_coefficients(req.coeffs(), boundary)
    logger.info({"event": "api.dnmap", "trace_id": trace_id_of(request), "model": req.model, "omega0": req.omega0, "harmonics": len(result.records)})
    return StdResp(code=0, data=describe(result, req.t, j=req.j)).model_dump()
