"""Sample plans, per-sample method dispatch and the CSV/JSON row format.

Rows are evaluated on a thread pool and always emitted in input order. A
numerical failure becomes a row with value nan and the error code in
``status``; it never aborts the batch.
"""

from __future__ import annotations

import contextlib
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from ..config import settings
from ..errors import PreconditionViolation, UncoveredFamily, WavemakerError
from ..schemas.model_schemas import Equation, FourierBoundary
from ..schemas.run_schemas import ModelSpec
from ..schemas.solution_schemas import Method, OracleGrid, QuadratureConfig, SolutionSample
from . import asymptotics, fokas, modulation, oracle
from .dnmap import asymptotic_solution_series, dn_coefficients

logger = logging.getLogger("wavemaker")

CSV_HEADER = ("model", "omega0", "x", "t", "xi", "method", "value", "err_estimate", "region", "status")
ALL_METHODS = ("exact", "asym", "series", "modulation")
METHOD_NAMES = {
    "exact": Method.EXACT.value,
    "asym": Method.ASYMPTOTIC.value,
    "series": Method.SERIES.value,
    "oracle": Method.ORACLE.value,
    "modulation": Method.MODULATION.value,
}


@dataclass(frozen=True)
class Row:
    model: str
    omega0: float
    x: float
    t: float
    method: str
    value: float
    err_estimate: float = 0.0
    region: Optional[str] = None
    status: str = "ok"

    @property
    def xi(self) -> float:
        if self.t > 0:
            return self.x / self.t
        return math.inf if self.x > 0 else 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def from_sample(cls, sample: SolutionSample) -> "Row":
        return cls(
            model=sample.model,
            omega0=float(sample.omega0),
            x=float(sample.x),
            t=float(sample.t),
            method=sample.method.value,
            value=float(sample.value),
            err_estimate=float(sample.err_estimate),
            region=sample.region,
            status=sample.status,
        )

    @classmethod
    def failed(cls, model: str, omega0: float, x: float, t: float, method: str, exc: WavemakerError) -> "Row":
        return cls(model=model, omega0=omega0, x=x, t=t, method=method, value=math.nan, status=exc.code)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["xi"] = self.xi
        return out


def fmt(value: float) -> str:
    """Shortest decimal that round-trips."""
    return repr(float(value))


def write_csv(rows: Iterable[Row], stream: TextIO) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    count = 0
    for r in rows:
        writer.writerow(
            [r.model, fmt(r.omega0), fmt(r.x), fmt(r.t), fmt(r.xi), r.method, fmt(r.value), fmt(r.err_estimate), r.region or "", r.status]
        )
        count += 1
    return count


def read_csv(stream: TextIO) -> List[Row]:
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        Row(
            model=rec["model"],
            omega0=float(rec["omega0"]),
            x=float(rec["x"]),
            t=float(rec["t"]),
            method=rec["method"],
            value=float(rec["value"]),
            err_estimate=float(rec["err_estimate"]),
            region=rec["region"] or None,
            status=rec["status"],
        )
        for rec in reader
    ]


def _require_equation(spec: ModelSpec, method: str) -> Equation:
    if spec.equation is None:
        raise UncoveredFamily(f"method {method!r} is available for kdv and bbm only")
    return spec.equation


def _series_row(spec: ModelSpec, omega0: float, x: float, t: float) -> Row:
    result = dn_coefficients(spec.coeffs(), FourierBoundary.sinusoid(omega0))
    value = asymptotic_solution_series(result, x, t)
    return Row(model=spec.model, omega0=omega0, x=x, t=t, method=Method.SERIES.value, value=float(value.real))


def _modulation_row(equation: Equation, omega0: float, x: float, t: float) -> Row:
    if t <= 0:
        raise PreconditionViolation("modulation fields need t > 0", t=t)
    state = modulation.modulation(equation, omega0, x / t)
    return Row(
        model=equation.value,
        omega0=omega0,
        x=x,
        t=t,
        method=Method.MODULATION.value,
        value=state.wave_at(x, t),
        region=state.branch,
    )


def evaluate_point(
    spec: ModelSpec,
    omega0: float,
    x: float,
    t: float,
    method: str,
    *,
    quadrature: Optional[QuadratureConfig] = None,
    saddle_form: str = "printed",
) -> Row:
    """One row; numerical failures are reported in ``status``."""
    try:
        if x < 0 or t < 0 or not (math.isfinite(x) and math.isfinite(t)):
            raise PreconditionViolation("samples live on x >= 0, t >= 0", x=x, t=t)
        if method == "series":
            return _series_row(spec, omega0, x, t)
        equation = _require_equation(spec, method)
        if method == "exact":
            sample = fokas.exact_sample(equation, x, t, omega0, quadrature)
        elif method == "asym":
            runner = asymptotics.kdv_asymptotic if equation is Equation.KDV else asymptotics.bbm_asymptotic
            sample = runner(omega0, x, t, saddle_form=saddle_form)
        elif method == "modulation":
            return _modulation_row(equation, omega0, x, t)
        else:
            raise PreconditionViolation(f"unknown method {method!r}")
        return Row.from_sample(sample)
    except WavemakerError as exc:
        return Row.failed(spec.model, omega0, x, t, METHOD_NAMES.get(method, method), exc)


def diff_row(a: Row, b: Row) -> Row:
    name = f"diff:{_short(a.method)}-{_short(b.method)}"
    status = "ok" if a.ok and b.ok else (a.status if not a.ok else b.status)
    value = a.value - b.value if status == "ok" else math.nan
    return Row(
        model=a.model,
        omega0=a.omega0,
        x=a.x,
        t=a.t,
        method=name,
        value=value,
        err_estimate=a.err_estimate + b.err_estimate if status == "ok" else 0.0,
        region=b.region or a.region,
        status=status,
    )


def _short(method_value: str) -> str:
    for short, long_name in METHOD_NAMES.items():
        if long_name == method_value:
            return short
    return method_value


def _oracle_rows(
    spec: ModelSpec, omega0: float, points: Sequence[Tuple[float, float]], grid: OracleGrid, pool: ThreadPoolExecutor
) -> List[Row]:
    name = Method.ORACLE.value
    try:
        equation = _require_equation(spec, "oracle")
    except WavemakerError as exc:
        return [Row.failed(spec.model, omega0, x, t, name, exc) for x, t in points]

    def run_at(t: float):
        try:
            return oracle.run(equation, omega0, grid, t, n_out=2)
        except WavemakerError as exc:
            return exc

    times = sorted({t for _, t in points})
    runs: Dict[float, object] = dict(zip(times, pool.map(run_at, times)))
    window = grid.x_max - grid.sponge
    rows = []
    for x, t in points:
        result = runs[t]
        if isinstance(result, WavemakerError):
            rows.append(Row.failed(spec.model, omega0, x, t, name, result))
            continue
        if x > window:
            exc = PreconditionViolation("x lies in the sponge layer", x=x, window=window)
            rows.append(Row.failed(spec.model, omega0, x, t, name, exc))
            continue
        i = result.index_of(t)
        err = float(np.interp(x, result.x, result.err[i]))
        rows.append(
            Row(model=spec.model, omega0=omega0, x=x, t=t, method=name, value=result.value_at(x, t), err_estimate=err)
        )
    return rows


def evaluate(
    spec: ModelSpec,
    omega0: float,
    points: Sequence[Tuple[float, float]],
    method: str,
    *,
    quadrature: Optional[QuadratureConfig] = None,
    saddle_form: str = "printed",
    oracle_grid: Optional[OracleGrid] = None,
    threads: Optional[int] = None,
    pool: Optional[ThreadPoolExecutor] = None,
) -> List[Row]:
    """Rows for every (x, t) in input order. ``all`` emits one row per method
    followed by exact-minus-other differences only (diff:exact-asym,
    diff:exact-series, diff:exact-modulation); other pairs are not emitted."""
    points = [(float(x), float(t)) for x, t in points]
    workers = max(1, threads or settings.HALFLINE_THREADS)
    with contextlib.ExitStack() as stack:
        if pool is None:
            pool = stack.enter_context(ThreadPoolExecutor(max_workers=workers))
        if method == "oracle":
            rows = _oracle_rows(spec, omega0, points, oracle_grid or OracleGrid(), pool)
        elif method == "all":
            def block(p):
                per = [evaluate_point(spec, omega0, p[0], p[1], m, quadrature=quadrature, saddle_form=saddle_form) for m in ALL_METHODS]
                return per + [diff_row(per[0], other) for other in per[1:]]

            rows = [r for chunk in pool.map(block, points) for r in chunk]
        else:
            rows = list(
                pool.map(
                    lambda p: evaluate_point(spec, omega0, p[0], p[1], method, quadrature=quadrature, saddle_form=saddle_form),
                    points,
                )
            )
    failures = sum(1 for r in rows if not r.ok)
    logger.info({"event": "sampling.evaluate", "method": method, "rows": len(rows), "failures": failures})
    return rows


@dataclass(frozen=True)
class Comparison:
    rows: List[Row]
    max_rel_error: float  # L-infinity of exact - oracle relative to L-infinity of exact


def compare(
    spec: ModelSpec,
    omega0: float,
    t: float,
    x_values: Sequence[float],
    *,
    quadrature: Optional[QuadratureConfig] = None,
    saddle_form: str = "steepest_descent",
    oracle_grid: Optional[OracleGrid] = None,
    threads: Optional[int] = None,
) -> Comparison:
    """Exact, asymptotic and oracle values at one time across an x window."""
    points = [(float(x), float(t)) for x in x_values]
    exact = evaluate(spec, omega0, points, "exact", quadrature=quadrature, threads=threads)
    asym = evaluate(spec, omega0, points, "asym", saddle_form=saddle_form, threads=threads)
    ref = evaluate(spec, omega0, points, "oracle", oracle_grid=oracle_grid, threads=threads)

    rows: List[Row] = []
    worst, scale = 0.0, 0.0
    for e, a, o in zip(exact, asym, ref):
        rows.extend([e, a, o, diff_row(e, a), diff_row(e, o)])
        if e.ok and o.ok:
            worst = max(worst, abs(e.value - o.value))
            scale = max(scale, abs(e.value))
    rel = worst / scale if scale > 0 else (0.0 if worst == 0 else math.inf)
    logger.info({"event": "sampling.compare", "omega0": omega0, "t": t, "max_rel_error": rel})
    return Comparison(rows=rows, max_rel_error=rel)
