from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from .model_schemas import Equation, ModelCoefficients
from .solution_schemas import OracleGrid, QuadratureConfig


class StdResp(BaseModel):
    code: int
    message: str = "ok"
    data: dict | list | None = None


class Axis(BaseModel):
    """Either explicit ``values`` or an inclusive ``start:stop:num`` grid."""

    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: int = Field(1, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.values is None and (self.start is None or (self.num > 1 and self.stop is None)):
            raise ValueError("axis needs values or start/stop/num")
        return self

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """'0:10:11' -> linspace(0, 10, 11); '1,2,5' -> explicit values."""
        text = text.strip()
        if not text:
            return cls(values=[])
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError(f"bad axis {text!r}, expected start:stop:num")
            return cls(start=float(parts[0]), stop=float(parts[1]), num=int(parts[2]))
        return cls(values=[float(v) for v in text.split(",")])

    def grid(self) -> List[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        if self.num == 1:
            return [float(self.start)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class SampleGrid(BaseModel):
    """Sample points. With ``xi`` the points are x = xi * t for every t."""

    x: Optional[Axis] = None
    t: Optional[Axis] = None
    xi: Optional[Axis] = None

    def points(self) -> List[Tuple[float, float]]:
        ts = self.t.grid() if self.t is not None else []
        if self.xi is not None:
            return [(xi * t, t) for t in ts for xi in self.xi.grid()]
        xs = self.x.grid() if self.x is not None else []
        return [(x, t) for t in ts for x in xs]


class ModelSpec(BaseModel):
    model: Literal["kdv", "bbm", "general"] = "kdv"
    coefficients: Optional[List[float]] = Field(
        None, description="A_{-2}, A_0, A_1, A_2, A_3 for the general model"
    )

    @field_validator("coefficients")
    @classmethod
    def _five(cls, v):
        if v is not None and len(v) != 5:
            raise ValueError("coefficients must list A_{-2}, A_0, A_1, A_2, A_3")
        return v

    @model_validator(mode="after")
    def _general_needs_coefficients(self):
        if self.model == "general" and self.coefficients is None:
            raise ValueError("the general model needs five coefficients")
        if self.model == "general":
            try:
                self.coeffs()
            except ValueError as exc:
                raise ValueError(f"invalid coefficients: {exc}")
        return self

    @property
    def equation(self) -> Optional[Equation]:
        return None if self.model == "general" else Equation(self.model)

    def coeffs(self) -> ModelCoefficients:
        if self.model == "kdv":
            return ModelCoefficients.kdv()
        if self.model == "bbm":
            return ModelCoefficients.bbm()
        return ModelCoefficients.from_sequence(self.coefficients)


class CompareCase(BaseModel):
    model: Literal["kdv", "bbm"]
    omega0: float = Field(..., gt=0)


class RunConfig(ModelSpec):
    command: Optional[str] = None
    omega0: Optional[float] = None
    n: int = -1
    method: str = Field("exact", pattern="^(exact|asym|series|oracle|modulation|all)$")
    saddle_form: str = Field("printed", pattern="^(printed|steepest_descent)$")
    samples: SampleGrid = Field(default_factory=SampleGrid)
    t_final: Optional[float] = Field(None, ge=0)
    omega0_range: Optional[Tuple[float, float]] = None
    xi_range: Optional[Tuple[float, float]] = None
    resolution: int = Field(100, ge=2)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    oracle: Optional[OracleGrid] = None
    threads: Optional[int] = Field(None, ge=1)
    max_rel_error: Optional[float] = Field(None, gt=0)
    cases: List[CompareCase] = Field(default_factory=list, description="compare: (model, omega0) cases replacing model and omega0")
    output: Optional[str] = None
    format: str = Field("csv", pattern="^(csv|json)$")

    def oracle_grid(self) -> OracleGrid:
        grid = self.oracle or OracleGrid()
        if self.equation is not None:
            grid = grid.model_copy(update={"equation": self.equation})
        return grid

    def expand_cases(self) -> List["RunConfig"]:
        if not self.cases:
            return [self]
        return [self.model_copy(update={"model": c.model, "omega0": c.omega0, "coefficients": None, "cases": []}) for c in self.cases]


def load_run_file(path: str | Path) -> Dict[str, Any]:
    """YAML or JSON run file as a plain dict (JSON parses as YAML)."""
    with Path(path).open("r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"run file {path} must hold a mapping")
    return data


def merge_config(file_values: Dict[str, Any], overrides: Dict[str, Any]) -> RunConfig:
    """Flags win key by key; ``None`` means the flag was not given."""
    merged = dict(file_values)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **{k: v for k, v in value.items() if v is not None}}
        else:
            merged[key] = value
    return RunConfig.model_validate(merged)


# ----- HTTP request bodies -----


class RootsRequest(ModelSpec):
    omega0: float = Field(..., description="Forcing frequency")
    n: int = Field(-1, description="Harmonic index")


class DNMapRequest(ModelSpec):
    omega0: float = Field(..., gt=0)
    harmonics: Optional[Dict[int, Tuple[float, float]]] = Field(
        None, description="n -> (Re a_n, Im a_n); defaults to the sinusoid sin(-omega0 t)"
    )
    t: List[float] = Field(default_factory=list, description="Times at which to sum the boundary series")
    j: int = Field(1, ge=0, description="Derivative order of the boundary series")


class EvaluateRequest(ModelSpec):
    omega0: float = Field(..., gt=0)
    method: str = Field("exact", pattern="^(exact|asym|series|modulation|all)$", description="all adds exact-minus-other difference rows only")
    saddle_form: str = Field("printed", pattern="^(printed|steepest_descent)$")
    points: List[Tuple[float, float]] = Field(default_factory=list, description="(x, t) pairs")
    samples: Optional[SampleGrid] = None
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)

    def all_points(self) -> List[Tuple[float, float]]:
        extra = self.samples.points() if self.samples is not None else []
        return list(self.points) + extra


class PhaseDiagramRequest(BaseModel):
    model: Literal["kdv", "bbm"] = "kdv"
    omega0_range: Tuple[float, float] = (0.05, 0.8)
    xi_range: Tuple[float, float] = (0.0, 2.0)
    resolution: int = Field(50, ge=2, le=400)
