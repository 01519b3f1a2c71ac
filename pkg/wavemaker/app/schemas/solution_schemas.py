from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import settings
from .model_schemas import Equation


class ContourKind(str, Enum):
    KDV_BOUNDARY_DPLUS = "KdVBoundaryDPlus"
    KDV_HALF_LINES = "KdVHalfLines"
    KDV_STEEPEST_DESCENT = "KdVSteepestDescent"
    BBM_CIRCLE = "BBMCircle"
    BBM_SADDLE_POLYGON = "BBMSaddlePolygon"

    @property
    def equation(self) -> Equation:
        return Equation.BBM if self.value.startswith("BBM") else Equation.KDV


class ContourSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ContourKind
    truncation_radius: Optional[float] = Field(
        None, gt=0, description="Ray length (half-lines, descent rays) or max Im k (boundary of D+); None = automatic"
    )
    node_count: int = Field(64, ge=4, description="Initial nodes; doubled until the tolerance is met")
    indentation_radius: Optional[float] = Field(
        None, gt=0, description="Boundary of D+ only: semicircular detours of this radius over real poles"
    )
    indent_points: Tuple[float, ...] = Field((), description="Real points to indent over")
    xi: Optional[float] = Field(None, ge=0, description="Ray velocity x/t selecting the saddle geometry")
    x: Optional[float] = Field(None, ge=0, description="Position used to truncate the boundary of D+")


class QuadratureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    contour: Optional[ContourSpec] = Field(None, description="None selects the strategy automatically")
    rel_tol: float = Field(default_factory=lambda: settings.QUAD_REL_TOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.QUAD_ABS_TOL, gt=0)
    removable_tol: float = Field(default_factory=lambda: settings.QUAD_REMOVABLE_TOL, gt=0)
    max_nodes: int = Field(default_factory=lambda: settings.QUAD_MAX_NODES, ge=64)

    def with_kind(self, kind: ContourKind) -> "QuadratureConfig":
        spec = self.contour or ContourSpec(kind=kind)
        return self.model_copy(update={"contour": spec.model_copy(update={"kind": kind})})


class Method(str, Enum):
    EXACT = "ExactQuadrature"
    ASYMPTOTIC = "Asymptotic"
    SERIES = "Series"
    ORACLE = "Oracle"
    MODULATION = "Modulation"


@dataclass(frozen=True)
class SolutionSample:
    x: float
    t: float
    value: float
    method: Method
    err_estimate: float = 0.0
    model: str = ""
    omega0: float = math.nan
    region: Optional[str] = None
    status: str = "ok"

    def __post_init__(self):
        if self.x < 0 or self.t < 0:
            raise ValueError("samples live on x >= 0, t >= 0")
        if self.err_estimate < 0 or math.isinf(self.err_estimate):
            raise ValueError("err_estimate must be finite and non-negative")

    @property
    def xi(self) -> float:
        return self.x / self.t if self.t > 0 else math.inf if self.x > 0 else 0.0


KDV_LABELS = ("I", "IIa", "IIb", "III", "IVa", "IVb", "IVc")
BBM_LABELS = ("I", "II", "III", "IVa", "IVb")


@dataclass(frozen=True)
class RegionLabel:
    equation: Equation
    label: str

    def __post_init__(self):
        allowed = KDV_LABELS if self.equation is Equation.KDV else BBM_LABELS
        if self.label not in allowed:
            raise ValueError(f"{self.label!r} is not a {self.equation.value} region")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SaddleSet:
    xi: float
    saddles: Tuple[complex, ...]
    second_derivatives: Tuple[complex, ...]


@dataclass(frozen=True)
class ModulationState:
    """Self-similar modulation fields at one ray x/t = xi.

    ``amplitude`` is the t-independent factor: the wave amplitude is
    ``amplitude`` on the plateau and ``amplitude / sqrt(t)`` on the fan.
    """

    equation: Equation
    omega0: float
    xi: float
    omega: float
    k: float
    amplitude: float
    branch: str
    phase: Callable[[float, float], float]
    theta0: float = 0.0

    def phase_at(self, x: float, t: float) -> float:
        return self.phase(x, t) + self.theta0

    def amplitude_at(self, t: float) -> float:
        if self.branch == "plateau":
            return self.amplitude
        return self.amplitude / math.sqrt(t)

    def wave_at(self, x: float, t: float) -> float:
        theta = self.phase_at(x, t)
        if self.branch == "plateau":
            return self.amplitude_at(t) * math.sin(theta)
        return self.amplitude_at(t) * math.cos(theta)


class BoundaryCondition(str, Enum):
    SPONGE = "Sponge"
    TRUNCATION = "Truncation"


class OracleGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    equation: Equation = Equation.KDV
    x_max: float = Field(default_factory=lambda: settings.ORACLE_X_MAX, gt=0)
    nx: int = Field(default_factory=lambda: settings.ORACLE_NX, ge=64)
    dt: Optional[float] = Field(None, gt=0, description="Radau or RK4 step; None picks a default step")
    bc_right: BoundaryCondition = BoundaryCondition.SPONGE
    sponge_width: Optional[float] = Field(None, ge=0, description="Default 0.15 * x_max")
    sponge_strength: float = Field(4.0, ge=0)
    integrator: str = Field("radau", pattern="^(radau|rk4|exponential)$")
    richardson: bool = True

    @model_validator(mode="after")
    def _check_sponge(self):
        if self.sponge_width is not None and self.sponge_width >= self.x_max:
            raise ValueError("sponge must be narrower than the domain")
        return self

    @property
    def h(self) -> float:
        return self.x_max / self.nx

    @property
    def sponge(self) -> float:
        if self.bc_right is BoundaryCondition.TRUNCATION:
            return 0.0
        return 0.15 * self.x_max if self.sponge_width is None else self.sponge_width
