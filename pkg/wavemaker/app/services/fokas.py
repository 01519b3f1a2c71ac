"""Exact solutions of the KdV and BBM wavemaker problems by contour quadrature.

All evaluators reduce to one of two formulas:

* kernel form: (1/2 pi i) times the integral of the combined integrand
  g(k) e^{ikx} W'(k) (e^{int} - e^{-iWt}) / (W + n omega0), with the removable
  singularity handled by ``psi_kernel``. Used on the boundary of D+ (KdV) and
  on the circle |k - i| = sqrt(2) (BBM, plus the e^{-x} g0(t) correction).
* residue form: residues at the roots enclosed by a contour, minus the contour
  integral of the e^{-iWt} part alone. Used on the steepest-descent contours,
  the KdV half-lines and the BBM saddle polygon.

g(k) = 1 for u and g(k) = ik for u_x.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import PreconditionViolation, StrategyDomain
from ..schemas.model_schemas import Equation, FourierBoundary, ModelCoefficients
from ..schemas.solution_schemas import ContourKind, ContourSpec, Method, QuadratureConfig, SolutionSample
from . import contours
from .contours import Arc, Contour, HyperbolaBranch, LineSegment, polygon
from .dispersion import characteristic_roots, group_velocity, omega

logger = logging.getLogger("wavemaker")

ON_PATH_TOL = 1e-8
SUBTRACT_RADIUS = 0.1
RAY_DROP = 46.0
MAX_EXPONENT = 0.9 * math.log(np.finfo(float).max)
BBM_CIRCLE_CENTER = 1j
BBM_CIRCLE_RADIUS = math.sqrt(2.0)
BBM_CIRCLE_MAX_X = 20.0
BBM_CIRCLE_MIN_NODES = 256


def psi_kernel(z, removable_tol: float):
    """(1 - e^{-iz}) / z with a Taylor branch for |z| < removable_tol."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < removable_tol
    out = np.empty_like(z)
    w = -1j * z[small]
    out[small] = 1j * (1.0 + w / 2.0 * (1.0 + w / 3.0 * (1.0 + w / 4.0 * (1.0 + w / 5.0))))
    zz = z[~small]
    out[~small] = -np.expm1(-1j * zz) / zz
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class _Problem:
    equation: Equation
    coeffs: ModelCoefficients
    omega0: float
    harmonics: Tuple[Tuple[int, complex], ...]
    x: float
    t: float
    derivative: int

    def weight(self, k):
        return (1j * k) ** self.derivative

    def exponent(self, k):
        return 1j * k * self.x - 1j * omega(self.coeffs, k) * self.t

    def boundary_value(self) -> complex:
        return sum(a * cmath.exp(1j * n * self.omega0 * self.t) for n, a in self.harmonics)


def _problem(equation: Equation, x: float, t: float, omega0: float, derivative: int) -> _Problem:
    if x < 0 or t < 0:
        raise PreconditionViolation("x and t must be non-negative", x=x, t=t)
    if omega0 <= 0:
        raise PreconditionViolation("omega0 must be positive", omega0=omega0)
    coeffs = ModelCoefficients.kdv() if equation is Equation.KDV else ModelCoefficients.bbm()
    boundary = FourierBoundary.sinusoid(omega0)
    return _Problem(
        equation=equation,
        coeffs=coeffs,
        omega0=omega0,
        harmonics=tuple(sorted(boundary.coefficients.items())),
        x=float(x),
        t=float(t),
        derivative=derivative,
    )


# ---------------------------------------------------------------- geometry


def _ray_length(problem: _Problem, vertex: complex, direction: complex, ref: float) -> float:
    s = 0.5
    for _ in range(60):
        if float(np.real(problem.exponent(vertex + s * direction))) <= ref - RAY_DROP:
            return s
        s *= 2.0
    raise StrategyDomain("integrand does not decay along the ray", vertex=vertex)


def _with_rays(problem: _Problem, core: List[complex], left_dir: complex, right_dir: complex, fixed: Optional[float]):
    ref = max(float(np.real(problem.exponent(v))) for v in core)
    left = fixed or _ray_length(problem, core[0], left_dir, ref)
    right = fixed or _ray_length(problem, core[-1], right_dir, ref)
    return [core[0] + left * left_dir] + core + [core[-1] + right * right_dir]


def kdv_descent_contour(problem: _Problem, truncation: Optional[float] = None) -> Contour:
    xi = problem.x / problem.t
    if xi < 1.0:
        rho = math.sqrt((1.0 - xi) / 3.0)
        core = [complex(-rho), complex(0.0, -rho), complex(rho)]
        pts = _with_rays(problem, core, cmath.exp(0.75j * math.pi), cmath.exp(0.25j * math.pi), truncation)
    else:
        qs = math.sqrt((xi - 1.0) / 3.0)
        half = max(qs, 0.2)
        core = [complex(-half, qs), complex(0.0, qs), complex(half, qs)]
        pts = _with_rays(problem, core, cmath.exp(5j * math.pi / 6.0), cmath.exp(1j * math.pi / 6.0), truncation)
    return polygon(pts)


def kdv_half_lines(problem: _Problem, truncation: Optional[float] = None) -> Contour:
    apex = -1j
    ref = max(float(np.real(problem.exponent(apex))), 0.0)
    d1 = cmath.exp(2j * math.pi / 3.0)
    d2 = cmath.exp(1j * math.pi / 3.0)
    r1 = truncation or _ray_length(problem, apex, d1, ref)
    r2 = truncation or _ray_length(problem, apex, d2, ref)
    return polygon([apex + r1 * d1, apex, apex + r2 * d2])


def kdv_boundary_dplus(q_max: float, indent: Tuple[float, ...] = (), radius: Optional[float] = None) -> Contour:
    edge = 1.0 / math.sqrt(3.0)
    pieces: list = [HyperbolaBranch(side=-1, q0=q_max, q1=0.0)]
    cursor = -edge
    for p in sorted(indent):
        r = radius or 0.05
        if not (-edge + r < p < edge - r):
            continue
        pieces.append(LineSegment(complex(cursor), complex(p - r)))
        pieces.append(Arc(center=complex(p), radius=r, theta0=math.pi, theta1=0.0))
        cursor = p + r
    pieces.append(LineSegment(complex(cursor), complex(edge)))
    pieces.append(HyperbolaBranch(side=1, q0=0.0, q1=q_max))
    return Contour(pieces=tuple(pieces))


def bbm_circle() -> Contour:
    return Contour(pieces=(Arc(BBM_CIRCLE_CENTER, BBM_CIRCLE_RADIUS, 0.0, 2.0 * math.pi),), closed=True)


def _bbm_saddle_xi(xi: float) -> Tuple[float, float]:
    """(rho1^2, Xi) for the positive BBM saddle pair."""
    big = math.sqrt(8.0 * xi + 1.0)
    return (3.0 - big) / (1.0 + big), big


def bbm_saddle_polygon(problem: _Problem) -> Contour:
    xi = problem.x / problem.t
    rho_sq, _ = _bbm_saddle_xi(xi)
    top = 3.0
    if xi < 1.0:
        rho = math.sqrt(rho_sq)
        depth = min(rho, 0.6)
        # 45-degree line from rho out to |k| = 1.3
        u = (-rho + math.sqrt(rho * rho - 2.0 * (rho * rho - 1.69))) / 2.0
        corner = complex(rho + u, u)
        vertices = [
            complex(-rho),
            complex(-rho + depth, -depth),
            complex(rho - depth, -depth),
            complex(rho),
            corner,
            complex(corner.real, top),
            complex(-corner.real, top),
            complex(-corner.real, corner.imag),
        ]
    else:
        q1 = math.sqrt(-rho_sq)
        vertices = [
            complex(-1.5, q1),
            complex(0.0, q1),
            complex(1.5, q1),
            complex(1.5, top),
            complex(-1.5, top),
        ]
    return polygon(vertices, closed=True)


# ---------------------------------------------------------------- evaluators


def _kernel_form(problem: _Problem, contour: Contour, cfg: QuadratureConfig, start_nodes: int):
    coeffs, t, x = problem.coeffs, problem.t, problem.x

    def f(k):
        w = omega(coeffs, k)
        dw = group_velocity(coeffs, k)
        base = problem.weight(k) * np.exp(1j * k * x) * dw * t
        total = np.zeros_like(k, dtype=complex)
        for n, a in problem.harmonics:
            shift = n * problem.omega0
            total += a * np.exp(1j * shift * t) * psi_kernel((w + shift) * t, cfg.removable_tol)
        return base * total

    res = contours.integrate(
        contour, f, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_nodes=cfg.max_nodes, start_nodes=start_nodes
    )
    return res.value / (2j * math.pi), res.err_estimate / (2.0 * math.pi), res.nodes


def _residue_form(problem: _Problem, contour: Contour, cfg: QuadratureConfig, start_nodes: int):
    coeffs = problem.coeffs
    residues = 0j
    subtract: list[tuple[complex, complex]] = []
    for n, a in problem.harmonics:
        for root in characteristic_roots(coeffs, n, problem.omega0).roots:
            r = root.value
            dist = contour.distance_to(r)
            if dist < ON_PATH_TOL:
                raise StrategyDomain("characteristic root on the contour", n=n, root=[r.real, r.imag])
            winding = contour.winding_number(r)
            if not winding and dist >= SUBTRACT_RADIUS:
                continue
            e_r = complex(problem.exponent(np.asarray(r)))
            if e_r.real > MAX_EXPONENT:
                raise StrategyDomain("residue term overflows", n=n, root=[r.real, r.imag])
            strength = a * root.multiplicity * problem.weight(r) * cmath.exp(e_r)
            if winding:
                residues += winding * strength
            if dist < SUBTRACT_RADIUS:
                subtract.append((r, strength))

    def f(k):
        w = omega(coeffs, k)
        dw = group_velocity(coeffs, k)
        body = problem.weight(k) * np.exp(problem.exponent(k)) * dw
        total = np.zeros_like(k, dtype=complex)
        for n, a in problem.harmonics:
            total += a / (w + n * problem.omega0)
        total = body * total
        for r, strength in subtract:
            total -= strength / (k - r)
        return total

    res = contours.integrate(
        contour, f, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_nodes=cfg.max_nodes, start_nodes=start_nodes
    )
    integral = res.value + sum(strength * contour.log_integral(r) for r, strength in subtract)
    return residues - integral / (2j * math.pi), res.err_estimate / (2.0 * math.pi), res.nodes


def _strategy_a(problem: _Problem, cfg: QuadratureConfig, spec: ContourSpec):
    if problem.x == 0.0:
        raise StrategyDomain("the boundary of D+ needs x > 0 for convergence")
    q_max = spec.truncation_radius or (math.log(1.0 / cfg.abs_tol) + 5.0) / problem.x
    contour = kdv_boundary_dplus(q_max, spec.indent_points, spec.indentation_radius)
    return _kernel_form(problem, contour, cfg, spec.node_count)


def _run_kdv(problem: _Problem, cfg: QuadratureConfig):
    spec = cfg.contour or ContourSpec(kind=ContourKind.KDV_STEEPEST_DESCENT)
    kind = spec.kind
    if kind.equation is not Equation.KDV:
        raise StrategyDomain(f"{kind.value} is not a KdV contour")
    if kind is ContourKind.KDV_BOUNDARY_DPLUS:
        return _strategy_a(problem, cfg, spec)
    if kind is ContourKind.KDV_HALF_LINES:
        if problem.x > MAX_EXPONENT:
            logger.info({"event": "fokas.fallback", "from": kind.value, "to": "KdVSteepestDescent", "x": problem.x})
            return _residue_form(problem, kdv_descent_contour(problem), cfg, spec.node_count)
        return _residue_form(problem, kdv_half_lines(problem, spec.truncation_radius), cfg, spec.node_count)
    try:
        return _residue_form(problem, kdv_descent_contour(problem, spec.truncation_radius), cfg, spec.node_count)
    except StrategyDomain as exc:
        if cfg.contour is not None or problem.x > MAX_EXPONENT:
            raise
        logger.info({"event": "fokas.fallback", "from": kind.value, "to": "KdVHalfLines", "reason": str(exc)})
        return _residue_form(problem, kdv_half_lines(problem), cfg, spec.node_count)


def _bbm_circle(problem: _Problem, cfg: QuadratureConfig, node_count: int):
    value, err, nodes = _kernel_form(problem, bbm_circle(), cfg, max(node_count, BBM_CIRCLE_MIN_NODES))
    sign = -1.0 if problem.derivative % 2 else 1.0
    return value + sign * math.exp(-problem.x) * problem.boundary_value(), err, nodes


def _run_bbm(problem: _Problem, cfg: QuadratureConfig):
    if cfg.contour is not None:
        spec = cfg.contour
    elif problem.x <= BBM_CIRCLE_MAX_X:
        spec = ContourSpec(kind=ContourKind.BBM_CIRCLE)
    else:
        spec = ContourSpec(kind=ContourKind.BBM_SADDLE_POLYGON)
    if spec.kind is ContourKind.BBM_CIRCLE:
        return _bbm_circle(problem, cfg, spec.node_count)
    if spec.kind is not ContourKind.BBM_SADDLE_POLYGON:
        raise StrategyDomain(f"{spec.kind.value} is not a BBM contour")
    try:
        return _residue_form(problem, bbm_saddle_polygon(problem), cfg, spec.node_count)
    except StrategyDomain as exc:
        if cfg.contour is not None:
            raise
        logger.info({"event": "fokas.fallback", "from": spec.kind.value, "to": "BBMCircle", "reason": str(exc)})
        return _bbm_circle(problem, cfg, spec.node_count)


def exact_value(
    equation: Equation,
    x: float,
    t: float,
    omega0: float,
    cfg: Optional[QuadratureConfig] = None,
    *,
    derivative: int = 0,
) -> Tuple[complex, float]:
    """Complex value (before taking the real part) and quadrature error estimate."""
    cfg = cfg or QuadratureConfig()
    problem = _problem(equation, x, t, omega0, derivative)
    if problem.t == 0.0:
        return 0j, 0.0
    runner = _run_kdv if equation is Equation.KDV else _run_bbm
    value, err, _ = runner(problem, cfg)
    return complex(value), float(err)


def exact_sample(
    equation: Equation, x: float, t: float, omega0: float, cfg: Optional[QuadratureConfig] = None, derivative: int = 0
) -> SolutionSample:
    value, err = exact_value(equation, x, t, omega0, cfg, derivative=derivative)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)) + err:
        logger.warning({"event": "fokas.imaginary_residue", "x": x, "t": t, "imag": value.imag})
    return SolutionSample(
        x=float(x),
        t=float(t),
        value=float(value.real),
        method=Method.EXACT,
        err_estimate=err,
        model=equation.value,
        omega0=float(omega0),
    )


def kdv_exact(x: float, t: float, omega0: float, cfg: Optional[QuadratureConfig] = None) -> SolutionSample:
    return exact_sample(Equation.KDV, x, t, omega0, cfg, 0)


def kdv_neumann_exact(x: float, t: float, omega0: float, cfg: Optional[QuadratureConfig] = None) -> SolutionSample:
    return exact_sample(Equation.KDV, x, t, omega0, cfg, 1)


def bbm_exact(x: float, t: float, omega0: float, cfg: Optional[QuadratureConfig] = None) -> SolutionSample:
    return exact_sample(Equation.BBM, x, t, omega0, cfg, 0)


def bbm_neumann_exact(x: float, t: float, omega0: float, cfg: Optional[QuadratureConfig] = None) -> SolutionSample:
    return exact_sample(Equation.BBM, x, t, omega0, cfg, 1)


@dataclass(frozen=True)
class ContourNode:
    k: complex
    dk: complex


def contour_points(spec: ContourSpec) -> List[ContourNode]:
    """Quadrature nodes and weights for a contour description."""
    kind, n = spec.kind, spec.node_count
    if kind is ContourKind.BBM_CIRCLE:
        k, dk = contours.trapezoid_nodes(bbm_circle().pieces[0], n)
        return [ContourNode(complex(a), complex(b)) for a, b in zip(k, dk)]

    if kind is ContourKind.KDV_BOUNDARY_DPLUS:
        if spec.truncation_radius is None and not spec.x:
            raise ValueError("boundary of D+ needs truncation_radius or x")
        q_max = spec.truncation_radius or (math.log(1.0 / QuadratureConfig().abs_tol) + 5.0) / spec.x
        contour = kdv_boundary_dplus(q_max, spec.indent_points, spec.indentation_radius)
    elif kind is ContourKind.KDV_HALF_LINES:
        r = spec.truncation_radius or 10.0
        contour = polygon([-1j + r * cmath.exp(2j * math.pi / 3.0), -1j, -1j + r * cmath.exp(1j * math.pi / 3.0)])
    else:
        xi = spec.xi if spec.xi is not None else 0.5
        problem = _problem(kind.equation, xi, 1.0, 0.1, 0)
        if kind is ContourKind.KDV_STEEPEST_DESCENT:
            contour = kdv_descent_contour(problem, spec.truncation_radius or 10.0)
        else:
            contour = bbm_saddle_polygon(problem)

    pieces = [p for p in contour.pieces if p.length > 0.0]
    per_piece = max(1, n // len(pieces))
    nodes: List[ContourNode] = []
    for piece in pieces:
        x, w = np.polynomial.legendre.leggauss(per_piece)
        u = 0.5 * (x + 1.0)
        dk = 0.5 * w * piece.derivative(u)
        nodes.extend(ContourNode(complex(a), complex(b)) for a, b in zip(piece.point(u), dk))
    return nodes
