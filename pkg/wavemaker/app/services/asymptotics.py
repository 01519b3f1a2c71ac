"""Long-time asymptotics of the sinusoidal wavemaker problems along rays x/t = xi.

Region classification follows the pole/saddle geometry of the two phase
diagrams; every region has a closed-form leading-order solution. With
``saddle_form="printed"`` the saddle terms are the closed forms of the region
analysis; ``"steepest_descent"`` evaluates the Laplace contribution of the
saddles numerically from the dispersion relation instead (the two agree in
the exponentially decaying regions and differ by sqrt(2) and a -pi/4 phase in
the algebraically decaying ones).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import OnRegionBoundary, PreconditionViolation
from ..schemas.model_schemas import Equation, ModelCoefficients
from ..schemas.solution_schemas import Method, RegionLabel, SaddleSet, SolutionSample
from .dispersion import (
    bbm_labeled_poles,
    group_velocity,
    kdv_critical_frequency,
    kdv_labeled_poles,
    omega,
    omega_second_derivative,
)

logger = logging.getLogger("wavemaker")

REGION_TOL = 1e-6
CURVE_TOL = 1e-10
BBM_CRITICAL = 0.5
SADDLE_FORMS = ("printed", "steepest_descent")

_KDV = ModelCoefficients.kdv()
_BBM = ModelCoefficients.bbm()


def _coeffs(equation: Equation) -> ModelCoefficients:
    return _KDV if equation is Equation.KDV else _BBM


def _check_xi(xi: float) -> None:
    if xi < 0 or not math.isfinite(xi):
        raise PreconditionViolation("xi must be finite and non-negative", xi=xi)


def _check_omega0(omega0: float) -> None:
    if omega0 <= 0 or not math.isfinite(omega0):
        raise PreconditionViolation("omega0 must be positive", omega0=omega0)


# ---------------------------------------------------------------- saddles


def _phase_second_derivative(equation: Equation, rho: complex) -> complex:
    return complex(-1j * omega_second_derivative(_coeffs(equation), rho))


def kdv_saddles(xi: float) -> SaddleSet:
    """Saddles +-sqrt((1 - xi)/3) of phi(k) = i k xi - i (k - k^3)."""
    _check_xi(xi)
    rho = cmath.sqrt((1.0 - xi) / 3.0)
    if rho.imag == 0.0:
        rho = complex(rho.real, 0.0)
    saddles = (rho, -rho)
    return SaddleSet(
        xi=xi,
        saddles=saddles,
        second_derivatives=tuple(_phase_second_derivative(Equation.KDV, r) for r in saddles),
    )


def _bbm_big_xi(xi: float) -> float:
    return math.sqrt(8.0 * xi + 1.0)


def bbm_saddles(xi: float) -> SaddleSet:
    """Saddles rho_1..rho_4 of phi(k) = i k xi - i k / (1 + k^2)."""
    _check_xi(xi)
    if xi == 0.0:
        raise PreconditionViolation("BBM saddles need xi > 0")
    big = _bbm_big_xi(xi)
    inner = cmath.sqrt((-2.0 * xi - 1.0 + big) / (2.0 * xi))
    outer = cmath.sqrt((-2.0 * xi - 1.0 - big) / (2.0 * xi))
    saddles = (inner, -inner, outer, -outer)
    return SaddleSet(
        xi=xi,
        saddles=saddles,
        second_derivatives=tuple(_phase_second_derivative(Equation.BBM, r) for r in saddles),
    )


def saddle_residual(equation: Equation, saddles: SaddleSet) -> float:
    """Largest |phi'(rho)| / (1 + |rho|)^2 over the saddle set."""
    coeffs = _coeffs(equation)
    out = 0.0
    for rho in saddles.saddles:
        dphi = 1j * saddles.xi - 1j * complex(group_velocity(coeffs, complex(rho)))
        out = max(out, abs(dphi) / (1.0 + abs(rho)) ** 2)
    return out


# ---------------------------------------------------------------- region geometry


def _kdv_pole(omega0: float) -> complex:
    """k3: the radiating pole of harmonic n = -1 (real below omega_cr, Im > 0 above)."""
    return kdv_labeled_poles(omega0)[2]


def kdv_group_velocity_curve(omega0: float) -> float:
    """xi = omega'(k3) = 1 - 3 k3^2, subcritical frequencies only."""
    _check_omega0(omega0)
    if omega0 >= kdv_critical_frequency():
        raise PreconditionViolation("group-velocity curve is defined below omega_cr", omega0=omega0)
    k3 = _kdv_pole(omega0).real
    return 1.0 - 3.0 * k3 * k3


def _kdv_crossing_p1(xi: float) -> float:
    """Real part of the crossing of the steepest path through rho_1 with the boundary of D+."""
    if xi >= 1.0:
        raise PreconditionViolation("defined for xi < 1", xi=xi)
    phi = math.atan(3.0 * math.sqrt(xi * (4.0 - 2.0 * xi + xi * xi)) / (2.0 * math.sqrt(2.0) * (xi - 1.0) * math.sqrt(1.0 - xi)))
    return math.sqrt((2.0 + xi) / 6.0) * math.cos(phi / 3.0)


def kdv_l1(xi: float, omega0: float) -> float:
    """Splits Regions IIb (l1 < 0) and III (l1 > 0) for omega0 > omega_cr, xi < 1."""
    return _kdv_pole(omega0).real - _kdv_crossing_p1(xi)


def kdv_l2(xi: float, omega0: float) -> float:
    """Splits Regions IVb (l2 < 0) and IVc (l2 > 0) for omega0 > omega_cr, xi > 1."""
    return _kdv_pole(omega0).real - math.sqrt(2.0 + xi) / (2.0 * math.sqrt(2.0))


def bbm_group_velocity(omega0: float) -> float:
    _check_omega0(omega0)
    if omega0 >= BBM_CRITICAL:
        raise PreconditionViolation("group velocity of the wavemaker wave needs omega0 < 1/2", omega0=omega0)
    s = math.sqrt(1.0 - 4.0 * omega0 * omega0)
    return 0.5 * (1.0 - 4.0 * omega0 * omega0 + s)


def bbm_saddle_phase(xi: float) -> float:
    """G(xi) = -Im phi(rho_1) for 0 < xi < 1."""
    if xi == 0.0:
        return 0.5
    big = _bbm_big_xi(xi)
    return 2.0 * math.sqrt(2.0 * xi) * max(big - 1.0 - 2.0 * xi, 0.0) ** 1.5 / (big - 1.0) ** 2


def bbm_l3(xi: float, omega0: float) -> float:
    """l3 = Im phi(k1) - Im phi(rho_1); the pole k1 is enclosed (Region III) when l3 < 0."""
    return xi / (2.0 * omega0) - omega0 + bbm_saddle_phase(xi)


def _guard(value: float, name: str, **context) -> None:
    if abs(value) <= REGION_TOL:
        raise OnRegionBoundary(f"on the {name} boundary", **context)


def kdv_region(omega0: float, xi: float) -> RegionLabel:
    _check_omega0(omega0)
    _check_xi(xi)
    ctx = {"omega0": omega0, "xi": xi}
    w_cr = kdv_critical_frequency()
    _guard(omega0 - w_cr, "omega_cr", **ctx)
    _guard(xi - 1.0, "xi = 1", **ctx)
    sub = omega0 < w_cr
    if xi > 1.0:
        if sub:
            return RegionLabel(Equation.KDV, "IVa")
        l2 = kdv_l2(xi, omega0)
        _guard(l2, "l2", **ctx)
        return RegionLabel(Equation.KDV, "IVc" if l2 > 0 else "IVb")
    if sub:
        cg = kdv_group_velocity_curve(omega0)
        _guard(xi - cg, "group velocity", **ctx)
        return RegionLabel(Equation.KDV, "I" if xi < cg else "IIa")
    l1 = kdv_l1(xi, omega0)
    _guard(l1, "l1", **ctx)
    return RegionLabel(Equation.KDV, "III" if l1 > 0 else "IIb")


def bbm_region(omega0: float, xi: float) -> RegionLabel:
    _check_omega0(omega0)
    _check_xi(xi)
    ctx = {"omega0": omega0, "xi": xi}
    _guard(omega0 - BBM_CRITICAL, "omega_cr", **ctx)
    _guard(xi - 1.0, "xi = 1", **ctx)
    sub = omega0 < BBM_CRITICAL
    if xi > 1.0:
        if omega0 > 1.0 / math.sqrt(2.0):
            _guard(xi - 2.0 * omega0 * omega0, "xi = 2 omega0^2", **ctx)
            if xi < 2.0 * omega0 * omega0:
                return RegionLabel(Equation.BBM, "IVb")
        return RegionLabel(Equation.BBM, "IVa")
    if sub:
        cg = bbm_group_velocity(omega0)
        _guard(xi - cg, "group velocity", **ctx)
        return RegionLabel(Equation.BBM, "I" if xi < cg else "II")
    l3 = bbm_l3(xi, omega0)
    _guard(l3, "l3", **ctx)
    return RegionLabel(Equation.BBM, "III" if l3 < 0 else "II")


def region(equation: Equation, omega0: float, xi: float) -> RegionLabel:
    return kdv_region(omega0, xi) if equation is Equation.KDV else bbm_region(omega0, xi)


# ---------------------------------------------------------------- leading-order terms


def _active_saddles(equation: Equation, xi: float) -> Tuple[complex, ...]:
    if abs(xi - 1.0) <= REGION_TOL:
        raise OnRegionBoundary("saddles coalesce at xi = 1", xi=xi)
    if equation is Equation.KDV:
        rho = kdv_saddles(xi).saddles[0]
        return (rho, -rho) if xi < 1.0 else (rho,)
    if xi == 0.0:
        return (complex(1.0), complex(-1.0))
    rho = bbm_saddles(xi).saddles[0]
    return (rho, -rho) if xi < 1.0 else (rho,)


def saddle_contribution(equation: Equation, omega0: float, x: float, t: float, derivative: int = 0) -> float:
    """Laplace-method value of the contour integral at the saddles it passes.

    (omega0 / 2 pi) sum h(rho) e^{t phi(rho)} d sqrt(2 pi / (t |phi''|)) with
    h = W' / (W^2 - omega0^2) and d the unit path direction at rho.
    """
    _check_omega0(omega0)
    if t <= 0:
        raise PreconditionViolation("t must be positive", t=t)
    coeffs = _coeffs(equation)
    total = 0j
    for rho in _active_saddles(equation, x / t):
        w = complex(omega(coeffs, rho))
        dw = complex(group_velocity(coeffs, rho))
        d2 = _phase_second_derivative(equation, rho)
        h = dw / (w * w - omega0 * omega0)
        direction = cmath.sqrt(-abs(d2) / d2)
        if direction.real < 0:
            direction = -direction
        exponent = 1j * rho * x - 1j * w * t
        weight = (1j * rho) ** derivative
        total += weight * h * cmath.exp(exponent) * direction * math.sqrt(2.0 * math.pi / (t * abs(d2)))
    return float((omega0 / (2.0 * math.pi) * total).real)


def kdv_pole_term(omega0: float, x: float, t: float) -> float:
    k3 = _kdv_pole(omega0)
    return math.exp(-k3.imag * x) * math.sin(k3.real * x - omega0 * t)


def kdv_algebraic_term(omega0: float, xi: float, t: float) -> float:
    """Saddle term of Regions II and III as printed."""
    if xi == 0.0:
        return 0.0
    s = math.sqrt(3.0 * (1.0 - xi))
    den = -(xi + 3.0) * xi * xi - 27.0 * omega0 * omega0 + 4.0
    phase = 2.0 / 9.0 * t * s * (1.0 - xi)
    return 27.0 * xi * omega0 * math.cos(phase) / den * math.sqrt(1.0 / (2.0 * math.pi * t * s))


def kdv_decay_rate(xi: float) -> float:
    return 2.0 / 9.0 * math.sqrt(3.0 * xi - 3.0) * (xi - 1.0)


def kdv_exponential_term(omega0: float, xi: float, t: float) -> float:
    """Saddle term of Region IV as printed."""
    s = math.sqrt(3.0 * (xi - 1.0))
    den = -2.0 * (xi + 3.0) * xi * xi - 54.0 * omega0 * omega0 + 8.0
    return 27.0 * xi * omega0 * math.exp(-kdv_decay_rate(xi) * t) / den * math.sqrt(1.0 / (t * math.pi * s))


def bbm_pole_term(omega0: float, x: float, t: float) -> float:
    k = bbm_labeled_poles(omega0)[1] if omega0 < BBM_CRITICAL else bbm_labeled_poles(omega0)[0]
    k = complex(k)
    return math.exp(-k.imag * x) * math.sin(k.real * x - omega0 * t)


def bbm_algebraic_factor(omega0: float, xi: float) -> float:
    """t-independent amplitude of the printed saddle term u_s1 (times sqrt(t))."""
    if xi == 0.0:
        return 0.0
    big = _bbm_big_xi(xi)
    num = omega0 * (-4.0 * xi + big - 1.0) * xi ** 0.25 * (big - 1.0) ** 1.5
    den = (
        2.0 ** 1.25
        * math.sqrt(math.pi)
        * ((4.0 * xi - big + 1.0) * omega0 * omega0 + xi * (2.0 * xi - big + 1.0))
        * math.sqrt(big * big - big)
        * math.sqrt(max(-2.0 * xi - 1.0 + big, 0.0))
    )
    if den == 0.0:
        return math.inf
    return num / den


def bbm_algebraic_term(omega0: float, xi: float, t: float) -> float:
    """u_s1 as printed."""
    if xi == 0.0:
        return 0.0
    return bbm_algebraic_factor(omega0, xi) * math.cos(bbm_saddle_phase(xi) * t) / math.sqrt(t)


def bbm_decay_rate(xi: float) -> float:
    """alpha(xi) = -phi(rho_1) for xi > 1."""
    big = _bbm_big_xi(xi)
    return math.sqrt(2.0 * xi * xi - xi * big + xi) * (big - 3.0) / (math.sqrt(2.0) * (big - 1.0))


def bbm_exponential_term(omega0: float, xi: float, t: float) -> float:
    """u_s2 as printed."""
    big = _bbm_big_xi(xi)
    w2 = omega0 * omega0
    inner = math.sqrt(xi) * (big - 1.0) ** 3 / (t * math.sqrt(2.0 * xi - big + 1.0) * (8.0 * xi - big + 1.0))
    num = omega0 * math.sqrt(inner) * (4.0 * xi + big + 8.0 * w2 - 1.0) * math.exp(-bbm_decay_rate(xi) * t)
    den = 4.0 * 2.0 ** 0.75 * math.sqrt(math.pi) * ((4.0 * xi - 1.0) * w2 + (xi - 1.0) * xi + 4.0 * w2 * w2)
    return -num / den


_KDV_TERMS = {
    "I": ("pole",),
    "IIa": ("algebraic",),
    "IIb": ("algebraic",),
    "III": ("pole", "algebraic"),
    "IVa": ("exponential",),
    "IVb": ("exponential",),
    "IVc": ("pole", "exponential"),
}
_BBM_TERMS = {
    "I": ("pole",),
    "II": ("algebraic",),
    "III": ("pole", "algebraic"),
    "IVa": ("exponential",),
    "IVb": ("pole", "exponential"),
}


def _asymptotic(equation: Equation, omega0: float, x: float, t: float, saddle_form: str) -> SolutionSample:
    if saddle_form not in SADDLE_FORMS:
        raise PreconditionViolation(f"saddle_form must be one of {SADDLE_FORMS}", saddle_form=saddle_form)
    if t <= 0:
        raise PreconditionViolation("asymptotic forms need t > 0", t=t)
    if x < 0:
        raise PreconditionViolation("x must be non-negative", x=x)
    xi = x / t
    label = region(equation, omega0, xi)
    kdv = equation is Equation.KDV
    value = 0.0
    for term in (_KDV_TERMS if kdv else _BBM_TERMS)[label.label]:
        if term == "pole":
            value += kdv_pole_term(omega0, x, t) if kdv else bbm_pole_term(omega0, x, t)
        elif saddle_form == "steepest_descent":
            value += saddle_contribution(equation, omega0, x, t)
        elif term == "algebraic":
            value += kdv_algebraic_term(omega0, xi, t) if kdv else bbm_algebraic_term(omega0, xi, t)
        else:
            value += kdv_exponential_term(omega0, xi, t) if kdv else bbm_exponential_term(omega0, xi, t)
    # steepest_descent mode also carries the saddle correction next to a lone pole term
    if saddle_form == "steepest_descent" and label.label == "I":
        value += saddle_contribution(equation, omega0, x, t)
    return SolutionSample(
        x=float(x),
        t=float(t),
        value=float(value),
        method=Method.ASYMPTOTIC,
        model=equation.value,
        omega0=float(omega0),
        region=label.label,
    )


def kdv_asymptotic(omega0: float, x: float, t: float, *, saddle_form: str = "printed") -> SolutionSample:
    return _asymptotic(Equation.KDV, omega0, x, t, saddle_form)


def bbm_asymptotic(omega0: float, x: float, t: float, *, saddle_form: str = "printed") -> SolutionSample:
    return _asymptotic(Equation.BBM, omega0, x, t, saddle_form)


# ---------------------------------------------------------------- phase diagram

KDV_CURVES = ("group_velocity", "l1", "l2", "xi_one")
BBM_CURVES = ("group_velocity", "l3", "two_omega_squared", "xi_one")


def _roots_in(func, lo: float, hi: float, samples: int = 400) -> List[float]:
    grid = np.linspace(lo, hi, samples)
    values = [func(v) for v in grid]
    out = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fa == 0.0:
            out.append(float(a))
        elif fa * fb < 0.0:
            out.append(float(brentq(func, a, b, xtol=CURVE_TOL)))
    return out


def _curve_points(equation: Equation, name: str, omega0: float) -> List[float]:
    if name == "xi_one":
        return [1.0]
    if equation is Equation.KDV:
        w_cr = kdv_critical_frequency()
        if name == "group_velocity":
            return [kdv_group_velocity_curve(omega0)] if omega0 < w_cr else []
        if omega0 <= w_cr:
            return []
        if name == "l1":
            return _roots_in(lambda xi: kdv_l1(xi, omega0), 0.0, 1.0 - 1e-9)
        if name == "l2":
            xi = 8.0 * _kdv_pole(omega0).real ** 2 - 2.0
            return [xi] if xi > 1.0 else []
    else:
        if name == "group_velocity":
            return [bbm_group_velocity(omega0)] if omega0 < BBM_CRITICAL else []
        if name == "l3":
            return _roots_in(lambda xi: bbm_l3(xi, omega0), 0.0, 1.0) if omega0 > BBM_CRITICAL else []
        if name == "two_omega_squared":
            return [2.0 * omega0 * omega0] if omega0 > 1.0 / math.sqrt(2.0) else []
    raise PreconditionViolation(f"unknown boundary curve {name!r}", equation=equation.value)


def boundary_curve(equation: Equation, name: str, omega0_values: Sequence[float]) -> List[Tuple[float, float]]:
    """Points (omega0, xi) of a region boundary, refined by root bracketing to 1e-10."""
    points: List[Tuple[float, float]] = []
    for w in omega0_values:
        _check_omega0(w)
        points.extend((float(w), float(xi)) for xi in _curve_points(equation, name, w))
    return points


@dataclass(frozen=True)
class PhaseDiagram:
    equation: Equation
    omega0: Tuple[float, ...]
    xi: Tuple[float, ...]
    labels: Tuple[Tuple[Optional[str], ...], ...]  # labels[i][j] at (omega0[i], xi[j]); None on a boundary
    curves: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)

    def rows(self):
        for i, w in enumerate(self.omega0):
            for j, xi in enumerate(self.xi):
                yield w, xi, self.labels[i][j]


def phase_diagram(
    equation: Equation,
    omega0_range: Tuple[float, float],
    xi_range: Tuple[float, float],
    resolution: int,
) -> PhaseDiagram:
    if resolution < 2:
        raise PreconditionViolation("resolution must be at least 2", resolution=resolution)
    w_lo, w_hi = omega0_range
    x_lo, x_hi = xi_range
    if not (0 < w_lo < w_hi) or not (0 <= x_lo < x_hi):
        raise PreconditionViolation("ranges must be increasing with omega0 > 0 and xi >= 0")
    omegas = tuple(float(v) for v in np.linspace(w_lo, w_hi, resolution))
    xis = tuple(float(v) for v in np.linspace(x_lo, x_hi, resolution))

    labels = []
    for w in omegas:
        row = []
        for xi in xis:
            try:
                row.append(region(equation, w, xi).label)
            except OnRegionBoundary:
                row.append(None)
        labels.append(tuple(row))

    names = KDV_CURVES if equation is Equation.KDV else BBM_CURVES
    dense = np.linspace(w_lo, w_hi, max(resolution, 50))
    curves = {name: boundary_curve(equation, name, dense) for name in names}
    w_cr = kdv_critical_frequency() if equation is Equation.KDV else BBM_CRITICAL
    curves["omega_cr"] = [(w_cr, float(xi)) for xi in np.linspace(x_lo, x_hi, 50)] if w_lo < w_cr < w_hi else []

    logger.info({"event": "asymptotics.phase_diagram", "equation": equation.value, "resolution": resolution})
    return PhaseDiagram(equation=equation, omega0=omegas, xi=xis, labels=tuple(labels), curves=curves)
