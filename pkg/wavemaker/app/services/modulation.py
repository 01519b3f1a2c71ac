"""Self-similar solutions of the linear modulation equations k_t + omega_x = 0,
(a^2)_t + (omega'(k) a^2)_x = 0 for the subcritical wavemaker problems.

The phase constant and the fan amplitude F(xi) are not fixed by modulation
theory; they default to the values that reproduce the Region I/II long-time
asymptotics and can be overridden.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from ..errors import AtGroupVelocity, PreconditionViolation, SupercriticalUnsupported
from ..schemas.model_schemas import Equation
from ..schemas.solution_schemas import ModulationState
from .asymptotics import (
    BBM_CRITICAL,
    bbm_algebraic_factor,
    bbm_group_velocity,
    bbm_saddle_phase,
    kdv_group_velocity_curve,
)
from .dispersion import kdv_critical_frequency, kdv_labeled_poles

FAN_TOL = 1e-12


def _check(xi: float) -> None:
    if not (0.0 <= xi <= 1.0):
        raise PreconditionViolation("modulation fields are defined for 0 <= xi <= 1", xi=xi)


def kdv_fan_amplitude(omega0: float, xi: float) -> float:
    den = (4.0 - 27.0 * omega0 * omega0 - xi * xi * (xi + 3.0)) * math.sqrt(2.0 * math.pi * math.sqrt(3.0 * (1.0 - xi)))
    if den == 0.0:
        return math.inf
    return 27.0 * omega0 * xi / den


def kdv_modulation(
    omega0: float,
    xi: float,
    *,
    theta0: float = 0.0,
    amplitude: Optional[Callable[[float, float], float]] = None,
) -> ModulationState:
    if omega0 <= 0:
        raise PreconditionViolation("omega0 must be positive", omega0=omega0)
    if omega0 >= kdv_critical_frequency():
        raise SupercriticalUnsupported("modulation solution needs omega0 < omega_cr", omega0=omega0)
    _check(xi)
    cg = kdv_group_velocity_curve(omega0)
    if abs(xi - cg) <= FAN_TOL:
        raise AtGroupVelocity("fan amplitude is singular at xi = c_g", omega0=omega0, xi=xi)

    if xi < cg:
        k0 = kdv_labeled_poles(omega0)[2].real
        return ModulationState(
            equation=Equation.KDV,
            omega0=omega0,
            xi=xi,
            omega=omega0,
            k=k0,
            amplitude=1.0,
            branch="plateau",
            phase=lambda x, t: k0 * x - omega0 * t,
        )

    def phase(x: float, t: float) -> float:
        return -2.0 * math.sqrt(3.0) / 9.0 * t * (1.0 - x / t) ** 1.5

    fan = amplitude or kdv_fan_amplitude
    return ModulationState(
        equation=Equation.KDV,
        omega0=omega0,
        xi=xi,
        omega=math.sqrt(3.0 - 3.0 * xi) * (2.0 + xi) / 9.0,
        k=math.sqrt((1.0 - xi) / 3.0),
        amplitude=fan(omega0, xi),
        branch="fan",
        phase=phase,
        theta0=theta0,
    )


def bbm_modulation(
    omega0: float,
    xi: float,
    *,
    theta0: float = 0.0,
    amplitude: Optional[Callable[[float, float], float]] = None,
) -> ModulationState:
    if omega0 <= 0:
        raise PreconditionViolation("omega0 must be positive", omega0=omega0)
    if omega0 >= BBM_CRITICAL:
        raise SupercriticalUnsupported("modulation solution needs omega0 < 1/2", omega0=omega0)
    _check(xi)
    cg = bbm_group_velocity(omega0)
    if abs(xi - cg) <= FAN_TOL:
        raise AtGroupVelocity("fan amplitude is singular at xi = c_g", omega0=omega0, xi=xi)

    if xi < cg:
        k0 = (1.0 - math.sqrt(1.0 - 4.0 * omega0 * omega0)) / (2.0 * omega0)
        return ModulationState(
            equation=Equation.BBM,
            omega0=omega0,
            xi=xi,
            omega=omega0,
            k=k0,
            amplitude=1.0,
            branch="plateau",
            phase=lambda x, t: k0 * x - omega0 * t,
        )

    big = math.sqrt(1.0 + 8.0 * xi)
    fan = amplitude or bbm_algebraic_factor
    return ModulationState(
        equation=Equation.BBM,
        omega0=omega0,
        xi=xi,
        omega=math.sqrt(1.0 - 4.0 * xi + big) / (2.0 * math.sqrt(2.0)),
        k=math.sqrt((-1.0 - 2.0 * xi + big) / (2.0 * xi)),
        amplitude=fan(omega0, xi),
        branch="fan",
        phase=lambda x, t: -t * bbm_saddle_phase(x / t),
        theta0=theta0,
    )


def modulation(equation: Equation, omega0: float, xi: float) -> ModulationState:
    return kdv_modulation(omega0, xi) if equation is Equation.KDV else bbm_modulation(omega0, xi)
