"""Generalized Dirichlet-to-Neumann map for asymptotically periodic wavemaker data."""

from __future__ import annotations

import cmath
import logging
import math
from typing import Callable, Dict, Optional

from ..errors import PreconditionViolation, UncoveredFamily, UncoveredHarmonic
from ..schemas.model_schemas import (
    DNMapResult,
    FourierBoundary,
    HarmonicDN,
    ModelCoefficients,
    ModelFamily,
    RootLocation,
)
from .dispersion import characteristic_roots

logger = logging.getLogger("wavemaker")

_COEF_TOL = 1e-14


def _is_degenerate_model(coeffs: ModelCoefficients) -> bool:
    return coeffs.a1 == 0.0 and abs(coeffs.a2 + coeffs.a0 * coeffs.a_m2) <= _COEF_TOL


def _exceptional_harmonic(coeffs: ModelCoefficients, omega0: float) -> Optional[int]:
    """n* = -A2 / (omega0 A_{-2}) when it is a nonzero integer, else None."""
    if coeffs.family is not ModelFamily.SECOND_ORDER or omega0 == 0.0:
        return None
    n_star = -coeffs.a2 / (omega0 * coeffs.a_m2)
    nearest = round(n_star)
    if nearest == 0 or abs(n_star - nearest) > 1e-12 * max(1.0, abs(n_star)):
        return None
    return int(nearest)


def _mean_harmonic(coeffs: ModelCoefficients, a_0: complex) -> HarmonicDN:
    # b0 = -i (A0/A1) a0, the root of -A1 k - A0
    if coeffs.a1 == 0.0:
        raise PreconditionViolation("the mean harmonic needs A1 != 0 when A2 = 0", a0=coeffs.a0)
    k0 = -coeffs.a0 / coeffs.a1
    return HarmonicDN(n=0, a_n=a_0, k0=complex(k0), b_n=-1j * (coeffs.a0 / coeffs.a1) * a_0, c_n=None)


def dn_coefficients(
    coeffs: ModelCoefficients,
    boundary: FourierBoundary,
    *,
    initial_slope: Optional[float] = None,
) -> DNMapResult:
    """Neumann (b_n) and second-derivative (c_n) coefficients of the boundary series.

    ``initial_slope`` is u0'(0); it is only consulted for the exceptional
    harmonic n* of the second-order family.
    """
    family = coeffs.family
    if family is ModelFamily.GENERAL:
        raise UncoveredFamily("D-N map is available for the covered families only")
    if family is ModelFamily.SECOND_ORDER and _is_degenerate_model(coeffs):
        raise PreconditionViolation(
            "A1 = A2 + A0 A_{-2} = 0: use degenerate_explicit_solution", a0=coeffs.a0, a_m2=coeffs.a_m2
        )

    omega0 = boundary.omega0
    n_star = _exceptional_harmonic(coeffs, omega0)
    records: Dict[int, HarmonicDN] = {}
    pending = None
    for n, a_n in sorted(boundary.coefficients.items()):
        if n == n_star and coeffs.a1 * (coeffs.a0 * coeffs.a_m2 + coeffs.a2) != 0.0:
            pending = (n, a_n)
            continue
        if n == 0 and family is ModelFamily.SECOND_ORDER and coeffs.a2 == 0.0:
            records[0] = _mean_harmonic(coeffs, a_n)
            continue
        k0 = characteristic_roots(coeffs, n, omega0).k0
        b_n = 1j * k0 * a_n
        c_n = -k0 * k0 * a_n if family is ModelFamily.THIRD_ORDER else None
        records[n] = HarmonicDN(n=n, a_n=a_n, k0=k0, b_n=b_n, c_n=c_n)

    if pending is not None:
        n, a_n = pending
        if initial_slope is None:
            raise UncoveredHarmonic(
                f"harmonic n*={n} needs the initial slope u0'(0)", n=n, omega0=omega0
            )
        b_n = complex(initial_slope) - sum(rec.b_n for rec in records.values())
        records[n] = HarmonicDN(n=n, a_n=a_n, k0=b_n / (1j * a_n), b_n=b_n, c_n=None)
        logger.info({"event": "dnmap.compatibility", "n": n, "b_n": b_n})

    ordered = tuple(records[n] for n in sorted(records))
    return DNMapResult(omega0=omega0, records=ordered, is_real=boundary.is_real)


def dn_removability_residual(
    coeffs: ModelCoefficients,
    n: int,
    omega0: float,
    a_n: complex,
    b_n: complex,
    c_n: Optional[complex],
    k: complex,
) -> complex:
    """Residual of the removability condition at a root k of harmonic n."""
    big_b = coeffs.a2 + n * omega0 * coeffs.a_m2
    a3 = coeffs.a3
    c_term = -a3 * c_n if c_n is not None else 0.0
    return c_term - 1j * (a3 * k + big_b) * b_n + (a3 * k * k + big_b * k - coeffs.a1) * a_n


def removability_residuals(coeffs: ModelCoefficients, result: DNMapResult) -> list[complex]:
    """Residuals at every OnDMinusBoundary root of every harmonic in ``result``."""
    out = []
    for rec in result.records:
        rootset = characteristic_roots(coeffs, rec.n, result.omega0)
        for root in rootset.roots:
            if root.location is RootLocation.ON_DMINUS_BOUNDARY:
                out.append(
                    dn_removability_residual(coeffs, rec.n, result.omega0, rec.a_n, rec.b_n, rec.c_n, root.value)
                )
    return out


def boundary_derivative_series(result: DNMapResult, j: int, t: float) -> complex:
    if j < 0:
        raise PreconditionViolation("derivative order must be non-negative", j=j)
    return sum(
        ((1j * rec.k0) ** j) * rec.a_n * cmath.exp(1j * rec.n * result.omega0 * t) for rec in result.records
    ) + 0j


def asymptotic_solution_series(result: DNMapResult, x: float, t: float) -> complex:
    if x < 0:
        raise PreconditionViolation("x must be non-negative", x=x)
    return sum(
        rec.a_n * cmath.exp(1j * rec.k0 * x + 1j * rec.n * result.omega0 * t) for rec in result.records
    ) + 0j


def degenerate_explicit_solution(
    coeffs: ModelCoefficients,
    u0: Callable[[float], complex],
    g0: Callable[[float], complex],
    x: float,
    t: float,
) -> complex:
    """Closed-form solution of the model with A1 = A2 + A0 A_{-2} = 0."""
    if not (coeffs.a_m2 > 0.0 and _is_degenerate_model(coeffs)):
        raise PreconditionViolation("requires A_{-2} > 0, A1 = 0 and A2 + A0 A_{-2} = 0")
    phase = cmath.exp(1j * coeffs.a0 * t)
    return phase * u0(x) + (g0(t) - phase * g0(0.0)) * math.exp(-x / math.sqrt(coeffs.a_m2))


def describe(result: DNMapResult, times=(), j: int = 1) -> dict:
    """Per-harmonic coefficients and, at each of ``times``, the j-th boundary series."""
    harmonics = [
        {
            "n": rec.n,
            "a_n": [rec.a_n.real, rec.a_n.imag],
            "k0": [rec.k0.real, rec.k0.imag],
            "b_n": [rec.b_n.real, rec.b_n.imag],
            "c_n": None if rec.c_n is None else [rec.c_n.real, rec.c_n.imag],
        }
        for rec in result.records
    ]
    series = []
    for t in times:
        value = boundary_derivative_series(result, j, t)
        series.append({"t": float(t), "j": j, "re": value.real, "im": value.imag})
    return {"omega0": result.omega0, "is_real": result.is_real, "harmonics": harmonics, "series": series}
