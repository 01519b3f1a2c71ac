"""Dispersion relation, D+/D- membership and radiating-root selection."""

from __future__ import annotations

import cmath
import math
from typing import List, Optional, Tuple

import numpy as np

from ..errors import (
    DegeneratePolynomial,
    NoUniqueRadiatingRoot,
    PoleOfDispersion,
    PreconditionViolation,
    UncoveredFamily,
)
from ..schemas.model_schemas import (
    CriticalFrequencies,
    Membership,
    ModelCoefficients,
    ModelFamily,
    RegionMembership,
    Root,
    RootLocation,
    RootSet,
)

POLE_TOL = 1e-12
INDICATOR_TOL = 1e-9
REAL_ROOT_TOL = 1e-12
GROUP_VELOCITY_TOL = 1e-10
CLUSTER_TOL = 1e-6


def _as_complex(k):
    return np.asarray(k, dtype=complex)


def _scalar_out(value, k):
    return complex(value) if np.ndim(k) == 0 else value


def _denominator(coeffs: ModelCoefficients, k) -> np.ndarray:
    k = _as_complex(k)
    den = 1.0 + coeffs.a_m2 * k * k
    scale = POLE_TOL * (1.0 + coeffs.a_m2 * np.abs(k) ** 2)
    if np.any(np.abs(den) <= scale):
        raise PoleOfDispersion("1 + A_{-2} k^2 vanishes", a_m2=coeffs.a_m2)
    return den


def capital_omega(coeffs: ModelCoefficients, k):
    """Numerator polynomial A3 k^3 + A2 k^2 - A1 k - A0."""
    kk = _as_complex(k)
    value = ((coeffs.a3 * kk + coeffs.a2) * kk - coeffs.a1) * kk - coeffs.a0
    return _scalar_out(value, k)


def omega(coeffs: ModelCoefficients, k):
    den = _denominator(coeffs, k)
    value = capital_omega(coeffs, _as_complex(k)) / den
    if np.ndim(k) == 0 and np.isrealobj(k):
        return float(np.real(value))
    return _scalar_out(value, k)


def group_velocity(coeffs: ModelCoefficients, k):
    kk = _as_complex(k)
    den = _denominator(coeffs, kk)
    a_m2, a0, a1, a2, a3 = coeffs.as_tuple()
    k2 = kk * kk
    num = a_m2 * a3 * k2 * k2 + (3.0 * a3 + a_m2 * a1) * k2 + 2.0 * (a2 + a_m2 * a0) * kk - a1
    value = num / (den * den)
    if np.ndim(k) == 0 and np.isrealobj(k):
        return float(np.real(value))
    return _scalar_out(value, k)


def omega_second_derivative(coeffs: ModelCoefficients, k):
    kk = _as_complex(k)
    den = _denominator(coeffs, kk)
    a_m2, a0, a1, a2, a3 = coeffs.as_tuple()
    k2 = kk * kk
    num = a_m2 * a3 * k2 * k2 + (3.0 * a3 + a_m2 * a1) * k2 + 2.0 * (a2 + a_m2 * a0) * kk - a1
    dnum = 4.0 * a_m2 * a3 * k2 * kk + 2.0 * (3.0 * a3 + a_m2 * a1) * kk + 2.0 * (a2 + a_m2 * a0)
    value = (dnum * den - 4.0 * a_m2 * kk * num) / den ** 3
    return _scalar_out(value, k)


def _indicator_tol(coeffs: ModelCoefficients, k: complex) -> float:
    den = abs(1.0 + coeffs.a_m2 * k * k)
    return INDICATOR_TOL * (1.0 + abs(k)) ** 3 / den


def region_indicator(coeffs: ModelCoefficients, k: complex) -> RegionMembership:
    k = complex(k)
    den = _denominator(coeffs, k)
    indicator = float(np.real(1j * capital_omega(coeffs, k) / den))
    tol = _indicator_tol(coeffs, k)
    if abs(indicator) <= tol:
        membership = Membership.BOUNDARY
    elif k.imag > tol and indicator < -tol:
        membership = Membership.DPLUS
    elif k.imag < -tol and indicator < -tol:
        membership = Membership.DMINUS
    else:
        membership = Membership.NEITHER
    return RegionMembership(indicator=indicator, membership=membership)


def characteristic_polynomial(coeffs: ModelCoefficients, n: int, omega0: float) -> np.ndarray:
    """Coefficients, highest degree first, of Omega(k) + n omega0 (1 + A_{-2} k^2)."""
    a_m2, a0, a1, a2, a3 = coeffs.as_tuple()
    return np.array([a3, a2 + n * omega0 * a_m2, -a1, n * omega0 - a0], dtype=float)


def _polish(poly: np.ndarray, r: complex) -> complex:
    p = np.polyval(poly, r)
    dp = np.polyval(np.polyder(poly), r)
    if dp == 0:
        return r
    cand = r - p / dp
    return cand if abs(np.polyval(poly, cand)) < abs(p) else r


def _cardano(coeffs: ModelCoefficients, n: int, omega0: float) -> List[Tuple[complex, int]]:
    a0, a1, a2, a3 = coeffs.a0, coeffs.a1, coeffs.a2, coeffs.a3
    c = n * omega0 - a0
    p = -(3.0 * a1 * a3 + a2 * a2) / (3.0 * a3 * a3)
    q = (2.0 * a2 ** 3 + 9.0 * a1 * a2 * a3 + 27.0 * a3 * a3 * c) / (27.0 * a3 ** 3)
    shift = -a2 / (3.0 * a3)
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = (q / 2.0) ** 2 + abs(p / 3.0) ** 3

    if abs(disc) <= 1e-12 * scale or scale == 0.0:
        if abs(p) <= 1e-14 and abs(q) <= 1e-14:
            return [(complex(shift), 3)]
        # one simple and one double real root
        return [(complex(3.0 * q / p + shift), 1), (complex(-3.0 * q / (2.0 * p) + shift), 2)]

    if disc > 0:
        sq = math.sqrt(disc)
        u = float(np.cbrt(-q / 2.0 + sq))
        v = float(np.cbrt(-q / 2.0 - sq))
        real = complex(u + v + shift)
        re = -(u + v) / 2.0 + shift
        im = math.sqrt(3.0) / 2.0 * (u - v)
        return [(real, 1), (complex(re, im), 1), (complex(re, -im), 1)]

    # three distinct real roots
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
    theta = math.acos(max(-1.0, min(1.0, arg)))
    return [(complex(m * math.cos(theta / 3.0 - 2.0 * math.pi * j / 3.0) + shift), 1) for j in range(3)]


def _quadratic(coeffs: ModelCoefficients, n: int, omega0: float) -> List[Tuple[complex, int]]:
    a = coeffs.a2 + n * omega0 * coeffs.a_m2
    b = -coeffs.a1
    c = n * omega0 - coeffs.a0
    if a == 0.0:
        if b == 0.0:
            raise DegeneratePolynomial("characteristic polynomial is constant", n=n, omega0=omega0)
        return [(complex(-c / b), 1)]
    disc = b * b - 4.0 * a * c
    if abs(disc) <= 1e-14 * (b * b + abs(4.0 * a * c)):
        return [(complex(-b / (2.0 * a)), 2)]
    if disc > 0:
        sq = math.sqrt(disc)
        if b == 0.0:
            return [(complex(sq / (2.0 * a)), 1), (complex(-sq / (2.0 * a)), 1)]
        # cancellation-free pair
        qq = -0.5 * (b + math.copysign(sq, b))
        return [(complex(qq / a), 1), (complex(c / qq), 1)]
    sq = math.sqrt(-disc)
    return [(complex(-b / (2.0 * a), sq / (2.0 * a)), 1), (complex(-b / (2.0 * a), -sq / (2.0 * a)), 1)]


def _companion(poly: np.ndarray) -> List[Tuple[complex, int]]:
    if np.all(poly[:-1] == 0.0):
        raise DegeneratePolynomial("characteristic polynomial is constant")
    raw = [complex(r) for r in np.roots(poly)]
    clusters: List[List[complex]] = []
    for r in raw:
        for cl in clusters:
            if abs(cl[0] - r) <= CLUSTER_TOL * (1.0 + abs(r)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def numeric_roots(coeffs: ModelCoefficients, n: int, omega0: float) -> List[Tuple[complex, int]]:
    """Companion-matrix roots with clustered multiplicities."""
    return _companion(characteristic_polynomial(coeffs, n, omega0))


def _classify(coeffs: ModelCoefficients, value: complex, multiplicity: int) -> RootLocation:
    if abs(value.imag) <= REAL_ROOT_TOL * (1.0 + abs(value)):
        cg = group_velocity(coeffs, value.real)
        tol = GROUP_VELOCITY_TOL * (1.0 + abs(value)) ** 2
        if multiplicity >= 2 or cg >= -tol:
            return RootLocation.ON_DPLUS_BOUNDARY
        return RootLocation.ON_DMINUS_BOUNDARY
    membership = region_indicator(coeffs, value).membership
    if membership is not Membership.BOUNDARY:
        return RootLocation.INTERIOR
    return RootLocation.ON_DPLUS_BOUNDARY if value.imag > 0 else RootLocation.ON_DMINUS_BOUNDARY


def characteristic_roots(coeffs: ModelCoefficients, n: int, omega0: float) -> RootSet:
    poly = characteristic_polynomial(coeffs, n, omega0)
    family = coeffs.family
    if family is ModelFamily.THIRD_ORDER:
        raw = _cardano(coeffs, n, omega0)
    elif family is ModelFamily.SECOND_ORDER:
        raw = _quadratic(coeffs, n, omega0)
    else:
        raw = _companion(poly)

    roots = []
    for value, mult in raw:
        if mult == 1:
            value = complex(_polish(poly, value))
        if abs(value.imag) <= REAL_ROOT_TOL * (1.0 + abs(value)):
            value = complex(value.real, 0.0)
        roots.append(Root(value=value, multiplicity=mult, location=_classify(coeffs, value, mult)))
    roots.sort(key=lambda r: (r.value.imag, r.value.real))

    rootset = RootSet(harmonic=n, omega0=omega0, roots=tuple(roots))
    return RootSet(harmonic=n, omega0=omega0, roots=rootset.roots, k0_index=select_radiating_root(rootset, coeffs))


def select_radiating_root(roots: RootSet, coeffs: ModelCoefficients) -> int:
    complex_up = [
        i for i, r in enumerate(roots.roots) if r.value.imag > REAL_ROOT_TOL * (1.0 + abs(r.value))
    ]
    if len(complex_up) == 1:
        return complex_up[0]
    if len(complex_up) > 1:
        raise NoUniqueRadiatingRoot(
            "several roots in the upper half-plane", n=roots.harmonic, omega0=roots.omega0
        )

    real = []
    for i, r in enumerate(roots.roots):
        if r.value.imag != 0.0:
            continue
        tol = GROUP_VELOCITY_TOL * (1.0 + abs(r.value)) ** 2
        if group_velocity(coeffs, r.value.real) >= -tol:
            real.append(i)
    if len(real) > 1:
        repeated = [i for i in real if roots.roots[i].multiplicity >= 2]
        if len(repeated) == 1:
            return repeated[0]
    if len(real) != 1:
        raise NoUniqueRadiatingRoot(
            f"{len(real)} real roots satisfy the radiation condition", n=roots.harmonic, omega0=roots.omega0
        )
    return real[0]


def critical_frequencies(coeffs: ModelCoefficients) -> CriticalFrequencies:
    a_m2, a0, a1, a2, a3 = coeffs.as_tuple()
    family = coeffs.family
    if family is ModelFamily.THIRD_ORDER:
        p = -(3.0 * a1 * a3 + a2 * a2) / (3.0 * a3 * a3)
        omega_bar = (27.0 * a3 * a3 * a0 - 2.0 * a2 ** 3 - 9.0 * a1 * a2 * a3) / (27.0 * a3 * a3)
        if abs(p) <= 1e-14:
            return CriticalFrequencies(omega_bar, omega_bar, omega_bar=omega_bar, degenerate=True)
        if p > 0:
            raise PreconditionViolation("3 A1 A3 + A2^2 < 0: no real critical frequencies")
        half_width = -2.0 * a3 * math.sqrt((-p / 3.0) ** 3)
        return CriticalFrequencies(omega_bar - half_width, omega_bar + half_width, omega_bar=omega_bar)
    if family is ModelFamily.SECOND_ORDER:
        root = math.sqrt((a2 + a0 * a_m2) ** 2 + a1 * a1 * a_m2)
        lo = (a0 * a_m2 - a2 - root) / (2.0 * a_m2)
        hi = (a0 * a_m2 - a2 + root) / (2.0 * a_m2)
        return CriticalFrequencies(lo, hi, degenerate=root == 0.0)
    raise UncoveredFamily("critical frequencies are defined for the covered families only")


def kdv_critical_frequency() -> float:
    return 2.0 / (3.0 * math.sqrt(3.0))


def kdv_labeled_poles(omega0: float) -> Tuple[complex, ...]:
    """Poles k1..k6 of the two wavemaker harmonics, labeled as in the region analysis.

    k1, k2, k3 solve k - k^3 = omega0 (harmonic n = -1), k4, k5, k6 solve
    k - k^3 = -omega0. k3 is the radiating root of n = -1.
    """
    w = float(omega0)
    if w <= 0:
        raise PreconditionViolation("omega0 must be positive")
    s3 = math.sqrt(3.0)
    disc = 81.0 * w * w - 12.0
    if abs(disc) <= 1e-12:
        raise PreconditionViolation("labeled poles are undefined at the critical frequency")
    if disc < 0:
        alpha = math.pi - math.atan(math.sqrt(-disc) / (9.0 * w))
        theta = math.pi - alpha

        def triple(a: float) -> Tuple[complex, complex, complex]:
            c, s = math.cos(a / 3.0), math.sin(a / 3.0)
            return (complex(2.0 / s3 * c), complex(-c / s3 - s), complex(-c / s3 + s))

        return triple(alpha) + triple(theta)

    r1 = 9.0 * w - math.sqrt(disc)
    r2 = 9.0 * w + math.sqrt(disc)
    c1, c2 = r1 ** (1.0 / 3.0), r2 ** (1.0 / 3.0)
    t23, t43, t13 = 2.0 ** (2.0 / 3.0), 2.0 ** (4.0 / 3.0), 2.0 ** (1.0 / 3.0)
    u13, u23, u16 = 3.0 ** (1.0 / 3.0), 3.0 ** (2.0 / 3.0), 3.0 ** (1.0 / 6.0)
    k3 = complex(
        1.0 / (t23 * u13 * c1) + c1 / (t43 * u23),
        u16 / (t23 * c1) - c1 / (t43 * u16),
    )
    k1 = k3.conjugate()
    k2 = complex(-t13 / (u13 * c1) - c1 / (t13 * u23))
    k4 = complex(t13 / (u13 * c2) + c2 / (t13 * u23))
    re5 = -1.0 / (t23 * u13 * c2) - c2 / (t43 * u23)
    im5 = u16 / (t23 * c2) - c2 / (t43 * u16)
    k5 = complex(re5, -im5)
    k6 = complex(re5, im5)
    return (k1, k2, k3, k4, k5, k6)


def bbm_labeled_poles(omega0: float) -> Tuple[complex, ...]:
    """Poles (k1, k2) of harmonic n = -1 and (k3, k4) = (-k1, -k2) of n = +1."""
    w = float(omega0)
    if w <= 0:
        raise PreconditionViolation("omega0 must be positive")
    root = cmath.sqrt(1.0 - 4.0 * w * w)
    k1 = (1.0 + root) / (2.0 * w)
    k2 = (1.0 - root) / (2.0 * w)
    return (k1, k2, -k1, -k2)


def radiating_root(coeffs: ModelCoefficients, n: int, omega0: float) -> complex:
    return characteristic_roots(coeffs, n, omega0).k0


def rootset_residual(coeffs: ModelCoefficients, rootset: RootSet) -> float:
    poly = characteristic_polynomial(coeffs, rootset.harmonic, rootset.omega0)
    return max(
        (abs(np.polyval(poly, r.value)) / (1.0 + abs(r.value)) ** 3 for r in rootset.roots),
        default=0.0,
    )


def is_subcritical(coeffs: ModelCoefficients, omega0: float) -> Optional[bool]:
    crit = critical_frequencies(coeffs)
    if abs(omega0 - crit.omega_cr_plus) <= 1e-12:
        return None
    return omega0 < crit.omega_cr_plus


def describe_roots(coeffs: ModelCoefficients, n: int, omega0: float) -> dict:
    """Roots, their classification, k0, c_g(k0) and the critical frequencies as plain data."""
    if not (omega0 > 0 and math.isfinite(omega0)):
        raise PreconditionViolation("the wavemaker forcing needs omega0 > 0", omega0=omega0)
    rootset = characteristic_roots(coeffs, n, omega0)
    rows = []
    for i, r in enumerate(rootset.roots):
        cg = complex(group_velocity(coeffs, r.value))
        rows.append(
            {
                "index": i,
                "re": r.value.real,
                "im": r.value.imag,
                "multiplicity": r.multiplicity,
                "location": r.location.value,
                "radiating": i == rootset.k0_index,
                "group_velocity": cg.real,
            }
        )
    k0 = rootset.k0
    try:
        crit = critical_frequencies(coeffs)
        critical = {
            "omega_cr_minus": crit.omega_cr_minus,
            "omega_cr_plus": crit.omega_cr_plus,
            "omega_bar": crit.omega_bar,
            "degenerate": crit.degenerate,
        }
    except (UncoveredFamily, PreconditionViolation):
        critical = None
    return {
        "harmonic": n,
        "omega0": omega0,
        "family": coeffs.family.value,
        "roots": rows,
        "k0": [k0.real, k0.imag],
        "group_velocity_k0": complex(group_velocity(coeffs, k0)).real,
        "critical_frequencies": critical,
    }
