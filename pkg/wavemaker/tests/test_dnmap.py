import cmath
import math

import numpy as np
import pytest

from app.errors import PreconditionViolation, UncoveredFamily, UncoveredHarmonic
from app.schemas.model_schemas import FourierBoundary, ModelCoefficients
from app.services.dnmap import (
    asymptotic_solution_series,
    boundary_derivative_series,
    degenerate_explicit_solution,
    describe,
    dn_coefficients,
    removability_residuals,
)


def test_sinusoid_coefficients():
    boundary = FourierBoundary.sinusoid(0.375)
    assert set(boundary.coefficients) == {-1, 1}
    assert boundary.is_real
    for t in (0.0, 1.0, 7.3):
        assert boundary.value(t) == pytest.approx(-math.sin(0.375 * t), abs=1e-15)


@pytest.mark.parametrize("model,omega0", [("kdv", 0.375), ("bbm", 0.4)])
def test_neumann_series_of_the_sinusoid(model, omega0):
    # k0 = 1/2 for both presets: u ~ sin(x/2 - omega0 t), so u_x(0, t) ~ cos(omega0 t) / 2
    result = dn_coefficients(getattr(ModelCoefficients, model)(), FourierBoundary.sinusoid(omega0))
    for t in np.linspace(0.0, 40.0, 9):
        assert boundary_derivative_series(result, 0, t) == pytest.approx(-math.sin(omega0 * t), abs=1e-12)
        value = boundary_derivative_series(result, 1, t)
        assert value.real == pytest.approx(0.5 * math.cos(omega0 * t), abs=1e-12)
        assert abs(value.imag) < 1e-12


def test_kdv_second_derivative_coefficients(kdv):
    result = dn_coefficients(kdv, FourierBoundary.sinusoid(0.375))
    for rec in result.records:
        assert rec.c_n == pytest.approx(-rec.k0 ** 2 * rec.a_n)
    t = 3.0
    assert boundary_derivative_series(result, 2, t).real == pytest.approx(0.25 * math.sin(0.375 * t), abs=1e-12)


def test_bbm_has_no_second_derivative_coefficients(bbm):
    result = dn_coefficients(bbm, FourierBoundary.sinusoid(0.4))
    assert all(rec.c_n is None for rec in result.records)


@pytest.mark.parametrize("model,omega0", [("kdv", 0.375), ("kdv", 0.6), ("bbm", 0.4), ("bbm", 0.8)])
def test_removability_holds_at_every_minus_root(model, omega0):
    coeffs = getattr(ModelCoefficients, model)()
    result = dn_coefficients(coeffs, FourierBoundary.sinusoid(omega0))
    residuals = removability_residuals(coeffs, result)
    assert residuals
    assert max(abs(r) for r in residuals) < 1e-10


def test_far_field_series(kdv):
    result = dn_coefficients(kdv, FourierBoundary.sinusoid(0.375))
    value = asymptotic_solution_series(result, 3.0, 400.0)
    assert value.real == pytest.approx(math.sin(1.5 - 150.0), abs=1e-12)


def test_supercritical_series_decays_in_x(kdv):
    result = dn_coefficients(kdv, FourierBoundary.sinusoid(0.6))
    times = np.linspace(0.0, 20.0, 41)
    near = max(abs(asymptotic_solution_series(result, 1.0, t)) for t in times)
    far = max(abs(asymptotic_solution_series(result, 30.0, t)) for t in times)
    assert far < 1e-3 * near


def test_general_family_is_uncovered():
    coeffs = ModelCoefficients.from_sequence([0.5, 0.0, -1.0, 0.0, -1.0])
    with pytest.raises(UncoveredFamily):
        dn_coefficients(coeffs, FourierBoundary.sinusoid(0.2))


def test_exceptional_harmonic_needs_the_initial_slope():
    # n* = -A2 / (omega0 A_-2) = 1
    coeffs = ModelCoefficients.from_sequence([1.0, 0.0, -1.0, -0.5, 0.0])
    boundary = FourierBoundary.sinusoid(0.5)
    with pytest.raises(UncoveredHarmonic):
        dn_coefficients(coeffs, boundary)

    result = dn_coefficients(coeffs, boundary, initial_slope=0.25)
    assert sum(rec.b_n for rec in result.records) == pytest.approx(0.25)


def test_mean_harmonic_of_second_order_model():
    coeffs = ModelCoefficients(a_m2=1.0, a0=0.5, a1=1.0, a2=0.0, a3=0.0)
    boundary = FourierBoundary(omega0=0.3, coefficients={0: 1.0, 1: -1 / 2j, -1: 1 / 2j})
    records = dn_coefficients(coeffs, boundary).by_harmonic()
    assert records[0].b_n == pytest.approx(-0.5j, abs=1e-15)
    assert records[0].k0 == pytest.approx(-0.5)
    assert set(records) == {-1, 0, 1}


def test_mean_harmonic_needs_a1():
    coeffs = ModelCoefficients(a_m2=1.0, a0=0.5, a1=0.0, a2=0.0, a3=0.0)
    with pytest.raises(PreconditionViolation):
        dn_coefficients(coeffs, FourierBoundary(omega0=0.3, coefficients={0: 1.0}))


def test_degenerate_model_is_solved_in_closed_form():
    coeffs = ModelCoefficients.from_sequence([1.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(PreconditionViolation):
        dn_coefficients(coeffs, FourierBoundary.sinusoid(0.5))

    value = degenerate_explicit_solution(coeffs, lambda x: 0.0, lambda t: cmath.sin(t), 2.0, 1.3)
    assert value == pytest.approx(math.sin(1.3) * math.exp(-2.0))


def test_degenerate_solution_rejects_other_models(bbm):
    with pytest.raises(PreconditionViolation):
        degenerate_explicit_solution(bbm, lambda x: 0.0, lambda t: 0.0, 1.0, 1.0)


def test_custom_harmonics(kdv):
    boundary = FourierBoundary.from_pairs(0.2, {-1: (0.0, -0.5), 1: (0.0, 0.5), 2: (0.1, 0.0), -2: (0.1, 0.0)})
    result = dn_coefficients(kdv, boundary)
    assert [rec.n for rec in result.records] == [-2, -1, 1, 2]
    assert result.is_real
    value = boundary_derivative_series(result, 1, 2.0)
    assert abs(value.imag) < 1e-12


def test_describe(kdv):
    result = dn_coefficients(kdv, FourierBoundary.sinusoid(0.375))
    report = describe(result, times=[0.0, 2.0], j=1)
    assert [h["n"] for h in report["harmonics"]] == [-1, 1]
    assert report["harmonics"][0]["k0"] == pytest.approx([0.5, 0.0])
    assert report["series"][0]["re"] == pytest.approx(0.5)
    assert report["series"][1]["t"] == 2.0


def test_negative_derivative_order_is_rejected(kdv):
    result = dn_coefficients(kdv, FourierBoundary.sinusoid(0.375))
    with pytest.raises(PreconditionViolation):
        boundary_derivative_series(result, -1, 0.0)
