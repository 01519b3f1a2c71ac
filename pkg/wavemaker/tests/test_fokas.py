import math

import numpy as np
import pytest

from app.errors import PreconditionViolation, StrategyDomain
from app.schemas.model_schemas import Equation, FourierBoundary
from app.schemas.solution_schemas import ContourKind, ContourSpec, Method, QuadratureConfig
from app.services import fokas
from app.services.dnmap import boundary_derivative_series, dn_coefficients


def _with(kind, **kw):
    return QuadratureConfig(contour=ContourSpec(kind=kind, **kw))


def test_psi_kernel_is_continuous_at_the_removable_point():
    tol = 1e-3
    assert fokas.psi_kernel(0j, tol) == pytest.approx(1j)
    for z in (0.999 * tol, 0.999j * tol, -0.7 * tol):
        assert fokas.psi_kernel(z, tol) == pytest.approx(-np.expm1(-1j * z) / z, abs=1e-13)
    z = 0.7 - 0.2j
    assert fokas.psi_kernel(z, tol) == pytest.approx((1.0 - np.exp(-1j * z)) / z)


@pytest.mark.parametrize("runner", [fokas.kdv_exact, fokas.bbm_exact])
def test_solution_vanishes_at_t_zero(runner):
    sample = runner(2.0, 0.0, 0.3)
    assert sample.value == 0.0
    assert sample.method is Method.EXACT


@pytest.mark.parametrize("runner,omega0", [(fokas.kdv_exact, 0.375), (fokas.bbm_exact, 0.4), (fokas.kdv_exact, 0.6)])
@pytest.mark.parametrize("t", [5.0, 20.0])
def test_boundary_datum_is_recovered(runner, omega0, t):
    assert runner(0.0, t, omega0).value == pytest.approx(-math.sin(omega0 * t), abs=1e-6)


def test_kdv_strategies_agree():
    x, t, omega0 = 3.0, 2.0, 0.375
    descent = fokas.exact_value(Equation.KDV, x, t, omega0, _with(ContourKind.KDV_STEEPEST_DESCENT))[0]
    lines = fokas.exact_value(Equation.KDV, x, t, omega0, _with(ContourKind.KDV_HALF_LINES))[0]
    dplus = fokas.exact_value(
        Equation.KDV, x, t, omega0, _with(ContourKind.KDV_BOUNDARY_DPLUS, indent_points=(0.5,), indentation_radius=0.02)
    )[0]
    assert lines.real == pytest.approx(descent.real, abs=1e-7)
    assert dplus.real == pytest.approx(descent.real, abs=1e-7)


def test_bbm_circle_and_saddle_polygon_agree():
    x, t, omega0 = 5.0, 10.0, 0.4
    circle = fokas.exact_value(Equation.BBM, x, t, omega0, _with(ContourKind.BBM_CIRCLE))[0]
    poly = fokas.exact_value(Equation.BBM, x, t, omega0, _with(ContourKind.BBM_SADDLE_POLYGON))[0]
    assert poly.real == pytest.approx(circle.real, abs=1e-7)


def test_kdv_far_field_wave():
    sample = fokas.kdv_exact(3.0, 400.0, 0.375)
    assert sample.value == pytest.approx(math.sin(1.5 - 150.0), abs=0.02)
    assert sample.err_estimate < 1e-6


def test_bbm_far_field_wave():
    sample = fokas.bbm_exact(10.0, 400.0, 0.4)
    assert sample.value == pytest.approx(math.sin(5.0 - 160.0), abs=0.03)


def test_kdv_neumann_value_settles_to_the_dn_series():
    sample = fokas.kdv_neumann_exact(0.0, 400.0, 0.375)
    assert sample.value == pytest.approx(0.5 * math.cos(150.0), abs=0.01)


def _neumann_residual(t0):
    # worst case over one forcing period
    times = t0 + np.linspace(0.0, 2.0 * math.pi / 0.375, 6)
    return max(abs(fokas.kdv_neumann_exact(0.0, t, 0.375).value - 0.5 * math.cos(0.375 * t)) for t in times)


def test_kdv_neumann_residual_decays():
    early = _neumann_residual(100.0)
    assert early <= 0.02
    assert _neumann_residual(400.0) <= early / 2.0


def test_bbm_neumann_value_approaches_the_dn_series(bbm):
    result = dn_coefficients(bbm, FourierBoundary.sinusoid(0.4))
    for t in (200.0, 205.0):
        series = boundary_derivative_series(result, 1, t).real
        assert fokas.bbm_neumann_exact(0.0, t, 0.4).value == pytest.approx(series, abs=0.1)


def test_result_is_real():
    value, err = fokas.exact_value(Equation.KDV, 4.0, 6.0, 0.3)
    assert abs(value.imag) < 1e-8 + err


def test_foreign_contour_is_rejected():
    with pytest.raises(StrategyDomain):
        fokas.exact_value(Equation.KDV, 1.0, 1.0, 0.3, _with(ContourKind.BBM_CIRCLE))
    with pytest.raises(StrategyDomain):
        fokas.exact_value(Equation.BBM, 1.0, 1.0, 0.3, _with(ContourKind.KDV_HALF_LINES))


def test_boundary_of_dplus_needs_positive_x():
    with pytest.raises(StrategyDomain):
        fokas.exact_value(Equation.KDV, 0.0, 1.0, 0.3, _with(ContourKind.KDV_BOUNDARY_DPLUS))


@pytest.mark.parametrize("x,t,omega0", [(-1.0, 1.0, 0.3), (1.0, -1.0, 0.3), (1.0, 1.0, 0.0)])
def test_bad_inputs(x, t, omega0):
    with pytest.raises(PreconditionViolation):
        fokas.kdv_exact(x, t, omega0)


def test_bbm_circle_nodes():
    nodes = fokas.contour_points(ContourSpec(kind=ContourKind.BBM_CIRCLE, node_count=64))
    assert len(nodes) == 64
    total = sum(n.dk / (n.k - 1j) for n in nodes)
    assert total == pytest.approx(2j * math.pi, abs=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        ContourSpec(kind=ContourKind.KDV_HALF_LINES, node_count=32),
        ContourSpec(kind=ContourKind.KDV_STEEPEST_DESCENT, node_count=40, xi=0.3),
        ContourSpec(kind=ContourKind.KDV_BOUNDARY_DPLUS, node_count=48, x=2.0),
        ContourSpec(kind=ContourKind.BBM_SADDLE_POLYGON, node_count=64, xi=0.4),
    ],
)
def test_contour_points_are_finite(spec):
    nodes = fokas.contour_points(spec)
    assert nodes
    assert all(np.isfinite(n.k) and np.isfinite(n.dk) for n in nodes)


def test_boundary_of_dplus_nodes_need_a_truncation():
    with pytest.raises(ValueError):
        fokas.contour_points(ContourSpec(kind=ContourKind.KDV_BOUNDARY_DPLUS))


def test_boundary_of_dplus_geometry():
    contour = fokas.kdv_boundary_dplus(5.0, indent=(0.5,), radius=0.05)
    assert len(contour.pieces) == 5
    ends = [(p.point(0.0), p.point(1.0)) for p in contour.pieces]
    for (_, end), (start, _) in zip(ends[:-1], ends[1:]):
        assert complex(end) == pytest.approx(complex(start), abs=1e-12)
