import math

import numpy as np
import pytest

from app.errors import FrontExitedDomain, PreconditionViolation, StabilityViolation
from app.schemas.model_schemas import Equation
from app.schemas.solution_schemas import BoundaryCondition, Method, OracleGrid
from app.services import fokas, oracle


def test_zero_final_time_gives_the_zero_field(small_kdv_grid):
    result = oracle.run_kdv(0.375, small_kdv_grid, 0.0)
    assert result.u.shape == (oracle.DEFAULT_OUTPUTS, small_kdv_grid.nx + 1)
    assert not result.u.any()


@pytest.mark.parametrize("equation", [Equation.KDV, Equation.BBM])
def test_boundary_trace_and_outflow_node(equation, small_bbm_grid):
    grid = small_bbm_grid.model_copy(update={"equation": equation})
    result = oracle.run(equation, 0.4, grid, 8.0, n_out=5)
    assert np.allclose(result.u[:, 0], -np.sin(0.4 * result.times), atol=1e-12)
    assert np.all(result.u[:, -1] == 0.0)
    assert np.all(np.isfinite(result.u))
    assert np.all(result.err >= 0.0)


def test_bbm_agrees_with_the_exact_solution(small_bbm_grid):
    t = 10.0
    result = oracle.run_bbm(0.4, small_bbm_grid, t, n_out=2)
    for x in (0.5, 2.0, 5.0, 8.0):
        exact = fokas.bbm_exact(x, t, 0.4).value
        assert result.value_at(x, t) == pytest.approx(exact, abs=5e-3)


def test_kdv_agrees_with_the_exact_solution(small_kdv_grid):
    t = 10.0
    result = oracle.run_kdv(0.375, small_kdv_grid, t, n_out=2)
    for x in (2.0, 4.0, 6.0, 8.0):
        exact = fokas.kdv_exact(x, t, 0.375).value
        assert result.value_at(x, t) == pytest.approx(exact, abs=1e-2)


def test_richardson_error_estimate_shrinks_with_the_grid():
    coarse = OracleGrid(equation=Equation.BBM, x_max=30.0, nx=150)
    fine = coarse.model_copy(update={"nx": 300})
    e_coarse = oracle.run_bbm(0.4, coarse, 10.0, n_out=2).err[-1].max()
    e_fine = oracle.run_bbm(0.4, fine, 10.0, n_out=2).err[-1].max()
    assert e_fine < e_coarse
    assert e_fine < 5e-3


def test_rk4_matches_the_exponential_integrator():
    grid = OracleGrid(equation=Equation.BBM, x_max=20.0, nx=100, richardson=False, integrator="exponential")
    exact_time = oracle.run_bbm(0.4, grid, 5.0, n_out=3)
    stepped = oracle.run_bbm(0.4, grid.model_copy(update={"integrator": "rk4", "dt": 0.02}), 5.0, n_out=3)
    assert np.allclose(stepped.u, exact_time.u, atol=1e-4)


def test_rk4_step_above_the_bound_is_rejected():
    grid = OracleGrid(equation=Equation.KDV, x_max=20.0, nx=100, integrator="rk4", dt=1.0)
    assert oracle.rk4_step_bound(Equation.KDV, grid) < 1.0
    with pytest.raises(StabilityViolation):
        oracle.run_kdv(0.375, grid, 2.0)


def test_front_must_stay_inside_the_domain(small_kdv_grid):
    with pytest.raises(FrontExitedDomain):
        oracle.run_kdv(0.375, small_kdv_grid, 30.0)
    truncated = small_kdv_grid.model_copy(update={"bc_right": BoundaryCondition.TRUNCATION})
    with pytest.raises(FrontExitedDomain):
        oracle.run_kdv(0.375, truncated, 29.0)


@pytest.mark.parametrize("omega0,t_final", [(0.0, 1.0), (0.3, -1.0)])
def test_bad_run_inputs(small_bbm_grid, omega0, t_final):
    with pytest.raises(PreconditionViolation):
        oracle.run_bbm(omega0, small_bbm_grid, t_final)


def test_run_accessors(small_bbm_grid):
    result = oracle.run_bbm(0.4, small_bbm_grid, 6.0, n_out=4)
    assert result.index_of(4.0) == 2
    with pytest.raises(PreconditionViolation):
        result.index_of(5.0)
    samples = result.samples(6.0, x_window=(0.0, 5.0))
    assert samples[0].method is Method.ORACLE
    assert max(s.x for s in samples) <= 5.0 + 1e-12
    assert result.energy(6.0) > 0.0
    assert result.energy(0.0) == 0.0


def test_grid_for_another_equation_is_rebound(small_kdv_grid):
    result = oracle.run_bbm(0.4, small_kdv_grid, 2.0, n_out=2)
    assert result.grid.equation is Equation.BBM


@pytest.mark.parametrize("equation,k", [(Equation.BBM, 0.5), (Equation.KDV, 0.5)])
def test_periodic_phase_speed_converges(equation, k):
    grid = OracleGrid(equation=equation, x_max=8.0 * math.pi, nx=800)
    x, u, speed = oracle.run_periodic(equation, k, grid, 10.0)
    assert speed == pytest.approx(oracle.continuous_phase_speed(equation, k), abs=1e-3)
    decay = math.exp(oracle.discrete_symbol(equation, np.array([k]), grid.h)[0].real * 10.0)
    assert np.allclose(u, decay * np.sin(k * (x - speed * 10.0)), atol=1e-10)


def test_bbm_phase_speed():
    assert oracle.continuous_phase_speed(Equation.BBM, 0.5) == pytest.approx(0.8)


def test_periodic_wavenumber_must_fit_the_domain():
    grid = OracleGrid(equation=Equation.BBM, x_max=10.0, nx=128)
    with pytest.raises(PreconditionViolation):
        oracle.run_periodic(Equation.BBM, 0.5, grid, 1.0)


@pytest.mark.parametrize("equation", [Equation.KDV, Equation.BBM])
def test_radau_matches_the_exponential_integrator(equation):
    grid = OracleGrid(equation=equation, x_max=20.0, nx=100, richardson=False, integrator="exponential")
    reference = oracle.run(equation, 0.4, grid, 5.0, n_out=3)
    stepped = oracle.run(equation, 0.4, grid.model_copy(update={"integrator": "radau"}), 5.0, n_out=3)
    assert np.allclose(stepped.u, reference.u, atol=1e-5)


def test_kdv_upwind_stencil_damps_the_grid_scale():
    h = 0.1
    theta = np.linspace(0.05, math.pi, 64)
    growth = oracle.discrete_symbol(Equation.KDV, theta / h, h)
    assert np.all(growth.real < 0.0)
    assert growth[-1].real == pytest.approx(-8.0 / h ** 3)


def test_kdv_error_estimate_shrinks_with_the_grid():
    coarse = OracleGrid(equation=Equation.KDV, x_max=30.0, nx=150)
    fine = coarse.model_copy(update={"nx": 300})
    e_coarse = oracle.run_kdv(0.375, coarse, 10.0, n_out=2).err[-1].max()
    e_fine = oracle.run_kdv(0.375, fine, 10.0, n_out=2).err[-1].max()
    assert e_fine < e_coarse


@pytest.mark.parametrize(
    "equation,omega0",
    [(Equation.KDV, 0.375), (Equation.KDV, 1.0), (Equation.BBM, 0.4), (Equation.BBM, 1.0)],
)
def test_default_grid_reproduces_the_exact_solution(equation, omega0):
    # relative L-inf over x in [0, 15] at t = 20
    t = 20.0
    exact_fn = fokas.kdv_exact if equation is Equation.KDV else fokas.bbm_exact
    result = oracle.run(equation, omega0, OracleGrid(equation=equation), t, n_out=2)
    xs = np.linspace(0.0, 15.0, 31)
    exact = np.array([exact_fn(x, t, omega0).value for x in xs])
    approx = np.array([result.value_at(x, t) for x in xs])
    assert np.max(np.abs(approx - exact)) <= 1e-3 * np.max(np.abs(exact))


@pytest.mark.parametrize("equation,omega0,min_ratio", [(Equation.KDV, 0.375, 1.6), (Equation.BBM, 0.4, 3.0)])
def test_base_scheme_converges_at_its_order(equation, omega0, min_ratio):
    t = 10.0
    exact_fn = fokas.kdv_exact if equation is Equation.KDV else fokas.bbm_exact
    xs = (2.0, 4.0, 6.0, 8.0)
    exact = np.array([exact_fn(x, t, omega0).value for x in xs])
    errors = []
    for nx in (150, 300):
        grid = OracleGrid(equation=equation, x_max=30.0, nx=nx, richardson=False)
        result = oracle.run(equation, omega0, grid, t, n_out=2)
        errors.append(np.max(np.abs([result.value_at(x, t) for x in xs] - exact)))
    assert errors[0] / errors[1] >= min_ratio
