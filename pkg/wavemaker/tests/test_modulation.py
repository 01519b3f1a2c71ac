import math

import pytest

from app.errors import AtGroupVelocity, PreconditionViolation, SupercriticalUnsupported
from app.schemas.model_schemas import Equation
from app.services import asymptotics as asy
from app.services.modulation import bbm_modulation, kdv_modulation, modulation


def test_kdv_plateau_carries_the_wavemaker_wave():
    state = kdv_modulation(0.375, 3.0 / 400.0)
    assert state.branch == "plateau"
    assert state.k == pytest.approx(0.5)
    assert state.omega == 0.375
    assert state.wave_at(3.0, 400.0) == pytest.approx(math.sin(1.5 - 150.0), abs=1e-12)


def test_bbm_plateau():
    state = bbm_modulation(0.4, 0.1)
    assert state.k == pytest.approx(0.5)
    assert state.amplitude_at(1000.0) == 1.0


@pytest.mark.parametrize("omega0,xi", [(0.375, 0.5), (0.2, 0.95)])
def test_kdv_fan_obeys_the_dispersion_relation(omega0, xi):
    state = kdv_modulation(omega0, xi)
    assert state.branch == "fan"
    assert state.omega == pytest.approx(state.k - state.k ** 3)
    assert 1.0 - 3.0 * state.k ** 2 == pytest.approx(xi)


@pytest.mark.parametrize("omega0,xi", [(0.4, 0.6), (0.2, 0.95)])
def test_bbm_fan_obeys_the_dispersion_relation(omega0, xi):
    state = bbm_modulation(omega0, xi)
    k = state.k
    assert state.omega == pytest.approx(k / (1.0 + k * k))
    assert (1.0 - k * k) / (1.0 + k * k) ** 2 == pytest.approx(xi)


@pytest.mark.parametrize("equation,omega0,xi", [(Equation.KDV, 0.375, 0.5), (Equation.BBM, 0.4, 0.6)])
def test_phase_derivatives_are_wavenumber_and_frequency(equation, omega0, xi):
    state = modulation(equation, omega0, xi)
    t = 200.0
    x = xi * t
    d = 1e-4
    theta_x = (state.phase_at(x + d, t) - state.phase_at(x - d, t)) / (2.0 * d)
    theta_t = (state.phase_at(x, t + d) - state.phase_at(x, t - d)) / (2.0 * d)
    assert theta_x == pytest.approx(state.k, rel=1e-6)
    assert theta_t == pytest.approx(-state.omega, rel=1e-6)


def test_kdv_fan_reproduces_the_region_ii_term():
    omega0, xi, t = 0.375, 0.5, 300.0
    state = kdv_modulation(omega0, xi)
    assert state.wave_at(xi * t, t) == pytest.approx(asy.kdv_algebraic_term(omega0, xi, t), rel=1e-9, abs=1e-14)


def test_bbm_fan_reproduces_the_region_ii_term():
    omega0, xi, t = 0.4, 0.6, 300.0
    state = bbm_modulation(omega0, xi)
    assert state.wave_at(xi * t, t) == pytest.approx(asy.bbm_algebraic_term(omega0, xi, t), rel=1e-9, abs=1e-14)


def test_fan_amplitude_decays_like_inverse_root_t():
    state = kdv_modulation(0.375, 0.5)
    assert state.amplitude_at(400.0) == pytest.approx(state.amplitude_at(100.0) / 2.0)


def test_custom_phase_constant_and_amplitude():
    state = kdv_modulation(0.375, 0.5, theta0=0.3, amplitude=lambda w, xi: 2.0)
    assert state.amplitude == 2.0
    assert state.phase_at(100.0, 200.0) == pytest.approx(state.phase(100.0, 200.0) + 0.3)


def test_singular_and_unsupported_inputs():
    with pytest.raises(SupercriticalUnsupported):
        kdv_modulation(0.6, 0.2)
    with pytest.raises(SupercriticalUnsupported):
        bbm_modulation(0.7, 0.2)
    with pytest.raises(AtGroupVelocity):
        bbm_modulation(0.4, asy.bbm_group_velocity(0.4))
    with pytest.raises(AtGroupVelocity):
        kdv_modulation(0.375, asy.kdv_group_velocity_curve(0.375))
    with pytest.raises(PreconditionViolation):
        kdv_modulation(0.375, 1.5)
