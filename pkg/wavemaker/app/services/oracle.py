"""Method-of-lines reference solver for the linear KdV and BBM wavemaker problems.

Both problems live on [0, x_max] with node 0 held at g0(t) = -sin(omega0 t) and a
graded sponge in front of the right end:

* KdV, u_t = -D0 u - D3 u, with D3 the upwind-biased third difference on nodes
  j-1..j+2. Node 0 is the only boundary input, matching the single boundary
  condition of the continuous problem, and the stencil is dissipative for
  kh = O(1). The scheme is first order; Richardson extrapolation on h, h/2 and
  h/4 lifts it to third order.
* BBM, (1 - D+D-) u_t = -D0 u, with u_0 = g0 and u_t(0, t) = g0'(t) entering the
  tridiagonal mass matrix. Second order, lifted to fourth by h and h/2.

The semi-discrete system M u' = K u + Im(f e^{-i omega0 t}) is split into its
time-harmonic particular solution and a homogeneous remainder. The remainder is
advanced by the three-stage Radau IIA map (sparse, L-stable, fifth order), by a
dense matrix exponential, or by classical RK4.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import FrontExitedDomain, PreconditionViolation, StabilityViolation
from ..schemas.model_schemas import Equation, ModelCoefficients
from ..schemas.solution_schemas import BoundaryCondition, Method, OracleGrid, SolutionSample
from .dispersion import omega

logger = logging.getLogger("wavemaker")

FRONT_SAFETY = 0.95
RK4_STABILITY = 2.5  # radius of a disc inside the RK4 stability region's left half
DEFAULT_OUTPUTS = 11
RADAU_STEP = 0.05

# Radau IIA (s = 3) stability function P(z) / Q(z), highest power first
_RADAU_P = np.array([1.0 / 20.0, 2.0 / 5.0, 1.0])
_RADAU_Q = np.array([-1.0 / 60.0, 3.0 / 20.0, -3.0 / 5.0, 1.0])

# error expansion of each scheme in h: (leading power, power step, levels)
_RICHARDSON = {Equation.KDV: (1, 1, 3), Equation.BBM: (2, 2, 2)}


@dataclass(frozen=True)
class _System:
    """M u' = K u + Im(f e^{-i omega0 t}) on the nodes 1..nx-1; M = I when ``m`` is None."""

    k: sp.csc_matrix
    f: np.ndarray
    m: Optional[sp.csc_matrix]
    x: np.ndarray
    h: float

    def mass(self, v: np.ndarray) -> np.ndarray:
        return v if self.m is None else self.m @ v

    def dense(self) -> Tuple[np.ndarray, np.ndarray]:
        """A = M^-1 K and q = M^-1 f."""
        if self.m is None:
            return self.k.toarray(), self.f
        lu = spla.splu(self.m)
        return lu.solve(self.k.toarray()), lu.solve(self.f.real) + 1j * lu.solve(self.f.imag)


def _sponge(x: np.ndarray, grid: OracleGrid) -> np.ndarray:
    width = grid.sponge
    if width <= 0.0:
        return np.zeros_like(x)
    start = grid.x_max - width
    depth = np.clip((x - start) / width, 0.0, None)
    return grid.sponge_strength * depth ** 2


def _kdv_system(omega0: float, grid: OracleGrid, nx: int) -> _System:
    h = grid.x_max / nx
    x = np.arange(1, nx) * h
    n = x.size
    d0 = sp.diags([-1.0 / (2.0 * h), 1.0 / (2.0 * h)], [-1, 1], shape=(n, n))
    d3 = sp.diags([-1.0, 3.0, -3.0, 1.0], [-1, 0, 1, 2], shape=(n, n)) / h ** 3
    k = (-d0 - d3 - sp.diags(_sponge(x, grid))).tocsc()
    # u_0 = g enters row 1 through both stencils
    f = np.zeros(n, dtype=complex)
    f[0] = 1.0 / (2.0 * h) + 1.0 / h ** 3
    return _System(k=k, f=f, m=None, x=x, h=h)


def _bbm_system(omega0: float, grid: OracleGrid, nx: int) -> _System:
    h = grid.x_max / nx
    x = np.arange(1, nx) * h
    n = x.size
    inv_h2 = 1.0 / (h * h)
    m = sp.diags([-inv_h2, 1.0 + 2.0 * inv_h2, -inv_h2], [-1, 0, 1], shape=(n, n)).tocsc()
    d0 = sp.diags([-1.0 / (2.0 * h), 1.0 / (2.0 * h)], [-1, 1], shape=(n, n))
    k = (-d0 - sp.diags(_sponge(x, grid))).tocsc()
    # u_0 = g and u_t(0) = g' enter row 1 as g / 2h + g' / h^2
    f = np.zeros(n, dtype=complex)
    f[0] = 1.0 / (2.0 * h) - 1j * omega0 * inv_h2
    return _System(k=k, f=f, m=m, x=x, h=h)


def _build(equation: Equation, omega0: float, grid: OracleGrid, nx: int) -> _System:
    return _kdv_system(omega0, grid, nx) if equation is Equation.KDV else _bbm_system(omega0, grid, nx)


def rk4_step_bound(equation: Equation, grid: OracleGrid, nx: Optional[int] = None) -> float:
    """Largest stable RK4 step from the symbol bound of the semi-discrete operator."""
    h = grid.x_max / (nx or grid.nx)
    radius = 1.0 / h + grid.sponge_strength
    if equation is Equation.KDV:
        radius += 8.0 / h ** 3
    return RK4_STABILITY / radius


def _particular(system: _System, omega0: float) -> np.ndarray:
    n = system.f.size
    m = sp.identity(n, format="csc") if system.m is None else system.m
    return spla.spsolve((-1j * omega0 * m - system.k).tocsc(), system.f)


def _radau_poles() -> Tuple[float, float, complex, complex]:
    poles = np.roots(_RADAU_Q)
    residues = np.polyval(_RADAU_P, poles) / np.polyval(np.polyder(_RADAU_Q), poles)
    real = int(np.argmin(np.abs(poles.imag)))
    upper = int(np.argmax(poles.imag))
    return float(poles[real].real), float(residues[real].real), complex(poles[upper]), complex(residues[upper])


def _radau(system: _System, omega0: float, times: np.ndarray, dt: float) -> np.ndarray:
    n = system.f.size
    particular = _particular(system, omega0)
    out = np.empty((times.size, n))
    w = -particular.imag
    out[0] = 0.0
    if times.size > 1:
        span = times[1] - times[0]
        steps = max(1, math.ceil(span / dt - 1e-12))
        k = span / steps
        m = sp.identity(n, format="csc") if system.m is None else system.m
        q_re, r_re, q_c, r_c = _radau_poles()
        lu_re = spla.splu((k * system.k - q_re * m).tocsc())
        lu_c = spla.splu((k * system.k - q_c * m).astype(complex).tocsc())
        for i in range(1, times.size):
            for _ in range(steps):
                v = system.mass(w)
                w = r_re * lu_re.solve(v) + 2.0 * (r_c * lu_c.solve(v.astype(complex))).real
            out[i] = (particular * np.exp(-1j * omega0 * times[i])).imag + w
    return out


def _exponential(system: _System, omega0: float, times: np.ndarray) -> np.ndarray:
    a, q = system.dense()
    n = a.shape[0]
    particular = sla.solve(-1j * omega0 * np.eye(n) - a, q)
    out = np.empty((times.size, n))
    w = -particular.imag
    step = sla.expm(a * (times[1] - times[0])) if times.size > 1 else None
    for i, t in enumerate(times):
        if i > 0:
            w = step @ w
        out[i] = (particular * np.exp(-1j * omega0 * t)).imag + w
    return out


def _rk4(system: _System, omega0: float, times: np.ndarray, dt: float) -> np.ndarray:
    a, q = system.dense()

    def rhs(t, u):
        return a @ u + (q * np.exp(-1j * omega0 * t)).imag

    out = np.zeros((times.size, a.shape[0]))
    u = out[0].copy()
    for i in range(1, times.size):
        span = times[i] - times[i - 1]
        steps = max(1, math.ceil(span / dt - 1e-12))
        k = span / steps
        t = times[i - 1]
        for _ in range(steps):
            k1 = rhs(t, u)
            k2 = rhs(t + k / 2, u + k / 2 * k1)
            k3 = rhs(t + k / 2, u + k / 2 * k2)
            k4 = rhs(t + k, u + k * k3)
            u = u + k / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += k
        out[i] = u
    return out


def _solve(equation: Equation, omega0: float, grid: OracleGrid, nx: int, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Field on the nodes 0..nx of [0, x_max] at every output time."""
    system = _build(equation, omega0, grid, nx)
    if grid.integrator == "rk4":
        bound = rk4_step_bound(equation, grid, nx)
        dt = grid.dt if grid.dt is not None else 0.9 * bound
        if dt > bound:
            raise StabilityViolation("RK4 step exceeds the stability bound", dt=dt, bound=bound, nx=nx)
        inner = _rk4(system, omega0, times, dt)
    elif grid.integrator == "exponential":
        inner = _exponential(system, omega0, times)
    else:
        inner = _radau(system, omega0, times, grid.dt or RADAU_STEP)

    x = np.arange(nx + 1) * system.h
    field = np.zeros((times.size, nx + 1))
    field[:, 0] = -np.sin(omega0 * times)
    field[:, 1:nx] = inner
    return x, field


def _extrapolate(levels: List[np.ndarray], power: int, step: int) -> Tuple[np.ndarray, np.ndarray]:
    """Richardson table on grids h, h/2, h/4, ... sampled at the coarse nodes."""
    row = list(levels)
    previous = row[-1]
    p = power
    while len(row) > 1:
        previous = row[-1]
        factor = 2.0 ** p - 1.0
        row = [fine + (fine - coarse) / factor for coarse, fine in zip(row[:-1], row[1:])]
        p += step
    return row[0], np.abs(row[0] - previous)


@dataclass
class OracleRun:
    equation: Equation
    omega0: float
    grid: OracleGrid
    times: np.ndarray
    x: np.ndarray
    u: np.ndarray
    err: np.ndarray
    wall_time: float = 0.0

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise PreconditionViolation("no snapshot at the requested time", t=t)
        return i

    def snapshot(self, t: float) -> np.ndarray:
        return self.u[self.index_of(t)]

    def value_at(self, x: float, t: float) -> float:
        return float(np.interp(x, self.x, self.snapshot(t)))

    def energy(self, t: float) -> float:
        """Discrete L2 norm squared on the un-sponged interior."""
        keep = self.x <= self.grid.x_max - self.grid.sponge
        u = self.snapshot(t)[keep]
        return float((self.x[1] - self.x[0]) * np.sum(u * u))

    def samples(self, t: float, x_window: Optional[Tuple[float, float]] = None) -> List[SolutionSample]:
        i = self.index_of(t)
        lo, hi = x_window or (0.0, self.grid.x_max - self.grid.sponge)
        out = []
        for xv, uv, ev in zip(self.x, self.u[i], self.err[i]):
            if lo - 1e-12 <= xv <= hi + 1e-12:
                out.append(
                    SolutionSample(
                        x=float(xv),
                        t=float(self.times[i]),
                        value=float(uv),
                        method=Method.ORACLE,
                        err_estimate=float(ev),
                        model=self.equation.value,
                        omega0=self.omega0,
                    )
                )
        return out


def _output_times(t_final: float, n_out: int) -> np.ndarray:
    if n_out < 2:
        raise PreconditionViolation("need at least two output times", n_out=n_out)
    return np.linspace(0.0, t_final, n_out)


def _run(equation: Equation, omega0: float, grid: OracleGrid, t_final: float, n_out: int) -> OracleRun:
    if omega0 <= 0:
        raise PreconditionViolation("omega0 must be positive", omega0=omega0)
    if t_final < 0:
        raise PreconditionViolation("t_final must be non-negative", t_final=t_final)
    if grid.equation is not equation:
        grid = grid.model_copy(update={"equation": equation})
    reach = FRONT_SAFETY * (grid.x_max - grid.sponge)
    if grid.bc_right is BoundaryCondition.TRUNCATION:
        reach = FRONT_SAFETY * grid.x_max
    if t_final > reach:
        raise FrontExitedDomain("the wavefront reaches the outflow layer", t_final=t_final, reach=reach)

    times = _output_times(t_final, n_out)
    start = time.perf_counter()
    if t_final == 0.0:
        x = np.arange(grid.nx + 1) * grid.h
        u = np.zeros((times.size, x.size))
        err = np.zeros_like(u)
        levels = 0
    else:
        leading, step, depth = _RICHARDSON[equation]
        levels = 1 + (depth - 1) * int(grid.richardson)
        fields = []
        for level in range(levels):
            x_level, field = _solve(equation, omega0, grid, grid.nx * 2 ** level, times)
            fields.append(field[:, :: 2 ** level])
            if level == 0:
                x = x_level
        if levels > 1:
            u, err = _extrapolate(fields, leading, step)
        else:
            u, err = fields[0], np.zeros_like(fields[0])
    wall = time.perf_counter() - start
    logger.info(
        {
            "event": "oracle.run",
            "equation": equation.value,
            "omega0": omega0,
            "nx": grid.nx,
            "x_max": grid.x_max,
            "integrator": grid.integrator,
            "richardson": grid.richardson,
            "levels": levels,
            "t_final": t_final,
            "wall_time": round(wall, 3),
        }
    )
    return OracleRun(equation=equation, omega0=omega0, grid=grid, times=times, x=x, u=u, err=err, wall_time=wall)


def run_kdv(omega0: float, grid: OracleGrid, t_final: float, *, n_out: int = DEFAULT_OUTPUTS) -> OracleRun:
    return _run(Equation.KDV, omega0, grid, t_final, n_out)


def run_bbm(omega0: float, grid: OracleGrid, t_final: float, *, n_out: int = DEFAULT_OUTPUTS) -> OracleRun:
    return _run(Equation.BBM, omega0, grid, t_final, n_out)


def run(equation: Equation, omega0: float, grid: OracleGrid, t_final: float, *, n_out: int = DEFAULT_OUTPUTS) -> OracleRun:
    return _run(equation, omega0, grid, t_final, n_out)


def discrete_symbol(equation: Equation, k: np.ndarray, h: float) -> np.ndarray:
    """Growth rate lambda(k) of e^{ikx} under the interior stencils; Re lambda < 0 for KdV."""
    d0 = 1j * np.sin(k * h) / h
    half = k * h / 2.0
    if equation is Equation.KDV:
        d3 = -8j * np.exp(1j * half) * np.sin(half) ** 3 / h ** 3
        return -d0 - d3
    lap = -4.0 * np.sin(half) ** 2 / (h * h)
    return -d0 / (1.0 - lap)


def run_periodic(equation: Equation, k: float, grid: OracleGrid, t_final: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """Advance sin(k x) on the periodic domain [0, x_max) exactly in time.

    Returns (x, u(x, t_final), measured phase speed). k must fit the domain.
    """
    cycles = k * grid.x_max / (2.0 * math.pi)
    if abs(cycles - round(cycles)) > 1e-9 or round(cycles) == 0:
        raise PreconditionViolation("k must be a nonzero multiple of 2 pi / x_max", k=k, x_max=grid.x_max)
    h = grid.h
    x = np.arange(grid.nx) * h
    u0 = np.sin(k * x)
    wavenumbers = 2.0 * math.pi * np.fft.fftfreq(grid.nx, d=h)
    growth = discrete_symbol(equation, wavenumbers, h)
    u = np.real(np.fft.ifft(np.fft.fft(u0) * np.exp(growth * t_final)))
    speed = float(np.imag(-discrete_symbol(equation, np.array([k]), h)[0]) / k)
    return x, u, speed


def continuous_phase_speed(equation: Equation, k: float) -> float:
    coeffs = ModelCoefficients.kdv() if equation is Equation.KDV else ModelCoefficients.bbm()
    return float(omega(coeffs, k)) / k
