"""Contour pieces in the spectral plane and the adaptive quadrature engine.

Every piece is parameterized over u in [0, 1]. Open pieces are integrated with
composite 16-point Gauss-Legendre panels whose breakpoints cluster at both
piece ends (where saddles and corners sit); full circles use the periodic
trapezoid rule. Both double their resolution until successive values agree.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from ..errors import NonConvergent

logger = logging.getLogger("wavemaker")

_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_CURVE_SAMPLES = 4000

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    periodic = False

    def point(self, u: np.ndarray) -> np.ndarray:
        return self.start + (self.end - self.start) * np.asarray(u, dtype=float)

    def derivative(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.end - self.start, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def distance_to(self, z: complex) -> float:
        d = self.end - self.start
        if d == 0:
            return abs(z - self.start)
        s = ((z - self.start) * d.conjugate()).real / abs(d) ** 2
        s = min(1.0, max(0.0, s))
        return abs(z - (self.start + s * d))

    def log_integral(self, z: complex) -> complex:
        """Exact value of the integral of dk / (k - z) along the segment."""
        return complex(np.log((self.end - z) / (self.start - z)))


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    @property
    def periodic(self) -> bool:
        return abs(abs(self.theta1 - self.theta0) - 2.0 * math.pi) <= 1e-14

    def point(self, u: np.ndarray) -> np.ndarray:
        theta = self.theta0 + (self.theta1 - self.theta0) * np.asarray(u, dtype=float)
        return self.center + self.radius * np.exp(1j * theta)

    def derivative(self, u: np.ndarray) -> np.ndarray:
        theta = self.theta0 + (self.theta1 - self.theta0) * np.asarray(u, dtype=float)
        return 1j * self.radius * (self.theta1 - self.theta0) * np.exp(1j * theta)

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)


@dataclass(frozen=True)
class HyperbolaBranch:
    """k(q) = side * sqrt((1 + q^2) / 3) + i q for q running from q0 to q1."""

    side: int
    q0: float
    q1: float

    periodic = False

    def _q(self, u):
        return self.q0 + (self.q1 - self.q0) * np.asarray(u, dtype=float)

    def point(self, u: np.ndarray) -> np.ndarray:
        q = self._q(u)
        return self.side * np.sqrt((1.0 + q * q) / 3.0) + 1j * q

    def derivative(self, u: np.ndarray) -> np.ndarray:
        q = self._q(u)
        dre = self.side * q / (3.0 * np.sqrt((1.0 + q * q) / 3.0))
        return (dre + 1j) * (self.q1 - self.q0)

    @property
    def length(self) -> float:
        u = np.linspace(0.0, 1.0, 257)
        return float(np.sum(np.abs(np.diff(self.point(u)))))


Piece = Union[LineSegment, Arc, HyperbolaBranch]


@dataclass(frozen=True)
class Contour:
    """Ordered pieces. Open contours run left to right and are closed over the
    upper half-plane when counting windings."""

    pieces: Tuple[Piece, ...]
    closed: bool = False

    @property
    def is_polygonal(self) -> bool:
        return all(isinstance(p, LineSegment) for p in self.pieces)

    def polyline(self) -> np.ndarray:
        pts = []
        for piece in self.pieces:
            if isinstance(piece, LineSegment):
                pts.extend([piece.start, piece.end])
            else:
                pts.extend(piece.point(np.linspace(0.0, 1.0, _CURVE_SAMPLES)))
        return np.asarray(pts, dtype=complex)

    def distance_to(self, z: complex) -> float:
        best = math.inf
        for piece in self.pieces:
            if isinstance(piece, LineSegment):
                best = min(best, piece.distance_to(z))
            else:
                best = min(best, float(np.min(np.abs(piece.point(np.linspace(0.0, 1.0, _CURVE_SAMPLES)) - z))))
        return best

    def winding_number(self, z: complex) -> int:
        pts = self.polyline()
        if not self.closed:
            start, end = pts[0], pts[-1]
            lift = 10.0 * max(abs(start), abs(end), abs(z), 1.0)
            top = max(start.imag, end.imag, z.imag) + lift
            pts = np.concatenate([pts, [complex(end.real, top), complex(start.real, top), start]])
        rel = pts - z
        turn = np.angle(rel[1:] / rel[:-1])
        return int(round(float(np.sum(turn)) / (2.0 * math.pi)))

    def log_integral(self, z: complex) -> complex:
        if not self.is_polygonal:
            raise TypeError("analytic pole subtraction needs a polygonal contour")
        return sum(p.log_integral(z) for p in self.pieces)

    @property
    def length(self) -> float:
        return sum(p.length for p in self.pieces)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    err_estimate: float
    nodes: int


def _breakpoints(panels: int) -> np.ndarray:
    u = np.linspace(0.0, 1.0, panels + 1)
    return u - np.sin(2.0 * math.pi * u) / (2.0 * math.pi)


def panel_nodes(piece: Piece, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes k and weights dk of the composite Gauss-Legendre rule on ``piece``."""
    b = _breakpoints(panels)
    half = 0.5 * (b[1:] - b[:-1])
    mid = 0.5 * (b[1:] + b[:-1])
    u = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return piece.point(u), w * piece.derivative(u)


def trapezoid_nodes(piece: Piece, n: int) -> Tuple[np.ndarray, np.ndarray]:
    u = np.arange(n) / n
    return piece.point(u), piece.derivative(u) / n


def _integrate_piece(piece: Piece, f: Integrand, start_nodes: int, tol_abs: float, rel_tol: float, budget: int):
    if piece.periodic:
        n = max(start_nodes, 16)
        k, dk = trapezoid_nodes(piece, n)
        prev = complex(np.sum(f(k) * dk))
        used = n
        while True:
            n *= 2
            k, dk = trapezoid_nodes(piece, n)
            cur = complex(np.sum(f(k) * dk))
            used += n
            err = abs(cur - prev)
            if err <= max(tol_abs, rel_tol * abs(cur)):
                return cur, err, used
            if used > budget:
                raise NonConvergent("periodic rule did not converge", nodes=used, err=err)
            prev = cur

    panels = max(2, start_nodes // _GL_ORDER)
    k, dk = panel_nodes(piece, panels)
    prev = complex(np.sum(f(k) * dk))
    used = k.size
    while True:
        panels *= 2
        k, dk = panel_nodes(piece, panels)
        cur = complex(np.sum(f(k) * dk))
        used += k.size
        err = abs(cur - prev)
        if err <= max(tol_abs, rel_tol * abs(cur)):
            return cur, err, used
        if used > budget:
            raise NonConvergent("panel doubling did not converge", nodes=used, err=err)
        prev = cur


def integrate(
    contour: Contour,
    f: Integrand,
    *,
    rel_tol: float,
    abs_tol: float,
    max_nodes: int,
    start_nodes: int = 64,
) -> QuadratureResult:
    """Adaptive integral of ``f`` along ``contour``; err_estimate = sum |I_2N - I_N|."""
    pieces = [p for p in contour.pieces if p.length > 0.0]
    total, err, used = 0j, 0.0, 0
    tol_abs = abs_tol / max(1, len(pieces))
    for piece in pieces:
        try:
            value, piece_err, n = _integrate_piece(piece, f, start_nodes, tol_abs, rel_tol, max_nodes - used)
        except NonConvergent as exc:
            logger.warning({"event": "quadrature.non_convergent", "piece": type(piece).__name__, **exc.context})
            raise
        total += value
        err += piece_err
        used += n
    return QuadratureResult(value=total, err_estimate=err, nodes=used)


def polygon(vertices: Sequence[complex], *, closed: bool = False) -> Contour:
    pts = list(vertices)
    if closed:
        pts.append(pts[0])
    pieces = tuple(LineSegment(a, b) for a, b in zip(pts[:-1], pts[1:]) if a != b)
    return Contour(pieces=pieces, closed=closed)
