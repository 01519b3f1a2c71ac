from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class Equation(str, Enum):
    KDV = "kdv"
    BBM = "bbm"


class ModelFamily(str, Enum):
    THIRD_ORDER = "third_order"    # A_{-2} = 0, A_3 < 0
    SECOND_ORDER = "second_order"  # A_{-2} > 0, A_3 = 0
    GENERAL = "general"


class ModelCoefficients(BaseModel):
    """Model coefficients, entering through the dispersion relation

    omega(k) = (-A_0 - A_1 k + A_2 k^2 + A_3 k^3) / (1 + A_{-2} k^2).
    """

    model_config = ConfigDict(frozen=True)

    a_m2: float = Field(0.0, ge=0.0, description="A_{-2}, coefficient of the nonlocal term")
    a0: float = Field(0.0, description="A_0")
    a1: float = Field(0.0, description="A_1")
    a2: float = Field(0.0, description="A_2")
    a3: float = Field(0.0, le=0.0, description="A_3")

    @classmethod
    def kdv(cls) -> "ModelCoefficients":
        return cls(a_m2=0.0, a0=0.0, a1=-1.0, a2=0.0, a3=-1.0)

    @classmethod
    def bbm(cls) -> "ModelCoefficients":
        return cls(a_m2=1.0, a0=0.0, a1=-1.0, a2=0.0, a3=0.0)

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "ModelCoefficients":
        a_m2, a0, a1, a2, a3 = [float(v) for v in values]
        return cls(a_m2=a_m2, a0=a0, a1=a1, a2=a2, a3=a3)

    @property
    def family(self) -> ModelFamily:
        if self.a_m2 == 0.0 and self.a3 < 0.0:
            return ModelFamily.THIRD_ORDER
        if self.a_m2 > 0.0 and self.a3 == 0.0:
            return ModelFamily.SECOND_ORDER
        return ModelFamily.GENERAL

    @property
    def covered(self) -> bool:
        return self.family is not ModelFamily.GENERAL

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.a_m2, self.a0, self.a1, self.a2, self.a3)


class RootLocation(str, Enum):
    ON_DPLUS_BOUNDARY = "OnDPlusBoundary"
    ON_DMINUS_BOUNDARY = "OnDMinusBoundary"
    INTERIOR = "Interior"


class Membership(str, Enum):
    DPLUS = "DPlus"
    DMINUS = "DMinus"
    BOUNDARY = "Boundary"
    NEITHER = "Neither"


@dataclass(frozen=True)
class RegionMembership:
    indicator: float
    membership: Membership


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    location: RootLocation


@dataclass(frozen=True)
class RootSet:
    harmonic: int
    omega0: float
    roots: Tuple[Root, ...]
    k0_index: Optional[int] = None

    @property
    def k0(self) -> complex:
        if self.k0_index is None:
            raise LookupError("no radiating root selected")
        return self.roots[self.k0_index].value

    def values(self) -> list[complex]:
        return [r.value for r in self.roots]


@dataclass(frozen=True)
class CriticalFrequencies:
    omega_cr_minus: float
    omega_cr_plus: float
    omega_bar: Optional[float] = None
    degenerate: bool = False


@dataclass(frozen=True)
class FourierBoundary:
    """Finitely supported Dirichlet datum g0(t) ~ sum_n a_n exp(i n omega0 t)."""

    omega0: float
    coefficients: Dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")
        cleaned = {int(n): complex(a) for n, a in self.coefficients.items() if complex(a) != 0}
        object.__setattr__(self, "coefficients", cleaned)

    @classmethod
    def sinusoid(cls, omega0: float) -> "FourierBoundary":
        """The wavemaker preset g0(t) = sin(-omega0 t)."""
        return cls(omega0=omega0, coefficients={1: -1 / 2j, -1: 1 / 2j})

    @classmethod
    def from_pairs(cls, omega0: float, pairs: Dict[int, Tuple[float, float]]) -> "FourierBoundary":
        return cls(omega0=omega0, coefficients={int(n): complex(re, im) for n, (re, im) in pairs.items()})

    @property
    def is_real(self) -> bool:
        for n, a in self.coefficients.items():
            partner = self.coefficients.get(-n, 0j)
            if abs(partner - a.conjugate()) > 1e-14 * max(1.0, abs(a)):
                return False
        return True

    def value(self, t: float) -> complex:
        return sum(a * cmath.exp(1j * n * self.omega0 * t) for n, a in self.coefficients.items())


@dataclass(frozen=True)
class HarmonicDN:
    n: int
    a_n: complex
    k0: complex
    b_n: complex
    c_n: Optional[complex] = None


@dataclass(frozen=True)
class DNMapResult:
    omega0: float
    records: Tuple[HarmonicDN, ...] = ()
    is_real: bool = True

    def by_harmonic(self) -> Dict[int, HarmonicDN]:
        return {rec.n: rec for rec in self.records}
