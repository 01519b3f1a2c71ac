"""Error taxonomy shared by the library, the CLI and the HTTP service.

Every error carries a stable snake_case ``code``. The CLI writes it into the
``status`` column of failed rows, the HTTP layer returns it as the envelope
message.
"""

from __future__ import annotations


class WavemakerError(Exception):
    code = "wavemaker_error"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": str(self), **self.context}


class PoleOfDispersion(WavemakerError):
    code = "pole_of_dispersion"


class DegeneratePolynomial(WavemakerError):
    code = "degenerate_polynomial"


class NoUniqueRadiatingRoot(WavemakerError):
    code = "no_unique_radiating_root"


class UncoveredFamily(WavemakerError):
    code = "uncovered_family"


class UncoveredHarmonic(WavemakerError):
    code = "uncovered_harmonic"


class PreconditionViolation(WavemakerError, ValueError):
    code = "precondition_violation"


class NonConvergent(WavemakerError):
    code = "non_convergent"


class StrategyDomain(WavemakerError):
    code = "strategy_domain"


class OnRegionBoundary(WavemakerError):
    code = "on_region_boundary"


class SupercriticalUnsupported(WavemakerError):
    code = "supercritical_unsupported"


class AtGroupVelocity(WavemakerError):
    code = "at_group_velocity"


class StabilityViolation(WavemakerError):
    code = "stability_violation"


class FrontExitedDomain(WavemakerError):
    code = "front_exited_domain"


# CLI exit code 2 (bad input rather than a numerical failure)
INPUT_ERRORS = (UncoveredFamily, NoUniqueRadiatingRoot, PreconditionViolation, DegeneratePolynomial)
