"""
Exception hierarchy for StroboSAM.

Every error carries a stable `kind` string (what the CLI prints in its JSON
error document) and the process exit code the CLI should use for it.
"""
from __future__ import annotations

from typing import Any


class StroboError(Exception):
    """Base class for all StroboSAM failures."""
    kind: str = "error"
    exit_code: int = 2

    def to_json(self) -> dict[str, Any]:
        return {"error": self.kind, "message": str(self) or self.kind}


# =============================================================================
# NUMERICAL INTEGRATION FAILURES
# =============================================================================


class IntegrationError(StroboError):
    """An ODE integration could not be carried to the end of its span."""
    kind = "integration failure"


class StepSizeUnderflowError(IntegrationError):
    kind = "stiffness/accuracy failure"


class BudgetExhaustedError(IntegrationError):
    kind = "budget exhausted"


class DivergenceError(IntegrationError):
    kind = "divergence"


# =============================================================================
# DOMAIN ERRORS
# =============================================================================
# Raised when an operation is evaluated outside the region where its formula
# is defined. They are ValueErrors as well so plain callers can catch them.
# =============================================================================


class DegenerateSlowTimeError(StroboError, ValueError):
    kind = "degenerate slow time"


class SecondOrderFormError(StroboError, ValueError):
    kind = "second-order form invalid for this τ₀"


class PolarSingularityError(StroboError, ValueError):
    kind = "polar singularity"


class PhaseUndefinedError(StroboError, ValueError):
    kind = "phase undefined"


class ThresholdUndefinedError(StroboError, ValueError):
    kind = "threshold undefined (linear/unforced case)"


class RootSolveError(StroboError, ValueError):
    kind = "root solve failure"


class InvalidActionError(StroboError, ValueError):
    kind = "invalid action"


class BracketFailureError(StroboError, ValueError):
    kind = "bracket failure: threshold outside [0.95, 1.10]·ε_app"


class InsufficientDataError(StroboError, ValueError):
    kind = "insufficient data"


# =============================================================================
# USAGE ERRORS
# =============================================================================


class ConfigError(StroboError):
    """Bad config file, bad flag combination or unknown technique."""
    kind = "usage error"
    exit_code = 1
