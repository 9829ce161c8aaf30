from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, Field

from strobosam.core.config_models import OscillatorParams

TechniqueId = Literal["direct", "transformed", "averaged1", "averaged2", "sam_d2", "sam_d4"]
TECHNIQUES: tuple[TechniqueId, ...] = ("direct", "transformed", "averaged1", "averaged2", "sam_d2", "sam_d4")

RunStatus = Literal["ok", "divergence"]

# Vector field of (state, time), the calling convention of every integrator here.
VectorField = Callable[[np.ndarray, float], np.ndarray]


# =============================================================================
# STATE TUPLES
# =============================================================================
# Fields may be floats or equally-shaped arrays (whole trajectories).
# =============================================================================


class PhysState(NamedTuple):
    """Displacement θ and velocity v = dθ/dτ."""
    theta: Any
    v: Any


class RotatingState(NamedTuple):
    """Rotating-frame variables; tau_hat is the slow time ετ."""
    theta_hat: Any
    v_hat: Any
    tau_hat: Any


class PolarState(NamedTuple):
    """θ̂ = r cos φ, v̂ = −ω₀ r sin φ."""
    r: Any
    phi: Any


class SamState(NamedTuple):
    """Micro-integration state; tau_tilde = τ̂/ε, seeded with the macro time τ_M."""
    theta: float
    v: float
    tau_tilde: float


class ActionMismatch(NamedTuple):
    """Action I = r²/2 and mismatch Φ = φ + ατ²/2 (unwrapped)."""
    I: Any
    Phi: Any


# =============================================================================
# TRAJECTORY
# =============================================================================


@dataclass
class Trajectory:
    """
    Time-stamped state samples.

    `times` is always ascending; `direction` records whether the integration
    ran forward (+1) or backward (-1), so the final state of a backward run is
    the first row.
    """
    times: np.ndarray
    states: np.ndarray
    technique: str = "custom"
    wall_time: float = 0.0
    params: Optional[OscillatorParams] = None
    direction: int = 1
    steps: int = 0
    solution: Any = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(len(self.times), -1) if len(self.times) else states.reshape(0, 0)
        self.states = states

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_time(self) -> float:
        return float(self.times[-1] if self.direction > 0 else self.times[0])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1] if self.direction > 0 else self.states[0]

    def at(self, time: float) -> np.ndarray:
        """State recorded at `time` (must be one of the sample times)."""
        index = int(np.argmin(np.abs(self.times - time)))
        if not np.isclose(self.times[index], time, rtol=0.0, atol=1e-9 * max(1.0, abs(time))):
            raise KeyError(f"no sample at time {time!r}")
        return self.states[index]


# =============================================================================
# RESULTS
# =============================================================================


class AutoresonanceVerdict(BaseModel):
    """Final-time comparison of the action I with the quasi-static I₀."""
    detected: bool
    I_final: float
    I0_final: float
    relative_gap: float


class ThresholdResult(BaseModel):
    """Outcome of the ε-bisection for one (α, technique) pair."""
    alpha: float
    technique: str
    eps_lo: float
    eps_hi: float
    eps_min: float
    eps_app: float
    iterations: int = Field(ge=0)
    wall_time: float = Field(ge=0.0)


class BenchStats(BaseModel):
    """Wall-clock statistics over repeated runs of one technique."""
    technique: str
    alpha: float
    epsilon: float
    repeat: int
    mean: float
    min: float
    max: float


class SweepRow(BaseModel):
    """One CSV row of a sweep."""
    alpha: float
    technique: str
    eps_min: float
    eps_app: float
    wall_time: float
    eps_lo: float
    eps_hi: float
    iterations: int
    delta_eps: Optional[float] = None


@dataclass
class TechniqueRun:
    """A single technique run: physical trajectory plus verdict."""
    technique: TechniqueId
    status: RunStatus
    wall_time: float
    trajectory: Optional[Trajectory] = None
    verdict: Optional[AutoresonanceVerdict] = None
    message: str = ""
