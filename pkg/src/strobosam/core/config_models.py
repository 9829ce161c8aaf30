"""
Configuration models for StroboSAM runs.

These models hold every physical constant, solver setting and experiment
knob. They are built from defaults, from a flat `.strobosam.yml` file and
from CLI flags (in that order of precedence, lowest first).

Validation notes:
- All floats must be finite (no inf/nan sneaks into an integration)
- Tolerances, periods and step counts are strictly positive
- h = T0/m is always derived, never stored
"""
from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from strobosam.core.errors import ConfigError, SecondOrderFormError


TWO_PI = 2.0 * math.pi

# Integer-period test for τ₀/T₀; τ₀ = -1000 with T₀ = 1 must pass exactly.
INTEGER_PERIOD_TOL = 1e-9


def default_alpha_grid() -> list[float]:
    """Eight sweep rates, log-spaced from 1e-6 to 1e-3."""
    return [float(alpha) for alpha in np.logspace(-6.0, -3.0, 8)]


# =============================================================================
# OSCILLATOR
# =============================================================================


class OscillatorParams(BaseModel):
    """
    Duffing oscillator with swept forcing:

        θ'' + ω₀²θ − εγθ³ = εB cos(ω₀τ − ατ²/2)

    integrated from τ₀. `gamma` defaults to ω₀²/6 when omitted.
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    B: float = 2.0
    gamma: float
    epsilon: float = Field(default=0.05, ge=0.0)
    omega0: float = Field(default=TWO_PI, gt=0.0)
    alpha: float = Field(default=1e-4, ge=0.0)
    tau0: float = -1000.0

    @model_validator(mode="before")
    @classmethod
    def default_gamma(cls, data: Any) -> Any:
        """Fill gamma = omega0**2/6 when it is not given."""
        if isinstance(data, dict) and data.get("gamma") is None:
            omega0 = float(data.get("omega0", TWO_PI))
            data = {**data, "gamma": omega0 * omega0 / 6.0}
        return data

    @property
    def T0(self) -> float:
        """Period of the linearised oscillator."""
        return TWO_PI / self.omega0

    @property
    def has_integer_tau0(self) -> bool:
        periods = self.tau0 / self.T0
        return abs(periods - round(periods)) <= INTEGER_PERIOD_TOL * max(1.0, abs(periods))

    def with_sweep(self, alpha: float, epsilon: float) -> OscillatorParams:
        """Copy with a new (α, ε) pair, re-validated."""
        return OscillatorParams.model_validate({**self.model_dump(), "alpha": alpha, "epsilon": epsilon})


# =============================================================================
# SOLVER SETTINGS
# =============================================================================


class MacroConfig(BaseModel):
    """Settings for the adaptive (macro) Runge-Kutta integrator."""
    model_config = ConfigDict(allow_inf_nan=False)

    rel_tol: float = Field(default=1e-12, gt=0.0)
    abs_tol: float = Field(default=1e-12, gt=0.0)
    initial_step: float | None = Field(default=None, gt=0.0)
    max_steps: int = Field(default=5_000_000, ge=1)
    output_times: list[float] | None = None
    method: Literal["DOP853", "RK45"] = "DOP853"
    dense_output: bool = False

    @field_validator("output_times")
    @classmethod
    def strictly_increasing(cls, times: list[float] | None) -> list[float] | None:
        if times is None:
            return None
        if not times:
            raise ValueError("output_times must not be empty")
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise ValueError("output_times must be strictly increasing")
        return times


class MicroConfig(BaseModel):
    """
    Settings for SAM micro-integrations (Strang splitting).

    phase_convention="swapped" exchanges the roles of τ₀ and τ_M in the kick
    phases. It does not approximate the Duffing system and exists only so the
    failure can be demonstrated.
    """
    substeps_per_period: int = Field(default=40, ge=1)
    diff_order: Literal[2, 4] = 2
    phase_convention: Literal["standard", "swapped"] = "standard"

    def step(self, params: OscillatorParams) -> float:
        """Micro step h = T0/m."""
        return params.T0 / self.substeps_per_period


# =============================================================================
# EXPERIMENT
# =============================================================================
# Flat key groups accepted by `.strobosam.yml` and the CLI overrides.
# =============================================================================

PARAM_KEYS = frozenset({"B", "gamma", "omega0", "tau0", "epsilon", "alpha"})
MACRO_KEYS = frozenset({"rel_tol", "abs_tol", "max_steps", "method", "initial_step"})
MICRO_KEYS = frozenset({"substeps_per_period", "diff_order"})
TOP_KEYS = frozenset({
    "tau_end", "theta0", "v0", "alphas", "repeat", "stride",
    "workers", "detection_ratio", "bisection_tol",
})
FLAT_KEYS = PARAM_KEYS | MACRO_KEYS | MICRO_KEYS | TOP_KEYS


class ExperimentConfig(BaseModel):
    """
    Root configuration for simulations, threshold searches and sweeps.

    Example `.strobosam.yml` (flat, every key optional):

    B: 2.0
    omega0: 6.283185307179586
    tau0: -1000
    tau_end: 5000
    rel_tol: 1.0e-12
    abs_tol: 1.0e-12
    substeps_per_period: 40
    alphas: [1.0e-5, 1.0e-4]
    repeat: 10
    """
    params: OscillatorParams = Field(default_factory=lambda: OscillatorParams())
    tau_end: float = 5000.0
    theta0: float = 1e-9
    v0: float = 0.0
    macro: MacroConfig = Field(default_factory=MacroConfig)
    micro: MicroConfig = Field(default_factory=MicroConfig)
    alphas: list[float] = Field(default_factory=default_alpha_grid, min_length=1)
    repeat: int = Field(default=10, ge=1)
    stride: int = Field(default=1, ge=1)
    detection_ratio: float = Field(default=1.0 / 3.0, gt=0.0)
    bracket: tuple[float, float] = (0.95, 1.10)
    bisection_tol: float = Field(default=1e-6, gt=0.0)
    workers: int | None = Field(default=None, ge=1)

    @field_validator("alphas")
    @classmethod
    def positive_alphas(cls, alphas: list[float]) -> list[float]:
        if any(not math.isfinite(alpha) or alpha <= 0.0 for alpha in alphas):
            raise ValueError("sweep rates in `alphas` must be finite and positive")
        return sorted(alphas)

    @model_validator(mode="after")
    def check_span(self) -> ExperimentConfig:
        if self.tau_end - self.params.tau0 < self.params.T0:
            raise ValueError("integration span must cover at least one period T0")
        low, high = self.bracket
        if not 0.0 < low < high:
            raise ValueError("bracket factors must satisfy 0 < low < high")
        return self

    @property
    def y0(self) -> np.ndarray:
        return np.array([self.theta0, self.v0], dtype=float)

    @property
    def span(self) -> tuple[float, float]:
        return (self.params.tau0, self.tau_end)

    def require_integer_tau0(self) -> None:
        """The second-order averaged system is only known when τ₀/T₀ is an integer."""
        if not self.params.has_integer_tau0:
            raise SecondOrderFormError(
                f"tau0/T0 = {self.params.tau0 / self.params.T0!r} is not an integer"
            )

    # -------------------------------------------------------------------------
    # Flat key-value form
    # -------------------------------------------------------------------------

    @classmethod
    def from_flat(cls, flat: dict[str, Any]) -> ExperimentConfig:
        """Build a config from a flat mapping (config file / CLI flags)."""
        unknown = sorted(set(flat) - FLAT_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

        present = {key: value for key, value in flat.items() if value is not None}
        nested: dict[str, Any] = {
            "params": {key: present[key] for key in PARAM_KEYS if key in present},
            "macro": {key: present[key] for key in MACRO_KEYS if key in present},
            "micro": {key: present[key] for key in MICRO_KEYS if key in present},
        }
        nested.update({key: present[key] for key in TOP_KEYS if key in present})
        return cls.model_validate(nested)

    def to_flat(self) -> dict[str, Any]:
        flat: dict[str, Any] = self.params.model_dump()
        flat.update(self.macro.model_dump(include=set(MACRO_KEYS)))
        flat.update(self.micro.model_dump(include=set(MICRO_KEYS)))
        flat.update(self.model_dump(include=set(TOP_KEYS)))
        return flat

    def with_overrides(self, overrides: dict[str, Any]) -> ExperimentConfig:
        """
        Apply flat overrides on top of this config.

        A gamma that was only the ω₀²/6 default follows a new omega0.
        """
        flat = self.to_flat()
        changes = {key: value for key, value in overrides.items() if value is not None}
        if "omega0" in changes and "gamma" not in changes:
            if math.isclose(flat["gamma"], flat["omega0"] ** 2 / 6.0, rel_tol=1e-15):
                flat.pop("gamma")
        flat.update(changes)
        return ExperimentConfig.from_flat(flat)
