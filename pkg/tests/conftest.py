from __future__ import annotations

import math

import pytest

from strobosam.core.config_models import ExperimentConfig, OscillatorParams


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("STROBOSAM_QUIET", "true")


@pytest.fixture
def ref_params() -> OscillatorParams:
    """B = 2, γ = ω₀²/6, ω₀ = 2π, ε = 0.05, α = 1e-4, τ₀ = −1000."""
    return OscillatorParams()


@pytest.fixture
def ref_config() -> ExperimentConfig:
    """Full [−1000, 5000] experiment at solver tolerance 1e-12."""
    return ExperimentConfig()


@pytest.fixture
def short_config() -> ExperimentConfig:
    """First 50 periods of the reference run; cheap enough for the default suite."""
    return ExperimentConfig(tau_end=-950.0, repeat=1)


@pytest.fixture
def harmonic_params() -> OscillatorParams:
    """Pure periodic forcing (α = 0) started at τ₀ = 0."""
    return OscillatorParams(alpha=0.0, tau0=0.0, omega0=2.0 * math.pi)
