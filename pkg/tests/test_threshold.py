from __future__ import annotations

import pytest

from strobosam.core.config_models import ExperimentConfig, default_alpha_grid
from strobosam.core.errors import BracketFailureError
from strobosam.core.types import TECHNIQUES
from strobosam.experiments.analysis import epsilon_app
from strobosam.experiments.techniques import run_technique
from strobosam.experiments.threshold import threshold_bisection


class RecordingPredicate:
    """ε ≥ c, remembering every ε it was asked about."""

    def __init__(self, critical: float) -> None:
        self.critical = critical
        self.calls: list[float] = []

    def __call__(self, epsilon: float) -> bool:
        self.calls.append(epsilon)
        return epsilon >= self.critical


def test_bisection_finds_synthetic_threshold(ref_config: ExperimentConfig) -> None:
    eps_app = epsilon_app(1e-4, ref_config.params)
    predicate = RecordingPredicate(1.0123 * eps_app)

    result = threshold_bisection(1e-4, "direct", ref_config, predicate)

    assert result.eps_min == pytest.approx(predicate.critical, abs=5e-7)
    assert 0.0 < result.eps_hi - result.eps_lo <= 1e-6
    assert result.eps_lo < predicate.critical <= result.eps_hi
    assert result.eps_app == eps_app
    assert result.iterations == len(predicate.calls) - 2
    assert result.technique == "direct"


def test_bisection_keeps_enclosure(ref_config: ExperimentConfig) -> None:
    predicate = RecordingPredicate(0.0271)
    result = threshold_bisection(1e-4, "averaged1", ref_config, predicate)

    eps_lo, eps_hi = predicate.calls[0], predicate.calls[1]
    for epsilon in predicate.calls[2:]:
        assert eps_lo < epsilon < eps_hi
        if predicate(epsilon):
            eps_hi = epsilon
        else:
            eps_lo = epsilon
        assert not predicate(eps_lo) and predicate(eps_hi)
    assert (eps_lo, eps_hi) == (result.eps_lo, result.eps_hi)


def test_bisection_tolerance_is_configurable(ref_config: ExperimentConfig) -> None:
    coarse = ref_config.model_copy(update={"bisection_tol": 1e-4})
    result = threshold_bisection(1e-4, "direct", coarse, RecordingPredicate(0.0271))
    assert result.eps_hi - result.eps_lo <= 1e-4
    assert result.iterations < 10


@pytest.mark.parametrize("critical", [0.001, 1.0])
def test_bracket_failure(ref_config: ExperimentConfig, critical: float) -> None:
    with pytest.raises(BracketFailureError):
        threshold_bisection(1e-4, "direct", ref_config, RecordingPredicate(critical))


# =============================================================================
# FULL RUNS
# =============================================================================


@pytest.mark.slow
def test_direct_threshold_inside_bracket(ref_config: ExperimentConfig) -> None:
    result = threshold_bisection(1e-4, "direct", ref_config)
    eps_app = epsilon_app(1e-4, ref_config.params)
    assert 0.95 * eps_app <= result.eps_min <= 1.10 * eps_app
    assert result.eps_hi - result.eps_lo <= 1e-6


@pytest.mark.slow
def test_averaged_threshold_matches_direct(ref_config: ExperimentConfig) -> None:
    direct = threshold_bisection(1e-4, "direct", ref_config)
    averaged = threshold_bisection(1e-4, "averaged1", ref_config)
    assert averaged.eps_min == pytest.approx(direct.eps_min, rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("alpha", default_alpha_grid())
def test_bracket_ends_hold_for_direct_integration(ref_config: ExperimentConfig, alpha: float) -> None:
    eps_app = epsilon_app(alpha, ref_config.params)
    below = run_technique("direct", alpha, 0.95 * eps_app, ref_config, repeat=1)
    above = run_technique("direct", alpha, 1.10 * eps_app, ref_config, repeat=1)
    assert below.verdict is not None and not below.verdict.detected
    assert above.verdict is not None and above.verdict.detected


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [1e-4, 1e-5])
def test_all_techniques_agree_on_threshold(ref_config: ExperimentConfig, alpha: float) -> None:
    thresholds = [threshold_bisection(alpha, technique, ref_config).eps_min for technique in TECHNIQUES]
    assert max(thresholds) <= 1.02 * min(thresholds)
