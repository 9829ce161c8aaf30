"""
Bisection for the minimum ε that produces autoresonance at a given α.
"""
from __future__ import annotations

import time
from typing import Callable

from strobosam.core.config_models import ExperimentConfig
from strobosam.core.errors import BracketFailureError, DivergenceError
from strobosam.core.log import log
from strobosam.core.types import TechniqueId, ThresholdResult
from strobosam.experiments.analysis import epsilon_app
from strobosam.experiments.techniques import run_technique

# ε ↦ "autoresonance happens"
Predicate = Callable[[float], bool]


def autoresonance_predicate(technique: TechniqueId, alpha: float, cfg: ExperimentConfig) -> Predicate:
    """Run-and-detect predicate for one (α, technique) pair. Timing runs once."""

    def predicate(epsilon: float) -> bool:
        run = run_technique(technique, alpha, epsilon, cfg, repeat=1)
        if run.status == "divergence" or run.verdict is None:
            raise DivergenceError(f"{technique} gave no verdict at epsilon={epsilon!r}: {run.message}")
        return run.verdict.detected

    return predicate


def threshold_bisection(
    alpha: float,
    technique: TechniqueId,
    cfg: ExperimentConfig,
    predicate: Predicate | None = None,
) -> ThresholdResult:
    """
    Bisect ε on [bracket_lo·ε_app, bracket_hi·ε_app] until the bracket is
    narrower than cfg.bisection_tol.

    Invariant: the predicate is False at eps_lo and True at eps_hi on every
    iteration. eps_min is the final midpoint.

    Raises:
        BracketFailureError: the predicate does not change sign across the
            initial bracket.
    """
    started = time.perf_counter()
    eps_app = epsilon_app(alpha, cfg.params)
    low_factor, high_factor = cfg.bracket
    eps_lo, eps_hi = low_factor * eps_app, high_factor * eps_app
    predicate = predicate or autoresonance_predicate(technique, alpha, cfg)

    log(f"🔍 {technique}: alpha={alpha:.3e}, eps_app={eps_app:.6g}, bracket=[{eps_lo:.6g}, {eps_hi:.6g}]")

    holds_low = predicate(eps_lo)
    holds_high = predicate(eps_hi)
    if holds_low or not holds_high:
        raise BracketFailureError(
            f"bracket failure: threshold outside [{low_factor}, {high_factor}]·eps_app "
            f"(alpha={alpha!r}, {technique}: lo={holds_low}, hi={holds_high})"
        )

    iterations = 0
    while eps_hi - eps_lo > cfg.bisection_tol:
        eps_mid = 0.5 * (eps_lo + eps_hi)
        holds = predicate(eps_mid)
        if holds:
            eps_hi = eps_mid
        else:
            eps_lo = eps_mid
        iterations += 1
        log(f"   #{iterations}: eps={eps_mid:.9f} -> {holds}, width={eps_hi - eps_lo:.2e}")

    wall_time = time.perf_counter() - started
    result = ThresholdResult(
        alpha=alpha,
        technique=technique,
        eps_lo=eps_lo,
        eps_hi=eps_hi,
        eps_min=0.5 * (eps_lo + eps_hi),
        eps_app=eps_app,
        iterations=iterations,
        wall_time=wall_time,
    )
    log(f"✅ {technique}: eps_min={result.eps_min:.9f} after {iterations} iterations ({wall_time:.1f}s)")
    return result
