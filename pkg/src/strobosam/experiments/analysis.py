"""
Autoresonance diagnostics.

Action/mismatch variables, the quasi-static action I₀(τ), the potential-well
condition and its closed-form threshold, the end-of-run detector and the
√τ growth fit.

Conventions (first-order averaged system, polar variables):
- I = r²/2 is the action, Φ = φ + ατ²/2 the mismatch (unwrapped along a
  trajectory)
- I₀(τ) solves ατ − ε(3γ/(4ω₀)·I₀ − √2B/(4ω₀)·I₀^{−1/2}) = 0
- A run is autoresonant when |I − I₀|/I₀ ≤ 1/3 at its final time
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from strobosam.core.config_models import OscillatorParams
from strobosam.core.errors import (
    DivergenceError,
    InsufficientDataError,
    InvalidActionError,
    RootSolveError,
    ThresholdUndefinedError,
)
from strobosam.core.types import ActionMismatch, AutoresonanceVerdict, PolarState, Trajectory
from strobosam.models.averaging import hat_to_polar
from strobosam.models.duffing import phys_to_rotating

SQRT2 = math.sqrt(2.0)

# 2^{10/3} / 3^{5/3}
EPS_APP_COEFFICIENT = 2.0 ** (10.0 / 3.0) / 3.0 ** (5.0 / 3.0)

MIN_GROWTH_SAMPLES = 20

# Geometric bracket growth for the I₀ root in x = √I₀
_BRACKET_FACTOR = 2.0
_BRACKET_MAX_EXPANSIONS = 400
_ROOT_MAX_ITER = 200


def _require_nonlinear_forced(params: OscillatorParams) -> None:
    if params.B <= 0.0 or params.gamma <= 0.0:
        raise ThresholdUndefinedError(
            f"threshold undefined (linear/unforced case): B={params.B!r}, gamma={params.gamma!r}"
        )


# =============================================================================
# CLOSED-FORM THRESHOLD
# =============================================================================


def epsilon_app(alpha: float, params: OscillatorParams) -> float:
    """ε_app = sqrt(2^{10/3}/3^{5/3} · B^{−4/3} γ^{−2/3} ω₀² α)."""
    _require_nonlinear_forced(params)
    if alpha < 0.0:
        raise ValueError("alpha must be non-negative")
    eps2 = (
        EPS_APP_COEFFICIENT
        * params.B ** (-4.0 / 3.0)
        * params.gamma ** (-2.0 / 3.0)
        * params.omega0 ** 2
        * alpha
    )
    return math.sqrt(eps2)


# =============================================================================
# ACTION / MISMATCH
# =============================================================================


def action_mismatch(p: PolarState, tau, params: OscillatorParams) -> ActionMismatch:
    """I = r²/2, Φ = φ + ατ²/2, both pointwise."""
    r = np.asarray(p.r, dtype=float)
    tau = np.asarray(tau, dtype=float)
    action = 0.5 * r * r
    mismatch = np.asarray(p.phi, dtype=float) + 0.5 * params.alpha * tau * tau
    if action.ndim == 0 and mismatch.ndim == 0:
        return ActionMismatch(I=float(action), Phi=float(mismatch))
    return ActionMismatch(I=action, Phi=mismatch)


def action_mismatch_rhs(am: ActionMismatch, tau: float, params: OscillatorParams) -> tuple[float, float]:
    """
    First-order averaged system in (I, Φ):

        dI/dτ = −ε (√2B/(2ω₀)) √I sin Φ
        dΦ/dτ = ατ − ε (3γ/(4ω₀) I + √2B/(4ω₀) I^{−1/2} cos Φ)
    """
    if am.I <= 0.0:
        raise InvalidActionError(f"action must be positive, got {am.I!r}")
    eps, B, gamma, omega0 = params.epsilon, params.B, params.gamma, params.omega0
    root_action = math.sqrt(am.I)
    d_action = -eps * SQRT2 * B / (2.0 * omega0) * root_action * math.sin(am.Phi)
    d_mismatch = params.alpha * tau - eps * (
        3.0 * gamma / (4.0 * omega0) * am.I
        + SQRT2 * B / (4.0 * omega0) / root_action * math.cos(am.Phi)
    )
    return d_action, d_mismatch


# =============================================================================
# QUASI-STATIC ACTION I₀
# =============================================================================


def _i0_residual(x: float, drive: float, params: OscillatorParams) -> float:
    """Implicit I₀ equation in x = √I₀; strictly decreasing in x > 0."""
    a = 3.0 * params.gamma / (4.0 * params.omega0)
    b = SQRT2 * params.B / (4.0 * params.omega0)
    return drive - params.epsilon * (a * x * x - b / x)


def solve_I0(tau: float, params: OscillatorParams) -> float:
    """
    The unique positive root I₀(τ) of the implicit quasi-static equation.

    The residual falls from +∞ to −∞ as √I₀ goes from 0 to ∞. A bracket is
    grown geometrically from √I₀ = 1, then refined with Brent's method.

    Raises:
        ThresholdUndefinedError: ε, B or γ is not positive.
        RootSolveError: no bracket or no convergence within the budget.
    """
    _require_nonlinear_forced(params)
    if params.epsilon <= 0.0:
        raise ThresholdUndefinedError("I0 is undefined for epsilon = 0")

    drive = params.alpha * tau

    def residual(x: float) -> float:
        return _i0_residual(x, drive, params)

    low = high = 1.0
    if residual(1.0) > 0.0:
        for _ in range(_BRACKET_MAX_EXPANSIONS):
            high *= _BRACKET_FACTOR
            if residual(high) <= 0.0:
                break
            low = high
        else:
            raise RootSolveError(f"root solve failure: no upper bracket for I0 at tau={tau!r}")
    else:
        for _ in range(_BRACKET_MAX_EXPANSIONS):
            low /= _BRACKET_FACTOR
            if residual(low) >= 0.0:
                break
            high = low
        else:
            raise RootSolveError(f"root solve failure: no lower bracket for I0 at tau={tau!r}")

    if residual(high) == 0.0:
        return high * high
    if residual(low) == 0.0:
        return low * low

    root, info = brentq(residual, low, high, xtol=1e-300, rtol=4.0 * np.finfo(float).eps,
                        maxiter=_ROOT_MAX_ITER, full_output=True, disp=False)
    if not info.converged:
        raise RootSolveError(f"root solve failure: {info.flag} at tau={tau!r}")
    return root * root


# =============================================================================
# POTENTIAL WELL
# =============================================================================


class WellThreshold(NamedTuple):
    """Critical action and the ε² above which a well exists for every I₀."""
    I0: float
    eps2: float


def _well_depth_factor(I0: float, params: OscillatorParams) -> float:
    """(√2B/(2ω₀))√I₀ · (3γ/(4ω₀) + √2B/(8ω₀) I₀^{−3/2})."""
    omega0 = params.omega0
    return (
        SQRT2 * params.B / (2.0 * omega0) * math.sqrt(I0)
        * (3.0 * params.gamma / (4.0 * omega0) + SQRT2 * params.B / (8.0 * omega0) * I0 ** -1.5)
    )


def well_threshold_eps2(I0: float, alpha: float, params: OscillatorParams) -> float:
    """
    ε² at which the oscillatory slope of the mismatch potential equals its
    tilt α/S at this I₀. A well exists at (ε, I₀) iff ε² exceeds it.
    """
    if I0 <= 0.0:
        raise InvalidActionError(f"invalid action I0={I0!r}")
    return alpha / _well_depth_factor(I0, params)


def critical_well_threshold(alpha: float, params: OscillatorParams) -> WellThreshold:
    """
    Extremum of well_threshold_eps2 over I₀ > 0, found numerically in log I₀.

    The well-depth factor has a single minimum, so ε² has a single maximum;
    it should coincide with epsilon_app(alpha)**2.
    """
    _require_nonlinear_forced(params)
    result = minimize_scalar(
        lambda log_i0: _well_depth_factor(math.exp(log_i0), params),
        bounds=(-60.0, 60.0),
        method="bounded",
        options={"xatol": 1e-12, "maxiter": 2000},
    )
    if not result.success:
        raise RootSolveError(f"well threshold extremisation failed: {result.message}")
    critical_i0 = math.exp(result.x)
    return WellThreshold(I0=critical_i0, eps2=well_threshold_eps2(critical_i0, alpha, params))


# =============================================================================
# TRAJECTORY DIAGNOSTICS
# =============================================================================


class Diagnostics(NamedTuple):
    """Per-sample physical state with derived polar/action columns."""
    tau: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    r: np.ndarray
    I: np.ndarray
    Phi: np.ndarray


def trajectory_diagnostics(traj: Trajectory, params: OscillatorParams) -> Diagnostics:
    """
    (r, I, Φ) along a physical trajectory.

    Φ is wrapped into (−π, π] sample by sample and then unwrapped. Once
    captured, φ alone turns by about −ατT₀ per period, which exceeds π for the
    larger sweep rates, so φ itself cannot be unwrapped.
    """
    times = traj.times
    theta, v = traj.states[:, 0], traj.states[:, 1]
    theta_hat, v_hat = phys_to_rotating((theta, v), times, params)
    r = np.hypot(theta_hat, v_hat / params.omega0)

    # φ is undefined at r = 0; those samples carry φ = 0.
    phi = np.zeros_like(r)
    nonzero = r > 0.0
    if np.any(nonzero):
        phi[nonzero] = hat_to_polar(theta_hat[nonzero], v_hat[nonzero], params).phi

    am = action_mismatch(PolarState(r=r, phi=phi), times, params)
    mismatch = np.unwrap(np.angle(np.exp(1j * np.asarray(am.Phi))))
    return Diagnostics(tau=times, theta=theta, v=v, r=r, I=np.asarray(am.I), Phi=mismatch)


def detect_autoresonance(
    traj: Trajectory,
    params: OscillatorParams,
    ratio: float = 1.0 / 3.0,
) -> AutoresonanceVerdict:
    """
    Compare the final action with I₀ at the final time.

    Raises:
        DivergenceError: the final state is not finite.
    """
    final_state = traj.final_state
    final_time = traj.final_time
    if not np.all(np.isfinite(final_state)):
        raise DivergenceError(f"non-finite final state at tau={final_time!r}")

    theta_hat, v_hat = phys_to_rotating(final_state, final_time, params)
    r = math.hypot(float(theta_hat), float(v_hat) / params.omega0)
    action = 0.5 * r * r
    quasi_static = solve_I0(final_time, params)
    gap = abs(action - quasi_static) / quasi_static
    return AutoresonanceVerdict(
        detected=gap <= ratio,
        I_final=action,
        I0_final=quasi_static,
        relative_gap=gap,
    )


def growth_exponent(traj: Trajectory, window: tuple[float, float], params: OscillatorParams) -> float:
    """
    Least-squares slope of log r against log τ over the window.

    Raises:
        ValueError: the window does not start at a positive time.
        InsufficientDataError: fewer than 20 samples fall inside the window.
    """
    tau_a, tau_b = window
    if tau_a <= 0.0 or tau_b <= tau_a:
        raise ValueError(f"fit window must satisfy 0 < tau_a < tau_b, got {window!r}")

    inside = (traj.times >= tau_a) & (traj.times <= tau_b)
    count = int(np.count_nonzero(inside))
    if count < MIN_GROWTH_SAMPLES:
        raise InsufficientDataError(f"insufficient data: {count} samples in {window!r}, need {MIN_GROWTH_SAMPLES}")

    times = traj.times[inside]
    states = traj.states[inside]
    theta_hat, v_hat = phys_to_rotating((states[:, 0], states[:, 1]), times, params)
    amplitude = hat_to_polar(theta_hat, v_hat, params).r
    slope, _ = np.polyfit(np.log(times), np.log(amplitude), 1)
    return float(slope)
