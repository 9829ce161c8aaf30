"""
Stroboscopic Averaging Method for the swept-forcing Duffing oscillator.

The averaged vector field is never written down. Each time the macro
integrator asks for it at (Y*, τ_M), short micro-integrations of the full
oscillatory system are run with Strang splitting over one or two periods
forward and backward, and the resulting Poincaré-map powers are differenced:

    order 2:  εG ≈ (Ω − Ω⁻¹) / (2T₀)
    order 4:  εG ≈ (−Ω² + 8Ω − 8Ω⁻¹ + Ω⁻²) / (12T₀)

Every micro-integration starts at the macro start time τ₀, whatever τ_M is.
τ_M only enters through the rescaled slow time τ̃, seeded with τ_M, which
feeds the ατ̃²/2 part of the forcing phase. Output is meaningful only at the
stroboscopic times τ₀ + jT₀.
"""
from __future__ import annotations

import math
from functools import partial
from typing import Literal, Sequence

import numpy as np

from strobosam.core.config_models import MacroConfig, MicroConfig, OscillatorParams
from strobosam.core.log import log
from strobosam.core.types import SamState, Trajectory
from strobosam.models.duffing import duffing_rhs
from strobosam.solvers.odecore import adaptive_integrate

Direction = Literal["forward", "backward"]

# Relative slack when checking that a time is τ₀ + jT₀.
STROBOSCOPIC_TOL = 1e-9


def stroboscopic_times(tau0: float, tau_end: float, T0: float, stride: int = 1) -> list[float]:
    """Times τ₀ + jT₀ inside [τ₀, τ_end], every `stride`-th one."""
    if tau_end < tau0:
        raise ValueError("tau_end must not precede tau0")
    periods = int(math.floor((tau_end - tau0) / T0 + STROBOSCOPIC_TOL))
    times = tau0 + T0 * np.arange(0, periods + 1, stride, dtype=float)
    return [float(t) for t in np.minimum(times, tau_end)]


def is_stroboscopic(tau: float, tau0: float, T0: float) -> bool:
    periods = (tau - tau0) / T0
    return abs(periods - round(periods)) <= STROBOSCOPIC_TOL * max(1.0, abs(periods))


# =============================================================================
# MICRO-INTEGRATION (Strang splitting)
# =============================================================================


def _strang_steps(
    theta: float,
    v: float,
    tau_tilde: float,
    first_index: int,
    n_steps: int,
    hh: float,
    fast_origin: float,
    params: OscillatorParams,
) -> tuple[float, float, float]:
    """
    Run `n_steps` Strang steps with signed step `hh`, starting at step index
    `first_index`. The fast phase of step j runs from ω₀(fast_origin + j·hh)
    to ω₀(fast_origin + (j+1)·hh).
    """
    omega0 = params.omega0
    eps_gamma = params.epsilon * params.gamma
    eps_b = params.epsilon * params.B / omega0
    half_alpha = 0.5 * params.alpha
    half = 0.5 * hh
    c = math.cos(omega0 * half)
    s = math.sin(omega0 * half)
    s_over = s / omega0
    omega_s = omega0 * s
    sin = math.sin

    for j in range(first_index, first_index + n_steps):
        theta, v = c * theta + s_over * v, -omega_s * theta + c * v
        tau_tilde += half

        slow = half_alpha * tau_tilde * tau_tilde
        fast_start = omega0 * (fast_origin + j * hh)
        fast_end = omega0 * (fast_origin + (j + 1) * hh)
        v += hh * eps_gamma * theta ** 3 + eps_b * (sin(fast_end - slow) - sin(fast_start - slow))

        theta, v = c * theta + s_over * v, -omega_s * theta + c * v
        tau_tilde += half

    return theta, v, tau_tilde


def strang_micro_step(
    s: SamState | Sequence[float],
    j: int,
    h: float,
    tau0: float,
    params: OscillatorParams,
    direction: Direction = "forward",
) -> SamState:
    """
    One Strang step of the enlarged Duffing system, from τ₀ + jh to
    τ₀ + (j+1)h (h replaced by −h when going backward).

    Half rotation by ω₀h/2, kick of v by the exact flow of the forcing
    part with τ̃ frozen at its midpoint value, then the second half rotation.
    τ̃ advances by h/2 around the kick.
    """
    state = SamState(*s)
    hh = h if direction == "forward" else -h
    theta, v, tau_tilde = _strang_steps(state.theta, state.v, state.tau_tilde, j, 1, hh, tau0, params)
    return SamState(theta=theta, v=v, tau_tilde=tau_tilde)


def _seeds(tau_M: float, tau0: float, micro: MicroConfig) -> tuple[float, float]:
    """(fast phase origin, τ̃ seed) for the configured phase convention."""
    if micro.phase_convention == "swapped":
        return tau_M, tau0
    return tau0, tau_M


def poincare_pow(
    y_star: Sequence[float],
    tau_M: float,
    k: int,
    tau0: float,
    params: OscillatorParams,
    micro: MicroConfig,
) -> np.ndarray:
    """
    Ω_{τ₀}^k(y*): |k|·m Strang steps forward (k > 0) or backward (k < 0)
    from (θ*, v*, τ̃ = τ_M). Only |k| ∈ {1, 2} is supported.
    """
    if k not in (-2, -1, 1, 2):
        raise ValueError(f"Poincaré power k must be one of ±1, ±2, got {k!r}")
    h = micro.step(params)
    hh = h if k > 0 else -h
    fast_origin, tau_tilde = _seeds(tau_M, tau0, micro)
    theta, v, _ = _strang_steps(
        float(y_star[0]), float(y_star[1]), tau_tilde,
        0, abs(k) * micro.substeps_per_period, hh, fast_origin, params,
    )
    return np.array([theta, v])


def sam_f_eval(
    y_star: Sequence[float],
    tau_M: float,
    tau0: float,
    params: OscillatorParams,
    micro: MicroConfig,
) -> np.ndarray:
    """Averaged field at (y*, τ_M) by differencing Poincaré-map powers."""
    m = micro.substeps_per_period
    h = micro.step(params)
    fast_origin, seed = _seeds(tau_M, tau0, micro)
    theta_star, v_star = float(y_star[0]), float(y_star[1])

    forward = _strang_steps(theta_star, v_star, seed, 0, m, h, fast_origin, params)
    backward = _strang_steps(theta_star, v_star, seed, 0, m, -h, fast_origin, params)
    omega_plus = np.array(forward[:2])
    omega_minus = np.array(backward[:2])

    if micro.diff_order == 2:
        return (omega_plus - omega_minus) / (2.0 * params.T0)

    # Second period continues each orbit from step index m.
    forward2 = _strang_steps(*forward, m, m, h, fast_origin, params)
    backward2 = _strang_steps(*backward, m, m, -h, fast_origin, params)
    omega_plus2 = np.array(forward2[:2])
    omega_minus2 = np.array(backward2[:2])
    return (-omega_plus2 + 8.0 * omega_plus - 8.0 * omega_minus + omega_minus2) / (12.0 * params.T0)


def _sam_vector_field(
    y: np.ndarray,
    tau_M: float,
    tau0: float,
    params: OscillatorParams,
    micro: MicroConfig,
) -> np.ndarray:
    return sam_f_eval(y, tau_M, tau0, params, micro)


# =============================================================================
# MACRO-INTEGRATION
# =============================================================================


def sam_integrate(
    y0: Sequence[float],
    span: tuple[float, float],
    macro: MacroConfig,
    micro: MicroConfig,
    params: OscillatorParams,
) -> Trajectory:
    """
    Macro-integrate the SAM field from span[0] (which is τ₀ for every
    micro-integration) and report the state at stroboscopic times.

    macro.output_times, when given, must all be stroboscopic; otherwise
    every stroboscopic time in the span is reported.
    """
    tau0, tau_end = float(span[0]), float(span[1])
    if tau_end - tau0 < params.T0 * (1.0 - STROBOSCOPIC_TOL):
        raise ValueError("SAM span must cover at least one period T0")

    output_times = macro.output_times
    if output_times is None:
        output_times = stroboscopic_times(tau0, tau_end, params.T0)
    off_grid = [t for t in output_times if not is_stroboscopic(t, tau0, params.T0)]
    if off_grid:
        raise ValueError(f"SAM output times must be stroboscopic, got {off_grid[:3]!r}")

    technique = f"sam_d{micro.diff_order}"
    if micro.phase_convention == "swapped":
        technique += "_swapped"
    log(f"🔁 {technique}: m={micro.substeps_per_period}, span=[{tau0}, {tau_end}], {len(output_times)} outputs")

    field = partial(_sam_vector_field, tau0=tau0, params=params, micro=micro)
    trajectory = adaptive_integrate(
        field,
        y0,
        (tau0, tau_end),
        macro.model_copy(update={"output_times": list(output_times)}),
        technique=technique,
        params=params,
    )
    log(f"✅ {technique}: {trajectory.steps} macro steps in {trajectory.wall_time:.2f}s")
    return trajectory


def sam_state_at(
    y0: Sequence[float],
    tau: float,
    tau0: float,
    macro: MacroConfig,
    micro: MicroConfig,
    params: OscillatorParams,
) -> np.ndarray:
    """
    Approximate (θ, v) at an arbitrary τ ≥ τ₀: SAM up to the last
    stroboscopic time τ_j ≤ τ, then the oscillatory system from τ_j to τ.
    """
    if tau < tau0:
        raise ValueError("tau must not precede tau0")
    periods = int(math.floor((tau - tau0) / params.T0 + STROBOSCOPIC_TOL))
    tau_j = tau0 + periods * params.T0
    direct_macro = macro.model_copy(update={"output_times": None})

    state = np.asarray(y0, dtype=float)
    if periods >= 1:
        strobe = sam_integrate(
            state, (tau0, tau_j), macro.model_copy(update={"output_times": [tau0, tau_j]}), micro, params
        )
        state = strobe.final_state
    if abs(tau - tau_j) <= STROBOSCOPIC_TOL * max(1.0, abs(tau)):
        return np.array(state, dtype=float)

    tail = adaptive_integrate(
        partial(duffing_rhs, params=params), state, (tau_j, tau), direct_macro, technique="direct", params=params
    )
    return np.array(tail.final_state, dtype=float)
