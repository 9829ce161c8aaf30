"""
Duffing oscillator with a linearly swept forcing frequency.

Physical form (θ, v), plus the rotating-frame form (θ̂, v̂, τ̂) obtained by
undoing the free rotation of the linear oscillator started at τ₀:

    θ = cos(ω₀(τ−τ₀)) θ̂ + sin(ω₀(τ−τ₀)) v̂/ω₀
    v = −ω₀ sin(ω₀(τ−τ₀)) θ̂ + cos(ω₀(τ−τ₀)) v̂

The slow time τ̂ = ετ is carried as a third variable so the rotating system
is of standard periodic form in ω₀τ.

All functions are pure and accept floats or equally-shaped arrays.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from strobosam.core.config_models import OscillatorParams
from strobosam.core.errors import DegenerateSlowTimeError
from strobosam.core.types import PhysState, RotatingState


def sweep_phase(tau, params: OscillatorParams):
    """Forcing phase ψ = ω₀τ − ατ²/2 (instantaneous frequency ω₀ − ατ)."""
    return params.omega0 * tau - 0.5 * params.alpha * tau * tau


def duffing_rhs(s: Sequence[float], tau: float, params: OscillatorParams) -> np.ndarray:
    """θ' = v,  v' = −ω₀²θ + εγθ³ + εB cos ψ(τ)."""
    theta, v = s[0], s[1]
    forcing = params.gamma * theta ** 3 + params.B * math.cos(sweep_phase(tau, params))
    return np.array([v, -params.omega0 ** 2 * theta + params.epsilon * forcing])


def _rotation(tau, params: OscillatorParams):
    angle = params.omega0 * (np.asarray(tau, dtype=float) - params.tau0)
    return np.cos(angle), np.sin(angle)


def rotate_to_phys(r: Sequence, tau, params: OscillatorParams) -> PhysState:
    """Map rotating-frame (θ̂, v̂[, τ̂]) at time τ to physical (θ, v)."""
    theta_hat, v_hat = np.asarray(r[0], dtype=float), np.asarray(r[1], dtype=float)
    c, s = _rotation(tau, params)
    omega0 = params.omega0
    return PhysState(
        theta=c * theta_hat + (s / omega0) * v_hat,
        v=-omega0 * s * theta_hat + c * v_hat,
    )


def phys_to_rotating(s: Sequence, tau, params: OscillatorParams) -> tuple:
    """Inverse of rotate_to_phys at the same τ; returns (θ̂, v̂)."""
    theta, v = np.asarray(s[0], dtype=float), np.asarray(s[1], dtype=float)
    c, sn = _rotation(tau, params)
    omega0 = params.omega0
    return c * theta - (sn / omega0) * v, omega0 * sn * theta + c * v


def rotating_rhs(r: Sequence[float], tau: float, params: OscillatorParams) -> np.ndarray:
    """
    Right-hand side of the enlarged rotating system in (θ̂, v̂, τ̂).

    The swept phase is written through the slow time, ω₀τ − (α/ε²)τ̂²/2, so
    the field is 2π-periodic in ω₀τ. The third component is exactly ε.

    Raises:
        DegenerateSlowTimeError: ε = 0 (τ̂ carries no information).
    """
    epsilon = params.epsilon
    if epsilon == 0.0:
        raise DegenerateSlowTimeError("epsilon = 0: integrate the physical system instead")

    state = RotatingState(*r)
    omega0 = params.omega0
    angle = omega0 * (tau - params.tau0)
    c, s = math.cos(angle), math.sin(angle)
    theta = c * state.theta_hat + (s / omega0) * state.v_hat

    phase = omega0 * tau - 0.5 * (params.alpha / epsilon ** 2) * state.tau_hat ** 2
    forcing = params.gamma * theta ** 3 + params.B * math.cos(phase)
    return np.array([-epsilon * forcing * s / omega0, epsilon * forcing * c, epsilon])
