"""
Stroboscopically averaged Duffing systems in the rotating frame.

The first-order field is valid for any τ₀. The second-order field adds
ε² corrections that are only known in closed form when τ₀/T₀ is an
integer, which is enforced here.

With u = v̂/ω₀ and the slow phase c = ατ²/2:

    first order   dθ̂/dτ = −ε/(8ω₀) (3γ(θ̂² + u²) u + 4B sin c)
                  dv̂/dτ =  ε/8    (3γ(θ̂² + u²) θ̂ + 4B cos c)

The polar form uses θ̂ = r cos φ, v̂ = −ω₀ r sin φ.
"""
from __future__ import annotations

import math
from functools import partial
from typing import Literal, Sequence

import numpy as np

from strobosam.core.config_models import OscillatorParams
from strobosam.core.errors import PhaseUndefinedError, PolarSingularityError, SecondOrderFormError
from strobosam.core.types import PolarState, VectorField

AveragedOrder = Literal[1, 2]


def _slow_phase(tau: float, params: OscillatorParams) -> float:
    return 0.5 * params.alpha * tau * tau


def averaged1_rhs(theta_hat: float, v_hat: float, tau: float, params: OscillatorParams) -> tuple[float, float]:
    """First-order averaged field (θ̂', v̂')."""
    eps, B, gamma, omega0 = params.epsilon, params.B, params.gamma, params.omega0
    u = v_hat / omega0
    c = _slow_phase(tau, params)
    q = theta_hat * theta_hat + u * u
    d_theta = -eps / (8.0 * omega0) * (3.0 * gamma * q * u + 4.0 * B * math.sin(c))
    d_v = eps / 8.0 * (3.0 * gamma * q * theta_hat + 4.0 * B * math.cos(c))
    return d_theta, d_v


def averaged2_rhs(theta_hat: float, v_hat: float, tau: float, params: OscillatorParams) -> tuple[float, float]:
    """
    Second-order averaged field: the first-order field plus its ε² terms.

    Raises:
        SecondOrderFormError: τ₀/T₀ is not an integer.
    """
    if not params.has_integer_tau0:
        raise SecondOrderFormError(
            f"second-order averaged field needs integer tau0/T0, got {params.tau0 / params.T0!r}"
        )
    d_theta, d_v = averaged1_rhs(theta_hat, v_hat, tau, params)

    eps, B, gamma, omega0 = params.epsilon, params.B, params.gamma, params.omega0
    th = theta_hat
    u = v_hat / omega0
    c = _slow_phase(tau, params)
    sin_c, cos_c = math.sin(c), math.cos(c)
    th2, u2 = th * th, u * u

    theta_bracket = (
        gamma * (19.0 * th2 * th2 + 70.0 * th2 * u2 + 35.0 * u2 * u2) * u
        - 24.0 * B * th * u * cos_c
        + 12.0 * B * (3.0 * th2 + 5.0 * u2) * sin_c
    )
    v_bracket = (
        gamma * (13.0 * th2 * th2 - 38.0 * th2 * u2 - 35.0 * u2 * u2) * th
        - 72.0 * B * th * u * sin_c
        + 4.0 * B * (5.0 * th2 + 3.0 * u2) * cos_c
    )
    scale = 3.0 * eps * eps * gamma / 256.0
    return (
        d_theta - scale / omega0 ** 3 * theta_bracket,
        d_v - scale / omega0 ** 2 * v_bracket,
    )


def _averaged_vector_field(y: np.ndarray, tau: float, params: OscillatorParams, order: AveragedOrder) -> np.ndarray:
    rhs = averaged1_rhs if order == 1 else averaged2_rhs
    return np.array(rhs(y[0], y[1], tau, params))


def averaged_field(order: AveragedOrder, params: OscillatorParams) -> VectorField:
    """The averaged system of the given order as an (y, τ) vector field."""
    if order == 2 and not params.has_integer_tau0:
        raise SecondOrderFormError(
            f"second-order averaged field needs integer tau0/T0, got {params.tau0 / params.T0!r}"
        )
    return partial(_averaged_vector_field, params=params, order=order)


# =============================================================================
# POLAR VARIABLES
# =============================================================================


def polar_averaged1_rhs(p: Sequence[float], tau: float, params: OscillatorParams) -> tuple[float, float]:
    """
    First-order averaged field in (r, φ):

        dr/dτ = −εB/(2ω₀) sin(φ + ατ²/2)
        dφ/dτ = −ε (3γr²/(8ω₀) + B/(2ω₀ r) cos(φ + ατ²/2))

    Raises:
        PolarSingularityError: r = 0.
    """
    state = PolarState(*p)
    if state.r == 0.0:
        raise PolarSingularityError("polar averaged field is singular at r = 0")
    eps, B, gamma, omega0 = params.epsilon, params.B, params.gamma, params.omega0
    mismatch = state.phi + _slow_phase(tau, params)
    d_r = -eps * B / (2.0 * omega0) * math.sin(mismatch)
    d_phi = -eps * (
        3.0 * gamma * state.r * state.r / (8.0 * omega0)
        + B / (2.0 * omega0 * state.r) * math.cos(mismatch)
    )
    return d_r, d_phi


def hat_to_polar(theta_hat, v_hat, params: OscillatorParams) -> PolarState:
    """
    (θ̂, v̂) → (r, φ) with φ in (−π, π].

    Raises:
        PhaseUndefinedError: (θ̂, v̂) = (0, 0).
    """
    u = np.asarray(v_hat, dtype=float) / params.omega0
    theta_hat = np.asarray(theta_hat, dtype=float)
    r = np.hypot(theta_hat, u)
    if np.any(r == 0.0):
        raise PhaseUndefinedError("phase is undefined at the origin")
    phi = np.arctan2(-u, theta_hat)
    if r.ndim == 0:
        return PolarState(r=float(r), phi=float(phi))
    return PolarState(r=r, phi=phi)


def polar_to_hat(p: Sequence, params: OscillatorParams) -> tuple:
    """(r, φ) → (θ̂, v̂)."""
    state = PolarState(*p)
    r = np.asarray(state.r, dtype=float)
    phi = np.asarray(state.phi, dtype=float)
    theta_hat = r * np.cos(phi)
    v_hat = -params.omega0 * r * np.sin(phi)
    if theta_hat.ndim == 0:
        return float(theta_hat), float(v_hat)
    return theta_hat, v_hat
