"""
Explicit Runge-Kutta integration used as the macro-integrator everywhere.

`adaptive_integrate` drives scipy's embedded pairs step by step (DOP853, the
8(5,3) Dormand-Prince pair with 7th-order dense output, by default) so the
step budget, step-size underflow and divergence can be reported as distinct
errors. Requested output times are served from each step's dense output;
they never clamp or shorten a step.
"""
from __future__ import annotations

import time
from typing import Sequence

import numpy as np
from scipy.integrate import DOP853, RK45, OdeSolution

from strobosam.core.config_models import MacroConfig, OscillatorParams
from strobosam.core.errors import BudgetExhaustedError, DivergenceError, StepSizeUnderflowError
from strobosam.core.types import Trajectory, VectorField

_STEPPERS = {
    "DOP853": DOP853,
    "RK45": RK45,
}


def _as_state(y0: Sequence[float] | np.ndarray | float) -> np.ndarray:
    state = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    if not np.all(np.isfinite(state)):
        raise DivergenceError(f"non-finite initial state {state!r}")
    return state


def _ordered_outputs(
    output_times: list[float] | None,
    t_start: float,
    t_end: float,
    direction: float,
) -> np.ndarray | None:
    """Output times in the order the integration will reach them."""
    if output_times is None:
        return None
    outputs = np.asarray(output_times, dtype=float)
    low, high = min(t_start, t_end), max(t_start, t_end)
    if outputs.size and (outputs[0] < low or outputs[-1] > high):
        raise ValueError(f"output times must lie inside the span [{low}, {high}]")
    return outputs if direction > 0 else outputs[::-1]


def adaptive_integrate(
    rhs: VectorField,
    y0: Sequence[float] | np.ndarray | float,
    span: tuple[float, float],
    cfg: MacroConfig | None = None,
    technique: str = "custom",
    params: OscillatorParams | None = None,
) -> Trajectory:
    """
    Integrate y' = rhs(y, t) over `span` (either direction).

    Local error per step is held below abs_tol + rel_tol·|y|. With
    cfg.output_times the trajectory holds exactly those times; otherwise it
    holds the start point and every accepted step.

    Raises:
        StepSizeUnderflowError: the controller needed a step below round-off.
        BudgetExhaustedError: more than cfg.max_steps steps.
        DivergenceError: the state became inf/nan.
    """
    cfg = cfg or MacroConfig()
    t_start, t_end = float(span[0]), float(span[1])
    if t_start == t_end:
        raise ValueError("integration span must have nonzero length")

    state = _as_state(y0)
    direction = 1.0 if t_end > t_start else -1.0
    outputs = _ordered_outputs(cfg.output_times, t_start, t_end, direction)

    def scipy_rhs(t: float, y: np.ndarray) -> np.ndarray:
        return rhs(y, t)

    stepper_cls = _STEPPERS[cfg.method]
    solver = stepper_cls(
        scipy_rhs,
        t_start,
        state,
        t_end,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        first_step=cfg.initial_step,
    )

    times: list[float] = []
    states: list[np.ndarray] = []
    interpolants = []
    step_points = [t_start]

    next_output = 0
    if outputs is None:
        times.append(t_start)
        states.append(state.copy())
    else:
        while next_output < len(outputs) and outputs[next_output] == t_start:
            times.append(t_start)
            states.append(state.copy())
            next_output += 1

    started = time.perf_counter()
    steps = 0
    while solver.status == "running":
        if steps >= cfg.max_steps:
            raise BudgetExhaustedError(
                f"{technique}: {cfg.max_steps} steps taken, stopped at t={solver.t!r}"
            )
        message = solver.step()
        steps += 1
        if solver.status == "failed":
            raise StepSizeUnderflowError(f"{technique}: {message} (t={solver.t!r})")
        if not np.all(np.isfinite(solver.y)):
            raise DivergenceError(f"{technique}: non-finite state at t={solver.t!r}")

        if cfg.dense_output:
            interpolants.append(solver.dense_output())
            step_points.append(solver.t)

        if outputs is None:
            times.append(solver.t)
            states.append(solver.y.copy())
            continue

        reached = next_output
        while reached < len(outputs) and direction * (outputs[reached] - solver.t) <= 0.0:
            reached += 1
        if reached > next_output:
            dense = interpolants[-1] if cfg.dense_output else solver.dense_output()
            for output_time in outputs[next_output:reached]:
                times.append(float(output_time))
                states.append(solver.y.copy() if output_time == solver.t else dense(output_time))
            next_output = reached

    wall_time = time.perf_counter() - started

    times_arr = np.asarray(times, dtype=float)
    states_arr = np.asarray(states, dtype=float).reshape(len(times), -1)
    if direction < 0:
        times_arr, states_arr = times_arr[::-1], states_arr[::-1]

    solution = OdeSolution(step_points, interpolants) if cfg.dense_output else None
    return Trajectory(
        times=times_arr,
        states=states_arr,
        technique=technique,
        wall_time=wall_time,
        params=params,
        direction=int(direction),
        steps=steps,
        solution=solution,
    )


def fixed_rk4(
    rhs: VectorField,
    y0: Sequence[float] | np.ndarray | float,
    span: tuple[float, float],
    h: float,
    technique: str = "rk4",
) -> Trajectory:
    """
    Classical fourth-order Runge-Kutta with a uniform step.

    `h` is a magnitude; its sign follows the span. It must divide the span
    length up to round-off.
    """
    t_start, t_end = float(span[0]), float(span[1])
    length = t_end - t_start
    if h <= 0.0 or length == 0.0:
        raise ValueError("need h > 0 and a span of nonzero length")
    n_steps = int(round(abs(length) / h))
    if n_steps < 1 or abs(n_steps * h - abs(length)) > 1e-9 * max(1.0, abs(length)):
        raise ValueError(f"step {h!r} does not divide the span length {abs(length)!r}")

    step = length / n_steps
    state = _as_state(y0)
    times = t_start + step * np.arange(n_steps + 1)
    times[-1] = t_end
    states = np.empty((n_steps + 1, state.size))
    states[0] = state

    started = time.perf_counter()
    for index in range(n_steps):
        t = times[index]
        k1 = rhs(state, t)
        k2 = rhs(state + 0.5 * step * k1, t + 0.5 * step)
        k3 = rhs(state + 0.5 * step * k2, t + 0.5 * step)
        k4 = rhs(state + step * k3, t + step)
        state = state + step * (k1 + 2.0 * (k2 + k3) + k4) / 6.0
        if not np.all(np.isfinite(state)):
            raise DivergenceError(f"{technique}: non-finite state at t={t + step!r}")
        states[index + 1] = state

    wall_time = time.perf_counter() - started
    direction = 1 if length > 0 else -1
    if direction < 0:
        times, states = times[::-1], states[::-1]
    return Trajectory(
        times=times,
        states=states,
        technique=technique,
        wall_time=wall_time,
        direction=direction,
        steps=n_steps,
    )
