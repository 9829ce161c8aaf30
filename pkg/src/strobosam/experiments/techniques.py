"""
The six ways of integrating the swept Duffing problem, behind one dispatcher.

Every technique reports physical (θ, v) at stroboscopic times, so their
trajectories and autoresonance verdicts can be compared row by row.
"""
from __future__ import annotations

import statistics
import time
from functools import partial

import numpy as np

from strobosam.core.config_models import ExperimentConfig, MacroConfig, OscillatorParams
from strobosam.core.errors import DivergenceError, ThresholdUndefinedError
from strobosam.core.log import log
from strobosam.core.types import TECHNIQUES, BenchStats, TechniqueId, TechniqueRun, Trajectory
from strobosam.experiments.analysis import detect_autoresonance
from strobosam.models.averaging import averaged_field
from strobosam.models.duffing import duffing_rhs, rotate_to_phys, rotating_rhs
from strobosam.solvers.odecore import adaptive_integrate
from strobosam.solvers.sam import sam_integrate, stroboscopic_times


def output_times(cfg: ExperimentConfig) -> list[float]:
    """Every `stride`-th stroboscopic time, always including the last one."""
    tau0, tau_end = cfg.span
    times = stroboscopic_times(tau0, tau_end, cfg.params.T0, cfg.stride)
    last = stroboscopic_times(tau0, tau_end, cfg.params.T0)[-1]
    if times[-1] != last:
        times.append(last)
    return times


def _to_physical(traj: Trajectory, params: OscillatorParams) -> Trajectory:
    """Map a rotating-frame trajectory back to (θ, v)."""
    theta, v = rotate_to_phys((traj.states[:, 0], traj.states[:, 1]), traj.times, params)
    return Trajectory(
        times=traj.times,
        states=np.column_stack([theta, v]),
        technique=traj.technique,
        wall_time=traj.wall_time,
        params=params,
        direction=traj.direction,
        steps=traj.steps,
    )


def _integrate_once(technique: TechniqueId, params: OscillatorParams, cfg: ExperimentConfig) -> Trajectory:
    macro: MacroConfig = cfg.macro.model_copy(update={"output_times": output_times(cfg)})
    span = (params.tau0, cfg.tau_end)
    y0 = cfg.y0

    if technique == "direct":
        return adaptive_integrate(partial(duffing_rhs, params=params), y0, span, macro, technique, params)

    if technique == "transformed":
        # At τ₀ the rotating and physical variables coincide; τ̂ starts at ετ₀.
        rotating_y0 = np.array([y0[0], y0[1], params.epsilon * params.tau0])
        traj = adaptive_integrate(partial(rotating_rhs, params=params), rotating_y0, span, macro, technique, params)
        return _to_physical(traj, params)

    if technique in ("averaged1", "averaged2"):
        order = 1 if technique == "averaged1" else 2
        traj = adaptive_integrate(averaged_field(order, params), y0, span, macro, technique, params)
        return _to_physical(traj, params)

    if technique in ("sam_d2", "sam_d4"):
        micro = cfg.micro.model_copy(update={"diff_order": 2 if technique == "sam_d2" else 4})
        traj = sam_integrate(y0, span, macro, micro, params)
        traj.technique = technique
        return traj

    raise ValueError(f"unknown technique {technique!r}; expected one of {', '.join(TECHNIQUES)}")


def _timed_runs(
    technique: TechniqueId,
    params: OscillatorParams,
    cfg: ExperimentConfig,
    repeat: int,
) -> tuple[Trajectory, list[float]]:
    """Run `repeat` times; return the last trajectory and each run's wall time."""
    if technique == "averaged2":
        cfg.require_integer_tau0()
    durations: list[float] = []
    trajectory: Trajectory | None = None
    for _ in range(repeat):
        started = time.perf_counter()
        trajectory = _integrate_once(technique, params, cfg)
        durations.append(time.perf_counter() - started)
    assert trajectory is not None
    return trajectory, durations


def run_technique(
    technique: TechniqueId,
    alpha: float,
    epsilon: float,
    cfg: ExperimentConfig,
    repeat: int | None = None,
) -> TechniqueRun:
    """
    Integrate with one technique and judge autoresonance at the final time.

    Args:
        technique: one of TECHNIQUES
        alpha: sweep rate
        epsilon: forcing/nonlinearity strength
        cfg: experiment settings (span, y0, tolerances, micro settings)
        repeat: timing repetitions (defaults to cfg.repeat)

    Returns:
        TechniqueRun with the physical trajectory, the verdict and the mean
        wall time. A run that blows up comes back with status "divergence"
        and no verdict instead of raising.
    """
    if technique not in TECHNIQUES:
        raise ValueError(f"unknown technique {technique!r}; expected one of {', '.join(TECHNIQUES)}")
    params = cfg.params.with_sweep(alpha, epsilon)
    repeat = repeat or cfg.repeat

    log(f"📊 {technique}: alpha={alpha:.3e}, epsilon={epsilon:.6g}, repeat={repeat}")
    try:
        trajectory, durations = _timed_runs(technique, params, cfg, repeat)
    except DivergenceError as error:
        log(f"❌ {technique}: divergence ({error})")
        return TechniqueRun(technique=technique, status="divergence", wall_time=0.0, message=str(error))

    wall_time = statistics.fmean(durations)
    trajectory.wall_time = wall_time
    trajectory.params = params

    try:
        verdict = detect_autoresonance(trajectory, params, cfg.detection_ratio)
    except ThresholdUndefinedError as error:
        log(f"⏭️ {technique}: no verdict ({error})")
        return TechniqueRun(
            technique=technique, status="ok", wall_time=wall_time, trajectory=trajectory, message=str(error)
        )

    mark = "✅" if verdict.detected else "⚠️"
    log(
        f"{mark} {technique}: autoresonance={verdict.detected}, "
        f"gap={verdict.relative_gap:.3f}, {wall_time:.2f}s"
    )
    return TechniqueRun(
        technique=technique,
        status="ok",
        wall_time=wall_time,
        trajectory=trajectory,
        verdict=verdict,
    )


def benchmark_technique(
    technique: TechniqueId,
    alpha: float,
    epsilon: float,
    cfg: ExperimentConfig,
    repeat: int | None = None,
) -> BenchStats:
    """Wall-clock mean/min/max over `repeat` monotonic-timed runs."""
    if technique not in TECHNIQUES:
        raise ValueError(f"unknown technique {technique!r}; expected one of {', '.join(TECHNIQUES)}")
    params = cfg.params.with_sweep(alpha, epsilon)
    repeat = repeat or cfg.repeat

    log(f"⏱️ Benchmarking {technique} x{repeat}")
    _, durations = _timed_runs(technique, params, cfg, repeat)
    return BenchStats(
        technique=technique,
        alpha=alpha,
        epsilon=epsilon,
        repeat=repeat,
        mean=statistics.fmean(durations),
        min=min(durations),
        max=max(durations),
    )
