"""
Threshold sweep over (α, technique) pairs.

Each pair is an independent bisection, so pairs are fanned out with
asyncio.gather over a process pool and collected before any row is written.
Rows are sorted by (α, technique order) so the output does not depend on
completion order.
"""
from __future__ import annotations

import asyncio
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Sequence

from strobosam.core.config_models import ExperimentConfig
from strobosam.core.log import log
from strobosam.core.types import TECHNIQUES, SweepRow, TechniqueId, ThresholdResult
from strobosam.experiments.threshold import threshold_bisection

SWEEP_COLUMNS = (
    "alpha", "technique", "eps_min", "eps_app", "wall_time",
    "eps_lo", "eps_hi", "iterations", "delta_eps",
)

# Preferred references for delta_eps, best first
REFERENCE_TECHNIQUES: tuple[TechniqueId, ...] = ("direct", "transformed")


def _threshold_job(alpha: float, technique: TechniqueId, cfg: ExperimentConfig) -> ThresholdResult:
    """Pool entry point; module-level so it pickles."""
    return threshold_bisection(alpha, technique, cfg)


def resolve_workers(cfg: ExperimentConfig, workers: int | None = None) -> int:
    """Flag > config > STROBOSAM_WORKERS > CPU count."""
    if workers:
        return workers
    if cfg.workers:
        return cfg.workers
    from_env = os.getenv("STROBOSAM_WORKERS", "").strip()
    if from_env:
        return max(1, int(from_env))
    return os.cpu_count() or 1


def _make_executor(workers: int) -> Executor:
    if workers > 1:
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=1)


async def sweep_thresholds(
    cfg: ExperimentConfig,
    techniques: Sequence[TechniqueId] = TECHNIQUES,
    workers: int = 1,
) -> list[ThresholdResult]:
    """Run every (α, technique) bisection concurrently; results in task order."""
    pairs = [(alpha, technique) for alpha in cfg.alphas for technique in techniques]
    log(f"📊 Sweep: {len(cfg.alphas)} alphas x {len(techniques)} techniques = {len(pairs)} jobs on {workers} worker(s)")

    loop = asyncio.get_running_loop()
    with _make_executor(workers) as pool:
        tasks = [loop.run_in_executor(pool, _threshold_job, alpha, technique, cfg) for alpha, technique in pairs]
        results = await asyncio.gather(*tasks)

    log(f"✅ Sweep finished: {len(results)} thresholds")
    return list(results)


def build_rows(results: Sequence[ThresholdResult]) -> list[SweepRow]:
    """
    Sort results deterministically and attach delta_eps.

    delta_eps = |eps_min − eps_min(reference)| at the same α, where the
    reference is `direct`, else `transformed`; None when neither ran.
    """
    order = {technique: index for index, technique in enumerate(TECHNIQUES)}
    ordered = sorted(results, key=lambda result: (result.alpha, order.get(result.technique, len(order))))

    references: dict[float, float] = {}
    for reference in reversed(REFERENCE_TECHNIQUES):
        for result in ordered:
            if result.technique == reference:
                references[result.alpha] = result.eps_min

    rows: list[SweepRow] = []
    for result in ordered:
        reference_eps = references.get(result.alpha)
        rows.append(SweepRow(
            alpha=result.alpha,
            technique=result.technique,
            eps_min=result.eps_min,
            eps_app=result.eps_app,
            wall_time=result.wall_time,
            eps_lo=result.eps_lo,
            eps_hi=result.eps_hi,
            iterations=result.iterations,
            delta_eps=None if reference_eps is None else abs(result.eps_min - reference_eps),
        ))
    return rows


def run_sweep(
    cfg: ExperimentConfig,
    techniques: Sequence[TechniqueId] = TECHNIQUES,
    workers: int | None = None,
) -> list[SweepRow]:
    """Blocking entry point used by the CLI."""
    results = asyncio.run(sweep_thresholds(cfg, techniques, resolve_workers(cfg, workers)))
    return build_rows(results)
