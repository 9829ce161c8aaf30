#!/usr/bin/env python3
"""
Reproduce the two autoresonance runs at alpha = 1e-4 (capture at
epsilon = 0.05, no capture at epsilon = 0.01) with direct integration and SAM.

Run with: uv run python scripts/reproduce_capture.py [--out-dir runs/]
"""
import argparse
import asyncio
import math
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dotenv import load_dotenv

load_dotenv()

from strobosam.cli import write_simulation_csv
from strobosam.core.config_loader import load_experiment_config
from strobosam.experiments.techniques import run_technique

ALPHA = 1e-4
PANELS = {"left": 0.05, "right": 0.01}
TECHNIQUES = ("direct", "sam_d2")


async def main(out_dir: Path | None) -> int:
    cfg = load_experiment_config()
    jobs = [(panel, epsilon, technique) for panel, epsilon in PANELS.items() for technique in TECHNIQUES]

    print(f"Running {len(jobs)} simulations over [{cfg.params.tau0}, {cfg.tau_end}]...")
    print("-" * 60)
    runs = await asyncio.gather(*[
        asyncio.to_thread(run_technique, technique, ALPHA, epsilon, cfg, 1)
        for _, epsilon, technique in jobs
    ])

    print("\n=== VERDICTS ===\n")
    failures = 0
    for (panel, epsilon, technique), run in zip(jobs, runs):
        if run.verdict is None or run.trajectory is None:
            print(f"{panel:>5}  eps={epsilon:<5} {technique:<8} FAILED: {run.message}")
            failures += 1
            continue
        theta, v = run.trajectory.final_state
        amplitude = math.hypot(theta, v / run.trajectory.params.omega0)
        print(
            f"{panel:>5}  eps={epsilon:<5} {technique:<8} "
            f"autoresonance={run.verdict.detected!s:<5}  r_final={amplitude:.6f}  "
            f"gap={run.verdict.relative_gap:.3f}  {run.wall_time:.1f}s"
        )
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            with (out_dir / f"{panel}_{technique}.csv").open("w", encoding="utf-8", newline="") as handle:
                write_simulation_csv(run, cfg, handle)

    return 1 if failures else 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Reproduce the alpha = 1e-4 capture and no-capture runs")
    parser.add_argument("--out-dir", type=Path, help="write one diagnostics CSV per run here")
    sys.exit(asyncio.run(main(parser.parse_args().out_dir)))
