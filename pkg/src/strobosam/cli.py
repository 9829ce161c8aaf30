"""
Command-line front end.

    strobosam simulate  --technique direct --alpha 1e-4 --epsilon 0.05 [--out run.csv]
    strobosam threshold --technique sam_d2 --alpha 1e-4
    strobosam sweep     --techniques all --alphas 1e-5,1e-4 [--out sweep.csv]
    strobosam bench     --technique averaged1 --alpha 1e-5 --epsilon 0.0089 --repeat 10

Data (CSV/JSON) goes to stdout or --out; progress goes to stderr.
Exit codes: 0 success, 1 usage error, 2 numerical failure (JSON on stderr).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any, NoReturn, Sequence, TextIO

from dotenv import load_dotenv
from pydantic import ValidationError

from strobosam.core.config_loader import load_experiment_config
from strobosam.core.config_models import ExperimentConfig
from strobosam.core.errors import StroboError
from strobosam.core.types import TECHNIQUES, TechniqueId, TechniqueRun
from strobosam.experiments.analysis import trajectory_diagnostics
from strobosam.experiments.sweep import SWEEP_COLUMNS, run_sweep
from strobosam.experiments.techniques import benchmark_technique, run_technique
from strobosam.experiments.threshold import threshold_bisection

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

SIMULATION_COLUMNS = ("tau", "theta", "v", "r", "I", "Phi")


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code 1 instead of 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_text(value: float | None) -> str:
    """Shortest round-trippable decimal; empty for missing values."""
    return "" if value is None else repr(float(value))


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as parse_error:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from parse_error


def _parse_techniques(text: str) -> list[TechniqueId]:
    if text.strip() == "all":
        return list(TECHNIQUES)
    names = [item.strip() for item in text.split(",") if item.strip()]
    unknown = [name for name in names if name not in TECHNIQUES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown technique(s) {', '.join(unknown) or text!r}; choose from all, {', '.join(TECHNIQUES)}"
        )
    return names  # type: ignore[return-value]


# =============================================================================
# PARSER
# =============================================================================


def _common_options() -> argparse.ArgumentParser:
    """Config file and flat-key overrides shared by every command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat YAML config (default: ./.strobosam.yml if present)")

    physics = common.add_argument_group("oscillator")
    physics.add_argument("--B", dest="B", type=float)
    physics.add_argument("--gamma", type=float, help="default omega0**2/6")
    physics.add_argument("--omega0", type=float)
    physics.add_argument("--tau0", type=float)
    physics.add_argument("--tau-end", dest="tau_end", type=float)
    physics.add_argument("--theta0", type=float)
    physics.add_argument("--v0", type=float)

    solver = common.add_argument_group("solver")
    solver.add_argument("--rel-tol", dest="rel_tol", type=float)
    solver.add_argument("--abs-tol", dest="abs_tol", type=float)
    solver.add_argument("--max-steps", dest="max_steps", type=int)
    solver.add_argument("--method", choices=["DOP853", "RK45"])
    solver.add_argument("--substeps", dest="substeps_per_period", type=int, help="SAM micro steps per period")
    solver.add_argument("--stride", type=int, help="report every stride-th stroboscopic time")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = UsageParser(prog="strobosam", description="Stroboscopic averaging for the swept Duffing oscillator")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", parents=[common], help="one run, CSV of the stroboscopic samples")
    simulate.add_argument("--technique", required=True, choices=TECHNIQUES)
    simulate.add_argument("--alpha", type=float)
    simulate.add_argument("--epsilon", type=float)
    simulate.add_argument("--out", type=Path, help="write the CSV here and the JSON summary to stdout")

    threshold = commands.add_parser("threshold", parents=[common], help="bisect the autoresonance threshold")
    threshold.add_argument("--technique", required=True, choices=TECHNIQUES)
    threshold.add_argument("--alpha", type=float)
    threshold.add_argument("--bisection-tol", dest="bisection_tol", type=float)

    sweep = commands.add_parser("sweep", parents=[common], help="thresholds over an alpha grid")
    sweep.add_argument("--techniques", type=_parse_techniques, default=list(TECHNIQUES))
    sweep.add_argument("--alphas", type=_parse_float_list)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--bisection-tol", dest="bisection_tol", type=float)
    sweep.add_argument("--out", type=Path)

    bench = commands.add_parser("bench", parents=[common], help="wall-clock statistics for one technique")
    bench.add_argument("--technique", required=True, choices=TECHNIQUES)
    bench.add_argument("--alpha", type=float)
    bench.add_argument("--epsilon", type=float)
    bench.add_argument("--repeat", type=int)

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = (
        "B", "gamma", "omega0", "tau0", "tau_end", "theta0", "v0",
        "rel_tol", "abs_tol", "max_steps", "method", "substeps_per_period", "stride",
        "alphas", "workers", "repeat", "bisection_tol",
    )
    return {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}


# =============================================================================
# COMMANDS
# =============================================================================


def write_simulation_csv(run: TechniqueRun, cfg: ExperimentConfig, stream: TextIO) -> None:
    """SIMULATION_COLUMNS rows, floats in shortest round-trip form."""
    assert run.trajectory is not None
    diagnostics = trajectory_diagnostics(run.trajectory, run.trajectory.params or cfg.params)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SIMULATION_COLUMNS)
    for row in zip(*diagnostics):
        writer.writerow([_float_text(value) for value in row])


def _simulation_summary(run: TechniqueRun, alpha: float, epsilon: float) -> dict[str, Any]:
    verdict = run.verdict
    return {
        "technique": run.technique,
        "alpha": alpha,
        "epsilon": epsilon,
        "status": run.status,
        "verdict": None if verdict is None else verdict.detected,
        "I_final": None if verdict is None else verdict.I_final,
        "I0_final": None if verdict is None else verdict.I0_final,
        "relative_gap": None if verdict is None else verdict.relative_gap,
        "wall_time": run.wall_time,
        "samples": 0 if run.trajectory is None else len(run.trajectory),
    }


def cmd_simulate(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    alpha = cfg.params.alpha if args.alpha is None else args.alpha
    epsilon = cfg.params.epsilon if args.epsilon is None else args.epsilon
    run = run_technique(args.technique, alpha, epsilon, cfg, repeat=1)
    summary = _simulation_summary(run, alpha, epsilon)

    if run.status == "divergence":
        print(json.dumps({"error": "divergence", "message": run.message, "summary": summary}), file=sys.stderr)
        return EXIT_NUMERICAL

    if args.out is not None:
        with args.out.open("w", encoding="utf-8", newline="") as out_file:
            write_simulation_csv(run, cfg, out_file)
        print(json.dumps(summary, indent=2))
    else:
        write_simulation_csv(run, cfg, sys.stdout)
        print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def cmd_threshold(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    alpha = cfg.params.alpha if args.alpha is None else args.alpha
    result = threshold_bisection(alpha, args.technique, cfg)
    print(result.model_dump_json(indent=2))
    return EXIT_OK


def _write_sweep_csv(rows: Sequence[Any], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([
            _float_text(row.alpha),
            row.technique,
            _float_text(row.eps_min),
            _float_text(row.eps_app),
            _float_text(row.wall_time),
            _float_text(row.eps_lo),
            _float_text(row.eps_hi),
            str(row.iterations),
            _float_text(row.delta_eps),
        ])


def cmd_sweep(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    rows = run_sweep(cfg, args.techniques, args.workers)
    if args.out is not None:
        with args.out.open("w", encoding="utf-8", newline="") as out_file:
            _write_sweep_csv(rows, out_file)
    else:
        _write_sweep_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    alpha = cfg.params.alpha if args.alpha is None else args.alpha
    epsilon = cfg.params.epsilon if args.epsilon is None else args.epsilon
    stats = benchmark_technique(args.technique, alpha, epsilon, cfg, args.repeat)
    print(stats.model_dump_json(indent=2))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
}


def _report(error_kind: str, message: str) -> None:
    print(json.dumps({"error": error_kind, "message": message}), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = load_experiment_config(args.config, _overrides(args))
        return COMMANDS[args.command](args, cfg)
    except StroboError as error:
        print(json.dumps(error.to_json()), file=sys.stderr)
        return error.exit_code
    except ValidationError as error:
        _report("usage error", str(error))
        return EXIT_USAGE
    except ValueError as error:
        _report("usage error", str(error))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
