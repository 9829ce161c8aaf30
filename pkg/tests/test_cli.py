from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from strobosam import cli
from strobosam.core.config_models import ExperimentConfig
from strobosam.core.errors import BracketFailureError
from strobosam.core.types import TechniqueRun, ThresholdResult, Trajectory
from strobosam.experiments.analysis import trajectory_diagnostics
from strobosam.experiments.sweep import SWEEP_COLUMNS, build_rows

SCHEMAS = Path(__file__).resolve().parents[1] / "schemas"

CONSTANT_RUN = [
    "simulate", "--technique", "direct", "--B", "0", "--alpha", "1e-4", "--epsilon", "0",
    "--theta0", "0.5", "--tau-end", "-990",
]


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _last_json(text: str) -> dict:
    return json.loads(text.strip().splitlines()[-1])


def _required(schema_name: str) -> set[str]:
    schema = json.loads((SCHEMAS / schema_name).read_text(encoding="utf-8"))
    return set(schema["required"])


# =============================================================================
# USAGE
# =============================================================================


@pytest.mark.parametrize("argv", [[], ["simulate"], ["simulate", "--technique", "rk4"], ["launch"]])
def test_usage_errors_exit_1(argv: list[str]) -> None:
    with pytest.raises(SystemExit) as exit_info:
        cli.main(argv)
    assert exit_info.value.code == 1


def test_bad_config_exits_1(isolated_cwd: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = isolated_cwd / "bad.yml"
    config.write_text("bogus: 1\n", encoding="utf-8")
    assert cli.main([*CONSTANT_RUN, "--config", str(config)]) == 1
    error = _last_json(capsys.readouterr().err)
    assert error["error"] == "usage error"
    assert "bogus" in error["message"]


def test_invalid_flag_value_exits_1(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main([*CONSTANT_RUN, "--rel-tol", "-1"]) == 1
    assert _last_json(capsys.readouterr().err)["error"] == "usage error"


# =============================================================================
# SIMULATE
# =============================================================================


def test_simulate_writes_csv_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(CONSTANT_RUN) == 0
    captured = capsys.readouterr()

    rows = list(csv.reader(io.StringIO(captured.out)))
    assert tuple(rows[0]) == cli.SIMULATION_COLUMNS
    assert len(rows) == 1 + 11
    tau, theta, v = (float(value) for value in rows[-1][:3])
    assert tau == -990.0
    assert theta == pytest.approx(0.5, abs=1e-8)
    assert v == pytest.approx(0.0, abs=1e-7)

    summary = _last_json(captured.err)
    assert summary["status"] == "ok"
    assert summary["verdict"] is None


def test_simulate_is_deterministic(capsys: pytest.CaptureFixture[str]) -> None:
    cli.main(CONSTANT_RUN)
    first = capsys.readouterr().out
    cli.main(CONSTANT_RUN)
    assert capsys.readouterr().out == first


def test_simulate_out_file(isolated_cwd: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = isolated_cwd / "run.csv"
    argv = ["simulate", "--technique", "averaged1", "--tau-end", "-990", "--out", str(out)]
    assert cli.main(argv) == 0

    summary = json.loads(capsys.readouterr().out)
    assert set(summary) == _required("simulation_summary.schema.json")
    assert summary["technique"] == "averaged1"
    assert summary["samples"] == 11
    assert isinstance(summary["verdict"], bool)

    with out.open(encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 11
    assert float(rows[0]["tau"]) == -1000.0
    assert float(rows[0]["theta"]) == 1e-9


def test_simulation_csv_round_trips_floats() -> None:
    cfg = ExperimentConfig()
    times = cfg.params.tau0 + cfg.params.T0 * np.arange(4.0)
    states = np.array([[1e-9, 0.0], [0.1, -1.0 / 3.0], [0.2, 0.7], [-0.3, 2.0 / 7.0]])
    traj = Trajectory(times=times, states=states, params=cfg.params)
    run = TechniqueRun(technique="direct", status="ok", wall_time=0.0, trajectory=traj)

    stream = io.StringIO()
    cli.write_simulation_csv(run, cfg, stream)

    rows = list(csv.reader(io.StringIO(stream.getvalue())))
    assert tuple(rows[0]) == cli.SIMULATION_COLUMNS
    written = np.array([[float(value) for value in row] for row in rows[1:]])
    np.testing.assert_array_equal(written, np.column_stack(trajectory_diagnostics(traj, cfg.params)))


def test_simulate_divergence_exits_2(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    def diverged(technique, alpha, epsilon, cfg, repeat=None) -> TechniqueRun:
        return TechniqueRun(technique=technique, status="divergence", wall_time=0.0, message="non-finite state")

    monkeypatch.setattr(cli, "run_technique", diverged)
    assert cli.main(["simulate", "--technique", "direct"]) == 2

    captured = capsys.readouterr()
    assert captured.out == ""
    error = _last_json(captured.err)
    assert set(error) >= _required("error.schema.json")
    assert error["error"] == "divergence"
    assert error["summary"]["status"] == "divergence"


# =============================================================================
# THRESHOLD / SWEEP / BENCH
# =============================================================================


def test_threshold_prints_result(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    def bisect(alpha, technique, cfg, predicate=None) -> ThresholdResult:
        return ThresholdResult(
            alpha=alpha, technique=technique, eps_lo=0.0270, eps_hi=0.0270009,
            eps_min=0.02700045, eps_app=0.026847, iterations=12, wall_time=3.0,
        )

    monkeypatch.setattr(cli, "threshold_bisection", bisect)
    assert cli.main(["threshold", "--technique", "sam_d2", "--alpha", "1e-4"]) == 0

    result = json.loads(capsys.readouterr().out)
    assert set(result) == _required("threshold_result.schema.json")
    assert result["technique"] == "sam_d2"
    assert result["alpha"] == 1e-4


def test_threshold_bracket_failure_exits_2(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    def bisect(alpha, technique, cfg, predicate=None) -> ThresholdResult:
        raise BracketFailureError("bracket failure: lo=True")

    monkeypatch.setattr(cli, "threshold_bisection", bisect)
    assert cli.main(["threshold", "--technique", "direct"]) == 2
    error = _last_json(capsys.readouterr().err)
    assert error["error"].startswith("bracket failure")


def test_sweep_csv(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    seen = {}

    def fake_sweep(cfg, techniques, workers):
        seen.update(alphas=cfg.alphas, techniques=techniques, workers=workers)
        return build_rows([
            ThresholdResult(alpha=alpha, technique=technique, eps_lo=0.01, eps_hi=0.0100009,
                            eps_min=0.01000045, eps_app=0.01, iterations=12, wall_time=1.0)
            for alpha in cfg.alphas for technique in techniques
        ])

    monkeypatch.setattr(cli, "run_sweep", fake_sweep)
    argv = ["sweep", "--techniques", "direct,sam_d4", "--alphas", "1e-4,1e-5", "--workers", "2"]
    assert cli.main(argv) == 0

    assert seen == {"alphas": [1e-5, 1e-4], "techniques": ["direct", "sam_d4"], "workers": 2}
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [row[1] for row in rows[1:]] == ["direct", "sam_d4", "direct", "sam_d4"]
    assert rows[1][-1] == "0.0"


def test_sweep_rejects_unknown_technique() -> None:
    with pytest.raises(SystemExit) as exit_info:
        cli.main(["sweep", "--techniques", "direct,leapfrog"])
    assert exit_info.value.code == 1


def test_bench(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["bench", "--technique", "averaged1", "--tau-end", "-990", "--repeat", "2"]
    assert cli.main(argv) == 0
    stats = json.loads(capsys.readouterr().out)
    assert set(stats) == _required("bench_stats.schema.json")
    assert stats["repeat"] == 2
    assert 0.0 < stats["min"] <= stats["mean"] <= stats["max"]
