from __future__ import annotations

import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from strobosam.core.config_loader import load_experiment_config, read_flat_config
from strobosam.core.config_models import (
    ExperimentConfig,
    MacroConfig,
    MicroConfig,
    OscillatorParams,
    default_alpha_grid,
)
from strobosam.core.errors import ConfigError, SecondOrderFormError


# =============================================================================
# MODELS
# =============================================================================


def test_oscillator_defaults(ref_params: OscillatorParams) -> None:
    assert ref_params.B == 2.0
    assert ref_params.omega0 == pytest.approx(2.0 * math.pi)
    assert ref_params.gamma == pytest.approx((2.0 * math.pi) ** 2 / 6.0)
    assert ref_params.T0 == pytest.approx(1.0)
    assert ref_params.has_integer_tau0


def test_gamma_follows_omega0_when_omitted() -> None:
    params = OscillatorParams(omega0=3.0)
    assert params.gamma == pytest.approx(1.5)
    assert OscillatorParams(omega0=3.0, gamma=0.7).gamma == 0.7


def test_oscillator_rejects_bad_values() -> None:
    with pytest.raises(ValidationError):
        OscillatorParams(omega0=0.0)
    with pytest.raises(ValidationError):
        OscillatorParams(epsilon=-0.1)
    with pytest.raises(ValidationError):
        OscillatorParams(B=float("nan"))


def test_with_sweep_revalidates(ref_params: OscillatorParams) -> None:
    swept = ref_params.with_sweep(1e-5, 0.02)
    assert (swept.alpha, swept.epsilon) == (1e-5, 0.02)
    assert swept.gamma == ref_params.gamma
    with pytest.raises(ValidationError):
        ref_params.with_sweep(1e-5, -0.02)


def test_non_integer_tau0_detected() -> None:
    assert not OscillatorParams(tau0=-1000.5).has_integer_tau0
    cfg = ExperimentConfig(params=OscillatorParams(tau0=-1000.5))
    with pytest.raises(SecondOrderFormError):
        cfg.require_integer_tau0()


def test_macro_output_times_must_increase() -> None:
    MacroConfig(output_times=[0.0, 1.0, 2.0])
    with pytest.raises(ValidationError):
        MacroConfig(output_times=[0.0, 2.0, 2.0])
    with pytest.raises(ValidationError, match="must not be empty"):
        MacroConfig(output_times=[])
    with pytest.raises(ValidationError):
        MacroConfig(rel_tol=0.0)


def test_micro_step_is_derived(ref_params: OscillatorParams) -> None:
    micro = MicroConfig()
    assert micro.substeps_per_period == 40
    assert micro.step(ref_params) * 40 == pytest.approx(ref_params.T0, rel=1e-15)
    with pytest.raises(ValidationError):
        MicroConfig(diff_order=3)
    with pytest.raises(ValidationError):
        MicroConfig(substeps_per_period=0)


def test_default_alpha_grid() -> None:
    grid = default_alpha_grid()
    assert len(grid) == 8
    assert grid[0] == pytest.approx(1e-6)
    assert grid[-1] == pytest.approx(1e-3)


def test_experiment_defaults(ref_config: ExperimentConfig) -> None:
    assert ref_config.span == (-1000.0, 5000.0)
    assert list(ref_config.y0) == [1e-9, 0.0]
    assert ref_config.macro.rel_tol == 1e-12
    assert ref_config.repeat == 10
    assert ref_config.bracket == (0.95, 1.10)


def test_experiment_validation() -> None:
    with pytest.raises(ValidationError):
        ExperimentConfig(tau_end=-999.5)
    with pytest.raises(ValidationError):
        ExperimentConfig(alphas=[1e-4, -1e-5])
    with pytest.raises(ValidationError):
        ExperimentConfig(bracket=(1.1, 0.95))
    assert ExperimentConfig(alphas=[1e-3, 1e-5]).alphas == [1e-5, 1e-3]


def test_from_flat_routes_keys() -> None:
    cfg = ExperimentConfig.from_flat({
        "B": 1.5, "tau_end": 100.0, "rel_tol": 1e-10, "substeps_per_period": 80, "stride": 5,
    })
    assert cfg.params.B == 1.5
    assert cfg.tau_end == 100.0
    assert cfg.macro.rel_tol == 1e-10
    assert cfg.micro.substeps_per_period == 80
    assert cfg.stride == 5


def test_from_flat_rejects_unknown_keys() -> None:
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_flat({"bogus": 1})


def test_with_overrides_moves_default_gamma() -> None:
    cfg = ExperimentConfig().with_overrides({"omega0": 4.0})
    assert cfg.params.gamma == pytest.approx(16.0 / 6.0)
    pinned = ExperimentConfig.from_flat({"gamma": 2.0}).with_overrides({"omega0": 4.0})
    assert pinned.params.gamma == 2.0


# =============================================================================
# LOADER
# =============================================================================


def test_read_flat_config(tmp_path: Path) -> None:
    path = tmp_path / "cfg.yml"
    path.write_text("B: 1.0\nalphas: [1.0e-5, 1.0e-4]\n", encoding="utf-8")
    assert read_flat_config(path) == {"B": 1.0, "alphas": [1e-5, 1e-4]}


@pytest.mark.parametrize("content", ["params:\n  B: 1.0\n", "tau0: [1, 2]\n", "- 1\n- 2\n", "B: [unclosed\n"])
def test_read_flat_config_rejects(tmp_path: Path, content: str) -> None:
    path = tmp_path / "cfg.yml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        read_flat_config(path)


def test_empty_config_means_defaults(tmp_path: Path) -> None:
    path = tmp_path / "empty.yml"
    path.write_text("", encoding="utf-8")
    assert load_experiment_config(path) == ExperimentConfig()


def test_flags_override_file(tmp_path: Path) -> None:
    path = tmp_path / "cfg.yml"
    path.write_text("B: 1.0\ntau_end: 100\nrepeat: 3\n", encoding="utf-8")
    cfg = load_experiment_config(path, {"B": 3.0, "repeat": None})
    assert cfg.params.B == 3.0
    assert cfg.tau_end == 100.0
    assert cfg.repeat == 3


def test_default_location_is_discovered(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(tmp_path)
    assert load_experiment_config() == ExperimentConfig()
    (tmp_path / ".strobosam.yml").write_text("tau_end: 42\n", encoding="utf-8")
    assert load_experiment_config().tau_end == 42.0


def test_missing_explicit_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "missing.yml")


def test_invalid_values_become_config_errors(tmp_path: Path) -> None:
    path = tmp_path / "cfg.yml"
    path.write_text("rel_tol: -1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_experiment_config(path)
