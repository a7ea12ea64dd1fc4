import os
from pathlib import Path

import pytest

from i4mirror.config import RunConfig
from i4mirror.exceptions import ConfigError


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch):
    """Keep I4MIRROR_* variables of the calling shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("I4MIRROR_"):
            monkeypatch.delenv(key)


def test_string_values_are_coerced(run_config):
    config = run_config.merge(mirror_grade="9", emit_csv="yes", theta_tol="1e-10")
    assert config.mirror_grade == 9
    assert config.emit_csv is True
    assert config.theta_tol == 1e-10
    assert isinstance(RunConfig(output="out").output, Path)


@pytest.mark.parametrize(
    "overrides",
    [
        {"nome_power": 3},
        {"pairing_normalization": "sum"},
        {"mirror_grade": 0},
        {"mp_dps": -1},
        {"theta_tol": 0},
        {"emit_json": "maybe"},
        {"ifunction_grade": "six"},
    ],
)
def test_invalid_values(run_config, overrides):
    with pytest.raises(ConfigError):
        run_config.merge(**overrides)


def test_label_offset_is_taken_modulo_four(run_config):
    assert run_config.merge(theta_label_offset=5).theta_label_offset == 1
    assert run_config.merge(theta_label_offset=-1).theta_label_offset == 3


def test_merge(run_config):
    assert run_config.merge(mirror_grade=None) == run_config
    assert run_config.merge(nome_power=2).nome_power == 2
    with pytest.raises(ConfigError):
        run_config.merge(colour="blue")


def test_from_file(config_path, run_config):
    config = RunConfig.from_file(config_path, base=run_config)
    assert config.mirror_grade == 9
    assert config.ifunction_grade == 3
    assert config.theta_tol == 1e-20
    assert config.mp_dps == 40
    assert config.emit_csv is True
    assert config.pairing_normalization == "raw"
    assert config.output == run_config.output


def test_from_file_rejects_bad_input(tmp_path, run_config):
    broken = tmp_path / "broken.toml"
    broken.write_text("mirror_grade = \n")
    with pytest.raises(ConfigError):
        RunConfig.from_file(broken, base=run_config)
    unknown = tmp_path / "unknown.toml"
    unknown.write_text('colour = "blue"\n')
    with pytest.raises(ConfigError):
        RunConfig.from_file(unknown, base=run_config)
    negative = tmp_path / "negative.toml"
    negative.write_text("mirror_grade = -3\n")
    with pytest.raises(ConfigError):
        RunConfig.from_file(negative, base=run_config)


def test_to_json(run_config):
    data = run_config.to_json()
    assert data["output"] == str(run_config.output)
    assert data["nome_power"] == 4
    assert data["pairing_normalization"] == "divisor"
