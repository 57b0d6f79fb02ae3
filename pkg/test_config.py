"""Tests for settings loaded from the environment."""

import logging

import pytest
from pydantic import ValidationError

from sas_mdp.config import SolverSettings, configure_logging

ENV_VARS = ("SAS_EPS", "SAS_TOL", "SAS_MAX_ITERS", "SAS_SEED", "SAS_LOG_LEVEL", "SAS_ADS_SAMPLES")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for var in ENV_VARS:
        monkeypatch.delenv(var, raising=False)


def test_defaults():
    settings = SolverSettings.from_env()
    assert settings.eps == 1e-8
    assert settings.tol == 1e-8
    assert settings.max_iters == 10_000
    assert settings.seed == 0
    assert settings.log_level == "INFO"
    assert settings.ads_samples == 1000


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SAS_EPS", "1e-6")
    monkeypatch.setenv("SAS_SEED", "42")
    monkeypatch.setenv("SAS_LOG_LEVEL", "debug")
    settings = SolverSettings.from_env()
    assert settings.eps == 1e-6
    assert settings.seed == 42
    assert settings.log_level == "DEBUG"


def test_dotenv_file(tmp_path, monkeypatch):
    env_file = tmp_path / "solver.env"
    env_file.write_text("SAS_ADS_SAMPLES=250\n")
    # load_dotenv writes into os.environ; register the key so it is removed afterwards
    monkeypatch.setenv("SAS_ADS_SAMPLES", "")
    monkeypatch.delenv("SAS_ADS_SAMPLES")
    assert SolverSettings.from_env(env_file).ads_samples == 250


@pytest.mark.parametrize(
    "var, value",
    [("SAS_LOG_LEVEL", "LOUD"), ("SAS_EPS", "0"), ("SAS_MAX_ITERS", "0"), ("SAS_SEED", "-3")],
)
def test_invalid_values(monkeypatch, var, value):
    monkeypatch.setenv(var, value)
    with pytest.raises(ValidationError):
        SolverSettings.from_env()


def test_configure_logging():
    configure_logging("warning")
    assert logging.getLogger().level == logging.WARNING
    configure_logging("INFO")
    assert logging.getLogger().level == logging.INFO
