"""Shared fixtures for the test suite."""

import math

import pytest

from src.config.manager import ConfigManager
from src.spectral.delta import extremal_delta


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    """Keep developer HS_* settings out of the tests."""
    for name in ("HS_THREADS", "HS_LOG_LEVEL", "HS_LOG_FORMAT", "HS_CONFIG"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def config():
    return ConfigManager(environ={})


@pytest.fixture(scope="session")
def extremal_quarter():
    """Extremal Dirichlet delta at m = 1, theta = pi/2."""
    return extremal_delta(1.0, math.pi / 2)
