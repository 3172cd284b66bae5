"""
Shared fixtures for the test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from services.config import get_settings  # noqa: E402
from services.dephasing_core.bath import BathParams  # noqa: E402
from services.dephasing_core.states import InputQubit  # noqa: E402


@pytest.fixture
def calibrated() -> BathParams:
    return BathParams.calibrated()


@pytest.fixture
def zero_temperature() -> BathParams:
    return BathParams(eta=1e-3, omega_c=100.0, beta_hbar=float("inf"))


@pytest.fixture
def rng(request) -> np.random.Generator:
    """Generator seeded from the test name so every test is reproducible on its own"""
    seed = sum(ord(c) for c in request.node.name)
    return np.random.default_rng(seed)


@pytest.fixture
def zero_input() -> InputQubit:
    return InputQubit.from_tag("zero")


@pytest.fixture
def plus_input() -> InputQubit:
    return InputQubit.from_tag("plus")


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch, tmp_path):
    """Settings read from a clean environment for every test"""
    for key in ("DEPHASE_OUTPUT_DIR", "DEPHASE_PROFILE", "DEPHASE_PROFILES_DIR",
                "LOG_LEVEL", "LOG_FORMAT"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
