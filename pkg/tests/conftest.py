import sys
from pathlib import Path

import numpy as np
import pytest

# Flat modules live at the repository root
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import global_cache  # noqa: E402
from grid_field import Grid  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale scenario runs")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale scenario run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def clean_config_cache():
    """Every test starts from the built-in defaults."""
    saved = {key: value for key, value in global_cache.config_cache.items()}
    global_cache.config_cache.clear()
    global_cache.config_cache["Options"] = {"max_workers": 3}
    yield
    global_cache.config_cache.clear()
    global_cache.config_cache.update(saved)


@pytest.fixture
def line_grid():
    """1D, 4 cells of width 1 on [0, 4]."""
    return Grid((0.0,), (4.0,), (4,))


@pytest.fixture
def square_grid():
    """2D, 16 x 16 cells on [-4, 4]^2 (h = 0.5)."""
    return Grid.square(-4.0, 4.0, 16, dim=2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tmp_profile(tmp_path, monkeypatch):
    """Point config.py at a throwaway profile directory."""
    import config

    profile = tmp_path / "profiles" / "test"
    monkeypatch.setattr(config, "PROFILE_DIR", profile)
    monkeypatch.setattr(config, "CONFIG_FILE", profile / "config.ini")
    monkeypatch.setattr(config, "LOGS_PATH", profile / "logs")
    return profile
