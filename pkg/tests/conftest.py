"""
Shared fixtures for the numwall test suite
"""
import logging

import numpy as np
import pytest

from numwall.core.constants import CenteringMode
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.models.tiling import TilingSystem

def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the full-size reproduction tests")

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size reproduction run, needs --runslow")

def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture(autouse=True)
def numwall_home(tmp_path, monkeypatch):
    """Keep config and log files out of the user's home directory"""
    home = tmp_path / "numwall-home"
    monkeypatch.setenv("NUMWALL_HOME", str(home))
    monkeypatch.delenv("NW_THREADS", raising=False)
    logging.getLogger('numwall').setLevel(logging.DEBUG)
    return home

@pytest.fixture
def f3():
    return Modulus(3)

@pytest.fixture
def random_source():
    """Factory for a random file-style sequence on lo..hi"""
    def make(p, lo, hi, seed):
        rng = np.random.default_rng(seed)
        return SequenceSource.from_array(rng.integers(0, p, hi - lo + 1), lo, Modulus(p), name=f"random{seed}")
    return make

# Tiling of the constant-1 wall with 3 x 3 tiles on a 2-spaced lattice:
# Z is the zero tile, A carries wall rows -2..0 and B rows 0..2.
ZERO_TILE_CODE = np.zeros((3, 3), dtype=np.int64)
A_TILE_CODE = np.array([[0, 0, 0], [1, 1, 1], [1, 1, 1]])
B_TILE_CODE = np.array([[1, 1, 1], [0, 0, 0], [0, 0, 0]])

@pytest.fixture
def constant_system():
    images = {1: [[3, 3], [1, 1]], 2: [[2, 2], [3, 3]], 3: [[3, 3], [3, 3]]}
    seeds = {(0, 0): 1, (0, 1): 1, (1, 0): 2, (1, 1): 2}
    codes = {1: A_TILE_CODE, 2: B_TILE_CODE, 3: ZERO_TILE_CODE}
    return TilingSystem(images, seeds, codes, overlap=1, mode=CenteringMode.CENTERED)
