"""
Shared fixtures for the test-suite.
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

os.environ.setdefault("QB_LOG_FILE", os.path.join(os.path.dirname(os.path.abspath(__file__)), ".logs", "tests.log"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_state(rng):
    from simulation.hilbert import StateVector

    def make(n_sites: int) -> StateVector:
        raw = rng.normal(size=2 ** n_sites) + 1j * rng.normal(size=2 ** n_sites)
        return StateVector.from_amplitudes(raw, normalize=True)

    return make


@pytest.fixture
def output_dirs(tmp_path, monkeypatch):
    """Point every output location of the global config at a temporary directory."""
    from utils.config import config

    dirs = {
        "output_dir": str(tmp_path / "runs"),
        "reports_dir": str(tmp_path / "reports"),
        "run_index_path": str(tmp_path / "data" / "run_index.json"),
    }
    for name, value in dirs.items():
        monkeypatch.setattr(config, name, value)
    return dirs
