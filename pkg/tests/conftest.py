# tests/conftest.py

import numpy as np
import pytest

from src import config


@pytest.fixture
def rng():
    """Fixture providing a seeded numpy Generator."""
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    """Fixture redirecting reports and logs into a temporary directory."""
    out_dir = tmp_path / "reports"
    monkeypatch.setattr(config, "OUTPUT_DIR", str(out_dir))
    monkeypatch.setattr(config, "LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setattr(config, "THREADS", 1)
    return out_dir
