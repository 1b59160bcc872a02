from pathlib import Path

import numpy as np
import pytest
import yaml

from hyperhs.domain.report import RunSettings
from hyperhs.domain.sampling import RngStream, rng_generator

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def settings() -> RunSettings:
    return RunSettings(seed=20240101)


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_generator(RngStream(seed=12345, stream_id=0))


@pytest.fixture(scope="session")
def oracles() -> dict:
    with open(DATA_DIR / "oracles.yaml", "r") as f:
        return yaml.safe_load(f)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run in a scratch directory so logs/ and reports/ land there."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("HYPERHS_SEED", raising=False)
    return tmp_path
