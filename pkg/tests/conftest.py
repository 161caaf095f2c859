import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture
def out_dir(tmp_path):
    d = tmp_path / "runs"
    d.mkdir()
    return d
