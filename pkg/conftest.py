from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240521)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: randomized property suites with full trial counts")
