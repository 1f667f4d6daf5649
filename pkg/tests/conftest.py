import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from qde_config import SEED  # noqa: E402

PROBLEMS = os.path.join(ROOT, "problems")
GATE_TIMES = (0.0, 0.25, 0.5, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def problems_dir():
    return PROBLEMS


def problem_path(name: str) -> str:
    return os.path.join(PROBLEMS, f"{name}.json")
