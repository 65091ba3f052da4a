# parallel-cfs/tests/conftest.py

import os
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
import pytest

from tools.config import EngineConfig
from tools.correlation import FeaturePair, canonical
from tools.dataset import DiscreteDataset
from tools.engines import EngineStats

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    """Tests never pick up CFS_* settings from the developer's shell or .env."""
    for name in list(os.environ):
        if name.startswith("CFS_") and name != "CFS_RUN_SLOW":
            monkeypatch.delenv(name, raising=False)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def write_csv(tmp_path):
    def _write(text: str, name: str = "data.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


class TableProvider:
    """
    Provider backed by a fixed SU table, for hand-traced searches. Pairs not
    listed are 0.0. Every call is recorded.
    """

    layout = "table"

    def __init__(self, m: int, values: Dict[Tuple[int, int], float]):
        self.m = m
        self.class_index = m
        self.values = {canonical(p): float(v) for p, v in values.items()}
        self.calls = []
        self.stats = EngineStats()
        self.cfg = EngineConfig(layout="sequential", workers=1, partitions=1)

    def compute(self, pairs):
        batch = [canonical(p) for p in pairs]
        self.calls.append(batch)
        self.stats.rounds += 1
        self.stats.pairs_computed += len(batch)
        return {p: self.values.get(p, 0.0) for p in batch}


@pytest.fixture
def table_provider():
    return TableProvider


@pytest.fixture
def class_copy_dataset() -> DiscreteDataset:
    """a = class, b independent of everything, c = a."""
    y = np.array([0, 0, 1, 1] * 8)
    b = np.array([0, 1, 0, 1] * 8)
    codes = np.column_stack([y, b, y, y])
    return DiscreteDataset(codes, (2, 2, 2, 2), ("a", "b", "c"))


@pytest.fixture
def small_table_dataset() -> DiscreteDataset:
    """One feature and the class whose joint table is [[1,1],[0,2]]."""
    codes = np.array([[0, 0], [0, 1], [1, 1], [1, 1]])
    return DiscreteDataset(codes, (2, 2), ("x",), "y")


# (lo, hi) -> SU for a 3 feature problem: a copies the class, c copies a, b is noise
CLASS_COPY_SU = {
    FeaturePair(0, 3): 1.0,
    FeaturePair(2, 3): 1.0,
    FeaturePair(0, 2): 1.0,
}

# 4 features; 0 is redundant with every other feature, 1, 2, 3 are mutually
# independent. {1,2,3} beats {0} but is only reached on the seventh iteration.
LATE_IMPROVEMENT_SU = {
    FeaturePair(0, 4): 0.9,
    FeaturePair(1, 4): 0.75,
    FeaturePair(2, 4): 0.515,
    FeaturePair(3, 4): 0.3,
    FeaturePair(0, 1): 1.0,
    FeaturePair(0, 2): 1.0,
    FeaturePair(0, 3): 1.0,
}


@pytest.fixture
def class_copy_su():
    return dict(CLASS_COPY_SU)


@pytest.fixture
def late_improvement_su():
    return dict(LATE_IMPROVEMENT_SU)
