# parallel-cfs/tools/engines.py
"""
Correlation providers. Each takes a batch of column pairs and returns their
symmetrical uncertainty; the search never knows which one it is talking to.

  sequential  one table per pair over all rows (the reference result)
  horizontal  row blocks -> per-block tables -> element-wise sum -> SU
  vertical    feature groups + one broadcast column per shared endpoint

Workers are joblib tasks inside this process. Integer tables are merged in
partition order, so the result never depends on the worker count.
"""

import json
import logging
import time
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from tools.config import EngineConfig
from tools.correlation import (
    ContingencyTable,
    CorrelationCache,
    FeaturePair,
    PairLike,
    canonical,
    contingency_table,
    local_ctables,
    merge_tables,
    symmetrical_uncertainty,
)
from tools.dataset import (
    ColumnPartition,
    DiscreteDataset,
    RowPartition,
    columnar_transform,
    partition_rows,
)
from tools.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)


@dataclass
class EngineStats:
    rounds: int = 0
    pairs_computed: int = 0
    broadcasts: int = 0
    setup_ms: float = 0.0
    round_ms: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _run_tasks(tasks: List[tuple], workers: int, backend: str) -> list:
    """Run joblib `delayed` tasks; results come back in submission order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*args, **kwargs) for fn, args, kwargs in tasks]
    prefer = "threads" if backend == "threads" else "processes"
    # batch_size=1: an idle worker pulls the next partition
    return Parallel(n_jobs=min(workers, len(tasks)), prefer=prefer, batch_size=1)(tasks)


def _check_pairs(pairs: Iterable[FeaturePair], width: int) -> None:
    for p in pairs:
        if not (0 <= p.lo < width and 0 <= p.hi < width):
            raise DimensionError(f"pair {tuple(p)} out of range for {width} columns")


def sequential_compute(ds: DiscreteDataset, pairs: Sequence[PairLike]) -> Dict[FeaturePair, float]:
    pairs = [canonical(p) for p in pairs]
    _check_pairs(pairs, ds.m + 1)
    out = {}
    for p in pairs:
        table = contingency_table(ds.codes[:, p.lo], ds.codes[:, p.hi], ds.arities[p.lo], ds.arities[p.hi])
        out[p] = symmetrical_uncertainty(table)
    return out


def horizontal_compute(
    partitions: Sequence[RowPartition],
    pairs: Sequence[PairLike],
    workers: int = 1,
    backend: str = "threads",
) -> Dict[FeaturePair, float]:
    """
    Map every row block to its local tables, sum the tables per pair in
    partition order, then turn each merged table into SU.
    """
    pairs = [canonical(p) for p in pairs]
    if not pairs:
        return {}
    local = _run_tasks([delayed(local_ctables)(pairs, part) for part in partitions], workers, backend)
    merged: Dict[FeaturePair, ContingencyTable] = {}
    for tables in local:
        for pair, table in tables.items():
            merged[pair] = merge_tables(merged[pair], table) if pair in merged else table
    return {p: symmetrical_uncertainty(merged[p]) for p in pairs}


def _broadcast_tables(
    part: ColumnPartition,
    broadcast_col: np.ndarray,
    broadcast: int,
    candidates: Sequence[int],
    arities: Tuple[int, ...],
) -> Dict[FeaturePair, float]:
    class_index = len(arities) - 1
    out = {}
    for c in candidates:
        col = part.class_column if c == class_index else part.feature_columns[c]
        pair = FeaturePair.of(broadcast, c)
        if broadcast < c:
            table = contingency_table(broadcast_col, col, arities[broadcast], arities[c])
        else:
            table = contingency_table(col, broadcast_col, arities[c], arities[broadcast])
        out[pair] = symmetrical_uncertainty(table)
    return out


def vertical_compute(
    col_partitions: Sequence[ColumnPartition],
    broadcast_feature: int,
    candidates: Sequence[int],
    arities: Tuple[int, ...],
    workers: int = 1,
    backend: str = "threads",
) -> Dict[FeaturePair, float]:
    """
    SU of every candidate against one broadcast column. Each column partition
    pairs only the candidates it stores with the shared broadcast column;
    partitions holding none of them are skipped. The class column, replicated
    everywhere, is paired by the first partition.
    """
    class_index = len(arities) - 1
    if not 0 <= broadcast_feature <= class_index:
        raise DimensionError(f"broadcast column {broadcast_feature} out of range")
    if broadcast_feature in candidates:
        raise DimensionError(f"column {broadcast_feature} cannot be paired with itself")

    if broadcast_feature == class_index:
        broadcast_col = col_partitions[0].class_column
    else:
        holder = next((p for p in col_partitions if broadcast_feature in p.feature_columns), None)
        if holder is None:
            raise DimensionError(f"broadcast feature {broadcast_feature} not found in any partition")
        broadcast_col = holder.feature_columns[broadcast_feature]

    wanted = list(dict.fromkeys(int(c) for c in candidates))
    tasks, placed = [], set()
    for part in col_partitions:
        local = [c for c in wanted if c in part.feature_columns]
        if part.partition_id == col_partitions[0].partition_id and class_index in wanted:
            local.append(class_index)
        if local:
            placed.update(local)
            tasks.append(delayed(_broadcast_tables)(part, broadcast_col, broadcast_feature, local, arities))
    unplaced = [c for c in wanted if c not in placed]
    if unplaced:
        raise DimensionError(f"candidate column(s) {unplaced} not found in any partition")

    out = {}
    for tables in _run_tasks(tasks, workers, backend):
        out.update(tables)
    return out


class CorrelationProvider(ABC):
    """
    compute() is synchronous: it returns once the whole batch is resolved.
    Calls must not overlap; the search drives one round at a time.
    """

    layout = "abstract"

    def __init__(self, ds: DiscreteDataset, cfg: EngineConfig):
        self.ds = ds
        self.cfg = cfg
        self.stats = EngineStats()
        self._seen = set()

    @property
    def m(self) -> int:
        return self.ds.m

    @property
    def class_index(self) -> int:
        return self.ds.class_index

    def compute(self, pairs: Iterable[PairLike]) -> Dict[FeaturePair, float]:
        batch = list(dict.fromkeys(canonical(p) for p in pairs))
        if not batch:
            return {}
        _check_pairs(batch, self.ds.m + 1)
        start = time.perf_counter()
        result = self._compute(batch)
        elapsed = (time.perf_counter() - start) * 1000.0
        fresh = [p for p in batch if p not in self._seen]
        self._seen.update(fresh)
        self.stats.rounds += 1
        self.stats.pairs_computed += len(fresh)
        self.stats.round_ms.append(elapsed)
        logger.debug("%s round %d: %d pairs in %.2f ms", self.layout, self.stats.rounds, len(batch), elapsed)
        return {p: result[p] for p in batch}

    @abstractmethod
    def _compute(self, batch: List[FeaturePair]) -> Dict[FeaturePair, float]:
        ...


class SequentialProvider(CorrelationProvider):
    layout = "sequential"

    def _compute(self, batch):
        return sequential_compute(self.ds, batch)


class HorizontalProvider(CorrelationProvider):
    layout = "horizontal"

    def __init__(self, ds, cfg):
        super().__init__(ds, cfg)
        start = time.perf_counter()
        self.partitions = partition_rows(ds, cfg.partitions)
        self.stats.setup_ms = (time.perf_counter() - start) * 1000.0

    def _compute(self, batch):
        return horizontal_compute(self.partitions, batch, self.cfg.workers, self.cfg.backend)


class VerticalProvider(CorrelationProvider):
    layout = "vertical"

    def __init__(self, ds, cfg):
        super().__init__(ds, cfg)
        start = time.perf_counter()
        self.col_partitions = columnar_transform(ds, cfg.partitions, cfg.assignment)
        self.stats.setup_ms = (time.perf_counter() - start) * 1000.0

    def _compute(self, batch):
        out = {}
        for broadcast, candidates in group_by_endpoint(batch):
            self.stats.broadcasts += 1
            out.update(
                vertical_compute(
                    self.col_partitions, broadcast, candidates, self.ds.arities,
                    self.cfg.workers, self.cfg.backend,
                )
            )
        return out


def group_by_endpoint(batch: Sequence[FeaturePair]) -> List[Tuple[int, List[int]]]:
    """
    Cover the batch with broadcast groups: repeatedly pick the column shared by
    the most remaining pairs (lowest index on ties) and pair it with the other
    endpoints. A batch without shared endpoints ends up one broadcast per pair.
    """
    remaining = list(batch)
    groups = []
    while remaining:
        counts = Counter(e for p in remaining for e in p)
        broadcast = min(counts, key=lambda e: (-counts[e], e))
        others, rest = [], []
        for p in remaining:
            if broadcast in p:
                others.append(p.hi if p.lo == broadcast else p.lo)
            else:
                rest.append(p)
        groups.append((broadcast, others))
        remaining = rest
    return groups


def make_provider(ds: DiscreteDataset, cfg: EngineConfig) -> CorrelationProvider:
    cfg = cfg.resolve(ds.m, ds.n)
    providers = {
        "sequential": SequentialProvider,
        "horizontal": HorizontalProvider,
        "vertical": VerticalProvider,
    }
    if cfg.layout not in providers:
        raise ConfigError(f"unknown engine layout {cfg.layout!r}")
    logger.info("engine %s: %d partitions, %d workers (%s)", cfg.layout, cfg.partitions, cfg.workers, cfg.backend)
    return providers[cfg.layout](ds, cfg)


def eager_cache(provider: CorrelationProvider) -> CorrelationCache:
    """All m(m+1)/2 correlations in one round. Used only to check on-demand results."""
    width = provider.m + 1
    pairs = [FeaturePair(a, b) for a in range(width) for b in range(a + 1, width)]
    cache = CorrelationCache()
    cache.put_batch(provider.compute(pairs))
    return cache
