# parallel-cfs/tools/correlation.py
"""
Contingency tables and the information theory built on them.

Counts stay integer from construction through merging; floating point only
appears inside the entropy functions. Two tables with equal counts therefore
give bit-identical SU values, whichever engine produced them.
"""

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, NamedTuple, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import entropy as _scipy_entropy

from tools.dataset import RowPartition
from tools.errors import DataError, DimensionError, InvariantError

logger = logging.getLogger(__name__)

SU_TOLERANCE = 1e-9


class FeaturePair(NamedTuple):
    """Unordered pair of column indices, stored with lo < hi. The class is column m."""

    lo: int
    hi: int

    @classmethod
    def of(cls, a: int, b: int) -> "FeaturePair":
        a, b = int(a), int(b)
        if a == b:
            raise DimensionError(f"a pair needs two distinct columns, got ({a}, {b})")
        return cls(a, b) if a < b else cls(b, a)


PairLike = Union[FeaturePair, Tuple[int, int]]


def canonical(pair: PairLike) -> FeaturePair:
    return FeaturePair.of(pair[0], pair[1])


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Joint counts, rows indexed by the codes of `lo`, columns by the codes of `hi`."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise DimensionError("a contingency table is a 2-d matrix")
        if (counts < 0).any():
            raise DataError("contingency counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.counts.shape

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def row_marginal(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.counts.T.copy())

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.counts, other.counts))

    __hash__ = None


def contingency_table(x: np.ndarray, y: np.ndarray, x_arity: int, y_arity: int) -> ContingencyTable:
    """Count code pairs in one pass over two aligned columns."""
    flat = np.asarray(x, dtype=np.int64) * y_arity + np.asarray(y, dtype=np.int64)
    counts = np.bincount(flat, minlength=x_arity * y_arity)
    if counts.size != x_arity * y_arity:
        raise DimensionError(f"codes exceed the declared arities {x_arity}x{y_arity}")
    return ContingencyTable(counts.reshape(x_arity, y_arity))


def local_ctables(
    pairs: Sequence[FeaturePair], partition: RowPartition
) -> Dict[FeaturePair, ContingencyTable]:
    """
    Tables for every requested pair over the rows of one partition, sized by the
    global arities so tables from different partitions can be summed. The
    columns the batch touches are gathered from the partition in a single read;
    pairs are then counted from that block.
    """
    if not pairs:
        return {}
    width = partition.codes.shape[1]
    for pair in pairs:
        if not (0 <= pair.lo < width and 0 <= pair.hi < width):
            raise DimensionError(f"pair {tuple(pair)} out of range for {width} columns")
    cols = sorted({j for pair in pairs for j in pair})
    block = np.asfortranarray(partition.codes[:, cols])
    where = {j: i for i, j in enumerate(cols)}
    return {
        pair: contingency_table(
            block[:, where[pair.lo]],
            block[:, where[pair.hi]],
            partition.arities[pair.lo],
            partition.arities[pair.hi],
        )
        for pair in pairs
    }


def merge_tables(a: ContingencyTable, b: ContingencyTable) -> ContingencyTable:
    if a.shape != b.shape:
        raise DimensionError(f"cannot merge tables of shape {a.shape} and {b.shape}")
    return ContingencyTable(a.counts + b.counts)


def entropy(marginal: Sequence[int], total: int) -> float:
    """Entropy in bits of a count vector; an empty vector has entropy 0."""
    if total == 0:
        return 0.0
    return float(_scipy_entropy(np.asarray(marginal, dtype=np.float64), base=2))


def conditional_entropy(table: ContingencyTable, given: str = "y") -> float:
    """
    H(X|Y) when given == "y" (X indexes rows), H(Y|X) when given == "x".
    Slices whose marginal is zero contribute nothing.
    """
    if given not in ("x", "y"):
        raise ValueError(f"given must be 'x' or 'y', got {given!r}")
    counts = table.counts if given == "y" else table.counts.T
    total = table.total
    if total == 0:
        return 0.0
    marginal = counts.sum(axis=0)
    used = marginal > 0
    slices = _scipy_entropy(counts[:, used].astype(np.float64), base=2, axis=0)
    return float(np.dot(marginal[used] / total, slices))


def symmetrical_uncertainty(table: ContingencyTable) -> float:
    """
    2 * (H(X) - H(X|Y)) / (H(X) + H(Y)), in [0, 1]. Two constant columns share
    no information, so SU is 0 when both entropies vanish.
    """
    total = table.total
    if total == 0:
        raise DataError("symmetrical uncertainty of an empty table")
    hx = entropy(table.row_marginal, total)
    hy = entropy(table.col_marginal, total)
    denom = hx + hy
    if denom == 0.0:
        return 0.0
    su = 2.0 * (hx - conditional_entropy(table, "y")) / denom
    if su < -SU_TOLERANCE or su > 1.0 + SU_TOLERANCE:
        raise InvariantError(f"symmetrical uncertainty {su!r} outside [0, 1]")
    return min(max(su, 0.0), 1.0)


class CorrelationCache:
    """
    Write-once store of SU values keyed by canonical pair. Batches are published
    by swapping in a new dict, so concurrent readers see either none or all of
    a batch.
    """

    def __init__(self):
        self._values: Dict[FeaturePair, float] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, pair) -> bool:
        return canonical(pair) in self._values

    def __getitem__(self, pair) -> float:
        return self._values[canonical(pair)]

    def get(self, a: int, b: int, default=None):
        return self._values.get(FeaturePair.of(a, b), default)

    @property
    def computed(self) -> int:
        return len(self._values)

    def put_batch(self, values: Mapping[PairLike, float]) -> None:
        with self._write_lock:
            fresh = dict(self._values)
            for pair, su in values.items():
                key = canonical(pair)
                old = fresh.get(key)
                if old is not None and old != su:
                    raise InvariantError(f"pair {tuple(key)} already cached as {old!r}, got {su!r}")
                fresh[key] = float(su)
            self._values = fresh

    def to_csv(self, path) -> Path:
        """Debug dump: one `lo,hi,su` line per cached pair, sorted by pair."""
        path = Path(path)
        rows = sorted((p.lo, p.hi, su) for p, su in self._values.items())
        frame = pd.DataFrame(rows, columns=["lo", "hi", "su"])
        frame.to_csv(path, index=False, float_format="%.17g")
        return path


def cache_get_missing(cache: CorrelationCache, pairs: Iterable[PairLike]) -> List[FeaturePair]:
    """Pairs absent from the cache, canonical, first occurrence order, no duplicates."""
    seen = set()
    missing = []
    for pair in pairs:
        key = canonical(pair)
        if key in seen:
            continue
        seen.add(key)
        if key not in cache:
            missing.append(key)
    return missing
