# parallel-cfs/tools/dataset.py
"""
In-memory dataset types and the two partitioned layouts the engines consume.

Raw data keeps the columns as read from the CSV. Discrete data is a matrix of
small integer codes with the class as the last column; it is stored
column-major so that any row range of a single column is contiguous.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Sequence, Tuple, Union

import numpy as np

from tools.errors import DataError, DimensionError, EmptyClassError, InvalidClassError

logger = logging.getLogger(__name__)

ColumnKind = Literal["numeric", "categorical"]


@dataclass(frozen=True, eq=False)
class RawColumn:
    """
    One CSV column. Numeric columns hold float64 with NaN for missing values,
    categorical columns hold an object array of strings with None for missing.
    """

    name: str
    kind: ColumnKind
    values: np.ndarray

    def missing_mask(self) -> np.ndarray:
        if self.kind == "numeric":
            return np.isnan(self.values)
        return np.array([v is None for v in self.values], dtype=bool)


@dataclass(frozen=True, eq=False)
class RawDataset:
    columns: List[RawColumn]
    class_index: int
    n_rows: int

    def __post_init__(self):
        if not self.columns:
            raise DataError("dataset has no columns")
        for col in self.columns:
            if len(col.values) != self.n_rows:
                raise DataError(
                    f"column {col.name!r} has {len(col.values)} entries, expected {self.n_rows}"
                )
        if not 0 <= self.class_index < len(self.columns):
            raise DimensionError(f"class index {self.class_index} out of range")
        cls = self.class_column
        if cls.kind != "categorical":
            raise InvalidClassError(f"class column {cls.name!r} must be categorical")
        labels = set(cls.values[~cls.missing_mask()])
        if not labels:
            raise EmptyClassError(f"class column {cls.name!r} is entirely missing")
        if len(labels) < 2:
            raise InvalidClassError(
                f"class column {cls.name!r} needs at least 2 distinct labels, found {sorted(labels)}"
            )

    @property
    def class_column(self) -> RawColumn:
        return self.columns[self.class_index]

    @property
    def feature_columns(self) -> List[RawColumn]:
        return [c for i, c in enumerate(self.columns) if i != self.class_index]


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    """n x (m+1) category codes; column m is the class."""

    codes: np.ndarray
    arities: Tuple[int, ...]
    feature_names: Tuple[str, ...]
    class_name: str = "class"

    def __post_init__(self):
        codes = np.asfortranarray(self.codes, dtype=np.int32)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "arities", tuple(int(a) for a in self.arities))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if codes.ndim != 2:
            raise DataError("codes must be a 2-d matrix")
        n, width = codes.shape
        if n < 1 or width < 2:
            raise DataError(f"need at least one row and one feature, got shape {codes.shape}")
        if len(self.arities) != width:
            raise DataError(f"expected {width} arities, got {len(self.arities)}")
        if len(self.feature_names) != width - 1:
            raise DataError(f"expected {width - 1} feature names, got {len(self.feature_names)}")
        if min(self.arities) < 1:
            raise DataError("every column needs arity >= 1")
        if self.arities[-1] < 2:
            raise InvalidClassError("class arity must be at least 2")
        if codes.min() < 0 or np.any(codes.max(axis=0) >= np.asarray(self.arities)):
            raise DataError("a code falls outside [0, arity) for its column")

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def m(self) -> int:
        return self.codes.shape[1] - 1

    @property
    def class_index(self) -> int:
        return self.m

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.m:
            raise DimensionError(f"column index {j} out of range [0, {self.m}]")
        return self.codes[:, j]

    def name_of(self, j: int) -> str:
        return self.class_name if j == self.m else self.feature_names[j]


@dataclass(frozen=True, eq=False)
class RowPartition:
    """A contiguous block of rows, held as a read-only view of the dataset codes."""

    partition_id: int
    start: int
    stop: int
    codes: np.ndarray = field(repr=False)
    arities: Tuple[int, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True, eq=False)
class ColumnPartition:
    """A group of full feature columns plus a replica of the class column."""

    partition_id: int
    feature_columns: Dict[int, np.ndarray] = field(repr=False)
    class_column: np.ndarray = field(repr=False)

    @property
    def features(self) -> Tuple[int, ...]:
        return tuple(self.feature_columns)


def partition_rows(ds: DiscreteDataset, p: int) -> List[RowPartition]:
    """Split rows into p contiguous blocks whose sizes differ by at most one."""
    if not 1 <= p <= ds.n:
        raise DimensionError(f"row partition count {p} outside [1, {ds.n}]")
    base, extra = divmod(ds.n, p)
    parts, start = [], 0
    for pid in range(p):
        stop = start + base + (1 if pid < extra else 0)
        parts.append(RowPartition(pid, start, stop, ds.codes[start:stop], ds.arities))
        start = stop
    return parts


def columnar_transform(
    ds: DiscreteDataset, q: int, assignment: str = "contiguous"
) -> List[ColumnPartition]:
    """
    Transpose the dataset into q feature groups. Each group owns copies of its
    feature columns and a replica of the class column, so it can build any
    table against a broadcast column without touching other groups.
    """
    if not 1 <= q <= ds.m:
        raise DimensionError(f"column partition count {q} outside [1, {ds.m}]")
    if assignment == "round_robin":
        groups = [list(range(pid, ds.m, q)) for pid in range(q)]
    elif assignment == "contiguous":
        base, extra = divmod(ds.m, q)
        groups, start = [], 0
        for pid in range(q):
            stop = start + base + (1 if pid < extra else 0)
            groups.append(list(range(start, stop)))
            start = stop
    else:
        raise ValueError(f"unknown column assignment {assignment!r}")

    class_col = ds.codes[:, ds.m]
    parts = []
    for pid, feats in enumerate(groups):
        cols = {}
        for j in feats:
            col = np.ascontiguousarray(ds.codes[:, j]).copy()
            col.setflags(write=False)
            cols[j] = col
        replica = np.ascontiguousarray(class_col).copy()
        replica.setflags(write=False)
        parts.append(ColumnPartition(pid, cols, replica))
    logger.debug("columnar transform: %d features into %d partitions (%s)", ds.m, q, assignment)
    return parts


def generate_synthetic(
    n: int,
    m: int,
    arity: Union[int, Sequence[int]] = 3,
    class_arity: int = 2,
    relevant: int = 1,
    redundant: int = 0,
    seed: int = 0,
    noise: float = 0.2,
) -> DiscreteDataset:
    """
    Deterministic test data. Features [0, relevant) follow the class (each row
    is replaced by uniform noise with probability `noise`), features
    [relevant, relevant+redundant) are exact copies of relevant features taken
    in turn, the rest are uniform noise.
    """
    arities = [int(arity)] * m if np.isscalar(arity) else [int(a) for a in arity]
    if n < 1 or m < 1:
        raise DataError("need n >= 1 and m >= 1")
    if len(arities) != m or min(arities) < 1:
        raise DataError("arity must be a positive int or one positive int per feature")
    if class_arity < 2:
        raise DataError("class_arity must be at least 2")
    if relevant < 0 or redundant < 0 or relevant + redundant > m:
        raise DataError("relevant + redundant must not exceed m")
    if redundant and not relevant:
        raise DataError("redundant features need at least one relevant feature to copy")
    if not 0.0 <= noise <= 1.0:
        raise DataError("noise must be a probability")

    rng = np.random.default_rng(seed)
    y = rng.integers(0, class_arity, size=n)
    codes = np.empty((n, m + 1), dtype=np.int32, order="F")
    for j in range(m):
        a = arities[j]
        if j < relevant:
            flip = rng.random(n) < noise
            codes[:, j] = np.where(flip, rng.integers(0, a, size=n), y % a)
        elif j < relevant + redundant:
            src = (j - relevant) % relevant
            arities[j] = arities[src]
            codes[:, j] = codes[:, src]
        else:
            codes[:, j] = rng.integers(0, a, size=n)
    codes[:, m] = y
    names = [f"f{j}" for j in range(m)]
    return DiscreteDataset(codes, tuple(arities) + (class_arity,), tuple(names))


def scale_rows(ds: DiscreteDataset, fraction: float) -> DiscreteDataset:
    """Keep the first fraction of rows, or replicate rows cyclically when fraction > 1."""
    if fraction <= 0:
        raise DataError("fraction must be positive")
    target = max(1, math.ceil(fraction * ds.n))
    idx = np.arange(target) % ds.n
    return DiscreteDataset(ds.codes[idx], ds.arities, ds.feature_names, ds.class_name)


def scale_features(ds: DiscreteDataset, fraction: float) -> DiscreteDataset:
    """Keep the first fraction of features, or replicate feature columns when fraction > 1."""
    if fraction <= 0:
        raise DataError("fraction must be positive")
    target = max(1, math.ceil(fraction * ds.m))
    src = [j % ds.m for j in range(target)]
    names = [
        ds.feature_names[s] if j < ds.m else f"{ds.feature_names[s]}#{j // ds.m}"
        for j, s in enumerate(src)
    ]
    cols = src + [ds.m]
    return DiscreteDataset(
        ds.codes[:, cols],
        tuple(ds.arities[c] for c in cols),
        tuple(names),
        ds.class_name,
    )


def digest(ds: DiscreteDataset) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(ds.arities, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(ds.codes).tobytes())
    return h.hexdigest()

