# parallel-cfs/tools/discretize.py
"""
Supervised discretization by recursive entropy splitting with the MDL stopping
rule. Candidate thresholds are midpoints between adjacent distinct values that
sit on a class boundary; each accepted cut splits its interval in two and both
halves are searched again.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import entropy

from tools.dataset import DiscreteDataset, RawColumn, RawDataset
from tools.errors import DataError

logger = logging.getLogger(__name__)

# (size, entropy in bits, number of classes present)
SplitSide = Tuple[int, float, int]


@dataclass(frozen=True)
class ColumnCoding:
    """How one raw column was turned into codes."""

    name: str
    kind: str
    arity: int
    cut_points: Tuple[float, ...] = ()
    codes: Optional[Dict[str, int]] = None
    missing_code: Optional[int] = None

    @property
    def uninformative(self) -> bool:
        return self.kind == "numeric" and not self.cut_points

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "cut_points": list(self.cut_points),
            "codes": dict(self.codes or {}),
            "missing_code": self.missing_code,
            "arity": self.arity,
            "uninformative": self.uninformative,
        }


@dataclass(frozen=True)
class CutPointModel:
    """Per-column coding, features first and the class last."""

    columns: Tuple[ColumnCoding, ...]

    @property
    def cut_points(self) -> Dict[str, List[float]]:
        return {c.name: list(c.cut_points) for c in self.columns if c.kind == "numeric"}

    @property
    def uninformative(self) -> List[str]:
        return [c.name for c in self.columns if c.uninformative]


def mdl_accepts_cut(
    n: int, base_entropy: float, left: SplitSide, right: SplitSide, k: int
) -> bool:
    """True iff the information gain of the split strictly exceeds the MDL cost."""
    n1, ent1, k1 = left
    n2, ent2, k2 = right
    gain = base_entropy - (n1 / n) * ent1 - (n2 / n) * ent2
    delta = math.log2(3 ** k - 2) - (k * base_entropy - k1 * ent1 - k2 * ent2)
    threshold = (math.log2(n - 1) + delta) / n
    return gain > threshold


def _row_entropies(counts: np.ndarray) -> np.ndarray:
    return entropy(counts, base=2, axis=1)


def find_cut_points(values: Sequence[float], labels: Sequence[int]) -> List[float]:
    """
    Thresholds for one numeric column, strictly increasing. Missing values must
    already be removed. A constant column, or one where no cut pays for itself,
    yields an empty list.
    """
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    if len(values) != len(labels):
        raise DataError("values and labels differ in length")
    if len(values) < 2:
        return []

    order = np.argsort(values, kind="stable")
    distinct, group = np.unique(values[order], return_inverse=True)
    if len(distinct) < 2:
        return []
    _, y = np.unique(labels[order], return_inverse=True)
    counts = np.zeros((len(distinct), int(y.max()) + 1), dtype=np.int64)
    np.add.at(counts, (group.ravel(), y.ravel()), 1)

    cuts = []
    intervals = [(0, len(distinct))]
    while intervals:
        lo, hi = intervals.pop()
        block = counts[lo:hi]
        if len(block) < 2:
            continue
        present = block > 0
        pure = present.sum(axis=1) == 1
        same_class = np.all(present[:-1] == present[1:], axis=1)
        candidate = ~(pure[:-1] & pure[1:] & same_class)
        if not candidate.any():
            continue

        total = block.sum(axis=0)
        n = int(total.sum())
        left = np.cumsum(block, axis=0)[:-1]
        right = total - left
        n_left = left.sum(axis=1)
        n_right = n - n_left
        ent_left = _row_entropies(left)
        ent_right = _row_entropies(right)
        weighted = (n_left * ent_left + n_right * ent_right) / n
        weighted = np.where(candidate, weighted, np.inf)
        b = int(np.argmin(weighted))  # first minimum, i.e. the lowest threshold

        accepted = mdl_accepts_cut(
            n,
            float(entropy(total, base=2)),
            (int(n_left[b]), float(ent_left[b]), int(np.count_nonzero(left[b]))),
            (int(n_right[b]), float(ent_right[b]), int(np.count_nonzero(right[b]))),
            int(np.count_nonzero(total)),
        )
        if not accepted:
            continue
        split = lo + b + 1
        cuts.append((distinct[split - 1] + distinct[split]) / 2.0)
        intervals.append((split, hi))
        intervals.append((lo, split))
    return sorted(float(c) for c in cuts)


def _code_numeric(col: RawColumn, labels: np.ndarray) -> Tuple[np.ndarray, ColumnCoding]:
    missing = col.missing_mask()
    cuts = find_cut_points(col.values[~missing], labels[~missing])
    codes = np.searchsorted(np.asarray(cuts, dtype=float), col.values, side="left")
    missing_code = None
    arity = len(cuts) + 1
    if missing.any():
        missing_code = arity
        codes[missing] = missing_code
        arity += 1
    return codes, ColumnCoding(col.name, "numeric", arity, tuple(cuts), None, missing_code)


def _code_categorical(col: RawColumn) -> Tuple[np.ndarray, ColumnCoding]:
    codes, uniques = pd.factorize(pd.Series(col.values, dtype=object), sort=False)
    mapping = {str(label): i for i, label in enumerate(uniques)}
    missing_code = None
    arity = max(len(uniques), 1)
    if (codes < 0).any():
        missing_code = len(uniques)
        codes = np.where(codes < 0, missing_code, codes)
        arity = len(uniques) + 1
    return codes, ColumnCoding(col.name, "categorical", arity, (), mapping, missing_code)


def discretize_mdl(raw: RawDataset, n_jobs: int = 1) -> Tuple[DiscreteDataset, CutPointModel]:
    """
    Code every column: numeric columns by their MDL cut points, categorical
    columns by first appearance. Missing values get one extra code per column.
    The class column becomes the last column. Numeric columns are cut
    independently and may be processed by `n_jobs` workers.
    """
    class_codes, class_coding = _code_categorical(raw.class_column)
    features = raw.feature_columns

    def code(col):
        if col.kind == "numeric":
            return _code_numeric(col, class_codes)
        return _code_categorical(col)

    if n_jobs > 1:
        coded = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(code)(c) for c in features)
    else:
        coded = [code(c) for c in features]

    matrix = np.empty((raw.n_rows, len(features) + 1), dtype=np.int32, order="F")
    for j, (codes, _) in enumerate(coded):
        matrix[:, j] = codes
    matrix[:, -1] = class_codes
    codings = tuple(c for _, c in coded) + (class_coding,)

    model = CutPointModel(codings)
    if model.uninformative:
        logger.info("no cut accepted for %d numeric column(s): %s",
                    len(model.uninformative), ", ".join(model.uninformative))
    ds = DiscreteDataset(
        matrix,
        tuple(c.arity for c in codings),
        tuple(c.name for c in features),
        raw.class_column.name,
    )
    return ds, model
