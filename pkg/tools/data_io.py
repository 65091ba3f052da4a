# In parallel-cfs/tools/data_io.py

import csv
import json
import logging
import threading
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from tools.dataset import DiscreteDataset, RawColumn, RawDataset
from tools.discretize import CutPointModel
from tools.errors import (
    DataError,
    InvalidClassError,
    MissingClassColumnError,
    RaggedRowError,
    UnreadableFileError,
)

logger = logging.getLogger(__name__)

MISSING_TOKENS = ("", "?")
ClassRef = Union[str, int]

_lock = threading.Lock()


def _read_rows(path, header: bool) -> Tuple[List[str], List[List[str]]]:
    path = Path(path)
    rows, expected = [], None
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            for record in reader:
                if not record:
                    continue  # blank line
                if expected is None:
                    expected = len(record)
                elif len(record) != expected:
                    raise RaggedRowError(path, reader.line_num, expected, len(record))
                rows.append(record)
    except (OSError, UnicodeDecodeError, csv.Error) as e:
        raise UnreadableFileError(f"cannot read {path}: {e}") from e

    if not rows:
        raise DataError(f"{path}: file is empty")
    if header:
        names, rows = [t.strip() for t in rows[0]], rows[1:]
    else:
        names = [f"c{j}" for j in range(expected)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    return names, rows


def _resolve_class(names: List[str], class_column: ClassRef) -> int:
    width = len(names)
    if isinstance(class_column, str):
        token = class_column.strip()
        if token in names:
            return names.index(token)
        if token.lstrip("-").isdigit():
            class_column = int(token)
        else:
            raise MissingClassColumnError(
                f"class column {token!r} not found; columns are: {', '.join(names)}"
            )
    idx = int(class_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise MissingClassColumnError(f"class column index {class_column} out of range for {width} columns")
    return idx


def _sniff_column(name: str, tokens: pd.Series, force_categorical: bool) -> RawColumn:
    tokens = tokens.str.strip()
    missing = tokens.isin(MISSING_TOKENS)
    if not force_categorical:
        parsed = pd.to_numeric(tokens.where(~missing), errors="coerce")
        present = parsed[~missing]
        if present.notna().all() and np.isfinite(present.to_numpy(dtype=float)).all():
            return RawColumn(name, "numeric", parsed.to_numpy(dtype=float))
    values = tokens.where(~missing, None).to_numpy(dtype=object)
    return RawColumn(name, "categorical", values)


def load_csv(path, class_column: ClassRef, header: bool = True) -> RawDataset:
    """
    Read a CSV into typed columns. A feature column is numeric when every
    non-missing token parses as a finite number; the class column is always
    categorical. Empty and '?' tokens are missing.
    """
    names, rows = _read_rows(path, header)
    class_index = _resolve_class(names, class_column)
    frame = pd.DataFrame(rows, dtype=object)
    columns = [
        _sniff_column(names[j], frame[j].astype(str), force_categorical=(j == class_index))
        for j in range(len(names))
    ]
    raw = RawDataset(columns, class_index, len(rows))
    logger.info(
        "loaded %s: %d rows, %d numeric and %d categorical features",
        path, raw.n_rows,
        sum(c.kind == "numeric" for c in raw.feature_columns),
        sum(c.kind == "categorical" for c in raw.feature_columns),
    )
    return raw


def load_discrete_csv(path, class_column: ClassRef, header: bool = True) -> DiscreteDataset:
    """
    Read a CSV that already holds non-negative integer codes and use them as is.
    The arity of each column is its largest code plus one, or the arity recorded
    in a `.meta.json` sidecar next to the file when one exists.
    """
    names, rows = _read_rows(path, header)
    class_index = _resolve_class(names, class_column)
    frame = pd.DataFrame(rows, dtype=object).apply(lambda s: s.str.strip())
    parsed = frame.apply(pd.to_numeric, errors="coerce")
    if parsed.isna().any().any():
        row, col = np.argwhere(parsed.isna().to_numpy())[0]
        raise DataError(f"{path}: non-integer code {frame.iat[row, col]!r} in column {names[col]!r}")
    codes = parsed.to_numpy(dtype=float)
    if (codes < 0).any() or (codes != np.floor(codes)).any():
        raise DataError(f"{path}: codes must be non-negative integers")
    codes = codes.astype(np.int64)

    order = [j for j in range(len(names)) if j != class_index] + [class_index]
    codes = codes[:, order]
    arities = tuple(int(a) + 1 for a in codes.max(axis=0))
    arities = _sidecar_arities(path, [names[j] for j in order], arities)
    if len(np.unique(codes[:, -1])) < 2:
        raise InvalidClassError(f"class column {names[class_index]!r} needs at least 2 distinct codes")
    return DiscreteDataset(codes, arities, tuple(names[j] for j in order[:-1]), names[class_index])


def _sidecar_arities(path, names: List[str], observed: Tuple[int, ...]) -> Tuple[int, ...]:
    meta = read_sidecar(path)
    if meta is None:
        return observed
    recorded = {c["name"]: int(c["arity"]) for c in meta.get("columns", [])}
    arities = []
    for name, seen in zip(names, observed):
        arity = recorded.get(name, seen)
        if seen > arity:
            raise DataError(f"{path}: column {name!r} has codes beyond the sidecar arity {arity}")
        arities.append(arity)
    logger.debug("arities for %s taken from %s", path, sidecar_path(path))
    return tuple(arities)


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_dataset_csv(ds: DiscreteDataset, path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(np.asarray(ds.codes), columns=list(ds.feature_names) + [ds.class_name])
    with _lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    return path


def write_discretized(ds: DiscreteDataset, model: CutPointModel, path) -> Tuple[Path, Path]:
    """Write the coded CSV and its sidecar JSON (cut points, code maps, arities)."""
    csv_path = write_dataset_csv(ds, path)
    meta = {
        "class": ds.class_name,
        "n_rows": ds.n,
        "columns": [c.to_dict() for c in model.columns],
    }
    meta_path = sidecar_path(csv_path)
    with _lock:
        meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %s and %s", csv_path, meta_path)
    return csv_path, meta_path


def read_sidecar(path) -> Optional[dict]:
    p = sidecar_path(path)
    if not p.exists():
        return None
    return json.loads(p.read_text(encoding="utf-8"))
