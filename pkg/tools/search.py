# parallel-cfs/tools/search.py
"""
Best-first subset search driven by the CFS merit, with correlations fetched
from a provider only when a subset first needs them.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Set, Tuple

from tools.config import SearchConfig
from tools.correlation import CorrelationCache, FeaturePair, cache_get_missing
from tools.errors import InvariantError
from tools.utils import format_subset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureSubset:
    """Feature indices in insertion order, with the merit once evaluated."""

    features: Tuple[int, ...] = ()
    merit: Optional[float] = None
    last_added: Optional[int] = None

    def __contains__(self, f) -> bool:
        return f in self.features

    def __len__(self) -> int:
        return len(self.features)

    @property
    def key(self) -> frozenset:
        return frozenset(self.features)

    def with_feature(self, f: int) -> "FeatureSubset":
        return FeatureSubset(self.features + (f,), None, f)

    def with_merit(self, merit: float) -> "FeatureSubset":
        return FeatureSubset(self.features, merit, self.last_added)


EMPTY_SUBSET = FeatureSubset((), 0.0, None)


def priority(subset: FeatureSubset) -> tuple:
    """Total order: merit descending, then size, then sorted indices, then insertion order."""
    return (-subset.merit, len(subset.features), tuple(sorted(subset.features)), subset.features)


class BoundedQueue:
    """Priority queue that keeps at most `capacity` subsets, dropping the lowest priority."""

    def __init__(self, capacity: int = 5):
        self.capacity = capacity
        self._items: List[FeatureSubset] = []

    def __len__(self) -> int:
        return len(self._items)

    def is_empty(self) -> bool:
        return not self._items

    def add(self, subset: FeatureSubset) -> Optional[FeatureSubset]:
        bisect.insort(self._items, subset, key=priority)
        if len(self._items) > self.capacity:
            return self._items.pop()
        return None

    def add_all(self, subsets: Iterable[FeatureSubset]) -> None:
        for s in subsets:
            self.add(s)

    def head(self) -> FeatureSubset:
        return self._items[0]

    def dequeue(self) -> FeatureSubset:
        return self._items.pop(0)

    def items(self) -> List[FeatureSubset]:
        return list(self._items)


@dataclass
class SearchState:
    queue: BoundedQueue
    best: FeatureSubset
    cache: CorrelationCache
    n_fails: int = 0
    visited: Set[frozenset] = field(default_factory=set)


class TraceRow(NamedTuple):
    iteration: int
    dequeued: Tuple[int, ...]
    nc: int
    best_merit: float
    n_fails: int


def _su(cache: CorrelationCache, a: int, b: int) -> float:
    value = cache.get(a, b)
    if value is None:
        raise InvariantError(f"correlation ({a}, {b}) used before it was requested")
    return value


def merit(subset: FeatureSubset, cache: CorrelationCache, class_index: int) -> float:
    """k * mean(r_cf) / sqrt(k + k(k-1) * mean(r_ff)); 0 for the empty subset."""
    feats = sorted(subset.features)
    k = len(feats)
    if k == 0:
        return 0.0
    r_cf = math.fsum(_su(cache, f, class_index) for f in feats) / k
    r_ff = 0.0
    if k > 1:
        ff = [_su(cache, a, b) for i, a in enumerate(feats) for b in feats[i + 1:]]
        r_ff = math.fsum(ff) / len(ff)
    return k * r_cf / math.sqrt(k + k * (k - 1) * r_ff)


def expand(subset: FeatureSubset, m: int) -> List[FeatureSubset]:
    return [subset.with_feature(f) for f in range(m) if f not in subset]


def required_pairs(
    children: Iterable[FeatureSubset], cache: CorrelationCache, class_index: int
) -> List[FeaturePair]:
    """
    Missing correlations for a batch of siblings: each new feature against the
    class and against every member of the common parent.
    """
    wanted = []
    for child in children:
        f = child.last_added
        wanted.append((f, class_index))
        wanted.extend((f, s) for s in child.features if s != f)
    return cache_get_missing(cache, wanted)


def best_first_search(
    provider,
    m: int,
    class_index: int,
    max_fails: int = 5,
    queue_capacity: int = 5,
    cache: Optional[CorrelationCache] = None,
    trace: Optional[List[TraceRow]] = None,
) -> FeatureSubset:
    """
    Expand the head of the queue, fetch the correlations its children need in
    one provider call, queue the evaluated children and compare the new head
    with the best subset so far. Stops after `max_fails` consecutive rounds
    without a strictly better merit, or when there is nothing left to expand.
    Subsets already evaluated in this run are not evaluated again.
    """
    state = SearchState(BoundedQueue(queue_capacity), EMPTY_SUBSET, cache if cache is not None else CorrelationCache())
    state.queue.add(EMPTY_SUBSET)
    state.visited.add(EMPTY_SUBSET.key)
    iteration = 0

    while state.n_fails < max_fails and not state.queue.is_empty():
        head = state.queue.dequeue()
        children = [c for c in expand(head, m) if c.key not in state.visited]
        state.visited.update(c.key for c in children)

        missing = required_pairs(children, state.cache, class_index)
        if missing:
            state.cache.put_batch(provider.compute(missing))
        state.queue.add_all(c.with_merit(merit(c, state.cache, class_index)) for c in children)
        iteration += 1

        if state.queue.is_empty():
            _record(trace, iteration, head, len(missing), state)
            break
        local_best = state.queue.head()
        if local_best.merit > state.best.merit:
            state.best = local_best
            state.n_fails = 0
        else:
            state.n_fails += 1
        _record(trace, iteration, head, len(missing), state)

    logger.info("search finished after %d iterations: %s merit %.6f",
                iteration, format_subset(state.best.features), state.best.merit)
    return state.best


def _record(trace, iteration, head, nc, state) -> None:
    logger.debug("iteration %d: expanded %s, nc=%d, best=%.6f, fails=%d",
                 iteration, format_subset(head.features), nc, state.best.merit, state.n_fails)
    if trace is not None:
        trace.append(TraceRow(iteration, head.features, nc, state.best.merit, state.n_fails))


def add_locally_predictive(
    best: FeatureSubset,
    provider,
    m: int,
    class_index: int,
    cache: Optional[CorrelationCache] = None,
) -> FeatureSubset:
    """
    Visit the unselected features by decreasing class correlation (lowest index
    first on ties) and append each one whose class correlation beats its
    correlation with every feature selected so far. A feature with zero class
    correlation is never appended.
    """
    cache = cache if cache is not None else CorrelationCache()
    candidates = [f for f in range(m) if f not in best]
    if not candidates:
        return best

    missing = cache_get_missing(cache, [(f, class_index) for f in range(m)])
    if missing:
        cache.put_batch(provider.compute(missing))

    features = list(best.features)
    last_added = best.last_added
    for f in sorted(candidates, key=lambda f: (-cache.get(f, class_index), f)):
        r_fc = cache.get(f, class_index)
        if r_fc <= 0.0:
            break
        missing = cache_get_missing(cache, [(f, s) for s in features])
        if missing:
            cache.put_batch(provider.compute(missing))
        if all(r_fc > cache.get(f, s) for s in features):
            features.append(f)
            last_added = f

    result = FeatureSubset(tuple(features), None, last_added)
    if len(features) > len(best):
        logger.info("locally predictive pass added %s", format_subset(features[len(best):]))
    return result.with_merit(merit(result, cache, class_index))


@dataclass(frozen=True)
class SelectionResult:
    search: FeatureSubset
    final: FeatureSubset
    cache: CorrelationCache
    trace: Tuple[TraceRow, ...] = ()


def cfs_select(
    provider,
    m: int,
    class_index: int,
    cfg: Optional[SearchConfig] = None,
    cache: Optional[CorrelationCache] = None,
    keep_trace: bool = False,
) -> SelectionResult:
    """Best-first search, then the optional locally predictive pass."""
    cfg = cfg or SearchConfig()
    cache = cache if cache is not None else CorrelationCache()
    trace: Optional[List[TraceRow]] = [] if keep_trace else None
    best = best_first_search(provider, m, class_index, cfg.max_fails, cfg.queue_capacity, cache, trace)
    final = add_locally_predictive(best, provider, m, class_index, cache) if cfg.locally_predictive else best
    return SelectionResult(best, final, cache, tuple(trace or ()))


TRACE_HEADER = "iteration\tdequeued\tnc\tbest_merit\tn_fails"


def format_trace(rows: Iterable[TraceRow]) -> str:
    lines = [TRACE_HEADER]
    for r in rows:
        lines.append(f"{r.iteration}\t{format_subset(r.dequeued)}\t{r.nc}\t{r.best_merit:.6f}\t{r.n_fails}")
    return "\n".join(lines) + "\n"


def write_trace(rows: Iterable[TraceRow], path) -> Path:
    path = Path(path)
    path.write_text(format_trace(rows), encoding="utf-8")
    return path
