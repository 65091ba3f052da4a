import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from tools.correlation import (
    ContingencyTable,
    CorrelationCache,
    FeaturePair,
    cache_get_missing,
    conditional_entropy,
    contingency_table,
    entropy,
    local_ctables,
    merge_tables,
    symmetrical_uncertainty,
)
from tools.dataset import generate_synthetic, partition_rows
from tools.errors import DataError, DimensionError, InvariantError

from tests import brute_force


def _table(rows):
    return ContingencyTable(np.array(rows))


def _random_tables(count, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        shape = tuple(rng.integers(1, 6, size=2))
        counts = rng.integers(0, 20, size=shape) * (rng.random(shape) < 0.7)
        if counts.sum() == 0:
            counts[0, 0] = 1
        yield ContingencyTable(counts)


def test_pair_canonical_form():
    assert FeaturePair.of(3, 1) == FeaturePair(1, 3)
    with pytest.raises(DimensionError):
        FeaturePair.of(2, 2)


def test_local_ctables_counts_rows(small_table_dataset):
    (part,) = partition_rows(small_table_dataset, 1)
    tables = local_ctables([FeaturePair(0, 1)], part)
    assert tables[FeaturePair(0, 1)] == _table([[1, 1], [0, 2]])


def test_local_ctables_empty_inputs(small_table_dataset):
    (part,) = partition_rows(small_table_dataset, 1)
    assert local_ctables([], part) == {}
    empty = part.__class__(9, 0, 0, part.codes[:0], part.arities)
    table = local_ctables([FeaturePair(0, 1)], empty)[FeaturePair(0, 1)]
    assert table.total == 0 and table.shape == (2, 2)


def test_local_ctables_rejects_bad_index(small_table_dataset):
    (part,) = partition_rows(small_table_dataset, 1)
    with pytest.raises(DimensionError):
        local_ctables([FeaturePair(0, 5)], part)


class _CountingCodes(np.ndarray):
    reads = 0

    def __getitem__(self, key):
        type(self).reads += 1
        return np.asarray(super().__getitem__(key))


def test_local_ctables_reads_the_partition_once():
    ds = generate_synthetic(50, 5, arity=[2, 3, 4, 2, 3], seed=6)
    (part,) = partition_rows(ds, 1)
    pairs = [FeaturePair(0, 5), FeaturePair(1, 5), FeaturePair(0, 3), FeaturePair(2, 4)]
    _CountingCodes.reads = 0
    counted = replace(part, codes=np.asarray(part.codes).view(_CountingCodes))
    tables = local_ctables(pairs, counted)
    assert _CountingCodes.reads == 1
    assert tables == local_ctables(pairs, part)
    for p in pairs:
        assert tables[p] == contingency_table(ds.column(p.lo), ds.column(p.hi), ds.arities[p.lo], ds.arities[p.hi])


def test_merge_tables():
    assert merge_tables(_table([[1, 1], [0, 2]]), _table([[0, 0], [0, 0]])) == _table([[1, 1], [0, 2]])
    assert merge_tables(_table([[1, 0], [0, 1]]), _table([[0, 1], [1, 0]])) == _table([[1, 1], [1, 1]])
    with pytest.raises(DimensionError):
        merge_tables(_table([[1, 0]]), _table([[1], [0]]))


def test_merge_is_commutative_and_associative():
    tables = list(_random_tables(60, seed=3))
    by_shape = {}
    for t in tables:
        by_shape.setdefault(t.shape, []).append(t)
    for group in by_shape.values():
        if len(group) < 3:
            continue
        a, b, c = group[:3]
        assert merge_tables(a, b) == merge_tables(b, a)
        assert merge_tables(merge_tables(a, b), c) == merge_tables(a, merge_tables(b, c))
        assert merge_tables(a, b).total == a.total + b.total


@pytest.mark.parametrize(
    "marginal, expected",
    [([2, 2], 1.0), ([4, 0], 0.0), ([1, 1, 1, 1], 2.0)],
)
def test_entropy(marginal, expected):
    assert entropy(marginal, sum(marginal)) == pytest.approx(expected, abs=1e-12)


def test_entropy_of_nothing_is_zero():
    assert entropy([0, 0], 0) == 0.0


def test_conditional_entropy():
    assert conditional_entropy(_table([[2, 0], [0, 2]])) == pytest.approx(0.0, abs=1e-12)
    assert conditional_entropy(_table([[1, 1], [1, 1]])) == pytest.approx(1.0)
    assert conditional_entropy(_table([[1, 1], [0, 2]])) == pytest.approx(0.6887, abs=1e-4)
    with pytest.raises(ValueError):
        conditional_entropy(_table([[1]]), given="z")


def test_symmetrical_uncertainty_examples():
    assert symmetrical_uncertainty(_table([[2, 0], [0, 2]])) == pytest.approx(1.0)
    assert symmetrical_uncertainty(_table([[1, 1], [1, 1]])) == pytest.approx(0.0, abs=1e-12)
    assert symmetrical_uncertainty(_table([[1, 1], [0, 2]])) == pytest.approx(0.3437, abs=1e-4)


def test_symmetrical_uncertainty_matches_cell_by_cell_sum():
    assert brute_force.su([[1, 1], [0, 2]]) == pytest.approx(0.3437, abs=1e-4)
    assert symmetrical_uncertainty(_table([[1, 1], [0, 2]])) == pytest.approx(brute_force.su([[1, 1], [0, 2]]), abs=1e-12)
    for table in _random_tables(300, seed=23):
        rows = table.counts.tolist()
        assert symmetrical_uncertainty(table) == pytest.approx(brute_force.su(rows), abs=1e-10)


def test_symmetrical_uncertainty_of_constants_is_zero():
    assert symmetrical_uncertainty(_table([[5]])) == 0.0
    assert symmetrical_uncertainty(_table([[0, 0], [0, 7]])) == 0.0


def test_symmetrical_uncertainty_of_empty_table():
    with pytest.raises(DataError):
        symmetrical_uncertainty(_table([[0, 0], [0, 0]]))


def test_information_theory_properties():
    for table in _random_tables(1000, seed=17):
        su = symmetrical_uncertainty(table)
        assert 0.0 <= su <= 1.0
        assert su == pytest.approx(symmetrical_uncertainty(table.transpose()), abs=1e-12)

        total = table.total
        hx = entropy(table.row_marginal, total)
        hy = entropy(table.col_marginal, total)
        mi_x = hx - conditional_entropy(table, "y")
        mi_y = hy - conditional_entropy(table, "x")
        assert mi_x == pytest.approx(mi_y, abs=1e-9)
        assert 0.0 <= hx <= math.log2(table.shape[0]) + 1e-12
        assert 0.0 <= hy <= math.log2(table.shape[1]) + 1e-12


def test_partitioned_tables_equal_single_pass():
    ds = generate_synthetic(97, 4, arity=[2, 3, 4, 5], class_arity=3, relevant=2, seed=8)
    pairs = [FeaturePair(a, b) for a in range(5) for b in range(a + 1, 5)]
    whole = {p: contingency_table(ds.column(p.lo), ds.column(p.hi), ds.arities[p.lo], ds.arities[p.hi]) for p in pairs}
    for p_count in (1, 2, 3, 7, 97):
        merged = {}
        for part in partition_rows(ds, p_count):
            for pair, t in local_ctables(pairs, part).items():
                merged[pair] = merge_tables(merged[pair], t) if pair in merged else t
        assert all(merged[p] == whole[p] for p in pairs)
        assert all(merged[p].total == ds.n for p in pairs)


def test_contingency_table_is_immutable():
    table = contingency_table(np.array([0, 1]), np.array([1, 1]), 2, 2)
    with pytest.raises(ValueError):
        table.counts[0, 0] = 3
    with pytest.raises(DimensionError):
        contingency_table(np.array([0, 2]), np.array([1, 1]), 2, 2)


def test_cache_get_missing():
    cache = CorrelationCache()
    cache.put_batch({(0, 2): 0.5})
    assert cache_get_missing(cache, [(0, 2), (1, 2)]) == [FeaturePair(1, 2)]
    assert cache_get_missing(cache, [(2, 0)]) == []
    assert cache_get_missing(CorrelationCache(), [(1, 2), (2, 1)]) == [FeaturePair(1, 2)]


def test_cache_is_symmetric_and_write_once(tmp_path):
    cache = CorrelationCache()
    cache.put_batch({(3, 1): 0.25, (0, 1): 0.5})
    assert cache.get(1, 3) == cache.get(3, 1) == cache[(1, 3)] == 0.25
    assert (3, 1) in cache and len(cache) == cache.computed == 2
    cache.put_batch({(1, 3): 0.25})
    with pytest.raises(InvariantError):
        cache.put_batch({(1, 3): 0.3})
    assert cache.get(1, 3) == 0.25

    dump = pd.read_csv(cache.to_csv(tmp_path / "cache.csv"))
    assert list(dump.columns) == ["lo", "hi", "su"]
    assert dump[["lo", "hi"]].values.tolist() == [[0, 1], [1, 3]]


def test_failed_batch_leaves_cache_untouched():
    cache = CorrelationCache()
    cache.put_batch({(0, 1): 0.1})
    with pytest.raises(InvariantError):
        cache.put_batch({(0, 2): 0.2, (0, 1): 0.9})
    assert (0, 2) not in cache
