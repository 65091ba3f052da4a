# parallel-cfs/tools/bench.py
"""
Scaling harness: time full selections for every engine, worker count and
dataset size, and report speedup as baseline time over time.
"""

import logging
import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from tools.config import EngineConfig, SearchConfig
from tools.dataset import DiscreteDataset, digest, scale_features, scale_rows
from tools.engines import make_provider
from tools.reports import BenchReport, BenchRow
from tools.search import cfs_select

logger = logging.getLogger(__name__)


def time_selection(ds: DiscreteDataset, cfg: EngineConfig, search_cfg: SearchConfig) -> float:
    """Wall time in ms of one selection, layout preparation included."""
    start = time.perf_counter()
    provider = make_provider(ds, cfg)
    cfs_select(provider, ds.m, ds.class_index, search_cfg)
    return (time.perf_counter() - start) * 1000.0


def run_bench(
    ds: DiscreteDataset,
    engines: Sequence[str],
    workers: Sequence[int],
    fractions: Sequence[float] = (1.0,),
    repeat: int = 3,
    baseline_workers: int = 1,
    partitions: Optional[int] = None,
    scale_by_features: bool = False,
    backend: str = "threads",
    search_cfg: Optional[SearchConfig] = None,
) -> BenchReport:
    """
    Combinations run one after another. The baseline worker count is timed
    even when it is not listed, but only listed counts are reported.
    """
    search_cfg = search_cfg or SearchConfig()
    report = BenchReport(digest=digest(ds))
    counts = list(dict.fromkeys(list(workers) + [baseline_workers]))
    for fraction in fractions:
        scaled = scale_features(ds, fraction) if scale_by_features else scale_rows(ds, fraction)
        logger.info("fraction %.2f: %d rows x %d features", fraction, scaled.n, scaled.m)
        for engine in engines:
            medians: Dict[int, float] = {}
            resolved: Dict[int, int] = {}
            for w in counts:
                cfg = EngineConfig(layout=engine, partitions=partitions, workers=w, backend=backend)
                cfg = cfg.resolve(scaled.m, scaled.n)
                times: List[float] = [time_selection(scaled, cfg, search_cfg) for _ in range(repeat)]
                medians[w] = float(np.median(times))
                resolved[w] = cfg.partitions
                logger.info("%s workers=%d partitions=%d: median %.1f ms", engine, w, cfg.partitions, medians[w])
            base = medians[baseline_workers]
            for w in workers:
                report.rows.append(
                    BenchRow(
                        engine=engine,
                        workers=w,
                        partitions=resolved[w],
                        fraction=fraction,
                        median_ms=medians[w],
                        speedup=base / medians[w] if medians[w] > 0 else 1.0,
                    )
                )
    return report
