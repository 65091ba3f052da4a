# In parallel-cfs/stages/report_stage.py

import logging

from tools.reports import RunReport
from tools.search import write_trace

logger = logging.getLogger(__name__)


def run(state):
    """
    Assembles the run report and writes the optional trace and cache dump.
    Wall times only appear when `with_timings` is set, so two runs on the same
    input print identical reports.
    """
    ds = state["dataset"]
    best = state["search_result"]
    final = state.get("final") or best
    engine = state["provider"].cfg
    search_cfg = state["search"]

    config = {
        "engine": engine.layout,
        "max_fails": search_cfg.max_fails,
        "queue_capacity": search_cfg.queue_capacity,
        "locally_predictive": search_cfg.locally_predictive,
        "discrete": bool(state.get("discrete")),
    }
    execution = None
    timings = {}
    if state.get("with_timings"):
        timings = {k: round(v, 3) for k, v in state.get("timings", {}).items()}
        execution = {
            "workers": engine.workers,
            "partitions": engine.partitions,
            "backend": engine.backend,
        }

    state["report"] = RunReport(
        selected=[ds.name_of(f) for f in final.features],
        indices=list(final.features),
        merit=final.merit,
        search_merit=best.merit,
        pairs_computed=state["provider"].stats.pairs_computed,
        timings_ms=timings,
        config=config,
        execution=execution,
    )

    if state.get("trace_path"):
        write_trace(state.get("trace", []), state["trace_path"])
        logger.info("trace written to %s", state["trace_path"])
    if state.get("cache_dump"):
        state["cache"].to_csv(state["cache_dump"])
        logger.info("correlation cache written to %s", state["cache_dump"])
    return state
