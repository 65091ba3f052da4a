# In parallel-cfs/stages/search_stage.py

import logging

from tools.correlation import CorrelationCache
from tools.engines import make_provider
from tools.search import best_first_search
from tools.utils import phase_timer

logger = logging.getLogger(__name__)


def run(state):
    """Builds the engine for the resolved layout and runs the best-first search."""
    ds = state["dataset"]
    search_cfg = state["search"]
    timings = state.setdefault("timings", {})

    with phase_timer(timings, "search", logger):
        provider = make_provider(ds, state["engine"])
        cache = CorrelationCache()
        trace = [] if state.get("keep_trace") else None
        best = best_first_search(
            provider, ds.m, ds.class_index,
            max_fails=search_cfg.max_fails,
            queue_capacity=search_cfg.queue_capacity,
            cache=cache,
            trace=trace,
        )

    state["provider"] = provider
    state["cache"] = cache
    state["trace"] = trace or []
    state["search_result"] = best
    return state


def route_after_search(state) -> str:
    return "post_process" if state["search"].locally_predictive else "report"
