# In parallel-cfs/stages/post_process_stage.py

import logging

from tools.search import add_locally_predictive
from tools.utils import phase_timer

logger = logging.getLogger(__name__)


def run(state):
    ds = state["dataset"]
    timings = state.setdefault("timings", {})
    with phase_timer(timings, "post_process", logger):
        state["final"] = add_locally_predictive(
            state["search_result"], state["provider"], ds.m, ds.class_index, state["cache"]
        )
    return state
