# In parallel-cfs/stages/discretize_stage.py

import logging

from tools.discretize import discretize_mdl
from tools.utils import phase_timer

logger = logging.getLogger(__name__)


def run(state):
    timings = state.setdefault("timings", {})
    if state.get("dataset") is not None:
        # already integer coded
        timings.setdefault("discretize", 0.0)
        return state

    engine = state["engine"]
    with phase_timer(timings, "discretize", logger):
        ds, model = discretize_mdl(state["raw"], n_jobs=engine.workers)
    state["dataset"] = ds
    state["cut_model"] = model
    return state
