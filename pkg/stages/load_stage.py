# In parallel-cfs/stages/load_stage.py

import logging

from tools.data_io import load_csv, load_discrete_csv
from tools.utils import phase_timer

logger = logging.getLogger(__name__)


def run(state):
    """
    Reads the input table. A pre-discretized file goes straight to `dataset`;
    anything else lands in `raw` for the discretize stage.
    """
    if state.get("dataset") is not None or state.get("raw") is not None:
        return state

    timings = state.setdefault("timings", {})
    path = state["input_path"]
    with phase_timer(timings, "load", logger):
        if state.get("discrete"):
            state["dataset"] = load_discrete_csv(path, state["class_column"], state.get("header", True))
        else:
            state["raw"] = load_csv(path, state["class_column"], state.get("header", True))
    return state
