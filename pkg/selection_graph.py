# In parallel-cfs/selection_graph.py

from __future__ import annotations

from functools import lru_cache
from typing import Any, Dict, List, Optional, TypedDict, Union

from langgraph.graph import END, StateGraph

from stages.discretize_stage import run as discretize_node
from stages.load_stage import run as load_node
from stages.post_process_stage import run as post_process_node
from stages.report_stage import run as report_node
from stages.search_stage import route_after_search
from stages.search_stage import run as search_node
from tools.config import EngineConfig, SearchConfig


class SelectionState(TypedDict, total=False):
    # inputs
    input_path: str
    class_column: Union[str, int]
    header: bool
    discrete: bool
    engine: EngineConfig
    search: SearchConfig
    keep_trace: bool
    with_timings: bool
    trace_path: Optional[str]
    cache_dump: Optional[str]
    # produced by the stages
    raw: Any
    dataset: Any
    cut_model: Any
    provider: Any
    cache: Any
    trace: List[Any]
    search_result: Any
    final: Any
    timings: Dict[str, float]
    report: Any


def build_graph():
    graph = StateGraph(SelectionState)
    graph.add_node("load", load_node)
    graph.add_node("discretize", discretize_node)
    graph.add_node("search", search_node)
    graph.add_node("post_process", post_process_node)
    graph.add_node("report", report_node)

    graph.set_entry_point("load")
    graph.add_edge("load", "discretize")
    graph.add_edge("discretize", "search")
    # the locally predictive pass is optional
    graph.add_conditional_edges(
        "search", route_after_search, {"post_process": "post_process", "report": "report"}
    )
    graph.add_edge("post_process", "report")
    graph.add_edge("report", END)
    return graph.compile()


@lru_cache(maxsize=1)
def _app():
    return build_graph()


def run_selection(
    input_path=None,
    class_column: Union[str, int, None] = None,
    engine: Optional[EngineConfig] = None,
    search: Optional[SearchConfig] = None,
    header: bool = True,
    discrete: bool = False,
    dataset=None,
    keep_trace: bool = False,
    with_timings: bool = False,
    trace_path=None,
    cache_dump=None,
) -> SelectionState:
    """
    Run load -> discretize -> search -> (locally predictive) -> report and
    return the final state. Pass `dataset` to skip loading.
    """
    state: SelectionState = {
        "engine": engine or EngineConfig.from_env(),
        "search": search or SearchConfig.from_env(),
        "header": header,
        "discrete": discrete,
        "keep_trace": keep_trace or trace_path is not None,
        "with_timings": with_timings,
        "timings": {},
    }
    if dataset is not None:
        state["dataset"] = dataset
    else:
        state["input_path"] = str(input_path)
        state["class_column"] = class_column
    if trace_path is not None:
        state["trace_path"] = str(trace_path)
    if cache_dump is not None:
        state["cache_dump"] = str(cache_dump)
    return _app().invoke(state)
