import json

import pytest

from selection_graph import build_graph, run_selection
from tools.config import EngineConfig, SearchConfig
from tools.dataset import generate_synthetic
from tools.errors import ConfigError, MissingClassColumnError


@pytest.fixture
def dataset():
    return generate_synthetic(200, 6, relevant=2, redundant=1, seed=3, noise=0.1)


def test_graph_compiles():
    assert build_graph() is not None


def test_run_selection_on_a_dataset(dataset):
    state = run_selection(dataset=dataset, engine=EngineConfig(layout="vertical", workers=2))
    report = state["report"]
    assert report.indices == list(state["final"].features)
    assert report.selected == [dataset.name_of(f) for f in report.indices]
    assert report.search_merit == state["search_result"].merit
    assert report.pairs_computed == state["provider"].stats.pairs_computed > 0
    assert report.timings_ms == {}
    assert report.execution is None


def test_report_keys_are_stable(dataset):
    report = json.loads(run_selection(dataset=dataset, engine=EngineConfig(layout="sequential")).get("report").to_json())
    assert list(report) == ["selected", "indices", "merit", "search_merit", "pairs_computed", "timings_ms", "config"]
    assert report["config"] == {
        "engine": "sequential",
        "max_fails": 5,
        "queue_capacity": 5,
        "locally_predictive": True,
        "discrete": False,
    }


def test_skipping_the_locally_predictive_pass(dataset):
    state = run_selection(
        dataset=dataset,
        engine=EngineConfig(layout="horizontal", workers=2),
        search=SearchConfig(locally_predictive=False),
        with_timings=True,
    )
    assert "post_process" not in state["timings"]
    assert state.get("final") is None
    report = state["report"]
    assert report.merit == report.search_merit
    assert report.execution == {"workers": 2, "partitions": 2, "backend": "threads"}
    assert set(report.timings_ms) == {"discretize", "search"}


def test_reports_are_identical_across_engines(dataset):
    outputs = set()
    for cfg in (EngineConfig(layout="sequential"), EngineConfig(layout="horizontal", workers=3),
                EngineConfig(layout="vertical", workers=2, partitions=3)):
        report = json.loads(run_selection(dataset=dataset, engine=cfg)["report"].to_json())
        report.pop("config")
        outputs.add(json.dumps(report, sort_keys=True))
    assert len(outputs) == 1


def test_run_selection_from_csv(write_csv, tmp_path):
    path = write_csv("a,b,label\n1,x,P\n2,y,P\n3,x,Q\n4,y,Q\n5,x,Q\n6,y,P\n")
    state = run_selection(path, "label", engine=EngineConfig(layout="sequential"), trace_path=tmp_path / "t.tsv")
    assert state["cut_model"] is not None
    assert state["report"].selected
    assert (tmp_path / "t.tsv").read_text().startswith("iteration\t")


def test_errors_propagate(write_csv, dataset):
    path = write_csv("a,label\n1,P\n2,Q\n")
    with pytest.raises(MissingClassColumnError):
        run_selection(path, "nope", engine=EngineConfig(layout="sequential"))
    with pytest.raises(ConfigError):
        run_selection(dataset=dataset, engine=EngineConfig(layout="vertical", partitions=dataset.m + 1))
