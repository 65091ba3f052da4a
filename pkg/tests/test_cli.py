import json

import pandas as pd
import pytest

from cli import main


@pytest.fixture
def numeric_csv(write_csv):
    lines = ["x,noise,kind,label"]
    for i in range(40):
        label = "yes" if i % 4 < 2 else "no"
        lines.append(f"{i % 4},{(i * 7) % 5},{'ab'[i % 2]},{label}")
    return write_csv("\n".join(lines) + "\n", "numeric.csv")


@pytest.fixture
def synthetic_csv(tmp_path):
    path = tmp_path / "syn.csv"
    assert main(["generate", "--rows", "300", "--features", "6", "--relevant", "1",
                 "--noise", "0", "--seed", "5", "--output", str(path)]) == 0
    return path


def _select(capsys, *args):
    code = main(["select", *args])
    return code, capsys.readouterr()


def test_select_finds_the_class_copy(capsys, synthetic_csv):
    for engine in ("sequential", "horizontal", "vertical"):
        code, res = _select(capsys, "--input", str(synthetic_csv), "--class", "class",
                            "--discrete", "--engine", engine)
        assert code == 0
        report = json.loads(res.out)
        assert report["selected"][0] == "f0"
        assert report["indices"][0] == 0
        assert report["timings_ms"] == {}
        assert report["config"]["engine"] == engine


def test_engines_and_worker_counts_print_the_same_selection(capsys, numeric_csv):
    outputs = {}
    for engine, workers in [("horizontal", "1"), ("horizontal", "4"), ("vertical", "2")]:
        code, res = _select(capsys, "--input", str(numeric_csv), "--class", "label",
                            "--engine", engine, "--workers", workers)
        assert code == 0
        outputs[(engine, workers)] = res.out
    assert outputs[("horizontal", "1")] == outputs[("horizontal", "4")]
    selected = {json.dumps(json.loads(o)["selected"]) for o in outputs.values()}
    assert len(selected) == 1


def test_repeated_runs_print_identical_bytes(capsys, numeric_csv):
    outputs = []
    for workers in ("1", "4"):
        for _ in range(5):
            code, res = _select(capsys, "--input", str(numeric_csv), "--class", "label",
                                "--engine", "horizontal", "--workers", workers)
            assert code == 0
            outputs.append(res.out)
    assert len(set(outputs)) == 1


def test_missing_class_flag_is_a_usage_error(capsys, numeric_csv):
    with pytest.raises(SystemExit) as err:
        main(["select", "--input", str(numeric_csv)])
    assert err.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_bad_flag_value_is_a_usage_error(numeric_csv):
    with pytest.raises(SystemExit) as err:
        main(["select", "--input", str(numeric_csv), "--class", "label", "--engine", "spark"])
    assert err.value.code == 1


def test_invalid_config_exits_1(capsys, numeric_csv):
    code, _ = _select(capsys, "--input", str(numeric_csv), "--class", "label",
                      "--engine", "vertical", "--partitions", "9")
    assert code == 1
    code, _ = _select(capsys, "--input", str(numeric_csv), "--class", "label", "--workers", "0")
    assert code == 1


def test_data_errors_exit_2(capsys, tmp_path, write_csv):
    code, _ = _select(capsys, "--input", str(tmp_path / "missing.csv"), "--class", "c")
    assert code == 2
    ragged = write_csv("a,c\n1,x\n2\n", "ragged.csv")
    code, res = _select(capsys, "--input", str(ragged), "--class", "c")
    assert code == 2
    assert "line 3" in res.err


def test_text_output_trace_and_cache_dump(capsys, numeric_csv, tmp_path):
    trace = tmp_path / "trace.tsv"
    dump = tmp_path / "cache.csv"
    code, res = _select(capsys, "--input", str(numeric_csv), "--class", "label", "--output", "text",
                        "--trace", str(trace), "--cache-dump", str(dump), "--no-locally-predictive")
    assert code == 0
    assert res.out.startswith("selected (")
    assert trace.read_text().splitlines()[0] == "iteration\tdequeued\tnc\tbest_merit\tn_fails"
    assert list(pd.read_csv(dump).columns) == ["lo", "hi", "su"]


def test_timings_flag_adds_execution_block(capsys, numeric_csv):
    code, res = _select(capsys, "--input", str(numeric_csv), "--class", "label",
                        "--timings", "--workers", "2", "--engine", "horizontal")
    assert code == 0
    report = json.loads(res.out)
    assert set(report["timings_ms"]) == {"load", "discretize", "search", "post_process"}
    assert all(v >= 0 for v in report["timings_ms"].values())
    assert report["execution"] == {"workers": 2, "partitions": 2, "backend": "threads"}


def test_discretize_writes_sidecar(tmp_path, write_csv):
    src = write_csv("v,c\n1,A\n2,A\n3,B\n4,B\n", "four.csv")
    out = tmp_path / "coded.csv"
    assert main(["discretize", "--input", str(src), "--class", "c", "--output", str(out)]) == 0
    meta = json.loads((tmp_path / "coded.meta.json").read_text())
    assert meta["columns"][0]["cut_points"] == [2.5]


def test_discretize_all_categorical(tmp_path, write_csv):
    src = write_csv("a,b,c\nx,p,A\ny,q,B\nx,q,A\n", "cat.csv")
    out = tmp_path / "coded.csv"
    assert main(["discretize", "--input", str(src), "--class", "c", "--output", str(out)]) == 0
    meta = json.loads((tmp_path / "coded.meta.json").read_text())
    assert all(col["cut_points"] == [] for col in meta["columns"])


def test_discretize_round_trip_selects_the_same(capsys, numeric_csv, tmp_path):
    coded = tmp_path / "coded.csv"
    assert main(["discretize", "--input", str(numeric_csv), "--class", "label", "--output", str(coded)]) == 0
    _, original = _select(capsys, "--input", str(numeric_csv), "--class", "label", "--engine", "sequential")
    _, again = _select(capsys, "--input", str(coded), "--class", "label", "--engine", "sequential", "--discrete")
    first, second = json.loads(original.out), json.loads(again.out)
    assert first["selected"] == second["selected"]
    assert first["merit"] == pytest.approx(second["merit"])


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["generate", "--rows", "50", "--features", "4", "--relevant", "1",
                     "--redundant", "1", "--seed", "3", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "f0,f1,f2,f3,class"


def test_generate_rejects_impossible_shapes(tmp_path):
    code = main(["generate", "--rows", "5", "--features", "2", "--relevant", "3",
                 "--seed", "1", "--output", str(tmp_path / "x.csv")])
    assert code == 1


def test_bench_csv(capsys):
    code = main(["bench", "--synthetic", "200,5", "--engines", "horizontal",
                 "--workers", "1,2", "--repeat", "1", "--fractions", "1.0,2.0"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "engine,workers,partitions,fraction,median_ms,speedup"
    assert len(lines) == 1 + 4
    assert lines[1].startswith("horizontal,1,1,1.0000,")
    assert lines[1].endswith(",1.0000")


def test_bench_needs_a_dataset(capsys):
    assert main(["bench", "--workers", "1"]) == 1
    assert main(["bench", "--synthetic", "oops"]) == 1
