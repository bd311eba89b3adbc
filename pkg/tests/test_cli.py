import io
import json

import pytest

from densepeel.cli import main

K4P = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n4 5\n"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def k4p(tmp_path):
    p = tmp_path / "k4p.txt"
    p.write_text(K4P)
    return str(p)


def test_detect_json(k4p):
    code, out, _ = cli("detect", "--graph", k4p, "--metric", "dg", "--epsilon", "0")
    assert code == 0
    d = json.loads(out)
    assert list(d) == ["metric", "epsilon", "k", "optimization", "threads", "rounds",
                       "best_density", "best_subset_size", "best_subset", "density_trace",
                       "peeled_per_round", "trim_passes_per_round", "wall_time_ms",
                       "input_digest"]
    assert d["best_density"] == 1.5 and d["best_subset"] == [1, 2, 3, 4]
    assert d["optimization"] == "lpo" and d["k"] == 2
    assert d["input_digest"]["n"] == 5 and d["input_digest"]["m"] == 7
    assert len(d["density_trace"]) == d["rounds"]


def test_detect_byte_identical(k4p):
    outs = set()
    for t in ("1", "2", "8"):
        _, out, _ = cli("detect", "--graph", k4p, "--metric", "dg", "--threads", t)
        d = json.loads(out)
        del d["wall_time_ms"], d["threads"]
        outs.add(json.dumps(d))
    assert len(outs) == 1


def test_detect_tsv_and_output(k4p, tmp_path):
    target = tmp_path / "r.tsv"
    code, out, _ = cli("detect", "--graph", k4p, "--metric", "tds", "--format", "tsv",
                       "--output", str(target), "--seq")
    assert code == 0 and out == ""
    rows = target.read_text().splitlines()
    assert rows[0] == "round\tdensity\tpeeled\ttrim_passes"
    assert len(rows) == 1 + 5


def test_oracle_pass(k4p):
    code, out, _ = cli("oracle", "--graph", k4p, "--metric", "dg", "--epsilon", "0")
    assert code == 0
    assert "verdict\tPASS" in out and "ratio\t1.0" in out


def test_bench(k4p):
    code, out, _ = cli("bench", "--graph", k4p, "--metric", "dg", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and [r["variant"] for r in rows] == ["none", "gpo", "lpo"]
    assert rows[0]["round_reduction_pct"] == 0.0


@pytest.mark.parametrize("argv", [
    ["detect", "--graph", "X", "--metric", "kclique"],
    ["detect", "--graph", "X", "--metric", "dg", "--k", "4"],
    ["detect", "--graph", "X", "--metric", "dg", "--fd-c", "2"],
    ["detect", "--graph", "X", "--metric", "nope"],
    ["detect", "--graph", "X", "--metric", "dg", "--epsilon", "-1"],
    ["detect", "--graph", "X", "--metric", "dg", "--threads", "0"],
    ["frobnicate"],
])
def test_usage_errors(argv, k4p):
    argv = [k4p if a == "X" else a for a in argv]
    code, _, err = cli(*argv)
    assert code == 1 and "usage" in err


def test_input_errors(tmp_path):
    neg = tmp_path / "neg.txt"
    neg.write_text("1 2 1\n2 3 -4\n")
    code, _, err = cli("detect", "--graph", str(neg), "--metric", "dw", "--weighted")
    assert code == 2 and "line 2" in err
    code, _, err = cli("detect", "--graph", str(tmp_path / "missing"), "--metric", "dg")
    assert code == 2
    big = tmp_path / "big.txt"
    big.write_text("".join(f"{i} {i + 1}\n" for i in range(24)))
    code, _, err = cli("oracle", "--graph", str(big), "--metric", "dg")
    assert code == 2 and "20" in err
    vw = tmp_path / "vw.txt"
    vw.write_text("99 1.0\n")
    code, _, err = cli("detect", "--graph", str(neg), "--metric", "dw",
                       "--vertex-weights", str(vw))
    assert code == 2


def test_vertex_weights_file(tmp_path, k4p):
    vw = tmp_path / "vw.txt"
    vw.write_text("5 10\n")
    code, out, _ = cli("detect", "--graph", k4p, "--metric", "dw", "--epsilon", "0",
                       "--vertex-weights", str(vw))
    assert code == 0 and 5 in json.loads(out)["best_subset"]


def test_empty_graph_report(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    code, out, _ = cli("detect", "--graph", str(empty), "--metric", "dg")
    d = json.loads(out)
    assert code == 0 and d["best_subset"] == [] and d["best_density"] == 0.0 and d["rounds"] == 0


def test_metric_precondition_exit(monkeypatch, k4p):
    from densepeel import cli as cli_mod
    from densepeel.metrics import custom_metric
    monkeypatch.setattr(cli_mod, "resolve_metric",
                        lambda *a, **kw: custom_metric(lambda u, g: 0.0, lambda e, g: -1.0))
    code, _, err = cli("detect", "--graph", k4p, "--metric", "dg")
    assert code == 3 and "edge" in err


def test_oracle_fail_exit(monkeypatch, k4p):
    from densepeel import cli as cli_mod
    from densepeel.engine import PeelResult
    monkeypatch.setattr(cli_mod, "peel", lambda *a, **kw: PeelResult([1], 0.1, 1))
    code, out, _ = cli("oracle", "--graph", k4p, "--metric", "dg")
    assert code == 4 and "FAIL" in out


def test_module_entry_point(k4p):
    import subprocess
    import sys
    p = subprocess.run([sys.executable, "-m", "densepeel", "detect", "--graph", k4p,
                        "--metric", "dg", "--epsilon", "0"], capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["best_subset_size"] == 4
