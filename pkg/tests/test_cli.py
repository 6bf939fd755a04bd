import csv
import io
import json

import pytest

from tlrecon.cli import BENCH_COLUMNS, main
from tlrecon.graph import load_graph
from tlrecon.witness import decomposition_length, load_witness, validate_decomposition


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_tree(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "generate", "--family", "tree", "--n", 10, "--out", tmp_path / "t")
    assert code == 0
    g = load_graph(tmp_path / "t.graph.json")
    td = load_witness(tmp_path / "t.witness.json")
    assert validate_decomposition(g, td).ok and decomposition_length(g, td) == 1
    assert json.loads((tmp_path / "t.params.json").read_text())["family"] == "tree"


def test_generate_single_vertex_chordal(tmp_path, capsys):
    assert run_cli(capsys, "generate", "--family", "chordal", "--n", 1, "--out", tmp_path / "c")[0] == 0
    assert load_graph(tmp_path / "c.graph.json").n == 1


def test_generate_bad_delta(tmp_path, capsys):
    code, _, err = run_cli(capsys, "generate", "--n", 10, "--delta", 1, "--out", tmp_path / "x")
    assert code == 2 and "delta" in err


def test_reconstruct_correct_and_deterministic(tmp_path, capsys):
    run_cli(capsys, "generate", "--family", "treelength", "--k", 2, "--n", 80, "--out", tmp_path / "g")
    args = ("reconstruct", tmp_path / "g.graph.json", "--k", 2, "--seed", 4)
    code, first, _ = run_cli(capsys, *args)
    assert code == 0
    code, second, _ = run_cli(capsys, *args)
    assert first == second
    data = json.loads(first)
    assert data["run"]["correct"] is True
    assert data["run"]["distinct_pairs"] == data["report"]["stats"]["distinct_pairs"]


def test_reconstruct_budget_exhausted(tmp_path, capsys):
    run_cli(capsys, "generate", "--n", 50, "--out", tmp_path / "g")
    code, out, _ = run_cli(capsys, "reconstruct", tmp_path / "g.graph.json", "--budget", 20)
    assert code == 1 and json.loads(out)["error"] == "budget_exhausted"


def test_reconstruct_rejects_disconnected_and_missing(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"n": 3, "edges": [[0, 1]]}))
    assert run_cli(capsys, "reconstruct", path)[0] == 2
    assert run_cli(capsys, "reconstruct", tmp_path / "missing.json")[0] == 2
    path.write_text(json.dumps({"n": 2, "edges": [[0, 1], [1, 0]]}))
    assert run_cli(capsys, "reconstruct", path)[0] == 2


def test_reconstruct_reports_wrong_answer_on_broken_promise(tmp_path, capsys):
    # not an error: the run finishes and the result is compared with the input
    run_cli(capsys, "generate", "--family", "grid", "--n", 6, "--out", tmp_path / "grid")
    code, out, _ = run_cli(capsys, "reconstruct", tmp_path / "grid.graph.json", "--delta", 4)
    assert code in (0, 1)
    assert json.loads(out)["run"]["correct"] is (code == 0)


def test_bench_single_row(capsys):
    code, out, _ = run_cli(capsys, "bench", "--n", 60, "--trials", 1)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert tuple(out.splitlines()[0].split(",")) == BENCH_COLUMNS
    assert [r["row"] for r in rows] == ["run", "median"]


def test_bench_order_is_canonical(tmp_path, capsys):
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, "bench", "--n-list", "80,40", "--trials", 3, "--out", out_a)[0] == 0
    assert run_cli(capsys, "bench", "--n-list", "80,40", "--trials", 3, "--workers", 2, "--out", out_b)[0] == 0
    strip = lambda p: [{k: v for k, v in r.items() if k != "wall_ms"} for r in csv.DictReader(open(p))]
    a, b = strip(out_a), strip(out_b)
    assert a == b
    runs = [(int(r["n"]), int(r["seed"])) for r in a if r["row"] == "run"]
    assert runs == sorted(runs) and len(runs) == 6
    assert [r["n"] for r in a if r["row"] == "median"] == ["40", "80"]


def test_bench_usage_errors(capsys):
    assert run_cli(capsys, "bench")[0] == 2
    assert run_cli(capsys, "bench", "--n", 10, "--family", "cycle")[0] == 2
    assert run_cli(capsys, "bench", "--n-list", "a,b")[0] == 2


def test_bench_help_documents_columns(capsys):
    code, out, _ = run_cli(capsys, "bench", "--help")
    assert code == 0
    assert ",".join(BENCH_COLUMNS) in "".join(out.split())


def test_check_paths_near_set_passes(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "check", "paths-near-set", "--trials", 20, "--subsets", 5, "--out", tmp_path / "r.json")
    assert code == 0 and out.startswith("PASS paths-near-set")
    assert json.loads((tmp_path / "r.json").read_text())[0]["ok"] is True


def test_check_all_runs_every_suite(capsys):
    code, out, _ = run_cli(capsys, "check", "all", "--trials", 8, "--subsets", 3)
    assert code == 0
    assert [line.split()[1].rstrip(":") for line in out.splitlines()] == [
        "betweenness-bound", "bag-separator", "paths-near-set", "ball-separator", "partition"]


def test_check_unknown_suite(capsys):
    assert run_cli(capsys, "check", "bogus")[0] == 2


def test_check_corrupted_witness(tmp_path, capsys):
    run_cli(capsys, "generate", "--family", "chordal", "--n", 30, "--out", tmp_path / "g")
    w = json.loads((tmp_path / "g.witness.json").read_text())
    w["bags"][0] = []
    (tmp_path / "g.witness.json").write_text(json.dumps(w))
    code, out, _ = run_cli(capsys, "check", "all", "--graph", tmp_path / "g.graph.json",
                           "--witness", tmp_path / "g.witness.json")
    assert code == 1 and out.startswith("FAIL witness")


def test_check_supplied_instance(tmp_path, capsys):
    run_cli(capsys, "generate", "--family", "treelength", "--k", 2, "--n", 40, "--out", tmp_path / "g")
    code, out, _ = run_cli(capsys, "check", "all", "--k", 2, "--graph", tmp_path / "g.graph.json",
                           "--witness", tmp_path / "g.witness.json")
    assert code == 0 and out.count("PASS") == 4


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "tlrecon", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "generate" in res.stdout
