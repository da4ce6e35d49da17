import csv
import hashlib
import json

import pytest

from topinfer.cli import EXIT_COMPUTE, EXIT_FLAGGED, EXIT_OK, EXIT_USAGE, run
from topinfer.graph import complete_graph, disjoint_union, path_graph, read_edgelist, write_edgelist


@pytest.fixture
def k4(tmp_path):
    p = tmp_path / "k4.graph"
    write_edgelist(complete_graph(4), p)
    return p


def test_zeta_report(k4, tmp_path):
    out = tmp_path / "z.json"
    assert run(["zeta", "--in", str(k4), "--max-m", "6", "--out", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["zeta_reciprocal"][:4] == ["1", "0", "0", "-8"]
    assert rep["summary"]["loop_counts"] == {"1": "0", "2": "0", "3": "24", "4": "24", "5": "0", "6": "96"}
    assert rep["oracles"]["euler_product"]["agree"]
    assert rep["oracles"]["spanning_trees"] == {"circuit_rank": 3, "matrix_tree": "16", "from_zeta": "16", "agree": True}
    man = json.loads((tmp_path / "z.json.manifest.json").read_text())
    assert man["subcommand"] == "zeta"
    assert man["outputs"]["z.json"] == hashlib.sha256(out.read_bytes()).hexdigest()


def test_match_prints(capsys):
    assert run(["match", "--rows", "4", "--cols", "4"]) == EXIT_OK
    assert capsys.readouterr().out == "36\n"


def test_usage_errors(tmp_path):
    assert run(["bogus"]) == EXIT_USAGE
    assert run(["generate", "--ensemble", "er"]) == EXIT_USAGE        # seed is mandatory
    assert run(["zeta", "--in", str(tmp_path / "missing")]) == EXIT_USAGE
    assert run(["walk", "--seed", "1"]) == EXIT_USAGE


def test_computation_error(tmp_path):
    p = tmp_path / "p.graph"
    write_edgelist(path_graph(4), p)
    assert run(["zeta", "--in", str(p)]) == EXIT_COMPUTE
    bad = tmp_path / "bad.graph"
    bad.write_text("3 2\n0 1 1\n")
    assert run(["zeta", "--in", str(bad)]) == EXIT_COMPUTE


def test_generate_roundtrip(tmp_path):
    out = tmp_path / "g.graph"
    assert run(["generate", "--ensemble", "planted", "--n1", "10", "--n2", "10", "--k", "3",
                "--p-intra", "1.0", "--seed", "4", "--out", str(out)]) == EXIT_OK
    g = read_edgelist(out)
    assert g.n_vertices == 20 and g.n_edges == 93


def test_detect_json_and_locality(tmp_path):
    p = tmp_path / "two.graph"
    write_edgelist(disjoint_union(complete_graph(10), complete_graph(10)), p)
    out = tmp_path / "v.json"
    code = run(["detect", "--in", str(p), "--walk-len", "400", "--threshold", "0.7", "--seed", "7",
                "--truth", "--out", str(out)])
    assert code == EXIT_OK
    v = json.loads(out.read_text())
    assert v["decision"] == "suspect-disconnected" and v["locality_violations"] == 0
    assert v["ground_truth"]["component_count"] == 2


def test_flagged_exit(tmp_path):
    out = tmp_path / "r.csv"
    # x range far beyond the slope range of the t grid
    code = run(["ldp", "rate", "--t-min", "-0.5", "--t-max", "0.5", "--x-min", "0.05", "--x-max", "0.95",
                "--x-step", "0.05", "--seed", "1", "--out", str(out)])
    assert code == EXIT_FLAGGED
    rows = list(csv.DictReader(out.open()))
    assert rows[0]["boundary"] == "1"
    assert json.loads((tmp_path / "r.csv.manifest.json").read_text())["flagged"]


def test_walk_tables(k4, tmp_path):
    out = tmp_path / "w.csv"
    assert run(["walk", "--in", str(k4), "--steps", "2", "--trajectories", "500", "--seed", "1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 12
    assert rows[0]["exact_probability"] == "1.0"
    out2 = tmp_path / "a.csv"
    assert run(["walk", "--asym", "0.5", "--steps", "4", "--trajectories", "1000", "--seed", "1", "--out", str(out2)]) == 0
    rows = list(csv.DictReader(out2.open()))
    assert rows[4]["exact_return_probability"] == "0.375"


STOCHASTIC = [
    ["generate", "--ensemble", "er", "--n", "40", "--p", "0.1", "--seed", "3"],
    ["generate", "--ensemble", "bipartite", "--seed", "3"],
    ["walk", "--asym", "0.3", "--steps", "10", "--trajectories", "2000", "--seed", "2"],
    ["detect", "sweep", "--n", "100", "--k-values", "0,2,50", "--runs", "6", "--threshold", "0.5", "--seed", "5"],
    ["detect", "calibrate", "--n", "60", "--runs", "20", "--seed", "5"],
    ["ldp", "scgf", "--dist", "gaussian", "--t-min", "-1", "--t-max", "1", "--t-step", "0.1", "--seed", "2"],
    ["ldp", "decay", "--samples", "20000", "--seed", "2"],
    ["ldp", "diffusion", "--paths", "12000", "--dt", "0.01", "--seed", "2"],
    ["ergodic", "--map", "doubling", "--n-grid", "10,100,1000", "--points", "100", "--seed", "2"],
]


@pytest.mark.parametrize("argv", STOCHASTIC, ids=lambda a: "-".join(a[:2]))
def test_byte_identical_reruns(argv, tmp_path):
    outs = []
    for i, workers in enumerate(["1", "1", "4"]):
        out = tmp_path / f"o{i}"
        code = run(["--workers", workers, *argv, "--out", str(out)])
        assert code in (EXIT_OK, EXIT_FLAGGED)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]
