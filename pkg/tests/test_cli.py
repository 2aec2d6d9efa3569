import json

import pytest

from optdesign.design import fano_plane, format_design, graph_as_design
from optdesign.graphs import petersen
from optdesign.graphs.graph import Graph

from conftest import run_cli


@pytest.fixture
def files(tmp_path):
    paths = {
        "fano": tmp_path / "fano.txt",
        "petersen": tmp_path / "petersen.txt",
        "disconnected": tmp_path / "disc.txt",
        "broken": tmp_path / "broken.txt",
        "pet_g6": tmp_path / "pet.g6",
        "short_g6": tmp_path / "short.g6",
        "garbage_g6": tmp_path / "garbage.g6",
    }
    paths["fano"].write_text(format_design(fano_plane()))
    paths["petersen"].write_text(format_design(graph_as_design(petersen())))
    paths["disconnected"].write_text("v=4 k=2\n1 2\n3 4\n")
    paths["broken"].write_text("v=3 k=2\n1 2\n2 9\n")
    paths["pet_g6"].write_text(petersen().to_graph6() + "\n")
    short = Graph.from_edges(10, list(petersen().edges())[:-1])
    paths["short_g6"].write_text(petersen().to_graph6() + "\n" + short.to_graph6() + "\n")
    paths["garbage_g6"].write_text("IsP@PGXD_\nI!!\n")
    return paths


def test_eval(files):
    code, recs = run_cli("eval", "--design", files["fano"])
    assert code == 0
    assert recs[0]["e_value"] == pytest.approx(7 / 3) and recs[0]["distinct_count"] == 1
    code, recs = run_cli("eval", "--design", files["petersen"], "--p", "1,2")
    assert code == 0 and recs[0]["trace_c"] == 15
    assert recs[0]["phi_values"]["1"] == pytest.approx(0.733333, abs=1e-6)
    assert run_cli("eval", "--design", files["disconnected"])[0] == 3
    assert run_cli("eval", "--design", files["broken"])[0] == 2


def test_usage_errors_exit_2(files):
    with pytest.raises(SystemExit) as exc:
        run_cli("eval")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run_cli("eval", "--design", files["fano"], "--p", "0,-1")
    assert exc.value.code == 2


def test_verify_petersen_files(files):
    code, recs = run_cli("verify-petersen", "--graphs", files["pet_g6"])
    assert code == 0 and recs[0]["total_connected"] == 1 and recs[0]["verified"]
    code, recs = run_cli("verify-petersen", "--graphs", files["short_g6"])
    assert code == 5 and len(recs[0]["precondition_errors"]) == 1
    code, recs = run_cli("verify-petersen", "--graphs", files["garbage_g6"])
    assert code == 5 and recs[0]["corrupt_lines"][0]["line"] == 2


def test_verify_ineq():
    code, recs = run_cli("verify-ineq", "--m1", 2, "--m2", 1, "--theta1", 1, "--theta2", 2,
                         "--p", 1, "--samples", 100000, "--seed", 7)
    assert code == 0 and recs[0]["min_gap"] >= -1e-12 and recs[0]["samples"] == 100000
    code, _ = run_cli("verify-ineq", "--m1", 2, "--m2", 1, "--theta1", 1, "--theta2", 1, "--p", 1)
    assert code == 2


def test_verify_ineq_reports_violations_with_witness():
    code, recs = run_cli("verify-ineq", "--m1", 2, "--m2", 2, "--theta1", 1, "--theta2", 2,
                         "--p", 1, "--samples", 20000, "--seed", 0)
    assert code == 4 and recs[0]["violations"] > 0 and len(recs[0]["worst"]) == 4


def test_enum_graphs(tmp_path):
    code, recs = run_cli("enum-graphs", 5, 6)
    assert code == 0 and recs[0]["count"] == 5 and len(recs[0]["graph6"]) == 5
    out = tmp_path / "g.g6"
    code, recs = run_cli("enum-graphs", 6, 7, "--out", out)
    assert code == 0 and recs[0]["count"] == 19
    assert len(out.read_text().splitlines()) == 19
    side = json.loads((tmp_path / "g.g6.manifest.json").read_text())
    assert side["manifest"]["command"] == "enum-graphs"
    assert run_cli("enum-graphs", 11, 15)[0] == 3


def test_search_command(tmp_path):
    out = tmp_path / "best.txt"
    code, recs = run_cli("search", 7, 7, 3, "--criterion", "E", "--binary", "--seed", 1,
                         "--out", out, "--trace")
    assert code == 0 and recs[0]["score"] == pytest.approx(7 / 3)
    assert any(r["record"] == "trace" for r in recs[1:])
    text = out.read_text()
    assert text.startswith("# {\"manifest\"") and "v=7 k=3" in text
    assert run_cli("search", 7, 7, 3, "--criterion", "phi")[0] == 3


def test_kkt_check(tmp_path):
    pt = tmp_path / "pt.json"
    pt.write_text(json.dumps({"m1": 2, "m2": 1, "theta1": 1, "theta2": 2, "p": 1,
                              "e": [1, 1, 2], "nu": 1.75, "lam": 0.375}))
    code, recs = run_cli("kkt-check", "--point", pt)
    assert code == 0 and recs[0]["passed"]
    pt.write_text(json.dumps({"m1": 2, "m2": 1, "theta1": 1, "theta2": 2, "p": 1,
                              "e": [1, 1, 2], "nu": 0.0}))
    assert run_cli("kkt-check", "--point", pt)[0] == 4
    pt.write_text(json.dumps({"m1": 2, "m2": 1, "theta1": 1, "theta2": 2, "p": 1,
                              "e": [1, 1, 2], "nu": 1.75, "lam": -0.375}))
    assert run_cli("kkt-check", "--point", pt)[0] == 3
    pt.write_text(json.dumps({"m1": 2, "m2": 1, "theta1": 1, "theta2": 3, "p": 2,
                              "multipliers": "canonical"}))
    assert run_cli("kkt-check", "--point", pt)[0] == 0
    pt.write_text("{not json")
    assert run_cli("kkt-check", "--point", pt)[0] == 5


def test_gdd_spectrum_command():
    code, recs = run_cli("gdd-spectrum", "--m", 3, "--n", 2, "--k", 3, "--l1", 2, "--l2", 3)
    assert code == 0 and recs[0]["r"] == 7 and recs[0]["b"] == 14
    assert recs[0]["eigenvalues"] == [["6", 2], ["16/3", 3]]
    assert run_cli("gdd-spectrum", "--m", 3, "--n", 2, "--k", 3, "--l1", 2, "--l2", 3, "--r", 8)[0] == 3


def test_theorem_main_command(tmp_path, files):
    code, recs = run_cli("theorem-main", "--candidate", files["petersen"], "--graphs", files["pet_g6"],
                         "--p", "1,2")
    assert code == 0 and recs[0]["class_size"] == 1 and recs[0]["conclusion"]
    class_dir = tmp_path / "cls"
    class_dir.mkdir()
    (class_dir / "a.txt").write_text("v=4 k=2\n1 2\n2 3\n3 4\n1 4\n")
    (class_dir / "b.txt").write_text("v=4 k=2\n1 2\n1 3\n1 4\n2 3\n")
    cand = tmp_path / "c4.txt"
    cand.write_text("v=4 k=2\n1 2\n2 3\n3 4\n1 4\n")
    code, recs = run_cli("theorem-main", "--candidate", cand, "--class-dir", class_dir)
    assert code == 0 and recs[0]["class_size"] == 2 and recs[0]["same_as_candidate"] == 1
    code, recs = run_cli("theorem-main", "--candidate", cand, "--enumerate", "--p", "1")
    assert code == 0 and recs[0]["class_size"] == 2
    assert run_cli("theorem-main", "--candidate", files["fano"], "--enumerate")[0] == 3
    assert run_cli("theorem-main", "--candidate", files["petersen"], "--graphs", files["garbage_g6"])[0] == 5


def test_payload_is_deterministic(files):
    runs = [run_cli("eval", "--design", files["petersen"])[1] for _ in range(2)]
    assert runs[0] == runs[1]
    runs = [run_cli("search", 6, 6, 2, "--seed", 3, "--restarts", 2)[1] for _ in range(2)]
    assert runs[0] == runs[1]
