import json
import subprocess
import sys

import pytest
from hypothesis import given

from posetmod import cli, gallery, io
from posetmod.cmod import from_maps, random_module
from posetmod.errors import CategoryError, FormatError
from posetmod.linalg import GF, Gram, Matrix
from posetmod.poset import chain, gamma1

import oracles
from strategies import modules


def run(tmp_path, command, doc, *flags):
    path = tmp_path / "in.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    code, report, _ = cli.run([command, str(path), *flags])
    return code, json.loads(io.dumps(report))


def gallery_doc(name):
    code, rep, _ = cli.run(["gallery", name])
    assert code == 0
    return rep


@given(modules())
def test_round_trip(m):
    assert io.loads(io.write_module(m)).module == m


@given(modules(field=GF(5)))
def test_round_trip_fp(m):
    assert io.loads(io.write_module(m)).module == m


def test_round_trip_with_grams_and_fractions():
    m = from_maps(chain(2), {"1": 1, "2": 2}, {("1", "2"): [["1/2"], [3]]})
    grams = {"1": Gram(Matrix([["5/4"]])), "2": Gram(Matrix([[2, 1], [1, 1]]))}
    doc = io.loads(io.write_module(m, grams))
    assert doc.module == m and doc.grams == grams
    assert '"1/2"' in io.write_module(m)


def test_diagram_round_trip():
    item = gallery.get("d7-geometric")
    doc = io.loads(io.write_module(item.module, None, item.diagram))
    assert doc.diagram == item.diagram


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"objects": []}',
        '{"field": {"type": "R"}, "objects": [{"name": "a", "dim": 1}]}',
        '{"field": {"type": "Fp", "p": 4}, "objects": [{"name": "a", "dim": 1}]}',
        '{"objects": [{"name": "a", "dim": 1}, {"name": "b", "dim": 1}], "edges": [{"src": "a", "dst": "b", "matrix": [[1, 2]]}]}',
        '{"objects": [{"name": "a", "dim": 1}, {"name": "b", "dim": 1}], "edges": [{"src": "a", "dst": "b", "matrix": [[1.5]]}]}',
    ],
)
def test_malformed_input_exit_1(tmp_path, text):
    code, rep = run(tmp_path, "validate", text)
    assert code == 1 and "error" in rep


def test_transitive_reduction_is_enforced(tmp_path):
    doc = {
        "objects": [{"name": n, "dim": 1} for n in "abc"],
        "edges": [
            {"src": "a", "dst": "b", "matrix": [[1]]},
            {"src": "b", "dst": "c", "matrix": [[1]]},
            {"src": "a", "dst": "c", "matrix": [[1]]},
        ],
    }
    code, rep = run(tmp_path, "validate", doc)
    assert code == 1 and rep["error"] == "CategoryError"


def test_path_conflict_exit_2(tmp_path):
    m = from_maps(gamma1(), {x: 1 for x in "abcd"}, {("a", "b"): [[1]], ("b", "d"): [[1]], ("a", "c"): [[1]], ("c", "d"): [[3]]})
    code, rep = run(tmp_path, "analyze", io.write_module(m))
    assert code == 2 and rep["error"] == "path_conflict"


def test_d4_shear_exit_3_with_trace(tmp_path):
    code, rep = run(tmp_path, "analyze", gallery_doc("d4-shear"), "--max-iters", "10")
    assert code == 3
    trace = rep["local_structure"]["trace"]
    assert len(trace) == 11 and trace[-1]["x1"] > trace[0]["x1"]


def test_analyze_d5(tmp_path):
    code, rep = run(tmp_path, "analyze", gallery_doc("d5-obstruction"))
    assert code == 0
    assert rep["local_structure"]["total_excess"] == 0
    assert rep["blocks"] == [{"support": ["x1", "x2", "y1", "y2"], "dim": 1}]
    assert rep["ipc"]["verdict"] == "obstructed" and rep["ipc"]["operator"] == [[2]]
    assert rep["tameness"] == {"weakly_tame": True, "tame": False, "holonomy_free_blocks": False}


def test_analyze_totals_are_consistent(tmp_path):
    code, rep = run(tmp_path, "analyze", gallery_doc("three-lines"))
    assert code == 0
    ls = rep["local_structure"]
    assert sum(ls["excess"].values()) == ls["total_excess"] == 1
    assert sum(g["dim"] for g in rep["gbcd"]) == sum(b["dim"] for b in rep["blocks"])


def test_barcode_command_matches_oracle(tmp_path):
    m = random_module(chain(5), 3, 99)
    code, rep = run(tmp_path, "barcode", io.write_module(m))
    assert code == 0
    assert [tuple(b) for b in rep["bars"]] == oracles.rank_barcode(m)
    code, _ = run(tmp_path, "barcode", gallery_doc("d5-obstruction"))
    assert code == 1


def test_ip_commands(tmp_path):
    m = from_maps(chain(2), {"1": 1, "2": 1}, {("1", "2"): [[2]]})
    bad = io.write_module(m, {"1": Gram(Matrix([[1]])), "2": Gram(Matrix([[1]]))})
    code, rep = run(tmp_path, "ip-check", bad)
    assert code == 4 and rep["verdict"] == "violated" and rep["values"] == [1, 4]
    code, rep = run(tmp_path, "ip-check", io.write_module(m))
    assert code == 4
    code, rep = run(tmp_path, "ip-construct", io.write_module(m))
    assert code == 0
    grams = {x: Gram(Matrix(v)) for x, v in rep["grams"].items()}
    code, rep = run(tmp_path, "ip-check", io.write_module(m, grams), "--composites")
    assert code == 0 and rep["verdict"] == "verified"
    code, _ = run(tmp_path, "ip-construct", gallery_doc("d5-obstruction"))
    assert code == 1


def test_tame_cover_command(tmp_path):
    code, rep = run(tmp_path, "tame-cover", gallery_doc("chain-example"))
    assert code == 4
    code, rep = run(tmp_path, "tame-cover", gallery_doc("chain-example"), "--construct-ipc")
    assert code == 0 and rep["isomorphism"] and rep["total_kernel"] == 0


def test_geometric_commands(tmp_path):
    doc = gallery_doc("d7-geometric")
    code, rep = run(tmp_path, "homology", doc, "--degree", "1")
    assert code == 0
    assert [e["matrix"] for e in rep["edges"]] == [[[2]], [[1]], [[1]], [[1]]]
    code, rep = run(tmp_path, "present", doc)
    assert code == 1  # the collapsing map is not injective


def test_present_inclusion(tmp_path):
    tri = {"vertices": ["a", "b", "c"], "simplices": [["a", "b"], ["b", "c"], ["a", "c"]]}
    disk = {"vertices": ["a", "b", "c"], "simplices": [["a", "b", "c"]]}
    doc = {
        "objects": [{"name": "1"}, {"name": "2"}],
        "edges": [{"src": "1", "dst": "2"}],
        "complexes": {"1": tri, "2": disk},
        "complex_maps": [{"src": "1", "dst": "2", "vertex_map": {"a": "a", "b": "b", "c": "c"}}],
    }
    code, rep = run(tmp_path, "present", doc)
    assert code == 0
    assert rep["cokernel_dims"] == {"1": 1, "2": 0}
    assert rep["cycles_ipc"] == rep["boundaries_ipc"] == "verified"


def test_dot_export(tmp_path):
    dot = tmp_path / "g.dot"
    code, _ = run(tmp_path, "blocks", gallery_doc("gamma1-block"), "--dot", str(dot))
    assert code == 0 and dot.read_text().startswith("digraph")


def test_random_command():
    code, rep, _ = cli.run(["random", "3x3", "--seed", "4"])
    assert code == 0
    assert io.from_json(rep).module == random_module(io.from_json(rep).category, 3, 4)
    code, rep, _ = cli.run(["random", "5", "--p", "2"])
    assert code == 0 and rep["field"] == {"type": "Fp", "p": 2}


@pytest.mark.parametrize("name", gallery.NAMES)
def test_reports_are_byte_identical(tmp_path, name):
    path = tmp_path / f"{name}.json"
    path.write_text(io.dumps(gallery_doc(name)))
    outs = [
        subprocess.run([sys.executable, "-m", "posetmod", "analyze", str(path), "--max-iters", "8"], capture_output=True)
        for _ in range(2)
    ]
    assert outs[0].stdout == outs[1].stdout and outs[0].returncode == outs[1].returncode
    assert outs[0].returncode in (0, 3)
