import json
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from cggpack.cli import main
from cggpack.errors import ParseError
from cggpack.graphs import Cgg, OrderedGraph, plane_cycle
from cggpack.packing import greedy_maximal_packing
from cggpack.serialize import (
    dumps,
    frac_str,
    graph_from_json,
    graph_to_json,
    loads,
    packing_from_json,
    packing_to_json,
    parse_frac,
    parse_graph_text,
    weighted_from_json,
    weighted_to_json,
)
from cggpack.weighted import WeightedCgg


def write_graph(tmp_path, name, G):
    path = tmp_path / name
    path.write_text(dumps(graph_to_json(G)))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_graph_round_trip_is_byte_identical():
    for G in (plane_cycle(5), OrderedGraph.from_edges(4, [(0, 3), (1, 2)]), Cgg.complete_graph(6)):
        text = dumps(graph_to_json(G))
        assert dumps(graph_to_json(parse_graph_text(text))) == text
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}\n'


def test_rationals_and_weights():
    assert frac_str(Fraction(2, 4)) == "1/2" and frac_str(3) == "3/1"
    assert parse_frac("7/3") == Fraction(7, 3) and parse_frac(2) == 2
    for bad in ("x", True, 1.5, "1/0"):
        with pytest.raises(ParseError):
            parse_frac(bad)
    w = WeightedCgg.from_lengths(5, {1: Fraction(1, 3), 2: 2})
    assert weighted_from_json(weighted_to_json(w)) == w


def test_packing_round_trip():
    P = greedy_maximal_packing(plane_cycle(4), Cgg.complete_graph(13), seed=2)
    obj = json.loads(dumps(packing_to_json(P)))
    assert obj["coverage"] == frac_str(P.coverage)
    Q = packing_from_json(obj)
    assert np.array_equal(Q.copies, P.copies) and Q.coverage == P.coverage


def test_parse_error_positions():
    with pytest.raises(ParseError, match="line 2 column"):
        loads('{"kind": "cgg",\n "n": 5,, }')
    with pytest.raises(ParseError, match=r"\$\.edges\[1\]"):
        graph_from_json({"kind": "cgg", "n": 3, "edges": [[0, 1], [0, 7]]})
    with pytest.raises(ParseError, match=r"\$\.kind"):
        graph_from_json({"kind": "tree", "n": 3, "edges": []})
    with pytest.raises(ParseError, match="missing key 'n'"):
        graph_from_json({"kind": "cgg", "edges": []})


def test_chroma_examples(tmp_path, capsys):
    c5 = write_graph(tmp_path, "c5.json", plane_cycle(5))
    assert run(["chroma", "--input", c5], capsys)[1].startswith("chi_c = 5\n")
    empty = write_graph(tmp_path, "e.json", Cgg.from_edges(4, []))
    assert run(["chroma", "--input", empty], capsys)[1].startswith("chi_c = 1\n")
    p3 = write_graph(tmp_path, "p3.json", OrderedGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)]))
    assert run(["chroma", "--input", p3], capsys)[1].startswith("chi_< = 4\n")


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "cgg", "n": 5, "edges": [[0, 1],]}')
    code, _, err = run(["chroma", "--input", str(bad)], capsys)
    assert code == 4 and "line 1 column" in err


def test_feasible_examples(tmp_path, capsys):
    out = tmp_path / "f.json"
    code, text, _ = run(["feasible", "--k", "3", "--weights", "1", "--m", "5", "--out", str(out)], capsys)
    assert code == 0 and "m = 5, feasible" in text
    res = json.loads(out.read_text())
    assert [x["value"] for x in res["x"]] == ["1/3", "1/3"]
    assert [x["gaps"] for x in res["x"]] == [[1, 1, 3], [1, 2, 2]]
    code, text, _ = run(["feasible", "--k", "4", "--weights", "1,1", "--witness"], capsys)
    assert code == 0 and "m = 97, feasible" in text
    code, _, err = run(["feasible", "--k", "4", "--weights", "1,1", "--m", "96"], capsys)
    assert code == 2 and "odd" in err
    code, text, _ = run(["feasible", "--k", "4", "--weights", "1,0", "--m", "9"], capsys)
    assert code == 0 and "infeasible" in text and "certificate y" in text
    code, text, _ = run(["feasible", "--k", "6", "--weights", "1,1,96", "--witness"], capsys)
    assert "m' = 63504, m = 127009" in text


def test_pack_and_bound(tmp_path, capsys):
    c5 = write_graph(tmp_path, "c5.json", plane_cycle(5))
    code, _, err = run(["pack", "--input", c5, "--n", "101"], capsys)
    assert code == 2 and "chi_c = 5" in err
    out = tmp_path / "p.json"
    code, text, _ = run(["pack", "--input", c5, "--n", "101", "--route", "greedy", "--seed", "3", "--out", str(out)], capsys)
    assert code == 0
    run_obj = json.loads(out.read_text())
    assert run_obj["verified"] and run_obj["seed"] == 3
    assert os.path.exists(str(out) + ".manifest.json")
    code, text, _ = run(["bound", "--input", c5, "--n", "101", "--packing", str(out)], capsys)
    assert code == 0 and "bound" in text and ": ok" in text
    edge = write_graph(tmp_path, "edge.json", Cgg.from_edges(2, [(0, 1)]))
    code, text, _ = run(["bound", "--input", edge, "--n", "301"], capsys)
    assert "bound = 1/1" in text
    code, _, err = run(["bound", "--input", edge, "--n", "300"], capsys)
    assert code == 2


def test_invalid_packing_exit_code(tmp_path, capsys):
    c5 = write_graph(tmp_path, "c5.json", plane_cycle(5))
    host = Cgg.complete_graph(11)
    bad = {
        "host": graph_to_json(host),
        "pattern": graph_to_json(plane_cycle(5)),
        "copies": [[0, 1, 2, 3, 4], [0, 1, 5, 6, 7]],
        "coverage": "1/1",
    }
    path = tmp_path / "bad.json"
    path.write_text(dumps(bad))
    code, _, err = run(["bound", "--input", c5, "--n", "11", "--packing", str(path)], capsys)
    assert code == 3


def test_ordered_pack_trace(tmp_path, capsys):
    g = write_graph(tmp_path, "o.json", OrderedGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 3)]))
    code, text, _ = run(["pack", "--input", g, "--n", "500"], capsys)
    assert code == 0 and "level 0: size 500 n'=100 sizes (200, 200, 100) I4=0" in text


def test_manifest_replay_byte_identical(tmp_path, capsys):
    k3 = write_graph(tmp_path, "k3.json", Cgg.complete_graph(3))
    out, man = tmp_path / "r.json", tmp_path / "r.manifest.json"
    assert run(["pack", "--input", k3, "--n", "49", "--seed", "0", "--seed", "1", "--out", str(out), "--manifest", str(man)], capsys)[0] == 0
    first = out.read_bytes()
    again = tmp_path / "again.json"
    assert run(["replay", "--manifest", str(man), "--out", str(again)], capsys)[0] == 0
    assert again.read_bytes() == first
    assert len(json.loads(first)["runs"]) == 2
    # a changed input invalidates the manifest
    with open(k3, "a") as fh:
        fh.write(" ")
    assert run(["replay", "--manifest", str(man), "--out", str(again)], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    c5 = write_graph(tmp_path, "c5.json", plane_cycle(5))
    res = subprocess.run([sys.executable, "-m", "cggpack", "chroma", "--input", c5], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("chi_c = 5")
