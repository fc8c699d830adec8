import json

import pytest

from holant.cli import EXIT_DATA, EXIT_HARD, EXIT_OK, EXIT_USAGE, bundled_grid_path, main, parse_files
from holant.grids import grid_to_dict, graph_grid
from holant.signatures import ONE


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


@pytest.fixture
def k4(tmp_path):
    edges = [(u, w) for u in range(4) for w in range(u + 1, 4)]
    return write(tmp_path, "k4.json", grid_to_dict(graph_grid(edges, ONE)))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def test_demo_matchings(capsys):
    code, out, _ = run(capsys, "demo", "matchings")
    assert code == EXIT_OK
    assert out.splitlines() == ["k4: 3", "cube: 9", "petersen: 6"]
    code, out, _ = run(capsys, "demo", "matchings", "6")
    assert out == "6: 15"


def test_demo_unknown_graph(capsys):
    code, _, err = run(capsys, "demo", "matchings", "octopus")
    assert code == EXIT_USAGE and "unknown graph" in err


@pytest.mark.parametrize("method", ["auto", "brute", "contract"])
def test_eval(capsys, k4, method):
    code, out, _ = run(capsys, "eval", k4, "--method", method)
    assert (code, out) == (EXIT_OK, "3")


def test_eval_json_and_float(capsys, k4):
    code, out, _ = run(capsys, "--format", "json", "--backend", "float", "eval", k4)
    data = json.loads(out)
    assert code == EXIT_OK and complex(data["holant"].replace("i", "j")) == 3


def test_eval_wrong_method(capsys, k4):
    code, _, err = run(capsys, "eval", k4, "--method", "affine")
    assert code == EXIT_DATA and "error" in err


def test_eval_bundled_file(capsys):
    code, out, _ = run(capsys, "eval", str(bundled_grid_path("cube")))
    assert out == "9"


def test_eval_gadget_prints_effective_signature(capsys, tmp_path):
    gadget = {"signatures": {"e": {"symmetric": [1, 0, 0, 1]}},
              "vertices": [{"id": 0, "sig": "e"}],
              "edges": [[[0, 1], [0, 2]]], "dangling": [[0, 0]]}
    code, out, _ = run(capsys, "eval", write(tmp_path, "g.json", gadget))
    assert (code, out) == (EXIT_OK, "1 1")


def test_classify_exit_codes(capsys, tmp_path):
    one3 = write(tmp_path, "one3.json", {"symmetric": [0, 1, 0, 0]})
    eq3 = write(tmp_path, "eq3.json", {"symmetric": [1, 0, 0, 1]})
    code, out, _ = run(capsys, "classify", "--problem", "csp", one3)
    assert code == EXIT_HARD and "Hard" in out
    code, out, _ = run(capsys, "classify", "--problem", "conservative", eq3)
    assert code == EXIT_OK and "PolyTime" in out
    code, out, _ = run(capsys, "classify", "--problem", "conservative", eq3, one3)
    assert code == EXIT_HARD
    code, out, _ = run(capsys, "--format", "json", "classify", "--problem", "holant_plus", eq3)
    assert json.loads(out)["case"] == "A"


def test_classify_planar_binary(capsys, tmp_path):
    g = write(tmp_path, "g.json", {"symmetric": [3, 1, 5]})
    code, out, _ = run(capsys, "classify", "--problem", "planar_binary", g)
    assert code == EXIT_HARD


def test_entangle_and_families(capsys, tmp_path):
    one3 = write(tmp_path, "one3.json", {"name": "one3", "symmetric": [0, 1, 0, 0]})
    assert run(capsys, "entangle", one3)[1] == "W"
    both = write(tmp_path, "both.json", [{"name": "a", "symmetric": [1, 0, 0, 1]},
                                         {"name": "b", "values": [1, 2]}])
    code, out, _ = run(capsys, "entangle", both)
    assert out.splitlines() == ["a: GHZ", "b: Degenerate"]
    code, out, _ = run(capsys, "families", one3)
    assert code == EXIT_OK and "Mclosure" in out


@pytest.mark.parametrize("action,extra", [
    ("ternary", []), ("binary", ["--pair", "0", "2"]), ("symmetrize", []),
    ("symmetrize", ["--rotation", "1"]), ("escape", []), ("hardcore", []),
])
def test_gadget_round_trip(capsys, tmp_path, action, extra):
    src = write(tmp_path, "f.json", {"values": [1, 2, 0, 3, 0, 1, 4, 5, 1, 0, 0, 2, 3, 0, 1, 1]}
                if action != "symmetrize" else {"values": [1, 2, 0, 3, 0, 1, 4, 5]})
    out_file = str(tmp_path / "rec.json")
    code, out, _ = run(capsys, "gadget", action, src, "--out", out_file, *extra)
    assert code == EXIT_OK and out.splitlines()[0 if action != "hardcore" else 1].startswith("result:")
    code, out, _ = run(capsys, "gadget", "replay", out_file)
    assert code == EXIT_OK and out.endswith("matches recorded result: True")


def test_gadget_replay_detects_tampering(capsys, tmp_path):
    src = write(tmp_path, "f.json", {"values": [1, 2, 0, 3, 0, 1, 4, 5]})
    out_file = tmp_path / "rec.json"
    run(capsys, "gadget", "symmetrize", src, "--out", str(out_file))
    data = json.loads(out_file.read_text())
    data["result"]["values"][0] = "12345"
    data["result"].pop("symmetric", None)
    out_file.write_text(json.dumps(data))
    code, out, _ = run(capsys, "gadget", "replay", str(out_file))
    assert code == EXIT_DATA and out.endswith("False")


def test_gadget_hardcore_not_applicable(capsys, tmp_path):
    src = write(tmp_path, "f.json", {"values": [1, 0, 0, 0]})
    code, out, _ = run(capsys, "gadget", "hardcore", src)
    assert code == EXIT_OK and out.startswith("NotApplicable")


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["classify", "x.json"])
    assert exc.value.code == EXIT_USAGE
    src = write(tmp_path, "f.json", {"values": [1, 2, 0, 3, 0, 1, 4, 5]})
    code, _, err = run(capsys, "gadget", "binary", src)
    assert code == EXIT_USAGE and "--pair" in err


@pytest.mark.parametrize("content,needle", [
    ("{not json", "line 1"),
    ({"values": [1, 2, 3]}, "power of two"),
    ({"values": ["1+"]}, "malformed"),
    ({"foo": 1}, "expected a signature entry"),
])
def test_data_errors(capsys, tmp_path, content, needle):
    code, _, err = run(capsys, "entangle", write(tmp_path, "bad.json", content))
    assert code == EXIT_DATA and needle in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "entangle", str(tmp_path / "nope.json"))
    assert code == EXIT_DATA


def test_parse_files_splits_grids_and_signatures(tmp_path, k4):
    sig = write(tmp_path, "s.json", {"signatures": {"a": {"values": [1, 0]}}})
    sigs, grids = parse_files([sig, k4])
    assert [n for n, _ in sigs] == ["a"] and len(grids) == 1
