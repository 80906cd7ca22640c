import csv
import io
import json
import math

import pytest

from bramble_forge import __version__
from bramble_forge.bramble import grid_cross_bramble
from bramble_forge.cli import main
from bramble_forge.graph import clique, grid, write_dimacs


@pytest.fixture
def files(tmp_path):
    def put(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return put, tmp_path


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_k4(files, capsys):
    put, _ = files
    g = put("k4.json", clique(4).to_json())
    b = put("b.json", {"elements": [[0], [1], [2], [3]]})
    code, out, _ = run(["certify", "--graph", g, "--bramble", b], capsys)
    rep = json.loads(out)
    assert code == 0
    assert (rep["valid"], rep["congestion"], rep["order"]) == (True, 1, 4)
    assert rep["version"] == __version__ and rep["config"]["command"] == "certify"


def test_certify_grid_dimacs(files, capsys):
    put, _ = files
    g = put("g3.col", write_dimacs(grid(3, 3)))
    b = put("b.json", grid_cross_bramble(3).to_json())
    code, out, _ = run(["certify", "--graph", g, "--bramble", b], capsys)
    assert code == 0 and json.loads(out)["order"] == 4


def test_certify_exit_codes(files, capsys):
    put, _ = files
    g = put("p.json", {"n": 3, "edges": [[0, 1], [1, 2]]})
    code, out, _ = run(["certify", "--graph", g, "--bramble", put("b.json", {"elements": [[0], [2]]})], capsys)
    assert code == 1 and json.loads(out)["valid"] is False
    code, _, err = run(["certify", "--graph", g, "--bramble", put("bad.json", "{not json")], capsys)
    assert code == 2 and "cannot read" in err
    code, _, _ = run(["certify", "--graph", put("bad.col", "nonsense"), "--bramble", put("x.json", {"elements": []})],
                     capsys)
    assert code == 2
    g6 = put("g6.json", grid(6, 6).to_json())
    code, out, _ = run(["certify", "--graph", g6, "--bramble", put("c.json", grid_cross_bramble(6).to_json()),
                        "--budget", "2"], capsys)
    assert code == 3 and json.loads(out)["order_bounds"]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["certify"])
    assert exc.value.code == 2
    capsys.readouterr()
    code, _, _ = run(["cutmatch", "--h", "7"], capsys)
    assert code == 2
    code, _, _ = run(["cutmatch", "--player", "flow"], capsys)
    assert code == 2
    code, _, _ = run(["embed"], capsys)
    assert code == 2


def test_flow_and_sample(files, capsys):
    put, tmp = files
    g = put("g.json", grid(6, 6).to_json())
    w = put("w.json", list(range(0, 36, 6)))
    out = tmp / "f.json"
    assert main(["flow", "--graph", g, "--W", w, "--k", "18", "--out", str(out)]) == 0
    flow = json.loads(out.read_text())
    assert set(flow) >= {"W", "nu", "beta_eff", "families", "gamma", "config", "version"}
    code, text, _ = run(["sample", "--graph", g, "--W", w, "--k", "18", "--delta", "0.25", "--family", "1",
                         "--flow", str(out), "--seed", "2"], capsys)
    fam = json.loads(text)
    assert code == 0 and fam["report"]["valid"] and len(fam["walks"]) == 1
    assert fam["config"]["family"] == 1 and fam["config"]["lam"] == 0.1


def test_embed_and_alias_identical(files, capsys):
    _, tmp = files
    a, b = tmp / "a.json", tmp / "b.json"
    assert main(["embed", "--grid", "3", "30", "--seed", "1", "--out", str(a)]) == 0
    assert main(["pipeline-a", "--grid", "3", "30", "--seed", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["report"]["valid"] and rep["report"]["congestion"] <= 2
    assert rep["transcript"]["rounds"]


def test_embed_from_system_file(files, capsys):
    put, tmp = files
    out = tmp / "sys.json"
    assert main(["gridsys", "--h", "4", "--r", "12", "--out", str(out), "--verify"]) == 0
    assert json.loads(out.read_text())["check"]["ok"]
    code, text, _ = run(["embed", "--system", str(out), "--seed", "3"], capsys)
    assert code == 0 and json.loads(text)["report"]["congestion"] <= 2
    code, _, err = run(["embed", "--grid", "4", "1", "--alpha", "9"], capsys)
    assert code == 1 and "GameNotConverged" in err


def test_cutmatch(files, capsys):
    put, _ = files
    code, text, _ = run(["cutmatch", "--h", "16", "--seed", "4"], capsys)
    t = json.loads(text)
    assert code == 0 and t["alpha"] >= 0.25 and t["converged"]
    code, text, _ = run(["cutmatch", "--h", "16", "--alpha", "99", "--max-rounds", "2"], capsys)
    assert code == 1 and len(json.loads(text)["rounds"]) == 2
    g = put("g.json", grid(4, 4).to_json())
    x = put("x.json", [0, 4, 8, 12])
    code, text, _ = run(["cutmatch", "--player", "flow", "--graph", g, "--X", x], capsys)
    assert code == 0 and json.loads(text)["h"] == 4


def test_params(capsys):
    code, text, err = run(["params", "--k", "4"], capsys)
    assert code == 0 and json.loads(text)["degenerate"] and "h = 0" in err
    code, text, _ = run(["params", "--k", "1e300", "--q", "0,0,1", "--q", "1,0,0.5"], capsys)
    out = json.loads(text)
    assert out["q"] == [[0, 0, 1.0], [1, 0, 0.5]]
    code, _, _ = run(["params", "--k", "100", "--q", "oops"], capsys)
    assert code == 2


def sweep_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_empty_and_delta_audit(files, capsys):
    put, _ = files
    empty = put("e.json", {"kind": "sample", "graph": {"grid": [4, 4]}, "W": [0, 4], "vary": {"delta": []}})
    code, text, _ = run(["sweep", "--spec", empty], capsys)
    assert code == 0 and text.count("\n") == 1 and text.startswith("cell,")
    spec = put("d.json", {"kind": "sample", "graph": {"grid": [8, 8]}, "W": list(range(0, 64, 8)),
                          "base": {"k": 400, "family": 3, "seed": 1}, "vary": {"delta": [0.1, 0.3, 0.5]}})
    code, text, _ = run(["sweep", "--spec", spec], capsys)
    rows = sweep_rows(text)
    assert code == 0 and len(rows) == 3
    for row in rows:
        beta = float(row["beta_eff"])
        expect = max(1, math.floor(400 ** (0.5 + float(row["delta"])) / (72 * beta)))
        assert int(row["ell"]) == expect


def test_sweep_jobs_and_jsonl(files, capsys, monkeypatch):
    put, tmp = files
    spec = put("s.json", {"kind": "sample", "graph": {"grid": [6, 6]}, "W": list(range(0, 36, 6)),
                          "base": {"k": 18, "ell": 3}, "vary": {"family": [1, 2, 5, 10]}})
    serial = tmp / "a.csv"
    assert main(["sweep", "--spec", spec, "--out", str(serial), "--jsonl", str(tmp / "a.jsonl")]) == 0
    monkeypatch.setenv("BRAMBLE_FORGE_JOBS", "2")
    par = tmp / "b.csv"
    assert main(["sweep", "--spec", spec, "--out", str(par)]) == 0
    assert serial.read_bytes() == par.read_bytes()
    lines = (tmp / "a.jsonl").read_text().splitlines()
    assert len(lines) == 4 and json.loads(lines[0])["version"] == __version__


def test_sweep_records_failures(files, capsys):
    put, _ = files
    spec = put("s.json", {"kind": "sample", "graph": {"grid": [4, 4]}, "W": [0, 15],
                          "base": {"k": 6, "ell": 2, "family": 2}, "vary": {"delta": [0.25, 0.9]}})
    code, text, _ = run(["sweep", "--spec", spec], capsys)
    rows = sweep_rows(text)
    assert code == 0 and rows[0]["error"] == "" and "delta" in rows[1]["error"]


def test_sweep_bad_spec(files, capsys):
    put, _ = files
    assert run(["sweep", "--spec", put("s.json", [1, 2])], capsys)[0] == 2
    assert run(["sweep", "--spec", put("t.json", {"kind": "nope", "vary": {}})], capsys)[0] == 2
    assert run(["sweep", "--spec", put("u.json", {"kind": "sample", "vary": {"delta": [0.2]}})], capsys)[0] == 2
