import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from unipade.cli import main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pade_geometric(capsys):
    code, out, _ = run(["pade", "--config", CONFIGS / "pade_geometric.json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert np.allclose(data["den"], [[1, 0], [-1, 0]]) and np.allclose(data["num"], [[1, 0]])


def test_pade_partial_sum_flags(capsys, tmp_path):
    series = {"coeffs": [[0.5, 1], 2, -3, 4, 5, 6]}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(series))
    code, out, _ = run(["pade", "--series", path, "--p", 3, "--q", 0], capsys)
    assert code == 0
    assert json.loads(out)["num"] == [[0.5, 1.0], [2.0, 0.0], [-3.0, 0.0], [4.0, 0.0]]


def test_pade_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(["pade", "--config", bad], capsys)[0] == 2
    assert run(["pade", "--config", tmp_path / "missing.json"], capsys)[0] == 2
    zero = tmp_path / "z.json"
    zero.write_text(json.dumps({"series": [1, 0, 0, 0], "p": 1, "q": 1}))
    assert run(["pade", "--config", zero], capsys)[0] == 3
    assert run(["pade", "--series", CONFIGS / "geometric.json", "--p", 10, "--q", 10], capsys)[0] == 4
    nofield = tmp_path / "n.json"
    nofield.write_text(json.dumps({"p": 1, "q": 1}))
    assert run(["pade", "--config", nofield], capsys)[0] == 2


def test_pade_grid_csv(capsys, tmp_path):
    out = tmp_path / "grid.csv"
    code, _, _ = run(["pade", "--config", CONFIGS / "pade_geometric.json", "--grid", CONFIGS / "small_disk_set.json", "--out", out], capsys)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "x,y,abs_err"
    z = complex(*map(float, rows[1].split(",")[:2]))
    err = float(rows[1].split(",")[2])
    assert err == pytest.approx(abs(sum(z**k for k in range(13)) - 1 / (1 - z)), rel=1e-9)


def test_table(capsys):
    code, out, _ = run(["table", "--series", CONFIGS / "geometric.json", "--p", 2, "--q", 2], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["table"]) == 3 and data["table"][1][1]["den"] == [[1.0, 0.0], [-1.0, 0.0]] and data["table"][2][2] is None


def test_construct_lemma23(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(["construct", "lemma23", "--config", CONFIGS / "lemma23.json", "--check", "--out", out], capsys)
    assert code == 0
    data = json.loads(out.read_text())
    assert data["achieved_sup_error"] < 0.1
    assert {"params", "forbidden_d", "search_iterations"} <= set(data)


@pytest.mark.parametrize("lemma", ["lemma24", "lemma25", "lemma61", "runge"])
def test_construct_other_lemmas(capsys, tmp_path, lemma):
    out = tmp_path / "r.json"
    code, _, err = run(["construct", lemma, "--config", CONFIGS / f"{lemma}.json", "--check", "--out", out], capsys)
    assert code == 0, err


def test_construct_exit_codes(capsys, tmp_path):
    assert run(["construct", "lemma23", "--config", CONFIGS / "lemma23.json", "--p", 1, "--q", 1], capsys)[0] == 3
    cfg = json.loads((CONFIGS / "runge.json").read_text())
    cfg["K"] = cfg["D"]
    same = tmp_path / "same.json"
    same.write_text(json.dumps(cfg))
    assert run(["construct", "runge", "--config", same], capsys)[0] == 3
    cfg = json.loads((CONFIGS / "runge.json").read_text())
    cfg.update(eps=1e-9, degree_cap=5)
    hard = tmp_path / "hard.json"
    hard.write_text(json.dumps(cfg))
    assert run(["construct", "runge", "--config", hard], capsys)[0] == 5
    cfg = json.loads((CONFIGS / "lemma23.json").read_text())
    cfg.update(a=1e-300, max_halvings=3)
    tight = tmp_path / "tight.json"
    tight.write_text(json.dumps(cfg))
    assert run(["construct", "lemma23", "--config", tight], capsys)[0] == 5


def test_construct_csv(capsys):
    code, out, _ = run(["construct", "lemma23", "--config", CONFIGS / "lemma23.json", "--format", "csv"], capsys)
    assert code == 0
    errs = [float(r.split(",")[2]) for r in out.splitlines()[1:]]
    assert max(errs) < 0.1


def test_build_and_replay(capsys, tmp_path):
    tr = tmp_path / "tr.json"
    code, _, _ = run(["build", "--config", CONFIGS / "demo_build.json", "--check", "--out", tr], capsys)
    assert code == 0
    assert len(json.loads(tr.read_text())["steps"]) == 1
    code, out, _ = run(["replay", tr], capsys)
    assert code == 0 and out.strip() == "step 0 task 0: pass"
    data = json.loads(tr.read_text())
    data["steps"][0]["result"]["taylor"][1][0] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(["replay", bad], capsys)
    assert code == 6 and "FAIL" in out and "prefix" in out


def test_build_exit_codes(capsys, tmp_path):
    task = {
        "set": {"annuli": [{"c": [0, 0], "r_in": 1, "r_out": 2}], "h": 0.05, "flags": {"complement_connected": False}},
        "target": {"num": [1], "den": [0, 1]},
        "tol": 0.01,
    }
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schedule": "diagonal", "tasks": [task]}))
    assert run(["build", "--config", cfg], capsys)[0] == 3
    far = {"set": {"disks": [{"c": [3, 0], "r": 1}], "h": 0.05}, "target": [-1, 1], "tol": 0.01}
    cfg.write_text(json.dumps({"schedule": "diagonal", "tasks": [far]}))
    assert run(["build", "--config", cfg], capsys)[0] == 5
    cfg.write_text(json.dumps({"schedule": "diagonal"}))
    assert run(["build", "--config", cfg], capsys)[0] == 2
    cfg.write_text(json.dumps({"schedule": "diagonal", "tasks": []}))
    assert run(["replay", cfg], capsys)[0] == 6


def test_demos(capsys):
    assert run(["demo", "nope"], capsys)[0] == 2
    code, out, _ = run(["demo", "seleznev"], capsys)
    data = json.loads(out)
    assert code == 0 and all(s["q"] == 0 and s["partial_sum_equal"] for s in data["steps"])
    code, out, _ = run(["demo", "bounded-q"], capsys)
    data = json.loads(out)
    assert code == 0 and data["floor"] > 0 and data["n_max"] == 30


def test_outputs_are_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"t{k}.json"
        run(["build", "--config", CONFIGS / "demo_build.json", "--out", path], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_parse_error():
    proc = subprocess.run([sys.executable, "-m", "unipade.cli", "pade", "--p", "x"], capture_output=True)
    assert proc.returncode == 2
