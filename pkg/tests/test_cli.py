import json
import subprocess
import sys
from math import sqrt

import pytest

from hyperlagrange import hypergraph as hg
from hyperlagrange.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_lambda_k6(capsys):
    code, rep = run_json(capsys, "lambda", "--family", "K:6:3")
    assert code == 0 and rep["schema"] == 1 and rep["command"] == "lambda"
    assert rep["results"][0]["value"] == pytest.approx(5 / 54, abs=1e-12)
    assert set(rep["versions"]) >= {"hyperlagrange", "numpy", "scipy"}


def test_lambda_text_output(capsys):
    code, out, _ = run(capsys, "lambda", "--family", "K:5:3", "--mesh", "10")
    assert code == 0 and "lambda = 0.08" in out and "weights:" in out and "grid(10)" in out


def test_lambda_b2_28(capsys):
    code, rep = run_json(capsys, "lambda", "--family", "B2:28")
    assert rep["results"][0]["value"] == pytest.approx(0.093713824132760329588, abs=1e-12)


def test_lambda_certify_h2_file(capsys, tmp_path):
    path = tmp_path / "g.txt"
    path.write_text(hg.serialize(hg.h2(9)))
    code, rep = run_json(capsys, "lambda", "--file", str(path), "--certify", "0.0963")
    cert = rep["results"][0]["certificate"]
    assert code == 0 and cert["success"] and cert["bound"] <= 0.0963 + 1e-3


def test_lambda_certify_failure_exit(capsys):
    code, _, _ = run(capsys, "lambda", "--family", "K:8:3", "--certify", "0.1", "--certify-tol", "1e-6")
    assert code == 1


def test_assert_below(capsys):
    assert run(capsys, "lambda", "--family", "K:5:3", "--assert-below", "0.09")[0] == 0
    assert run(capsys, "lambda", "--family", "K:5:3", "--assert-below", "0.07")[0] == 1


def test_free_examples(capsys):
    code, out, _ = run(capsys, "free", "--family", "B2:10", "--forbid", "K4e")
    assert code == 0 and "FREE" in out and "NOT" not in out
    code, rep = run_json(capsys, "free", "--family", "X:4+edge", "--forbid", "K4e")
    assert code == 1
    wit = rep["results"][0]["witness"]
    assert wit["pattern"] == "K4e" and len(wit["embedding"]) == 7
    code, out, _ = run(capsys, "free", "--family", "K:5:3", "--forbid", "K5m")
    assert code == 1 and "NOT FREE" in out


def test_free_needs_forbid(capsys):
    assert run(capsys, "free", "--family", "K:5:3")[0] == 2


def test_verify_colex(capsys):
    code, rep = run_json(capsys, "verify", "--suite", "colex")
    assert code == 0 and rep["passed"]


def test_enumerate_and_sweep(capsys, tmp_path):
    out = tmp_path / "free5.txt"
    code, text, _ = run(capsys, "enumerate", "5", "--forbid", "K4e", "--out", str(out))
    assert code == 0 and "34 isomorphism classes" in text
    assert len(hg.parse_many(out.read_text())) == 34
    code, rep = run_json(capsys, "lambda", "--file", str(out), "--restarts", "8", "--assert-below", str(sqrt(3) / 18))
    assert code == 0 and len(rep["results"]) == 34
    assert max(r["value"] for r in rep["results"]) < sqrt(3) / 18


def test_enumerate_jsonl_roundtrip(capsys, tmp_path):
    out = tmp_path / "g.jsonl"
    run(capsys, "enumerate", "4", "--format", "jsonl", "--out", str(out))
    code, rep = run_json(capsys, "lambda", "--file", str(out), "--restarts", "4")
    assert code == 0 and len(rep["results"]) == 5


def test_enumerate_capacity(capsys):
    code, _, err = run(capsys, "enumerate", "7")
    assert code == 3 and "capacity" in err


def test_densify_and_extend(capsys):
    code, out, _ = run(capsys, "densify", "--family", "K4e")
    assert code == 0 and hg.parse(out.split("\n", 1)[1]) == hg.complete(4, 3)
    code, out, _ = run(capsys, "extend", "--family", "K4e")
    G = hg.parse(out.split("\n", 1)[1])
    assert code == 0 and (G.n, G.m) == (19, 17)


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "lambda", "--family", "Q:9")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 3\n1 2\n")
    code, _, err = run(capsys, "lambda", "--file", str(bad))
    assert code == 2 and "line 2" in err
    assert run(capsys, "lambda", "--file", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_json_is_deterministic(capsys):
    args = ("lambda", "--family", "X:2", "--seed", "5")
    a = run_json(capsys, *args)[1]
    b = run_json(capsys, *args)[1]
    assert a == b
    assert "wall_time" not in a
    assert "wall_time" in run_json(capsys, *args, "--timing")[1]


def test_seed_is_recorded(capsys):
    rep = run_json(capsys, "lambda", "--family", "K:4:3", "--seed", "9")[1]
    assert rep["config"]["seed"] == 9


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nrestarts = 7\nseed = 3\n")
    rep = run_json(capsys, "lambda", "--family", "K:4:3", "--config", str(cfg))[1]
    assert rep["config"]["restarts"] == 7 and rep["config"]["seed"] == 3
    rep = run_json(capsys, "lambda", "--family", "K:4:3", "--config", str(cfg), "--seed", "4")[1]
    assert rep["config"]["seed"] == 4
    cfg.write_text("colour = blue\n")
    assert run(capsys, "lambda", "--family", "K:4:3", "--config", str(cfg))[0] == 2


def test_cache_hit_remaps_isomorphic_input(capsys, tmp_path):
    cache = tmp_path / "cache"
    G = hg.b2(7)
    H = hg.relabel(G, {v: 8 - v for v in range(1, 8)})
    (tmp_path / "g.txt").write_text(hg.serialize(G))
    (tmp_path / "h.txt").write_text(hg.serialize(H))
    a = run_json(capsys, "lambda", "--file", str(tmp_path / "g.txt"), "--cache", str(cache))[1]
    assert any(cache.iterdir())
    b = run_json(capsys, "lambda", "--file", str(tmp_path / "h.txt"), "--cache", str(cache))[1]
    ra, rb = a["results"][0], b["results"][0]
    assert rb["value"] == pytest.approx(ra["value"], abs=1e-15)
    assert rb["weights"][6] == pytest.approx(ra["weights"][0], abs=1e-12)


def test_out_writes_report(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, text, _ = run(capsys, "lambda", "--family", "K:4:3", "--json", "--out", str(out))
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["results"][0]["value"] == pytest.approx(1 / 16)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hyperlagrange", "lambda", "--family", "K:5:3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "0.08" in proc.stdout
