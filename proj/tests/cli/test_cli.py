"""Command-line tool: outputs against the published schemas, exit codes, and a
serve smoke test."""

import json
import os
import socket
import subprocess
import time
import urllib.error
import urllib.request
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
DATA = ROOT / "tests" / "data"
CLI = os.environ.get("EHRLAB_CLI", str(ROOT / "build" / "tools" / "ehrlab"))

K3 = {"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}
P3 = {"n": 3, "edges": [[0, 1], [1, 2]]}


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(*args, stdin=None, env=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, input=stdin,
                          env={**os.environ, **(env or {})}, timeout=600)


def ok(name, *args, **kw):
    proc = run(*args, **kw)
    assert proc.returncode == 0, proc.stderr
    out = json.loads(proc.stdout)
    jsonschema.validate(out, schema(name))
    return out


def failure(code, *args, **kw):
    proc = run(*args, **kw)
    assert proc.returncode == code, (proc.stdout, proc.stderr)
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    jsonschema.validate(err, schema("error"))
    return err


@pytest.fixture
def graphs(tmp_path):
    (tmp_path / "k3.json").write_text(json.dumps(K3))
    (tmp_path / "p3.json").write_text(json.dumps(P3))
    (tmp_path / "p3.txt").write_text("n=3\n0 1\n1 2\n")
    return tmp_path


def test_schemas_are_valid():
    for path in SCHEMAS.glob("*.schema.json"):
        jsonschema.Draft7Validator.check_schema(json.loads(path.read_text()))


def test_solve_examples(graphs):
    out = ok("solve", "solve", "--left", graphs / "k3.json", "--right", graphs / "p3.json", "--k", 2)
    assert out["winner"] == "Spoiler"
    out = ok("solve", "solve", "--left", graphs / "k3.json", "--right", graphs / "p3.txt", "--k", 1)
    assert out["winner"] == "Duplicator"
    out = ok("solve", "solve", "--left", graphs / "p3.json", "--right", graphs / "p3.txt", "--k", 3, "--dehr")
    assert out["variant"] == "DEHR" and out["winner"] == "Duplicator"


def test_budget_caps_search(graphs):
    err = failure(1, "solve", "--left", graphs / "k3.json", "--right", graphs / "p3.json", "--k", 3,
                  env={"EHRLAB_BUDGET": "2"})
    assert err["error"] == "BudgetExceeded"
    err = failure(1, "solve", "--left", graphs / "k3.json", "--right", graphs / "p3.json", "--k", 3, "--budget", 2)
    assert err["error"] == "BudgetExceeded"


def test_sample_classify_types(tmp_path):
    out_file = tmp_path / "g.json"
    first = ok("sample", "sample", "--n", 40, "--c", 1.2, "--seed", 3)
    jsonschema.validate(first["graph"], schema("graph"))
    assert ok("sample", "sample", "--n", 40, "--c", 1.2, "--seed", 3) == first
    ok("sample", "sample", "--n", 40, "--c", 1.2, "--seed", 3, "--out", out_file)
    assert json.loads(out_file.read_text()) == first["graph"]

    census = ok("classify", "classify", "--in", out_file)
    assert sum(c["vertices"] for c in census["components"]) == 40
    assert sum(census["counts"].values()) == len(census["components"])
    types = ok("types", "types", "--in", out_file, "--m", 2, "--k", 2, "--s", 6)
    assert len(types["components"]) == len(census["components"])


def test_completion_round_trips_built_model(tmp_path):
    spec = json.loads((DATA / "two_cycles_spec.json").read_text())
    model = tmp_path / "model.txt"
    built = ok("build_model", "build-model", "--spec", DATA / "two_cycles_spec.json", "--out", model)
    assert built["counts"]["complex"] == 0
    v = spec["completion"]
    out = ok("completion", "completion", "--in", model, "--k", v["k"], "--M1", v["M1"], "--M2", v["M2"])
    assert out["completion"] == v
    assert out["consistency"]["ok"]


def test_completion_of_source_graph():
    out = ok("completion", "completion", "--in", DATA / "two_cycles.json", "--k", 2, "--M1", 4, "--M2", 1)
    assert out["completion"]["counts"][0] == {"s": 3, "m": 0, "type": "[(),(),()]", "n": 1}


def test_verify_theory(tmp_path):
    g = tmp_path / "forest.json"
    g.write_text(json.dumps({"n": 4, "edges": [[0, 1], [2, 3]]}))
    out = ok("theory", "verify-theory", "--in", g, "--ell-max", 4, "--m", 1, "--k", 1)
    assert out["holds"] is False  # no isolated vertex
    g.write_text(json.dumps({"n": 5, "edges": [[0, 1], [2, 3]]}))
    assert ok("theory", "verify-theory", "--in", g, "--ell-max", 4, "--m", 1, "--k", 1)["holds"] is True
    failure(1, "verify-theory", "--in", g, "--ell-max", 2, "--m", 8, "--k", 3)


def test_estimate(tmp_path):
    out = ok("estimate", "estimate", "--event", "no-short-cycles", "--M1", 3, "--n", 3000, "--c", 1,
             "--trials", 2000, "--seed", 7)
    assert abs(out["point"] - 0.846) < 0.03
    assert out["params"] == {"M1": 3}
    csv = tmp_path / "trials.csv"
    out = ok("estimate", "estimate", "--event", "key-count", "--s", 3, "--d", 1, "--W", 0, "--n", 200, "--c", 1.5,
             "--trials", 50, "--seed", 1, "--csv", csv, "--workers", 2)
    lines = csv.read_text().splitlines()
    assert lines[0] == "trial,value" and len(lines) == 51
    assert out["kind"] == "mean"
    out = ok("estimate", "estimate", "--event", "completion", "--completion", DATA / "two_cycles_spec.json",
             "--n", 10, "--c", 1, "--trials", 5, "--seed", 1)
    assert out["event"].startswith("completion")


def test_play_modes(tmp_path):
    g = tmp_path / "g.json"
    ok("sample", "sample", "--n", 30, "--c", 1, "--seed", 5, "--out", g)
    for spoiler in ("random", "adversarial"):
        out = ok("session", "play", "--left", g, "--right", g, "--k", 2, "--enrich", "--spoiler", spoiler, "--seed", 4)
        assert out["status"]["state"] == "DuplicatorHeld"
        assert all(not r["audit"] for r in out["transcript"]["rounds"])

    proc = run("play", "--left", g, "--right", g, "--k", 2, "--enrich", "--spoiler", "stdin",
               stdin="left 3\nnonsense\nright 99\nright 4\n")
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    moves = [json.loads(line) for line in lines[:2]]
    for m in moves:
        jsonschema.validate(m, schema("move"))
    assert moves[0]["duplicator_reply"] == {"side": "right", "vertex": moves[0]["transcript_delta"]["y"]}
    final = json.loads("\n".join(lines[2:]))
    jsonschema.validate(final, schema("session"))
    assert final["status"]["state"] == "DuplicatorHeld"
    errors = [json.loads(line)["error"] for line in proc.stderr.strip().splitlines()]
    assert errors == ["ParseError", "IllegalMove"]


def test_play_reports_missing_components(graphs):
    out = ok("session", "play", "--left", graphs / "k3.json", "--right", graphs / "p3.json", "--k", 2,
             "--spoiler", "minimax")
    assert out["status"]["state"] in ("ResourceExhausted", "SpoilerBroke")


def test_exit_codes(graphs):
    assert failure(2, "classify", "--in", graphs / "missing.json")["error"] == "ParseError"
    assert failure(2, "sample", "--n", 10)["error"] == "ParseError"
    assert failure(1, "estimate", "--event", "nope", "--n", 10, "--c", 1, "--trials", 2, "--seed", 1)["error"] == \
        "InvalidArgument"
    assert failure(1, "sample", "--n", 3, "--c", 5, "--seed", 1)["error"] == "InvalidArgument"
    bad = graphs / "bad.json"
    bad.write_text('{"n": 2, "edges": [[0, 7]]}')
    assert failure(2, "classify", "--in", bad)["error"] in ("ParseError", "InvalidGraph")
    bad.write_text("{oops")
    assert failure(2, "classify", "--in", bad)["error"] == "ParseError"
    assert failure(2, "estimate", "--event", "no-short-cycles", "--params", "[1]", "--n", 10, "--c", 1,
                   "--trials", 2, "--seed", 1)["error"] == "ParseError"
    assert run().returncode == 2


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def http(port, method, path, body=None):
    req = urllib.request.Request(f"http://127.0.0.1:{port}{path}", method=method,
                                 data=None if body is None else json.dumps(body).encode(),
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=60) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def test_serve_with_persistence(tmp_path):
    port = free_port()
    persist = tmp_path / "sessions"

    def start():
        proc = subprocess.Popen([CLI, "serve", "--port", str(port), "--persist", str(persist)],
                                stderr=subprocess.PIPE, text=True)
        for _ in range(100):
            try:
                if http(port, "GET", "/health")[0] == 200:
                    return proc
            except OSError:
                time.sleep(0.05)
        proc.kill()
        raise RuntimeError("server did not start")

    proc = start()
    try:
        status, created = http(port, "POST", "/game/new", {"left_graph": K3, "right_graph": K3, "k": 2})
        assert status == 200
        sid = created["session_id"]
        jsonschema.validate(created["initial_state"], schema("session"))
        status, move = http(port, "POST", f"/game/{sid}/spoiler-move", {"side": "left", "vertex": 0})
        assert status == 200
        jsonschema.validate(move, schema("move"))
        status, err = http(port, "GET", "/game/unknown")
        assert status == 404
        jsonschema.validate(err, schema("error"))
        before = http(port, "GET", f"/game/{sid}")[1]
    finally:
        proc.terminate()
        proc.wait(timeout=30)

    proc = start()
    try:
        assert http(port, "GET", f"/game/{sid}")[1] == before
        status, move = http(port, "POST", f"/game/{sid}/spoiler-move", {"side": "right", "vertex": 1})
        assert status == 200 and move["status"]["state"] == "DuplicatorHeld"
        assert http(port, "POST", f"/game/{sid}/spoiler-move", {"side": "right", "vertex": 1})[0] == 409
        status, sample = http(port, "POST", "/sample", {"n": 30, "c": 1.0, "seed": 2})
        assert status == 200
        jsonschema.validate(sample, schema("sample"))
        status, est = http(port, "POST", "/estimate",
                           {"event": "edge-count", "n": 30, "c": 1.0, "trials": 20, "seed": 2})
        assert status == 200
        jsonschema.validate(est, schema("estimate"))
    finally:
        proc.terminate()
        proc.wait(timeout=30)
