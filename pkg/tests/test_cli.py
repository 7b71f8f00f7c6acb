import io
import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from bispans import cli, serialize
from bispans.arrfib import ar_canon, ar_compose, classify_details, cocart_lift, ev0
from bispans.bispancat import bispan_canon, bispan_compose, bispan_id
from bispans.generate import random_armor, random_arobj, random_bispan, random_fun, random_span
from bispans.finset import identity
from bispans.spancat import Span, span_canon, span_compose
from bispans.suites import SuiteResult

GOLDEN = Path(__file__).parent / "golden"


def run(*argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, value):
    path = tmp_path / name
    path.write_text(serialize.dumps(value) + "\n")
    return str(path)


def test_canon_of_identity():
    doc = serialize.dumps(bispan_id(1))
    code, out, _ = run("canon", doc)
    assert code == 0
    got = json.loads(out)
    assert got["autCount"] == 1 and got["signature"] == [[0, [0]]]


def test_eval_x_squared_at_three():
    doc = serialize.dumps(serialize.loads(GOLDEN.joinpath("x_squared.json").read_text()))
    code, out, _ = run("eval", doc, "--semiring", "naturals", "--vector", "[3]")
    assert code == 0 and json.loads(out)["entries"] == [9]


def test_check_functoriality_passes():
    code, out, _ = run("check", "functoriality", "--seed", "42", "--trials", "1000", "--max-size", "3")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_check_failure_prints_counterexample(monkeypatch):
    def failing(suite, seed, trials, max_size, threads=1):
        return SuiteResult(suite, seed, trials, max_size, 1, {"trial": 0, "why": "forced"})
    monkeypatch.setattr(cli, "run_suite", failing)
    code, out, _ = run("check", "mate", "--seed", "1")
    assert code == 1
    assert out.count("\n") == 1
    assert json.loads(out)["counterexample"] == {"trial": 0, "why": "forced"}


@pytest.mark.parametrize("argv,error", [
    (["canon", '{"kind":"span","X":1,"Y":1,"Z":1,"left":[2],"right":[0]}'], "SchemaViolation"),
    (["canon", "/no/such/file.json"], "FileNotFound"),
    (["eval", '{"kind":"bispan","S":1,"E":0,"B":0,"T":1,"s":[],"p":[],"t":[]}', "--vector", "[1]"],
     "UsageError"),
    (["check", "nonsense"], "UsageError"),
    (["enum-hom", "--src", "1", "--tgt", "1"], "UsageError"),
    (["compose", "bispan", '{"kind":"bispan","S":1,"E":0,"B":0,"T":2,"s":[],"p":[],"t":[]}',
      '{"kind":"bispan","S":1,"E":0,"B":0,"T":1,"s":[],"p":[],"t":[]}'], "BoundaryMismatch"),
    (["eval", '{"kind":"bispan","S":1,"E":0,"B":0,"T":1,"s":[],"p":[],"t":[]}',
      "--semiring", "boolean", "--vector", "[2]"], "SchemaViolation"),
])
def test_input_errors_exit_two_with_one_line_record(argv, error):
    code, out, err = run(*argv)
    assert code == 2 and out == ""
    assert err.count("\n") == 1
    record = json.loads(err)
    assert record["error"] == error and record["message"]


def test_schema_violation_record_has_path():
    _, _, err = run("normalize", '{"kind":"finfun","dom":1,"cod":1,"map":[1]}')
    assert json.loads(err)["path"] == "/map/0"


def test_stdin_input(monkeypatch):
    text = GOLDEN.joinpath("composite.json").read_text()
    code, out, _ = run("normalize", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 0 and out == text


def test_compose_then_canon_matches_library(tmp_path):
    rng = random.Random(5)
    for i in range(40):
        f = random_bispan(rng, 2, 2, 3)
        g = random_bispan(rng, 2, 1, 3)
        _, composite, _ = run("compose", "bispan", write(tmp_path, "f.json", f), write(tmp_path, "g.json", g))
        assert composite == serialize.dumps(bispan_compose(g, f)) + "\n"
        _, canon, _ = run("canon", write(tmp_path, "c.json", serialize.loads(composite)))
        assert canon == serialize.dumps(bispan_canon(bispan_compose(g, f))) + "\n"

        a, b = random_span(rng, 2, 3, 3), random_span(rng, 3, 1, 3)
        _, composite, _ = run("compose", "span", write(tmp_path, "a.json", a), write(tmp_path, "b.json", b))
        _, canon, _ = run("canon", composite.strip())
        assert canon == serialize.dumps(span_canon(span_compose(b, a))) + "\n"


def test_armor_commands_match_library(tmp_path):
    rng = random.Random(6)
    for _ in range(30):
        m1 = random_armor(rng, random_arobj(rng, 2), 2)
        m2 = random_armor(rng, m1.tgt, 2)
        p1, p2 = write(tmp_path, "m1.json", m1), write(tmp_path, "m2.json", m2)
        _, out, _ = run("compose", "armor", p1, p2)
        assert out == serialize.dumps(ar_compose(m2, m1)) + "\n"
        _, out, _ = run("canon", p1)
        assert out == serialize.dumps(ar_canon(m1)) + "\n"
        _, out, _ = run("ev0", p1)
        assert out == serialize.dumps(ev0(m1)) + "\n"
        _, out, _ = run("classify", p1)
        assert json.loads(out) == json.loads(json.dumps(classify_details(m1)))
        f = random_fun(rng, rng.randint(0, 2), 2)
        span, obj = Span(f, identity(f.dom)), random_arobj(rng, 2, base=2)
        _, out, _ = run("lift", serialize.dumps(span), serialize.dumps(obj))
        assert out == serialize.dumps(cocart_lift(span, obj)) + "\n"


def test_enum_hom_counts_one_to_one_polynomials():
    code, out, _ = run("enum-hom", "--src", "1", "--tgt", "1", "--max-b", "2", "--max-fiber", "2")
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "bispan-hom" and doc["count"] == 10
    code, out, _ = run("enum-hom", "--src", "1", "--tgt", "1", "--max-apex", "2")
    assert code == 0 and json.loads(out)["kind"] == "span-hom"


@pytest.mark.parametrize("golden,argv", [
    ("composite.json", ["compose", "bispan", "x_plus_one.json", "x_squared.json"]),
    ("composite_canon.json", ["canon", "composite.json"]),
    ("composite_eval_3.json", ["eval", "composite.json", "--semiring", "naturals", "--vector", "[3]"]),
    ("composite_eval_x.json", ["eval", "composite.json", "--vector", "vector_x.json"]),
])
def test_golden_outputs(golden, argv, monkeypatch):
    monkeypatch.chdir(GOLDEN)
    code, out, _ = run(*argv)
    assert code == 0
    assert out == GOLDEN.joinpath(golden).read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bispans", "canon", "composite.json"],
                          cwd=GOLDEN, capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == GOLDEN.joinpath("composite_canon.json").read_text()
