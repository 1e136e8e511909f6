import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from lorentzfp import __version__
from lorentzfp.approx import random_orthochronous
from lorentzfp.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from lorentzfp.lorentz import RATIONAL, REAL, basic_boost, compose, named_generator

GOLDEN = Path(__file__).parent / "golden"


def schema_of(value):
    """Key structure and value types of a report, for golden comparison."""
    if isinstance(value, dict):
        return {k: schema_of(v) for k, v in sorted(value.items())}
    if isinstance(value, list):
        return [schema_of(value[0])] if value else []
    if value is None:
        return "null"
    return type(value).__name__


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return path
    return write


def matrix_json(t):
    return t.m.to_json()


# -- examples ----------------------------------------------------------------


def test_chainprime_k3(capsys):
    code, out, _ = run(capsys, "chainprime", "--k", 3, "--pretty")
    assert code == EXIT_OK and out.splitlines()[0] == "23"
    code, report, _ = run_json(capsys, "chainprime", "--k", 3)
    assert report["result"]["p"] == 23 and report["result"]["chain_length"] == 4
    assert report["version"] == __version__ and report["tool"] == "lorentzfp"
    assert report["params"]["k"] == 3 and report["params"]["mod8"] is True


def test_enumerate_dickson(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", 7, "--check-dickson", "--pretty")
    assert code == EXIT_OK
    assert out.split() == ["order", "117600", "formula", "117600", "EQUAL"]
    code, report, _ = run_json(capsys, "enumerate", "--p", 7, "--check-dickson")
    assert report["result"]["verdict"] == "EQUAL"


def test_approx_bad_input(capsys, files):
    bad = files("bad.json", {"domain": "real", "rows": [[1, 0], [0, 1]]})
    code, out, err = run(capsys, "approx", "--in", bad, "--k", 3)
    assert code == EXIT_USAGE and out == ""
    assert len(err.strip().splitlines()) == 1 and "rows" in err


@pytest.mark.parametrize("content", ["{oops", "[]", '{"domain": "real"}',
                                     '{"domain": {"fp": 7}, "rows": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}'])
def test_approx_parse_diagnostics(capsys, files, content):
    code, out, err = run(capsys, "approx", "--in", files("m.json", content), "--k", 3)
    assert code == EXIT_USAGE and len(err.strip().splitlines()) == 1


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "approx", "--in", tmp_path / "nope.json", "--k", 3)
    assert code == EXIT_USAGE and "cannot read" in err


def test_not_lorentz(capsys, files):
    path = files("m.json", {"domain": "rational", "rows": [[2, 0, 0, 0], [0, 1, 0, 0],
                                                           [0, 0, 1, 0], [0, 0, 0, 1]]})
    code, _, err = run(capsys, "approx", "--in", path, "--k", 3)
    assert code == EXIT_USAGE and "NotLorentz" in err


@pytest.mark.parametrize("argv", [[], ["chainprime"], ["frobnicate"], ["chainprime", "--k", "0"],
                                  ["chainprime", "--k", "x"], ["acceptance", "--only", "12"]])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == ""
    assert err.startswith("lorentzfp: error:")


# -- exit code 2 -------------------------------------------------------------


def test_approx_bounds(capsys, files):
    t = random_orthochronous(np.random.default_rng(3), 8.0)
    path = files("t.json", matrix_json(t))
    code, report, _ = run_json(capsys, "approx", "--in", path, "--k", 100, "--epsilon", 0.5, "--M", 10)
    assert code == EXIT_OK and report["result"]["within_epsilon"] and report["result"]["within_M"]
    code, report, _ = run_json(capsys, "approx", "--in", path, "--k", 100, "--epsilon", 1e-9)
    assert code == EXIT_FAILED and not report["result"]["within_epsilon"]
    code, report, _ = run_json(capsys, "approx", "--in", path, "--k", 100, "--M", 3)
    assert code == EXIT_FAILED and not report["result"]["within_M"]


def test_verify(capsys, files):
    code, report, _ = run_json(capsys, "verify", "--a-k", 1, "--p", 7)
    assert code == EXIT_OK and report["result"]["valid"] and not report["result"]["bound_check"]
    code, _, _ = run(capsys, "verify", "--a-k", 1, "--p", 7, "--require-bound")
    assert code == EXIT_FAILED
    colliding = [matrix_json(basic_boost(a, RATIONAL)) for a in (1, 2, 9)]
    path = files("a.json", {"matrices": colliding})
    code, report, _ = run_json(capsys, "verify", "--set", path, "--p", 7)
    assert code == EXIT_FAILED and not report["result"]["injective"]
    path = files("a_list.json", colliding[:2])
    code, report, _ = run_json(capsys, "verify", "--set", path)
    # default prime: chain depth taken from the measured bound of A u AA
    assert code == EXIT_OK and report["result"]["effective_bound"] == 17
    p = report["result"]["p"]
    assert p % 8 == 7 and all(pow(n, (p - 1) // 2, p) == 1 for n in range(1, 18))


def test_verify_rejects_float_sets(capsys, files):
    path = files("a.json", [matrix_json(basic_boost(2.0, REAL))])
    code, _, err = run(capsys, "verify", "--set", path, "--p", 7)
    assert code == EXIT_USAGE and "rational" in err


def test_search_exhausted(capsys):
    code, out, err = run(capsys, "theorem1-prime", "--k", 1, "--effective-bound", 1000, "--limit", 50)
    assert code == EXIT_FAILED and out == "" and "SearchExhausted" in err


# -- the other commands ------------------------------------------------------


def test_theorem1_prime(capsys):
    code, report, _ = run_json(capsys, "theorem1-prime", "--k", 2)
    assert code == EXIT_OK and report["result"]["p"] == 2_097_223
    code, report, _ = run_json(capsys, "theorem1-prime", "--k", 2, "--k-squared")
    assert report["result"]["chain_depth"] == 4
    p = report["result"]["p"]
    assert all(pow(n, (p - 1) // 2, p) == 1 for n in range(1, 5))


def test_retract_components(capsys, files):
    base = random_orthochronous(np.random.default_rng(4), 5.0)
    for g in ("time-reversal", "parity", "space-time-reversal"):
        t = compose(named_generator(g, REAL), base)
        code, report, _ = run_json(capsys, "retract", "--in", files("t.json", matrix_json(t)),
                                   "--k", 200, "--epsilon", 0.1)
        assert code == EXIT_OK
        assert report["result"]["component"] == t.component
        assert report["result"]["error"] < 0.1


def test_retract_fixed_point(capsys, files):
    b2 = basic_boost(Fraction(2), RATIONAL)
    code, report, _ = run_json(capsys, "retract", "--in", files("b.json", matrix_json(b2)), "--k", 2)
    assert code == EXIT_OK and report["result"]["unchanged"] and report["result"]["error"] == 0


def test_explore(capsys):
    code, report, _ = run_json(capsys, "explore", "--p", 23)
    result = report["result"]
    assert code == EXIT_OK
    assert result["boost_group"] == {"generator": 2, "order": 11}
    assert result["antichronous_pair"] == [9, 9]
    assert len(result["velocity_bounds"]) == 11
    code, report, _ = run_json(capsys, "explore", "--p", 7)
    assert report["result"]["antichronous_pair"] is None
    code, _, _ = run(capsys, "explore", "--p", 11)
    assert code == EXIT_USAGE


def test_acceptance_subset(capsys):
    code, report, _ = run_json(capsys, "acceptance", "--only", 1, 6, 7, 9)
    assert code == EXIT_OK and report["result"]["passed"]
    assert [c["criterion"] for c in report["result"]["criteria"]] == [1, 6, 7, 9]


# -- determinism and schemas -------------------------------------------------


def test_byte_identical_reports(capsys, files):
    path = files("t.json", matrix_json(random_orthochronous(np.random.default_rng(5), 4.0)))
    for argv in (["approx", "--in", path, "--k", 50], ["explore", "--p", 23],
                 ["verify", "--a-k", 1, "--p", 7]):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


def test_subprocess_entry_point():
    out = subprocess.run([sys.executable, "-m", "lorentzfp.cli", "chainprime", "--k", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    golden = (GOLDEN / "chainprime_k3.json").read_text()
    assert out.stdout == golden


SCHEMA_CASES = {
    "chainprime": ["chainprime", "--k", 3],
    "theorem1-prime": ["theorem1-prime", "--k", 1],
    "approx": ["approx", "--in", "{matrix}", "--k", 20, "--epsilon", 1, "--M", 10],
    "retract": ["retract", "--in", "{matrix}", "--k", 20],
    "verify": ["verify", "--a-k", 1, "--p", 7],
    "enumerate": ["enumerate", "--p", 3, "--check-dickson"],
    "explore": ["explore", "--p", 23],
    "acceptance": ["acceptance", "--only", 7],
}


@pytest.mark.parametrize("name", sorted(SCHEMA_CASES))
def test_report_schema(capsys, files, name):
    matrix = files("m.json", matrix_json(random_orthochronous(np.random.default_rng(6), 4.0)))
    argv = [matrix if a == "{matrix}" else a for a in SCHEMA_CASES[name]]
    _, report, _ = run_json(capsys, *argv)
    expected = json.loads((GOLDEN / f"{name}.schema.json").read_text())
    assert schema_of(report) == expected
