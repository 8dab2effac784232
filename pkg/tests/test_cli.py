import json
import shutil
import subprocess
import sys
from importlib import resources

import pytest

from wittkit import modules as wm
from wittkit.cli import main
from wittkit.io import parse_element, parse_spec
from wittkit.io.report import strip_timing, validate_report
from wittkit.modules import module_axiom_residual

CORPUS = resources.files("wittkit").joinpath("data/specs")


def corpus(name):
    return str(CORPUS.joinpath(f"{name}.spec"))


@pytest.fixture
def a00(tmp_path):
    p = tmp_path / "a00.spec"
    p.write_text("signature = 1, 1, 1\ngenerators = [[1, 0], [0, 1]]\n"
                 "module A = GeneralAb alpha=[0, 0] b=0\n", encoding="utf-8")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_structure_suite_exits_zero(capsys):
    code, out, _ = run(capsys, "structure", "--spec", corpus("shift_111"), "--trials", "500", "--seed", "7")
    assert code == 0
    assert out.startswith("suite structure: match")
    assert "[PASS] structure/jacobi" in out and "3 passed, 0 failed" in out


def test_simplicity_names_the_trivial_vector(capsys, a00):
    code, out, _ = run(capsys, "simplicity", "--spec", a00, "--format", "json")
    assert code == 0
    rep = json.loads(out)
    (check,) = rep["checks"]
    assert check["status"] == "pass"
    assert "trivial_submodule_found" in check["observed"] and "v[0,0; 0,0]" in check["observed"]


def test_unknown_suite_gives_usage():
    exe = shutil.which("wittkit")
    cmd = [exe] if exe else [sys.executable, "-m", "wittkit.cli"]
    r = subprocess.run(cmd + ["frobnicate", "--spec", corpus("minimal_010")], capture_output=True, text=True)
    assert r.returncode == 2
    assert "usage: wittkit" in r.stderr and "invalid choice" in r.stderr


@pytest.mark.parametrize("argv,fragment", [
    (["structure", "--spec", "/nonexistent/file.spec"], "cannot read spec"),
    (["simplicity", "--spec", corpus("minimal_010"), "--module", "nope"], "nope"),
    (["simplicity", "--spec", corpus("minimal_010"), "--margin", "0"], "margin"),
    (["structure", "--spec", corpus("minimal_010"), "--trials", "0"], "trials"),
    (["structure", "--spec", corpus("minimal_010"), "--window-gamma", "-1"], "nonnegative"),
])
def test_usage_errors_exit_two(capsys, argv, fragment):
    code, _, err = run(capsys, *argv)
    assert code == 2 and fragment in err


def test_parse_error_is_positioned(capsys, tmp_path):
    p = tmp_path / "bad.spec"
    p.write_text("signature = 0, 1, 1\ngenerators = [[1, 0], [2, 0]]\n", encoding="utf-8")
    code, _, err = run(capsys, "structure", "--spec", str(p))
    assert code == 2 and err.startswith(f"{p}:2:13: degenerate lattice")


def test_mismatch_exits_one_with_replayable_counterexample(capsys, monkeypatch):
    honest = wm.Module._act_ab

    def dropped_second_term(self, g, v, acc, scale):
        sub: dict = {}
        honest(self, g, v, sub, scale)
        tgt_idx = tuple(a + b for a, b in zip(g[1], v[1]))
        for k, c in sub.items():
            if k[1] == tgt_idx:
                acc[k] = acc.get(k, 0) + c

    monkeypatch.setattr(wm.Module, "_act_ab", dropped_second_term)
    spec_path = corpus("shift_111")
    code, out, _ = run(capsys, "module-axioms", "--spec", spec_path, "--format", "json", "--trials", "50")
    assert code == 1
    rep = json.loads(out)
    validate_report(rep)
    bad = [c for c in rep["checks"] if c["status"] == "fail"]
    assert bad and rep["status"] == "mismatch"
    spec = parse_spec(open(spec_path, encoding="utf-8").read())
    name = bad[0]["key"].split("/")[1]
    M = spec.module(name)
    ce = bad[0]["counterexample"]
    g, h = parse_element(ce["g"], M.W), parse_element(ce["h"], M.W)
    v = parse_element(ce["v"], M)
    assert module_axiom_residual(M, g, h, v) == parse_element(ce["residual"], M)


@pytest.mark.parametrize("suite,spec", [
    ("structure", "minimal_010"), ("module-axioms", "shift_111"), ("claims", "claims_111"),
    ("simplicity", "simplicity_101"), ("constraints", "constraints_101"), ("weights", "weights_110"),
])
def test_json_reports_validate_and_repeat(capsys, suite, spec):
    args = [suite, "--spec", corpus(spec), "--format", "json", "--trials", "30", "--seed", "4"]
    if suite == "claims":
        args += ["--window-gamma", "2", "--window-level", "2"]
    code, first, _ = run(capsys, *args)
    code2, second, _ = run(capsys, *args)
    assert code == code2 == 0
    a, b = json.loads(first), json.loads(second)
    validate_report(a)
    assert a["schema_version"] == 1 and a["seed"] == 4
    assert strip_timing(a) == strip_timing(b)


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("WITTKIT_SEED", "11")
    _, out, _ = run(capsys, "structure", "--spec", corpus("minimal_010"), "--format", "json", "--trials", "5")
    assert json.loads(out)["seed"] == 11
    _, out, _ = run(capsys, "structure", "--spec", corpus("minimal_010"), "--format", "json",
                    "--trials", "5", "--seed", "3")
    assert json.loads(out)["seed"] == 3


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "weights", "--spec", corpus("weights_110"), "--format", "json",
                       "--out", str(target))
    assert code == 0 and out == ""
    validate_report(json.loads(target.read_text(encoding="utf-8")))
