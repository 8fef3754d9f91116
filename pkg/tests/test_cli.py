import json
import subprocess
import sys

import pytest

from riccati_chain.canon import same
from riccati_chain.cli import main
from riccati_chain.parser import parse


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_spec(tmp_path, data, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_chain_second_order_unit_constant(capsys):
    code, out, _ = run_cli(["chain", "-n", "2", "-c", "1"], capsys)
    assert code == 0
    assert out.strip() == "w'' + 3*w*w' + a2(x)*w' + w^3 + a2(x)*w^2 + a1(x)*w + a0(x) = 0"


def test_linearize(capsys):
    code, out, _ = run_cli(["linearize", "-n", "2"], capsys)
    assert out.strip() == "phi'''(x) + a2(x)*phi''(x) + a1(x)*phi'(x) + c*a0(x)*phi(x) = 0"


def test_depress_fourth_order(capsys):
    code, out, _ = run_cli(["depress", "--order", "4", "--opaque"], capsys)
    assert code == 0
    lines = dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)
    assert lines["gauge"] == "exp(-1/4*Int(a3(x)))"
    assert same(parse(lines["v''(x)"]), parse("a2(x) - 3*a3(x)^2/8 - 3*a3'(x)/2"))
    assert same(parse(lines["v'(x)"]), parse("a1(x) - a2(x)*a3(x)/2 + a3(x)^3/8 - a3''(x)"))


def test_depress_explicit_coefficients(capsys):
    code, out, _ = run_cli(["depress", "--order", "2", "--coeffs", "q(x),p(x)"], capsys)
    assert "v(x): -1/4*p(x)^2 - 1/2*p'(x) + q(x)" in out


def test_schwarzian_of_mobius_map(capsys):
    code, out, _ = run_cli(["schwarzian", "(2*x+1)/(x+3)", "--at", "0,1,2"], capsys)
    values = [float(line.split("\t")[1]) for line in out.splitlines()]
    assert len(values) == 3 and all(abs(v) < 1e-10 for v in values)


def test_parse_error_exit_code(capsys):
    code, _, err = run_cli(["schwarzian", "x +", "--at", "0"], capsys)
    assert code == 2 and "byte offset 3" in err


def test_verify_with_plot(tmp_path, capsys):
    plot = tmp_path / "residual.txt"
    code, out, _ = run_cli(["verify", "-n", "2", "--interval", "0:0.8", "--plot", str(plot)], capsys)
    assert code == 0
    assert "roundtrip n=2" in out and "PASS" in out
    rows = [line.split() for line in plot.read_text().splitlines()[1:]]
    assert len(rows) > 700 and all(len(r) == 2 for r in rows)


def test_run_pass(tmp_path, capsys):
    spec = write_spec(tmp_path, {"n": 3, "checks": ["chain", "linearize", "depress", "roundtrip"],
                                 "numeric": {"interval": [0, 0.8]}})
    out = tmp_path / "report.json"
    code, _, err = run_cli(["run", "--spec", spec, "--out", str(out)], capsys)
    assert code == 0, err
    report = json.loads(out.read_text())
    assert report["passed"]
    chain = report["checks"][0]
    assert chain["audit"]["matches"] and len(chain["terms"]) == 12


def test_run_fail(tmp_path, capsys):
    spec = write_spec(tmp_path, {"n": 2, "checks": ["roundtrip"], "tol": 1e-30})
    code, _, err = run_cli(["run", "--spec", spec, "--out", str(tmp_path / "r.json")], capsys)
    assert code == 1 and "roundtrip: FAIL" in err


@pytest.mark.parametrize(
    "data, message",
    [
        ({"n": 0}, "n must be"),
        ({"n": 2, "alphas": ["a0(x)", "x +", "0"]}, "byte offset"),
        ({"n": 2, "numeric": {"step": -1}}, "step"),
        ({"n": 2, "checks": ["bogus"]}, "unknown checks"),
        ({"n": 2, "alphas": ["0", "0"]}, "needs 3"),
        ({"n": 2, "c": "0"}, "nonzero"),
    ],
)
def test_run_invalid(tmp_path, capsys, data, message):
    spec = write_spec(tmp_path, data)
    code, _, err = run_cli(["run", "--spec", spec], capsys)
    assert code == 2 and message in err


def test_run_missing_file(tmp_path, capsys):
    code, _, _ = run_cli(["run", "--spec", str(tmp_path / "absent.json")], capsys)
    assert code == 2


def test_report_is_deterministic(tmp_path, capsys):
    spec = write_spec(tmp_path, {"n": 2, "checks": ["chain", "depress", "roundtrip", "ratio", "identities"]})
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_cli(["run", "--spec", spec, "--seed", "3", "--out", str(a)], capsys)
    run_cli(["run", "--spec", spec, "--seed", "3", "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert list(report) == ["toolkit", "version", "seed", "input", "passed", "checks", "identities", "timing"]
    assert len(report["identities"]) == 4


def test_seed_changes_instantiation(tmp_path, capsys):
    spec = write_spec(tmp_path, {"n": 1, "checks": ["roundtrip"]})
    reports = []
    for seed in ("0", "1"):
        path = tmp_path / f"r{seed}.json"
        run_cli(["run", "--spec", spec, "--seed", seed, "--out", str(path)], capsys)
        reports.append(json.loads(path.read_text()))
    assert reports[0]["checks"][0]["instantiation"] != reports[1]["checks"][0]["instantiation"]


def test_command_line_overrides(tmp_path, capsys):
    spec = write_spec(tmp_path, {"n": 1, "checks": ["roundtrip"]})
    path = tmp_path / "r.json"
    run_cli(["run", "--spec", spec, "--step", "0.002", "--interval", "0:0.5", "--out", str(path)], capsys)
    echo = json.loads(path.read_text())["input"]["numeric"]
    assert echo["step"] == 0.002 and echo["interval"] == [0.0, 0.5]


def test_console_module_entry(tmp_path):
    spec = write_spec(tmp_path, {"n": 0})
    proc = subprocess.run(
        [sys.executable, "-m", "riccati_chain.cli", "run", "--spec", spec], capture_output=True, text=True
    )
    assert proc.returncode == 2
