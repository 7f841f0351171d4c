import csv
import io
import json
import subprocess
import sys

import pytest

from nambulie.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, REGISTRY_ENV, main
from nambulie.liealg import default_registry_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def last(out):
    return out.rstrip("\n").splitlines()[-1]


@pytest.fixture(autouse=True)
def _no_env_registry(monkeypatch):
    monkeypatch.delenv(REGISTRY_ENV, raising=False)


# ---------------------------------------------------------------- list


def test_list_text(capsys):
    code, out, _ = run(capsys, "list")
    assert code == EXIT_OK and "A_4_8" in out
    assert last(out).startswith("status: ok")


def test_list_one_algebra_json(capsys):
    code, out, _ = run(capsys, "list", "--algebra", "A_4_8", "--format", "json")
    body = json.loads(out.rsplit("status:", 1)[0])
    assert code == EXIT_OK
    assert "[T2,T3]=T1, [T2,T4]=T2, [T3,T4]=-T3" in json.dumps(body)


# ---------------------------------------------------------------- solve


def test_solve_a48(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", "A_4_8")
    assert code == EXIT_OK
    assert "f = q4*x4" in out and "forced zero: q1, q2, q3" in out


def test_solve_abelian(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", "4A_1")
    assert "f = q4*x4+q3*x3+q2*x2+q1*x1" in out and code == EXIT_OK


def test_solve_degenerate_parameter(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", "A_a_4_2", "--param", "a=-2")
    assert code == EXIT_OK and "eta1234 = q4*x4" in out


def test_solve_order_three_rows(capsys):
    code, out, _ = run(capsys, "solve", "--algebra", "A_4_8", "--order", "3")
    assert code == EXIT_OK and last(out) == "status: ok rows=3"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--algebra", "A_a_4_2", "--param", "a=0.5"],
        ["solve", "--algebra", "A_a_4_2"],
        ["solve", "--algebra", "A_a_4_2", "--param", "a=0"],
        ["solve", "--algebra", "nope"],
        ["solve", "--algebra", "A_4_8", "--param", "a"],
    ],
)
def test_solve_bad_input(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err and "status:" not in out


# ---------------------------------------------------------------- verify


def test_verify_one_algebra(capsys):
    code, out, _ = run(capsys, "verify", "--table", "II", "--algebra", "A_4_8", "--no-errata")
    assert code == EXIT_OK
    assert last(out).startswith("status: ok unexplained=0 pass=3")


def test_verify_json_to_file(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--table", "I", "--algebra", "A_4_8", "--format", "json", "--output", str(dest))
    assert code == EXIT_OK and json.loads(dest.read_text())["rows"]
    assert out.count("\n") == 1


def test_verify_needs_a_selection(capsys):
    assert run(capsys, "verify")[0] == EXIT_USAGE


def test_verify_unexplained_failure_exits_one(capsys, tmp_path, monkeypatch):
    text = default_registry_text().replace('eta = "q4*x4"', 'eta = "q4*x4^2"', 1)
    path = tmp_path / "typo.toml"
    path.write_text(text, encoding="utf-8")
    monkeypatch.setenv(REGISTRY_ENV, str(path))
    code, out, _ = run(capsys, "verify", "--table", "I", "--algebra", "A_4_8", "--no-errata")
    assert code == EXIT_FAIL and last(out).startswith("status: fail unexplained=1")


# ---------------------------------------------------------------- registry selection


def test_missing_registry_from_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(REGISTRY_ENV, str(tmp_path / "absent.toml"))
    code, out, err = run(capsys, "list")
    assert code == EXIT_USAGE and "cannot read registry" in err and not out


def test_registry_flag_beats_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(REGISTRY_ENV, str(tmp_path / "absent.toml"))
    good = tmp_path / "good.toml"
    good.write_text(default_registry_text(), encoding="utf-8")
    assert run(capsys, "list", "--registry", str(good))[0] == EXIT_OK


def test_empty_registry_lists_nothing(capsys, tmp_path):
    path = tmp_path / "empty.toml"
    path.write_text("", encoding="utf-8")
    code, out, _ = run(capsys, "list", "--registry", str(path))
    assert code == EXIT_OK and "A_4_8" not in out


# ---------------------------------------------------------------- bracket


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["--eta", "1", "x1", "x2", "x3", "x4"], "1"),
        (["--algebra", "A_4_8", "x1", "x2", "x3", "x4"], "q4*x4"),
        (["--eta", "x4", "x1", "x1", "x3", "x4"], "0"),
        (["--component", "234=1", "--component", "123=x4", "x2", "x3", "x4"], "1"),
    ],
)
def test_bracket(capsys, argv, expected):
    code, out, _ = run(capsys, "bracket", *argv)
    assert code == EXIT_OK and out.splitlines()[0] == expected


def test_bracket_arity_and_parse_errors(capsys):
    assert run(capsys, "bracket", "--eta", "1", "x1", "x2")[0] == EXIT_USAGE
    assert run(capsys, "bracket", "--eta", "cosh(x1)", "x1", "x2", "x3", "x4")[0] == EXIT_USAGE
    assert run(capsys, "bracket", "x1")[0] == EXIT_USAGE


# ---------------------------------------------------------------- derive-frame


def test_derive_frame_a48(capsys):
    code, out, _ = run(capsys, "derive-frame", "--algebra", "A_4_8")
    assert code == EXIT_OK and "verify_frame: pass" in out


def test_derive_frame_needs_parameters(capsys):
    assert run(capsys, "derive-frame", "--algebra", "A_a_4_2")[0] == EXIT_USAGE
    code, out, _ = run(capsys, "derive-frame", "--algebra", "A_a_4_2", "--param", "a=1/3")
    assert code == EXIT_OK


# ---------------------------------------------------------------- dynamics


def test_dynamics_check(capsys):
    code, out, _ = run(capsys, "dynamics", "check", "--metric-a", "2", "--trials", "10")
    assert code == EXIT_OK
    assert "casimir coefficient: -1/2" in out
    assert last(out) == "status: ok casimir=-1/2 pfaffian=-1"


def test_dynamics_metric_parameter_can_follow_alpha(capsys):
    code, out, _ = run(capsys, "dynamics", "check", "--alpha", "3", "--metric-a", "alpha", "--trials", "5")
    assert code == EXIT_OK and "metric a = 3" in out and "casimir coefficient: -2/9" in out


def test_dynamics_evolve_to_stdout(capsys):
    code, out, _ = run(capsys, "dynamics", "evolve", "--t-end", "0.01", "--dt", "0.001")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[-1].startswith("status: ok steps=10")
    rows = list(csv.reader(io.StringIO("\n".join(lines[:-1]))))
    assert rows[0] == ["t", "x1", "x2", "P1", "P2", "H"] and len(rows) == 12


def test_dynamics_evolve_to_file(capsys, tmp_path):
    dest = tmp_path / "t.csv"
    code, out, _ = run(capsys, "dynamics", "evolve", "--t-end", "1", "--dt", "0.01", "--output", str(dest))
    assert code == EXIT_OK and out.count("\n") == 1
    assert len(dest.read_text().splitlines()) == 102


@pytest.mark.parametrize(
    "flags",
    [
        ["--dt", "0"],
        ["--dt", "-1"],
        ["--dt", "nan"],
        ["--t-end", "-1"],
        ["--dt", "fast"],
        ["--alpha", "0"],
        ["--alpha", "0.5"],
        ["--start", "1,2,3"],
        ["--eta", "sqrt(x1)"],
    ],
)
def test_dynamics_bad_input(capsys, flags):
    code, out, err = run(capsys, "dynamics", "evolve", *flags)
    assert code == EXIT_USAGE and err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_console_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "nambulie.cli", "bracket", "--eta", "x4", "x1", "x2", "x3", "x4"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "x4"
