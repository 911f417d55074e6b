import json
import subprocess
import sys

import pytest

from hypreg import cli


def run_cli(*args):
    p = subprocess.run([sys.executable, "-m", "hypreg", *args], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def test_modular_decomp_table(capsys):
    assert cli.main(["modular-decomp", "6", "--format", "json"]) == cli.EXIT_OK
    out = json.loads(capsys.readouterr().out)
    t = {r["p0"]: r for r in out["tables"]}
    assert t[2]["kappa"] == 4 and t[2]["lambda"] == {"1": 8, "3": -8}
    assert t[3]["kappa"] == 3 and t[3]["lambda"] == {"1": 6, "2": -6}
    assert all(r["identity_holds"] for r in out["tables"])


def test_json_is_deterministic():
    a = run_cli("cycle-check", "--format", "json")
    b = run_cli("cycle-check", "--format", "json")
    assert a[0] == 0 and a[1] == b[1]


def test_csv_output(capsys):
    assert cli.main(["modular-decomp", "10", "--format", "csv"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) > 1 and "," in lines[0]


def test_curve_file_key_value(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text("coeffs = 0, -1, 0, 1\nQ = -1\nR = 1\nP = 1/2\n")
    code = cli.main(["curve-report", "--curve", str(f), "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    assert code == cli.EXIT_OK and out["ok"]


@pytest.mark.parametrize("content", ['{"coeffs": [1, 0, 1]}', '{"bogus": 1}', "coeffs = a, b, c"])
def test_malformed_curve_exit_2(tmp_path, content):
    f = tmp_path / "bad.json"
    f.write_text(content)
    code, _, err = run_cli("curve-report", "--curve", str(f))
    assert code == cli.EXIT_USAGE and err


def test_unknown_command_exit_2():
    assert run_cli("frobnicate")[0] == 2


def test_negative_tolerance_exit_2():
    assert cli.main(["cycle-check", "--tol-path", "-1"]) == cli.EXIT_USAGE


def test_run_config_rejects_unknown_key():
    with pytest.raises(cli.UsageError):
        cli.RunConfig.from_mapping({"nope": 1})
