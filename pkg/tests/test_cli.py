import csv
import io
import json
import subprocess
import sys

import pytest

from susywire.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--jmax", "5/2", "--G", "1")
    table = rows(out)
    assert code == 0
    assert table[0] == ["j", "epsilon", "E_tilde", "E_total", "degeneracy"]
    assert len(table) == 4
    assert ",".join(table[2]) == "3/2,4,-0.125,-0.125,4"


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--jmax", "1/2", "--G", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data == [{"j": "1/2", "epsilon": 1, "E_tilde": -2.0, "E_total": -2.0, "degeneracy": 2}]
    assert out.startswith('[{"j":"1/2","epsilon":1,"E_tilde":-2.0,')


def test_spectrum_longitudinal_offset(capsys):
    code, out, _ = run(capsys, "spectrum", "--jmax", "1/2", "--k", "1", "--L", "2", "--format", "json")
    row = json.loads(out)[0]
    assert code == 0 and row["E_total"] == pytest.approx(-0.5 + 2 * 3.141592653589793 / 4, rel=1e-15)


def test_float_format_17_digits(capsys):
    _, out, _ = run(capsys, "spectrum", "--jmax", "5/2")
    assert rows(out)[3][2] == format(-1 / 18, ".17g")


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum"],
        ["spectrum", "--jmax", "2"],
        ["spectrum", "--jmax", "1/2", "--G", "-1"],
        ["multiplet", "--j", "2"],
        ["fd", "--jz", "1/3", "--sign", "minus"],
        ["fd", "--jz", "1/2", "--sign", "sideways"],
        ["fd", "--jz", "1/2", "--sign", "minus", "--n", "64,32,128"],
        ["transform", "--j", "1/2", "--jz", "3/2"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_multiplet_json(capsys):
    code, out, _ = run(capsys, "multiplet", "--j", "1/2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert len(data["states"]) == 2
    top = data["states"][0]
    assert top["jz"] == "1/2"
    assert top["upper"] == [{"num": "1", "den": "1", "a2": 1, "b2": 3}]
    assert set(data) == {"j", "epsilon", "degeneracy", "states"}
    assert set(top) == {"jz", "upper", "lower", "checks"}


def test_multiplet_three_halves_all_pass(capsys):
    code, out, _ = run(capsys, "multiplet", "--j", "3/2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["states"]) == 4
    assert all(v == "pass" for s in data["states"] for v in s["checks"].values())
    assert [s["jz"] for s in data["states"]] == ["3/2", "1/2", "-1/2", "-3/2"]


def test_multiplet_csv(capsys):
    code, out, _ = run(capsys, "multiplet", "--j", "1/2")
    table = rows(out)
    assert code == 0 and table[0] == ["jz", "component", "num", "den", "a2", "b2"]
    assert table[1] == ["1/2", "upper", "1", "1", "1", "3"]


def test_verify_lines(capsys):
    code, out, _ = run(capsys, "verify", "--jmax", "3/2", "--tol", "1e-10", "--n", "256")
    lines = out.splitlines()
    assert code == 0
    assert "CHECK ladder_coeff[3/2,1/2] PASS dev<1e-10" in lines
    assert "CHECK commutators[j=3/2] PASS" in lines
    assert all(line.startswith("CHECK ") and line.split()[2] == "PASS" for line in lines)


def test_verify_fails_with_impossible_tolerance(capsys):
    code, out, _ = run(capsys, "verify", "--jmax", "1/2", "--tol", "1e-30", "--n", "64")
    assert code == 1
    assert any(" FAIL " in line for line in out.splitlines())


def test_fd_table(capsys):
    code, out, _ = run(capsys, "fd", "--jz", "1/2", "--sign", "minus", "--levels", "3", "--n", "512,1024,2048")
    table = rows(out)
    assert code == 0
    assert table[0] == ["n", "level", "eigenvalue", "error", "order"]
    body = table[1:]
    assert len(body) == 9
    for level in range(3):
        block = [r for r in body if r[1] == str(level)]
        errors = [float(r[3]) for r in block]
        assert errors[0] > errors[1] > errors[2]
        assert block[0][4] == "" and block[1][4] != ""


def test_fd_json(capsys):
    code, out, _ = run(capsys, "fd", "--jz", "3/2", "--sign", "plus", "--levels", "1", "--n", "64,128", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data[0]["order"] is None and data[1]["order"] == pytest.approx(2.0, abs=0.2)


def test_transform(capsys):
    code, out, _ = run(capsys, "transform", "--j", "1/2", "--jz", "1/2", "--G", "1")
    table = rows(out)
    assert code == 0
    assert table[0] == ["jz", "j", "r1", "r2"]
    assert table[1][:2] == ["1/2", "1/2"]
    assert float(table[1][2]) < 1e-10 and float(table[1][3]) < 1e-10


def test_transform_gate_failure(capsys):
    code, _, _ = run(capsys, "transform", "--j", "5/2", "--jz", "1/2", "--tol", "1e-20")
    assert code == 1


def test_out_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["multiplet", "--j", "5/2", "--format", "json", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.csv", tmp_path / "d.csv"
    for path in (c, d):
        assert main(["fd", "--jz", "1/2", "--sign", "plus", "--n", "32,64,128", "--out", str(path)]) == 0
    assert c.read_bytes() == d.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "susywire", "spectrum", "--jmax", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "1/2,1,-0.5,-0.5,2"
    proc = subprocess.run([sys.executable, "-m", "susywire", "fd", "--jz", "1/3", "--sign", "minus"], capture_output=True, text=True)
    assert proc.returncode == 2
