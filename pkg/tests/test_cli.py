import csv
import io
import json
import subprocess
import sys

import pytest

from mathieu_pendulum import __version__, cli
from mathieu_pendulum.errors import ConvergenceError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_json(capsys):
    code, out, _ = run(["spectrum", "--b2", "1", "--levels", "3"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["version"] == __version__ and data["b2"] == 1.0 and data["h0"] == -0.875
    assert len(data["levels"]) == 12
    first = data["levels"][0]
    assert set(first) >= {"family", "m", "paper_energy", "physical_energy"}
    assert first["physical_energy"] == pytest.approx(-0.22756930205376252, abs=1e-12)
    assert "conventions" in data and "truncation" in data


def test_spectrum_csv_and_negative_coupling(capsys):
    code, out, _ = run(["spectrum", "--b2", "-1", "--levels", "1", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# tool=mathieu-pendulum"
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert [r["label"] for r in rows] == ["ce_0", "se_1", "ce_1", "se_2"]
    assert any("argument_shift" in ln for ln in lines)


def test_spectrum_to_file(tmp_path, capsys):
    target = tmp_path / "s.json"
    code, out, _ = run(["spectrum", "--b2", "0.5", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["b2"] == 0.5


def test_kernel_single_value_and_swap(capsys):
    base = ["kernel", "--b2", "1", "--time", "1", "--q", "0.5", "--qprime", "1.5"]
    code, out, _ = run(base, capsys)
    assert code == 0
    a = json.loads(out)
    code, out, _ = run(base + ["--swap"], capsys)
    b = json.loads(out)
    assert a["value"] == b["value"]
    assert a["value"]["re"] == pytest.approx(3.153229104142365, abs=1e-12)
    assert a["value"]["im"] == pytest.approx(0.30405195332108903, abs=1e-12)


def test_kernel_grid_and_trotter(capsys):
    code, out, _ = run(["kernel", "--b2", "1", "--beta", "1", "--grid", "64", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("# ")
    code, out, _ = run(["kernel", "--b2", "1", "--beta", "1", "--grid", "64", "--trotter", "16", "--compare"],
                       capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["splitting"] == "STRANG" and rep["sup_norm_error"] < 1e-2


@pytest.mark.parametrize("argv", [
    ["kernel", "--b2", "1"],
    ["kernel", "--b2", "1", "--beta", "1", "--time", "1"],
    ["kernel", "--b2", "1", "--beta", "-1"],
    ["kernel", "--b2", "1", "--time", "1", "--trotter", "8"],
    ["kernel", "--b2", "1", "--beta", "1", "--trotter", "8", "--grid", "100"],
    ["kernel", "--b2", "1", "--beta", "1", "--convention", "paper"],
    ["kernel", "--b2", "1", "--beta", "1", "--q", "0.1"],
    ["spectrum", "--b2", "1000"],
    ["spectrum", "--levels", "0"],
    ["spectrum", "--truncation", "2"],
    ["mathieu", "--family", "SE_ODD", "--b2", "0", "--y", "0.5", "--representation", "bessel"],
    ["mathieu", "--y", "11"],
    ["verify"],
    ["verify", "--group", "nope"],
    ["verify", "--group", "orthogonality", "--tolerance", "garbage"],
])
def test_bad_configuration_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "invalid configuration" in err


def test_numerical_failure_exit_3(monkeypatch, capsys):
    def boom(*a, **k):
        raise ConvergenceError("no convergence", iterates=(1.0, 2.0))

    monkeypatch.setattr(cli, "energy_levels", boom)
    code, _, err = run(["spectrum", "--b2", "1"], capsys)
    assert code == 3 and "numerical failure" in err


def test_mathieu_command(capsys):
    code, out, _ = run(["mathieu", "--family", "SE_ODD", "--m", "0", "--b2", "1", "--x", "0.3,1.0", "--y", "1"],
                       capsys)
    assert code == 0
    data = json.loads(out)
    assert data["label"] == "se_1" and len(data["periodic"]) == 2
    assert data["modified"][0]["re"] == 0.0
    assert data["modified"][0]["im"] == pytest.approx(0.349816435453553, abs=1e-11)
    code, out2, _ = run(["mathieu", "--family", "SE_ODD", "--m", "0", "--b2", "1", "--y", "1",
                         "--representation", "bessel", "--format", "csv"], capsys)
    row = [ln for ln in out2.splitlines() if ln.startswith("modified")][0].split(",")
    assert float(row[3]) == pytest.approx(0.349816435453553, abs=1e-8)


def test_verify_pass_and_fail(tmp_path, capsys):
    code, out, _ = run(["verify", "--group", "orthogonality", "--group", "conventions"], capsys)
    assert code == 0
    assert out.strip().endswith("3 checks, 0 failed")
    report = tmp_path / "r.json"
    code, out, _ = run(["verify", "--group", "orthogonality", "--tolerance", "orthogonality=1e-30",
                        "--out", str(report)], capsys)
    assert code == 1 and "FAIL" in out
    data = json.loads(report.read_text())
    assert data["reports"][0]["status"] == "FAIL"


def test_verify_free_limit_skips(capsys):
    code, out, _ = run(["verify", "--b2", "0", "--group", "trotter", "--group", "dual"], capsys)
    assert code == 0
    assert out.count("SKIP") == 3


def test_help_mentions_units(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    assert "dimensionless" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mathieu_pendulum", "--version"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == f"mathieu-pendulum {__version__}"


def test_byte_determinism(capsys):
    argv = ["spectrum", "--b2", "2.5", "--levels", "5", "--format", "csv"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_free_spectrum_csv(capsys):
    _, out, _ = run(["spectrum", "--b2", "0", "--levels", "3", "--format", "csv"], capsys)
    rows = [ln.split(",") for ln in out.splitlines() if not ln.startswith("#")][1:]
    assert [float(r[4]) for r in rows[:3]] == [0.0, 0.5, 0.5]


def test_negative_spectrum_matches_positive(capsys):
    _, pos, _ = run(["spectrum", "--b2", "1", "--levels", "4"], capsys)
    _, neg, _ = run(["spectrum", "--b2", "-1", "--levels", "4"], capsys)
    a, b = json.loads(pos), json.loads(neg)
    assert [lv["physical_energy"] for lv in a["levels"]] == [lv["physical_energy"] for lv in b["levels"]]
    assert "negative_coupling" in b


def test_trotter_compare_default(capsys):
    code, out, _ = run(["kernel", "--b2", "1", "--beta", "1", "--trotter", "64", "--compare"], capsys)
    assert code == 0 and json.loads(out)["sup_norm_error"] <= 1e-3


def test_free_grid_kernel(capsys):
    code, out, _ = run(["kernel", "--b2", "0", "--beta", "1", "--grid", "128"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["grid_size"] == 128


def test_verify_trotter_group(capsys):
    code, out, _ = run(["verify", "--group", "trotter", "--b2", "1", "--beta", "1"], capsys)
    assert code == 0 and "trotter.lie.order" in out and "FAIL" not in out


def test_verify_all_free_limit(capsys):
    code, out, _ = run(["verify", "--all", "--b2", "0"], capsys)
    assert code == 0
    statuses = [ln.split()[-1] for ln in out.splitlines()[:-1] if "(" not in ln] + \
               [ln.split("  (")[0].split()[-1] for ln in out.splitlines()[:-1] if "(" in ln and "SKIP" in ln]
    assert set(statuses) <= {"PASS", "SKIP"}
    assert "SKIP" in out
