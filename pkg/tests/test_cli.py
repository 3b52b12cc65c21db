import csv
import io
import subprocess
import sys

import pytest

from halfplane.cli import main


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_dispersion_table(capsys):
    assert main(["dispersion", "table"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["lam_over_mu", "xi0_sq", "kappa10", "kappa20", "abs_phi_prime"]
    assert len(out) == 6
    assert float(out[2][1]) == pytest.approx(0.8453, abs=5e-5)
    assert out[-1][0] == "inf"


def test_dispersion_table_custom_ratios(tmp_path):
    p = tmp_path / "t.csv"
    assert main(["dispersion", "table", "--lam-over-mu", "2", "inf", "--out", str(p)]) == 0
    out = rows(p.read_text())
    assert [r[0] for r in out[1:]] == ["2", "inf"]


def test_rayleigh_run_with_config(tmp_path, capsys):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("mu = 0.1\nppw = 12\nlx = 2\nperiods = 0.5\nn_records = 4\n")
    assert main(["rayleigh", "run", "--config", str(cfg)]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["t", "max_err_u", "max_err_v", "energy"]
    assert len(out) == 6


def test_cli_value_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("mu = 0.1\nppw = 12\nlx = 2\nperiods = 0.5\nn_records = 4\norder = 4\n")
    assert main(["rayleigh", "run", "--config", str(cfg), "--order", "2"]) == 0
    assert len(rows(capsys.readouterr().out)) == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["rayleigh", "run", "--ppw", "5"],
        ["rayleigh", "run", "--mu", "-1"],
        ["rayleigh", "run", "--order", "3"],
        ["nonsense"],
        ["rayleigh", "run", "--config", "/nonexistent/file.cfg"],
        ["predict", "--eps", "0.6"],
    ],
)
def test_invalid_input_exit_1(argv, capsys):
    assert main(argv) == 1


def test_budget_exit_1_and_force(tmp_path, capsys):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("mu = 0.1\nppw = 12\nlx = 2\nperiods = 0.5\nn_records = 2\nbudget = 100\n")
    assert main(["rayleigh", "run", "--config", str(cfg)]) == 1
    assert "budget" in capsys.readouterr().err
    assert main(["rayleigh", "run", "--config", str(cfg), "--force"]) == 0


def test_numerical_abort_exit_2(tmp_path, capsys):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("mu = 0.1\nppw = 12\nlx = 2\nperiods = 20\ncfl_const = 5\n")
    assert main(["rayleigh", "run", "--config", str(cfg)]) == 2
    assert "numerical abort" in capsys.readouterr().err


def test_boundary_sweep(capsys):
    assert main(["boundary", "sweep", "--n", "3"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["re_s", "im_s", "omega", "abs_u0", "abs_v0", "abs_phi"]
    assert len(out) == 10


@pytest.mark.parametrize("kind", ["rayleigh", "shear"])
def test_exact_sample(kind, capsys):
    assert main(["exact", "sample", "--kind", kind, "--nx", "3", "--ny", "4", "--mu", "0.1"]) == 0
    out = rows(capsys.readouterr().out)
    assert out[0] == ["x", "y", "u", "v"] and len(out) == 13


def test_rayleigh_converge(capsys):
    assert main(["rayleigh", "converge", "--mu", "0.1", "--ppw", "12", "--lx", "2", "--refinements", "2"]) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 3 and "order_1T" in out[0]


def test_help_exit_0():
    assert main(["--help"]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "halfplane", "dispersion", "table", "--lam-over-mu", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    row = [float(x) for x in proc.stdout.splitlines()[1].split(",")]
    assert row[1] == pytest.approx(0.84529946162074847, abs=1e-12)
    assert row[2] == pytest.approx(0.39331989319032864, abs=1e-12)
