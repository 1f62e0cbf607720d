import json
import subprocess
import sys

import pytest

from genfunlab.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_classify_constant_harmonic(capsys):
    code, out = run_cli(["classify", "const:1", "--scale", "harmonic"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == "report_v1"
    assert rep["result"]["verdict"] != "Negligible"


def test_classify_eps_polynomial(capsys):
    code, out = run_cli(["classify", "const:eps**2", "--scale", "polynomial"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["result"]["slope"] - 2.0) < 1e-6


def test_classify_csv_format(capsys):
    code, out = run_cli(["classify", "const:eps", "--format", "csv"], capsys)
    assert code == 0
    assert out.startswith("eps,re,im")


def test_reports_are_byte_identical(capsys):
    _, out1 = run_cli(["classify", "const:eps**2"], capsys)
    _, out2 = run_cli(["classify", "const:eps**2"], capsys)
    assert out1 == out2


def test_pair_subcommand(capsys):
    code, out = run_cli(["pair", "poly:2", "bump:0,1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["verdict"] == "Moderate(0)"


def test_gallery_verbs(capsys):
    code, out = run_cli(["gallery", "list"], capsys)
    assert code == 0
    assert "weak_point_support" in json.loads(out)["result"]["names"]
    code, out = run_cli(["gallery", "describe", "etau_counterexample"], capsys)
    assert code == 0
    meta = json.loads(out)["result"]["meta"]
    assert meta["expected"]["weakly_zero_on_full_battery"] is True


def test_usage_errors_exit_2(capsys):
    assert main(["classify", "frob:1"]) == 2
    assert main(["pair", "poly:2", "frob:0,1"]) == 2
    assert main(["gallery", "describe"]) == 2


def test_bad_flags_exit_2():
    # argparse exits with 2 on unknown subcommands
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_grid_flag(capsys):
    code, out = run_cli(["classify", "const:eps", "--grid", "2:12"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["config"]["grid"]["n"] == 11


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid=2:12\nseed=3\n")
    code, out = run_cli(["classify", "const:eps", "--config", str(cfg)], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["config"]["grid"]["n"] == 11
    assert rep["config"]["seed"] == 3


def test_out_dir(tmp_path, capsys):
    code, _ = run_cli(["classify", "const:eps", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["command"] == "classify"
    assert (tmp_path / "net.csv").exists()


def test_homog_cli_delta(capsys):
    # full-pipeline run: embedded delta is weakly homogeneous of degree -1
    code, out = run_cli(["homog", "embed:delta", "--alpha", "-1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["overall"] == "WeaklyHomogeneous"


def test_weak_equal_cli(capsys):
    code, out = run_cli(["weak-equal", "poly:2", "poly:2"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["overall"] == "WeaklyEqual"
    code, out = run_cli(["weak-equal", "poly:2", "poly:1"], capsys)
    assert code == 1
    assert json.loads(out)["result"]["overall"] == "NotWeaklyEqual"


def test_entry_point_subprocess():
    out = subprocess.run([sys.executable, "-m", "genfunlab.cli", "gallery", "list"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "radial_oscillator" in out.stdout
