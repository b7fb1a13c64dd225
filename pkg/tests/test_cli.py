import subprocess
import sys

import pytest

from lowres_mimo.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_RUNTIME, main
from lowres_mimo.harness import read_csv

CONFIG = "m_tx = 4\nm_rx = 4\nn = 16\ntrials = 5\nbits = 4\n"


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "link.cfg"
    path.write_text(CONFIG)
    return path


def test_power_command(capsys):
    assert main(["power", "--bits", "4", "--mtx", "16", "--mrx", "16"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "pa_dc_mw" in out and "19.45275" in out and "tx_mw" in out


def test_power_command_infinite_bits(capsys):
    assert main(["power", "--bits", "inf", "--mtx", "4", "--mrx", "4"]) == EXIT_RUNTIME


def test_simulate(tmp_path, config_file):
    out = tmp_path / "out.csv"
    assert main(["simulate", "--config", str(config_file), "--out", str(out), "--trials", "3"]) == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 1 and rows[0]["m_tx"] == "4"


def test_simulate_threads_and_seed_override(tmp_path, config_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", str(config_file), "--out", str(a), "--seed", "9"])
    main(["simulate", "--config", str(config_file), "--out", str(b), "--seed", "9", "--threads", "4"])
    assert a.read_bytes() == b.read_bytes()


def test_sweep(tmp_path):
    grid = tmp_path / "grid.cfg"
    grid.write_text("antennas = 2x2, 4x4\nbits = 2, 8\nn = 8\ntrials = 2\n")
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--grid", str(grid), "--out", str(out)]) == EXIT_OK
    assert [(r["m_tx"], r["bits"]) for r in read_csv(out)] == [("2", "2"), ("2", "8"), ("4", "2"), ("4", "8")]


def test_exit_config_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("m_tx = 3\nn = 16\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG
    bad.write_text("colour = blue\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == EXIT_CONFIG


def test_exit_io_error(tmp_path, config_file):
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg"), "--out", "x.csv"]) == EXIT_IO
    assert main(["simulate", "--config", str(config_file), "--out", str(tmp_path / "no" / "o.csv")]) == EXIT_IO


def test_exit_runtime_error_row(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(CONFIG + "eirp_dbm = -40\n")
    out = tmp_path / "o.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == EXIT_RUNTIME
    assert read_csv(out)[0]["mean_se_bps_hz"] == "nan"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lowres_mimo", "power", "--bits", "2", "--mtx", "1", "--mrx", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "21.43610" in proc.stdout
