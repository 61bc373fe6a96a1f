import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

from vlcpos.cli import main
from vlcpos.io import SWEEP_COLUMNS, TRIAL_COLUMNS, read_sweep_csv

DATA = Path(__file__).parent / "data"


def run(argv):
    return main([str(a) for a in argv])


def test_sweep_writes_documented_files(tmp_path, capsys):
    out = tmp_path / "o"
    assert run(["sweep", "--sweep", "snr", "--values", "20,40", "--n-ud", 5, "--m", 50,
                "--seed", 11, "--out", out]) == 0
    assert "snr_db" in capsys.readouterr().out
    with (out / "sweep_snr.csv").open() as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == SWEEP_COLUMNS
    with (out / "trials_snr.csv").open() as fh:
        assert tuple(next(csv.reader(fh))) == TRIAL_COLUMNS
    dat = (out / "sweep_snr.dat").read_text().splitlines()
    assert dat[1] == "# " + " ".join(SWEEP_COLUMNS) and len(dat) == 4
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 11 and manifest["command"] == "sweep"
    assert manifest["config"]["signal.M"] == 50


def test_golden_sweep(tmp_path):
    out = tmp_path / "o"
    run(["sweep", "--sweep", "snr", "--values", "20,40", "--n-ud", 5, "--m", 50, "--seed", 11, "--out", out])
    got = read_sweep_csv(out / "sweep_snr.csv")
    want = read_sweep_csv(DATA / "golden_sweep_snr.csv")
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert g.keys() == w.keys()
        for k in w:
            np.testing.assert_allclose(g[k], w[k], rtol=1e-9, err_msg=k)


def test_rerun_from_manifest_is_bit_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["run", "--sweep", "m", "--values", "50:50:100", "--snr", 20, "--n-ud", 8,
                "--seed", 5, "--out", a]) == 0
    assert run(["sweep", "--config", a / "manifest.json", "--out", b, "--workers", 2]) == 0
    for name in ("sweep_m.csv", "trials_m.csv", "sweep_m.dat"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("signal.M = 40\nexperiment.n_ud = 3\nexperiment.values = 30\n")
    out = tmp_path / "o"
    assert run(["sweep", "--config", cfg, "--m", 60, "--out", out]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["signal.M"] == 60
    assert manifest["config"]["experiment.n_ud"] == 3


def test_env_output_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("VLCPOS_OUT", str(tmp_path / "env"))
    assert run(["sweep", "--values", "30", "--n-ud", 2, "--m", 40]) == 0
    assert (tmp_path / "env" / "sweep_snr.csv").exists()
    assert run(["sweep", "--values", "30", "--n-ud", 2, "--m", 40, "--out", tmp_path / "flag"]) == 0
    assert (tmp_path / "flag" / "sweep_snr.csv").exists()


def test_config_error_exit_code(capsys):
    assert run(["sweep", "--snr", "abc"]) == 2
    assert "signal.snr_db" in capsys.readouterr().err


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_output(tmp_path, capsys):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        assert run(["sweep", "--values", "30", "--n-ud", 1, "--out", locked / "sub"]) == 1
        assert "cannot write" in capsys.readouterr().err
    finally:
        locked.chmod(0o700)


def test_output_path_is_a_file(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["sweep", "--values", "30", "--n-ud", 1, "--out", blocker]) == 1
    assert "cannot write" in capsys.readouterr().err


def test_export_signals(tmp_path):
    out = tmp_path / "o"
    assert run(["sweep", "--values", "30", "--n-ud", 2, "--m", 20, "--out", out, "--export-signals"]) == 0
    with (out / "signatures_M20_N625.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "led_0" and len(rows) == 21 and len(rows[1]) == 625
    with (out / "received_snr.csv").open() as fh:
        rec = list(csv.DictReader(fh))
    assert len(rec) == 2 * 20
    assert set(rec[0]) == {"axis_value", "trial", "sample", "noiseless", "y"}


def test_trial_command(tmp_path, capsys):
    assert run(["trial", "--x", 25, "--y", 25, "--snr", 40, "--out", tmp_path]) == 0
    text = capsys.readouterr().out
    assert "covering LEDs (K=13)" in text
    trace = json.loads((tmp_path / "trial.json").read_text())
    assert trace["result"]["true_k"] == 13
    assert (tmp_path / "trial_received.csv").exists()
    assert run(["trial", "--x", 25]) == 2


def test_oracle_and_kmap_commands(tmp_path, capsys):
    assert run(["oracle", "--resolution", 2.5, "--out", tmp_path]) == 0
    assert (tmp_path / "oracle_map.csv").exists()
    assert run(["kmap", "--resolution", 0.5, "--out", tmp_path]) == 0
    text = capsys.readouterr().out
    assert "K_max = 14" in text
    with (tmp_path / "kmap.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 101 * 101
    assert max(int(r["k"]) for r in rows) == 14
