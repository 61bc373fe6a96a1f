"""Result files: sweep CSV, gnuplot-style plot data, per-trial CSV, run manifest.

All floats are written with ``repr`` so a rerun with the same manifest
reproduces the files byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig

SWEEP_COLUMNS = (
    "axis_value", "mpe_m", "mpe_stderr", "mean_sre", "sre_stderr",
    "min_mpe_m", "no_detection_rate", "n_trials",
)
TRIAL_COLUMNS = (
    "axis_value", "trial", "true_x_m", "true_y_m", "est_x_m", "est_y_m",
    "position_error_m", "sre", "true_k", "oracle_error_m", "detected",
    "omp_iterations", "ud_seed", "noise_seed",
)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def _seed_str(seed) -> str:
    if isinstance(seed, (list, tuple)):
        return "-".join(str(s) for s in seed)
    return str(seed)


def sweep_rows(result) -> list[list[str]]:
    return [
        [_fmt(p.axis_value), _fmt(p.mpe), _fmt(p.mpe_stderr), _fmt(p.mean_sre),
         _fmt(p.sre_stderr), _fmt(p.min_mpe), _fmt(p.no_detection_rate), _fmt(p.n_trials)]
        for p in result.points
    ]


def write_sweep_csv(result, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerows(sweep_rows(result))
    return path


def write_plot_data(result, path) -> Path:
    """Whitespace-separated columns with a ``#`` header, ready for gnuplot."""
    path = Path(path)
    lines = [f"# sweep over {result.axis_name}", "# " + " ".join(SWEEP_COLUMNS)]
    lines += [" ".join(row) for row in sweep_rows(result)]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_trials_csv(result, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for p in result.points:
            for i, t in enumerate(p.trials):
                w.writerow([
                    _fmt(p.axis_value), i, _fmt(t.true_u[0]), _fmt(t.true_u[1]),
                    _fmt(t.est_u[0]), _fmt(t.est_u[1]), _fmt(t.position_error),
                    t.sre, t.true_k, _fmt(t.oracle_error), int(t.detected),
                    t.n_omp_iterations, _seed_str(t.seeds.get("ud", "")),
                    _seed_str(t.seeds.get("noise", "")),
                ])
    return path


def read_sweep_csv(path) -> list[dict[str, float]]:
    with Path(path).open(newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_signatures_csv(S: np.ndarray, path) -> Path:
    """One row per symbol period, one column ``led_<i>`` per LED (0-based)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"led_{i}" for i in range(S.shape[1])])
        w.writerows(S.astype(int).tolist())
    return path


def write_received_csv(rows, path) -> Path:
    """Long-format received samples: ``axis_value, trial, sample, noiseless, y``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("axis_value", "trial", "sample", "noiseless", "y"))
        for axis_value, trial, z, y in rows:
            for m, (zm, ym) in enumerate(zip(z, y)):
                w.writerow([_fmt(axis_value), trial, m, _fmt(zm), _fmt(ym)])
    return path


def manifest(config: RunConfig, command: str, extra: dict | None = None) -> dict:
    out = {
        "tool": "vlcpos",
        "version": __version__,
        "command": command,
        "master_seed": config.experiment.master_seed,
        "config": config.to_flat(),
    }
    if extra:
        out.update(extra)
    return out


def write_manifest(config: RunConfig, path, command: str = "sweep", extra: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest(config, command, extra), indent=2, sort_keys=True) + "\n")
    return path
