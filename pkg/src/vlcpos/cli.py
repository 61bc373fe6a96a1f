"""Command-line front end.

Subcommands::

    vlcpos sweep  --sweep snr --values 10:5:45 [--n-ud 1000] [--out DIR]
    vlcpos trial  [--x X --y Y | --trial T] [--snr DB]
    vlcpos oracle [--resolution 0.5]
    vlcpos kmap   [--resolution 0.1]

``run`` is an alias of ``sweep``. Every subcommand accepts ``--config PATH``
(a ``key = value`` file or a ``manifest.json`` from an earlier run); flags
override file values. The output directory is ``--out``, else
``output.directory`` from the config file, else ``$VLCPOS_OUT``, else
``results``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .config import AXES, ConfigError, RunConfig, parse_config, read_config_file
from .evaluation import (
    oracle_map,
    prepare,
    recover,
    run_sweep,
    run_trial_at,
    sample_ud,
    simulate_received,
    trial_seeds,
)
from .geometry import sparsity_map
from .io import (
    write_manifest,
    write_plot_data,
    write_received_csv,
    write_signatures_csv,
    write_sweep_csv,
    write_trials_csv,
)
from .positioning import NoDetectionError, recover_position

# flag dest -> config key
FLAG_KEYS = {
    "sweep": "experiment.axis",
    "values": "experiment.values",
    "n_ud": "experiment.n_ud",
    "seed": "experiment.master_seed",
    "workers": "experiment.workers",
    "edge_margin": "experiment.edge_margin",
    "out": "output.directory",
    "d_th": "algorithm.d_th",
    "estimator": "algorithm.estimator",
    "k_max": "algorithm.k_max",
    "snr": "signal.snr_db",
    "m": "signal.M",
    "r": "scene.coverage_radius",
    "nled": "scene.n_led_per_side",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key=value config file or manifest.json")
    p.add_argument("--seed", type=str, help="master RNG seed")
    p.add_argument("--out", metavar="DIR", help="output directory (fallback: $VLCPOS_OUT)")
    p.add_argument("--d-th", dest="d_th", metavar="METERS", help="LED acceptance distance threshold")
    p.add_argument("--estimator", choices=("gated-prox", "area-centroid"))
    p.add_argument("--k-max", dest="k_max", help="override the sparsity cap")
    p.add_argument("--snr", metavar="DB", help="received SNR in dB")
    p.add_argument("--m", "-M", dest="m", metavar="BITS", help="signature length M")
    p.add_argument("--r", dest="r", metavar="METERS", help="coverage radius")
    p.add_argument("--nled", metavar="N", help="LEDs per side of the grid")
    p.add_argument("--edge-margin", dest="edge_margin", metavar="METERS",
                   help="exclude a band of this width along the walls when placing UDs")
    p.add_argument("--export-signals", action="store_true", help="also write signatures and received samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlcpos", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("sweep", "run"):
        p = sub.add_parser(name, help="sweep one parameter and write MPE/SRE curves")
        _common(p)
        p.add_argument("--sweep", choices=AXES, help="parameter to sweep")
        p.add_argument("--values", metavar="START:STEP:STOP", help="axis values (range or comma list)")
        p.add_argument("--n-ud", dest="n_ud", metavar="INT", help="user devices per axis value")
        p.add_argument("--workers", metavar="INT", help="worker processes")
        p.add_argument("--independent", action="store_true",
                       help="draw fresh UDs for every axis value instead of reusing them")

    p = sub.add_parser("trial", help="trace the pipeline for a single UD")
    _common(p)
    p.add_argument("--x", type=float, help="UD x position (m)")
    p.add_argument("--y", type=float, help="UD y position (m)")
    p.add_argument("--trial", type=int, default=0, help="trial index for a random UD (default 0)")

    p = sub.add_parser("oracle", help="map of the proximity lower-bound error over the floor")
    _common(p)
    p.add_argument("--resolution", type=float, default=0.5, help="sampling step (m)")

    p = sub.add_parser("kmap", help="map of the number of covering LEDs K(u)")
    _common(p)
    p.add_argument("--resolution", type=float, default=0.1, help="sampling step (m)")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    overrides = {key: getattr(args, dest, None) for dest, key in FLAG_KEYS.items()}
    if getattr(args, "independent", False):
        overrides["experiment.shared_uds"] = "false"
    if getattr(args, "export_signals", False):
        overrides["output.export_signals"] = "true"
    if overrides["output.directory"] is None:
        from_file = read_config_file(args.config) if args.config else {}
        env = os.environ.get("VLCPOS_OUT")
        if "output.directory" not in from_file and env:
            overrides["output.directory"] = env
    return parse_config(args.config, overrides)


def _outdir(config: RunConfig) -> Path:
    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory is not writable: {out}")
    return out


def cmd_sweep(config: RunConfig) -> int:
    exp = config.experiment
    out = _outdir(config)
    result = run_sweep(config)
    stem = f"sweep_{exp.axis}"
    if "csv" in config.output.formats:
        write_sweep_csv(result, out / f"{stem}.csv")
        write_trials_csv(result, out / f"trials_{exp.axis}.csv")
    if "dat" in config.output.formats:
        write_plot_data(result, out / f"{stem}.dat")
    if config.output.export_signals:
        _export_signals(config, result, out)
    write_manifest(config, out / "manifest.json", command="sweep")

    print(f"# {result.axis_name}: n_ud={exp.n_ud} seed={exp.master_seed} -> {out}")
    print(f"{'value':>10} {'MPE[m]':>9} {'+-':>7} {'SRE':>7} {'minMPE[m]':>10} {'no-det':>7}")
    for p in result.points:
        print(f"{p.axis_value:10.4g} {p.mpe:9.4f} {p.mpe_stderr:7.4f} {p.mean_sre:7.3f} "
              f"{p.min_mpe:10.4f} {p.no_detection_rate:7.3f}")
    return 0


def _export_signals(config: RunConfig, result, out: Path) -> None:
    exp = config.experiment
    seen = set()
    rows = []
    for p_idx, p in enumerate(result.points):
        cfg = config.with_axis(exp.axis, p.axis_value)
        sc = prepare(cfg)
        key = sc.S.shape
        if key not in seen:
            seen.add(key)
            write_signatures_csv(sc.S, out / f"signatures_M{key[0]}_N{key[1]}.csv")
        for t in range(exp.n_ud):
            ud, noise = trial_seeds(exp.master_seed, t, None if exp.shared_uds else p_idx)
            _, x, y = simulate_received(cfg, sample_ud(cfg, ud), noise)
            if y is not None:
                rows.append((p.axis_value, t, sc.S @ x, y.y))
    write_received_csv(rows, out / f"received_{exp.axis}.csv")


def cmd_trial(config: RunConfig, args) -> int:
    exp = config.experiment
    sc = prepare(config)
    ud_seed, noise_seed = trial_seeds(exp.master_seed, args.trial)
    if args.x is not None or args.y is not None:
        if args.x is None or args.y is None:
            raise ConfigError("--x and --y must be given together")
        L = config.scene.floor_side
        if not (0 <= args.x <= L and 0 <= args.y <= L):
            raise ConfigError(f"UD position must lie on the floor [0, {L}] x [0, {L}]")
        u = np.array([args.x, args.y])
        seeds = {"position": "given"}
    else:
        u = sample_ud(config, ud_seed)
        seeds = {"ud": ud_seed}

    lam, x, y = simulate_received(config, u, noise_seed)
    res = run_trial_at(config, u, noise_seed, seeds=seeds)
    support = np.flatnonzero(lam).tolist()
    print(f"UD position           : ({u[0]:.4f}, {u[1]:.4f}) m")
    print(f"grid                  : N={config.scene.n_leds} LEDs, K_max={sc.k_max}, d_th={sc.d_th:g} m")
    print(f"covering LEDs (K={len(support)}) : {support}")
    for i in support:
        print(f"    LED {i:4d} at ({sc.leds[i, 0]:6.2f}, {sc.leds[i, 1]:6.2f})  gain {x[i]:.4e}")
    trace = {"u": u.tolist(), "true_support": support, "result": _trial_dict(res)}
    if y is not None:
        est = recover(config, y)
        print(f"noise variance        : {y.noise_variance:.4e} (SNR {config.signal.snr_db:g} dB)")
        print(f"OMP selected          : {est.selected_indices}")
        print(f"OMP residual trace    : {[round(v, 9) for v in est.residual_trace]}")
        try:
            pos = recover_position(est.x_hat, sc.leds, sc.k_max, sc.d_th,
                                   estimator=config.algorithm.estimator, geom=config.scene)
            print(f"accepted support      : {list(pos.accepted_support)}")
        except NoDetectionError:
            print("accepted support      : none (no detection)")
        trace.update(selected=est.selected_indices, residual_trace=est.residual_trace,
                     noise_variance=y.noise_variance)
    print(f"estimate              : ({res.est_u[0]:.4f}, {res.est_u[1]:.4f}) m")
    print(f"position error        : {res.position_error:.4f} m (oracle {res.oracle_error:.4f} m)")
    print(f"SRE                   : {res.sre}")

    if args.out or config.output.export_signals:
        out = _outdir(config)
        (out / "trial.json").write_text(json.dumps(trace, indent=2, default=_json_default) + "\n")
        if y is not None:
            write_received_csv([(math.nan, args.trial, sc.S @ x, y.y)], out / "trial_received.csv")
        write_manifest(config, out / "manifest.json", command="trial")
    return 0


def _trial_dict(res) -> dict:
    return {
        "true_u": res.true_u, "est_u": res.est_u, "position_error": res.position_error,
        "sre": res.sre, "true_k": res.true_k, "oracle_error": res.oracle_error,
        "detected": res.detected, "seeds": res.seeds,
    }


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _write_map(path: Path, xs, ys, values, name: str, fmt) -> None:
    with path.open("w") as fh:
        fh.write(f"x_m,y_m,{name}\n")
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                fh.write(f"{x!r},{y!r},{fmt(values[i, j])}\n")


def cmd_oracle(config: RunConfig, resolution: float) -> int:
    out = _outdir(config)
    xs, ys, err = oracle_map(config, resolution)
    _write_map(out / "oracle_map.csv", xs, ys, err, "oracle_error_m",
               lambda v: "nan" if math.isnan(v) else repr(float(v)))
    margin = config.edge_margin
    inner = (xs >= margin) & (xs <= config.scene.floor_side - margin)
    inner_err = err[np.ix_(inner, inner)]
    write_manifest(config, out / "manifest.json", command="oracle", extra={"resolution": resolution})
    print(f"min-MPE over the floor     : {np.nanmean(err):.4f} m")
    print(f"min-MPE, {margin:g} m edge band out: {np.nanmean(inner_err):.4f} m")
    print(f"uncovered grid points      : {int(np.isnan(err).sum())}")
    return 0


def cmd_kmap(config: RunConfig, resolution: float) -> int:
    out = _outdir(config)
    sc = prepare(config)
    xs, ys, K = sparsity_map(config.scene, sc.leds, resolution)
    _write_map(out / "kmap.csv", xs, ys, K, "k", str)
    margin = config.edge_margin
    inner = (xs >= margin - 1e-9) & (xs <= config.scene.floor_side - margin + 1e-9)
    Ki = K[np.ix_(inner, inner)]
    write_manifest(config, out / "manifest.json", command="kmap", extra={"resolution": resolution})
    print(f"K over the floor           : {K.min()} .. {K.max()} (K_max = {K.max()})")
    print(f"K, {margin:g} m edge band out   : {Ki.min()} .. {Ki.max()}, mean {Ki.mean():.3f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        if args.command in ("sweep", "run"):
            return cmd_sweep(config)
        if args.command == "trial":
            return cmd_trial(config, args)
        if args.command == "oracle":
            return cmd_oracle(config, args.resolution)
        return cmd_kmap(config, args.resolution)
    except ConfigError as exc:
        print(f"vlcpos: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"vlcpos: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
