"""Monte-Carlo harness: trials, metrics, proximity lower bound and parameter sweeps.

Seeding
-------
Every random draw comes from its own stream, keyed by the master seed:

* signatures: ``[master, 0]`` (one matrix per ``(M, N)``; for a fixed ``N``
  a shorter matrix is the leading rows of a longer one)
* UD position of trial ``t``: ``[master, 1, t]``
* noise of trial ``t``: ``[master, 2, t]``

With ``shared_uds=False`` the sweep point index ``p`` is inserted after the
stream id so each point sees fresh UDs and noise. A trial therefore does not
depend on which process runs it or in what order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import gain_vector
from .config import AXES, AXIS_NAMES, RunConfig
from .geometry import coverage_vector, k_max, led_grid, sample_grid
from .positioning import NoDetectionError, area_centroid, prox, recover_position
from .recovery import SparseEstimate, omp
from .signal import compose_x, generate_signatures, noise_variance_for_snr, synthesize

STREAM_SIGNATURES = 0
STREAM_UD = 1
STREAM_NOISE = 2


@dataclass(frozen=True)
class Scenario:
    """Everything about a configuration that does not change between trials."""

    leds: np.ndarray
    S: np.ndarray
    k_max: int
    d_th: float


@lru_cache(maxsize=32)
def prepare(config: RunConfig) -> Scenario:
    leds = led_grid(config.scene)
    km = config.algorithm.k_max
    if km is None:
        km = k_max(config.scene, leds, config.algorithm.kmax_resolution)
    S = generate_signatures(
        config.signal.M, config.scene.n_leds,
        seed=[config.experiment.master_seed, STREAM_SIGNATURES],
        nonzero_columns=True,
    )
    S.setflags(write=False)
    leds.setflags(write=False)
    return Scenario(leds=leds, S=S, k_max=max(int(km), 1), d_th=config.d_th)


@dataclass(frozen=True)
class TrialResult:
    """Outcome for one randomly placed user device.

    ``detected`` is False when the UD is covered by no LED or recovery
    returns nothing; such trials carry NaN positions and errors and are
    excluded from MPE/SRE averages. ``oracle_error`` is the error of the
    proximity estimate built from the true covering set.
    """

    true_u: tuple[float, float]
    est_u: tuple[float, float]
    position_error: float
    sre: int
    true_k: int
    oracle_error: float
    detected: bool
    seeds: dict = field(default_factory=dict)
    n_omp_iterations: int = 0


def sre(true_support, est_support) -> int:
    """Support recovery error: size of the symmetric difference."""
    return len(set(true_support) ^ set(est_support))


def min_mpe_oracle(geom, leds, u, estimator: str = "gated-prox") -> np.ndarray:
    """Proximity estimate from the true set of LEDs covering ``u``."""
    lam, K = coverage_vector(geom, leds, u)
    if K == 0:
        raise NoDetectionError("position is covered by no LED")
    idx = np.flatnonzero(lam)
    if estimator == "area-centroid":
        return area_centroid(leds, idx, geom.coverage_radius, geom.floor_side)
    return prox(np.asarray(leds)[idx])


def sample_ud(config: RunConfig, ud_seed) -> np.ndarray:
    """Uniform position on the floor minus an edge band of ``config.edge_margin``."""
    L = config.scene.floor_side
    margin = min(config.edge_margin, L / 2)
    unit = np.random.default_rng(ud_seed).random(2)
    return margin + unit * (L - 2 * margin)


def simulate_received(config: RunConfig, u, noise_seed):
    """Noiseless gains and noisy received signal at position ``u``.

    Returns ``(lam, x, y)``; ``y`` is None when no LED reaches ``u``.
    """
    sc = prepare(config)
    lam, _ = coverage_vector(config.scene, sc.leds, u)
    x = compose_x(lam, gain_vector(config.channel, sc.leds, u))
    if not np.any(x):
        return lam, x, None
    snr_db = config.signal.snr_db
    sigma2 = noise_variance_for_snr(sc.S, x, snr_db)
    return lam, x, synthesize(sc.S, x, sigma2, seed=noise_seed, snr_db=snr_db)


def recover(config: RunConfig, y) -> SparseEstimate:
    """OMP run with the configured (or noise-floor) stopping residual."""
    sc = prepare(config)
    tol = config.algorithm.residual_tol
    if tol is None:
        tol = math.sqrt(y.M * y.noise_variance)
    return omp(y, sc.S, sc.k_max, tol)


def run_trial(config: RunConfig, ud_seed, noise_seed) -> TrialResult:
    """Place one UD uniformly at random and run the full pipeline on it."""
    u = sample_ud(config, ud_seed)
    return run_trial_at(config, u, noise_seed, seeds={"ud": _seed_repr(ud_seed)})


def run_trial_at(config: RunConfig, u, noise_seed, seeds: dict | None = None) -> TrialResult:
    """Detection and positioning for a UD at a known position ``u``."""
    sc = prepare(config)
    geom = config.scene
    u = np.asarray(u, dtype=float)
    seeds = dict(seeds or {})
    seeds["noise"] = _seed_repr(noise_seed)
    lam, x, y = simulate_received(config, u, noise_seed)
    K = int(lam.sum())
    true_u = (float(u[0]), float(u[1]))

    def failed(oracle_err=math.nan):
        return TrialResult(
            true_u=true_u, est_u=(math.nan, math.nan),
            position_error=math.nan, sre=0, true_k=K, oracle_error=oracle_err,
            detected=False, seeds=seeds,
        )

    if K == 0:
        return failed()
    oracle_u = min_mpe_oracle(geom, sc.leds, u, config.algorithm.estimator)
    oracle_err = float(np.hypot(*(oracle_u - u)))
    if y is None:
        return failed(oracle_err)

    est = recover(config, y)
    x_hat = est.x_hat
    if config.algorithm.support_threshold > 0:
        x_hat = np.where(np.abs(x_hat) > config.algorithm.support_threshold, x_hat, 0.0)
    try:
        pos = recover_position(x_hat, sc.leds, sc.k_max, sc.d_th,
                               estimator=config.algorithm.estimator, geom=geom)
    except NoDetectionError:
        return failed(oracle_err)

    return TrialResult(
        true_u=true_u,
        est_u=(float(pos.u_hat[0]), float(pos.u_hat[1])),
        position_error=float(np.hypot(*(pos.u_hat - u))),
        sre=sre(np.flatnonzero(lam).tolist(), pos.accepted_support),
        true_k=K,
        oracle_error=oracle_err,
        detected=True,
        seeds=seeds,
        n_omp_iterations=est.n_iterations,
    )


def _seed_repr(seed):
    if isinstance(seed, (list, tuple)):
        return [int(s) for s in seed]
    return seed


def trial_seeds(master_seed: int, trial: int, point: int | None = None):
    if point is None:
        return [master_seed, STREAM_UD, trial], [master_seed, STREAM_NOISE, trial]
    return [master_seed, STREAM_UD, point, trial], [master_seed, STREAM_NOISE, point, trial]


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    mpe: float
    mpe_stderr: float
    mean_sre: float
    sre_stderr: float
    min_mpe: float
    no_detection_rate: float
    n_trials: int
    trials: tuple[TrialResult, ...] = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: list[SweepPoint]
    master_seed: int = 0

    @property
    def axis_name(self) -> str:
        return AXIS_NAMES[self.axis]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points], dtype=float)


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    if n == 0:
        return math.nan, math.nan
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return mean, se


def aggregate(axis_value: float, trials) -> SweepPoint:
    trials = tuple(trials)
    det = [t for t in trials if t.detected]
    err = np.array([t.position_error for t in det])
    sres = np.array([t.sre for t in det], dtype=float)
    oracle = np.array([t.oracle_error for t in trials if t.true_k > 0])
    mpe, mpe_se = _mean_stderr(err)
    msre, sre_se = _mean_stderr(sres)
    return SweepPoint(
        axis_value=float(axis_value),
        mpe=mpe,
        mpe_stderr=mpe_se,
        mean_sre=msre,
        sre_stderr=sre_se,
        min_mpe=float(np.mean(oracle)) if oracle.size else math.nan,
        no_detection_rate=1.0 - len(det) / len(trials),
        n_trials=len(trials),
        trials=trials,
    )


def _run_batch(args):
    config, seed_pairs = args
    return [run_trial(config, ud, noise) for ud, noise in seed_pairs]


def run_trials(config: RunConfig, n_ud: int, point: int | None = None, workers: int = 1,
               executor=None) -> list[TrialResult]:
    """``n_ud`` independent trials, returned in trial-index order."""
    seeds = [trial_seeds(config.experiment.master_seed, t, point) for t in range(n_ud)]
    if executor is None or workers <= 1:
        return _run_batch((config, seeds))
    chunk = max(1, math.ceil(n_ud / (4 * workers)))
    batches = [(config, seeds[i:i + chunk]) for i in range(0, n_ud, chunk)]
    out: list[TrialResult] = []
    for part in executor.map(_run_batch, batches):
        out.extend(part)
    return out


def run_sweep(config: RunConfig, axis: str | None = None, values=None, n_ud: int | None = None,
              workers: int | None = None, shared_uds: bool | None = None) -> SweepResult:
    """Aggregate MPE, SRE and min-MPE over ``n_ud`` UDs at every axis value.

    Arguments left as None fall back to ``config.experiment``. With shared
    UDs (the default) every axis value sees the same UD draws and noise
    streams, so differences between points are paired.
    """
    exp = config.experiment
    axis = axis or exp.axis
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
    values = tuple(exp.values if values is None else values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    n_ud = exp.n_ud if n_ud is None else int(n_ud)
    if n_ud < 1:
        raise ValueError(f"n_ud must be >= 1, got {n_ud}")
    workers = exp.workers if workers is None else int(workers)
    shared = exp.shared_uds if shared_uds is None else shared_uds

    points = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for p, value in enumerate(values):
            cfg = config.with_axis(axis, value)
            trials = run_trials(cfg, n_ud, None if shared else p, workers, executor)
            points.append(aggregate(value, trials))
    finally:
        if executor is not None:
            executor.shutdown()
    return SweepResult(axis=axis, points=points, master_seed=exp.master_seed)


def oracle_map(config: RunConfig, resolution: float = 0.5, margin: float | None = None):
    """Proximity lower-bound error on a regular grid of floor positions.

    Returns ``(xs, ys, err)``; uncovered positions hold NaN.
    """
    geom = config.scene
    leds = led_grid(geom)
    margin = 0.0 if margin is None else margin
    xs = sample_grid(geom.floor_side, resolution, margin)
    err = np.full((xs.size, xs.size), math.nan)
    for i, x in enumerate(xs):
        for j, y in enumerate(xs):
            u = np.array([x, y])
            try:
                err[i, j] = np.hypot(*(min_mpe_oracle(geom, leds, u, config.algorithm.estimator) - u))
            except NoDetectionError:
                pass
    return xs, xs.copy(), err
