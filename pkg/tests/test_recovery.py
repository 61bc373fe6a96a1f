import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlcpos.recovery import SparseEstimate, omp, support_of
from vlcpos.signal import ReceivedSignal, generate_signatures


def reference_omp(y, S, n_iter):
    """Textbook OMP with a fresh lstsq solve per step."""
    norms = np.linalg.norm(S, axis=0)
    r = y.copy()
    sel = []
    coef = np.zeros(0)
    for _ in range(n_iter):
        c = np.abs(S.T @ r) / norms
        c[sel] = -np.inf
        sel.append(int(np.argmax(c)))
        coef, *_ = np.linalg.lstsq(S[:, sel], y, rcond=None)
        r = y - S[:, sel] @ coef
    x = np.zeros(S.shape[1])
    x[sel] = coef
    return sel, x


def planted(seed, K, M=200, N=625):
    rng = np.random.default_rng(seed)
    S = generate_signatures(M, N, seed=rng.integers(2**32), nonzero_columns=True)
    support = rng.choice(N, size=K, replace=False)
    x = np.zeros(N)
    # gains spanning the dynamic range of a covered receiver
    x[support] = 10 ** rng.uniform(-7, -4.5, size=K)
    return S, x


def test_single_column_one_step():
    S = generate_signatures(60, 20, seed=1, nonzero_columns=True)
    y = 3.0 * S[:, 5]
    est = omp(y, S, max_iters=4)
    assert est.selected_indices == [5]
    assert np.flatnonzero(est.x_hat).tolist() == [5]
    assert est.x_hat[5] == pytest.approx(3.0, rel=1e-12)
    assert est.residual_norm <= 1e-12 * np.linalg.norm(y)


def test_zero_measurement():
    S = generate_signatures(30, 10, seed=0, nonzero_columns=True)
    est = omp(np.zeros(30), S, max_iters=5)
    assert est.n_iterations == 0
    assert not est.x_hat.any()
    assert est.residual_trace == [0.0]


def test_planted_k5_exact():
    S, x = planted(42, K=5)
    est = omp(S @ x, S, max_iters=5)
    assert set(est.selected_indices) == set(np.flatnonzero(x))
    np.testing.assert_allclose(est.x_hat, x, rtol=0, atol=1e-9 * np.abs(x).max())
    assert np.linalg.norm(est.x_hat - x) / np.linalg.norm(x) < 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_matches_reference_on_noisy_input(seed):
    S, x = planted(seed, K=12)
    rng = np.random.default_rng(seed + 100)
    y = S @ x + rng.normal(0, 1e-6, size=S.shape[0])
    est = omp(y, S, max_iters=14)
    sel, xr = reference_omp(y, S, 14)
    assert est.selected_indices == sel
    np.testing.assert_allclose(est.x_hat, xr, rtol=1e-10, atol=1e-10 * np.abs(xr).max())


@pytest.mark.parametrize("seed", range(10))
def test_residual_monotone_and_orthogonal(seed):
    S, x = planted(seed, K=10)
    y = S @ x + np.random.default_rng(seed).normal(0, 2e-6, size=200)
    est = omp(y, S, max_iters=14)
    assert np.all(np.diff(est.residual_trace) <= 1e-15 * est.residual_trace[0])
    assert len(set(est.selected_indices)) == len(est.selected_indices)
    r = y - S @ est.x_hat
    Ssel = S[:, est.selected_indices]
    cos = np.abs(Ssel.T @ r) / (np.linalg.norm(Ssel, axis=0) * np.linalg.norm(r))
    assert cos.max() < 1e-10
    assert est.residual_norm == pytest.approx(np.linalg.norm(r), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 1e3))
def test_scaling_homogeneity(seed, c):
    S, x = planted(seed, K=8, M=80, N=200)
    y = S @ x + np.random.default_rng(seed).normal(0, 1e-6, size=80)
    a = omp(y, S, max_iters=10)
    b = omp(c * y, S, max_iters=10)
    assert a.selected_indices == b.selected_indices
    np.testing.assert_allclose(b.x_hat, c * a.x_hat, rtol=1e-9, atol=1e-12 * c * np.abs(a.x_hat).max())


def test_residual_tolerance_stops_early():
    S, x = planted(3, K=6)
    y = S @ x
    full = omp(y, S, max_iters=6)
    early = omp(y, S, max_iters=6, residual_tol=full.residual_trace[2] * 1.0000001)
    assert early.n_iterations == 2
    assert early.selected_indices == full.selected_indices[:2]


def test_iterations_capped():
    S, x = planted(4, K=12)
    est = omp(S @ x, S, max_iters=3)
    assert est.n_iterations == 3
    assert np.count_nonzero(est.x_hat) == 3


def test_dependent_column_is_dropped():
    S = np.array([[1.0, 1.0], [0.0, 1e-12], [0.0, 0.0]])
    est = omp(np.array([1.0, 1.0, 0.0]), S, max_iters=2)
    assert est.n_dropped == 1
    assert est.n_iterations == 1


def test_accepts_received_signal():
    S, x = planted(8, K=4, M=50, N=100)
    est = omp(ReceivedSignal(y=S @ x, noise_variance=0.0), S, max_iters=4)
    assert set(est.selected_indices) == set(np.flatnonzero(x))


def test_rejects_zero_column_and_bad_args():
    S = np.ones((4, 3))
    S[:, 1] = 0
    with pytest.raises(ValueError):
        omp(np.ones(4), S, 2)
    with pytest.raises(ValueError):
        omp(np.ones(4), np.ones((4, 3)), 0)
    with pytest.raises(ValueError):
        omp(np.ones(5), np.ones((4, 3)), 1)


def test_support_of():
    est = SparseEstimate(x_hat=np.zeros(6), selected_indices=[], residual_norm=0.0)
    assert support_of(est, 0.0) == set()
    est = SparseEstimate(x_hat=np.array([0, 0, 2.5, 0, 0, 0.0]), selected_indices=[2], residual_norm=0.0)
    assert support_of(est) == {2}
    est = SparseEstimate(x_hat=np.array([0.1, -0.5, 0.0, 0.3]), selected_indices=[0, 1, 3], residual_norm=0.0)
    assert support_of(est, 0.2) == {1, 3}
    with pytest.raises(ValueError):
        support_of(est, -1)


def test_noisy_support_recovery_at_40db(base_geom, base_leds, params):
    """K=12 instances at baseline dimensions: support found in >= 95 of 100 trials."""
    from vlcpos.channel import gain_vector
    from vlcpos.geometry import coverage_vector
    from vlcpos.signal import compose_x, noise_variance_for_snr, synthesize

    S = generate_signatures(200, 625, seed=2024, nonzero_columns=True)
    rng = np.random.default_rng(77)
    hits = trials = 0
    while trials < 100:
        u = rng.uniform(4, 46, size=2)
        lam, K = coverage_vector(base_geom, base_leds, u)
        if K != 12:
            continue
        x = compose_x(lam, gain_vector(params, base_leds, u))
        s2 = noise_variance_for_snr(S, x, 40.0)
        y = synthesize(S, x, s2, seed=trials)
        est = omp(y, S, max_iters=14, residual_tol=np.sqrt(200 * s2))
        # ~5 standard deviations of a least-squares coefficient of a {0,1} column
        threshold = 5 * 2 * np.sqrt(s2 / 200)
        hits += support_of(est, threshold) == set(np.flatnonzero(lam))
        trials += 1
    assert hits >= 95


def test_noiseless_planted_property_over_seeds():
    # signal-model instances at baseline dimensions; failures reported as a rate
    from vlcpos.channel import ChannelParams, gain_vector
    from vlcpos.geometry import SceneGeometry, coverage_vector, led_grid

    geom, params = SceneGeometry(), ChannelParams()
    leds = led_grid(geom)
    ok = tried = 0
    for seed in range(120):
        rng = np.random.default_rng(seed)
        S = generate_signatures(200, 625, seed=rng.integers(2**32), nonzero_columns=True)
        u = rng.random(2) * geom.floor_side
        lam, K = coverage_vector(geom, leds, u)
        if K == 0:
            continue
        tried += 1
        x = lam * gain_vector(params, leds, u)
        est = omp(S @ x, S, 14)
        ok += np.linalg.norm(est.x_hat - x) / np.linalg.norm(x) <= 1e-8
    assert tried >= 100 and ok / tried >= 0.99
