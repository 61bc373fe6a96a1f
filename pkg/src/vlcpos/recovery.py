"""Orthogonal matching pursuit with an incrementally grown QR factorisation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .signal import ReceivedSignal

# A candidate column whose component orthogonal to the already selected span
# is below this fraction of its own norm is treated as linearly dependent.
RANK_TOL = 1e-10
# Residuals below this fraction of ||y|| count as an exact fit.
EXACT_RTOL = 1e-12


@dataclass
class SparseEstimate:
    """Result of a sparse recovery run.

    ``residual_trace[0]`` is ``||y||``; entry ``k`` is the residual norm after
    ``k`` accepted columns. ``n_dropped`` counts columns rejected as linearly
    dependent on the current selection.
    """

    x_hat: np.ndarray
    selected_indices: list[int]
    residual_norm: float
    residual_trace: list[float] = field(default_factory=list)
    n_dropped: int = 0

    @property
    def n_iterations(self) -> int:
        return len(self.selected_indices)


def omp(y, S: np.ndarray, max_iters: int, residual_tol: float = 0.0) -> SparseEstimate:
    """Recover a sparse ``x`` from ``y = S x + n`` by orthogonal matching pursuit.

    Each iteration picks the unselected column with the largest normalised
    correlation ``|<r, s_j>| / ||s_j||`` with the current residual ``r``, then
    refits all selected coefficients by least squares. Iteration stops after
    ``max_iters`` columns or once ``||r|| <= residual_tol`` (or the fit is
    exact to ``EXACT_RTOL * ||y||``).

    Parameters
    ----------
    y : ndarray or ReceivedSignal
        Measurements, shape (M,).
    S : ndarray
        Sensing matrix, shape (M, N), without all-zero columns.
    max_iters : int
        Maximum support size.
    residual_tol : float
        Residual two-norm at which to stop early.

    Returns
    -------
    SparseEstimate
    """
    if isinstance(y, ReceivedSignal):
        y = y.y
    y = np.asarray(y, dtype=float)
    S = np.asarray(S, dtype=float)
    M, N = S.shape
    if y.shape != (M,):
        raise ValueError(f"y has shape {y.shape}, expected ({M},)")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    norms = np.linalg.norm(S, axis=0)
    if np.any(norms == 0):
        raise ValueError("S has an all-zero column; regenerate the signatures")

    cap = min(int(max_iters), M)
    Q = np.zeros((M, cap))
    R = np.zeros((cap, cap))
    available = np.ones(N, dtype=bool)
    selected: list[int] = []
    residual = y.copy()
    trace = [float(np.linalg.norm(y))]
    dropped = 0
    stop = max(float(residual_tol), EXACT_RTOL * trace[0])

    while len(selected) < cap and trace[-1] > stop and available.any():
        corr = np.abs(S.T @ residual) / norms
        corr[~available] = -1.0
        j = int(np.argmax(corr))
        if corr[j] <= 0.0:
            break
        available[j] = False

        k = len(selected)
        v = S[:, j].copy()
        coeffs = np.zeros(k)
        # classical Gram-Schmidt, applied twice
        for _ in range(2):
            c = Q[:, :k].T @ v
            v -= Q[:, :k] @ c
            coeffs += c
        nv = np.linalg.norm(v)
        if nv <= RANK_TOL * norms[j]:
            dropped += 1
            continue
        R[:k, k] = coeffs
        R[k, k] = nv
        Q[:, k] = v / nv
        selected.append(j)

        Qk = Q[:, : k + 1]
        residual = y - Qk @ (Qk.T @ y)
        trace.append(float(np.linalg.norm(residual)))

    x_hat = np.zeros(N)
    k = len(selected)
    if k:
        x_hat[selected] = solve_triangular(R[:k, :k], Q[:, :k].T @ y)
    return SparseEstimate(
        x_hat=x_hat,
        selected_indices=selected,
        residual_norm=trace[-1],
        residual_trace=trace,
        n_dropped=dropped,
    )


def support_of(est: SparseEstimate, threshold: float = 0.0) -> set[int]:
    """Indices with ``|x_hat_i| > threshold``."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    x_hat = est.x_hat if isinstance(est, SparseEstimate) else np.asarray(est)
    return {int(i) for i in np.flatnonzero(np.abs(x_hat) > threshold)}
