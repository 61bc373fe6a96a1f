"""LED ID signatures and synthesis of the superposed received signal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReceivedSignal:
    y: np.ndarray
    noise_variance: float
    snr_db: float | None = None

    @property
    def M(self) -> int:
        return self.y.shape[0]


def generate_signatures(M: int, N: int, seed=None, nonzero_columns: bool = False) -> np.ndarray:
    """Draw an ``M x N`` matrix of i.i.d. equiprobable {0, 1} OOK symbols.

    Column ``i`` is the ID sequence of LED ``i``. With ``nonzero_columns`` the
    generator keeps redrawing any all-zero column from the same stream, which
    greedy recovery needs (a silent LED has no direction to correlate with).
    """
    if M < 1 or N < 1:
        raise ValueError(f"M and N must be >= 1, got M={M}, N={N}")
    rng = np.random.default_rng(seed)
    S = rng.integers(0, 2, size=(M, N)).astype(float)
    if nonzero_columns:
        dead = np.flatnonzero(~S.any(axis=0))
        while dead.size:
            S[:, dead] = rng.integers(0, 2, size=(M, dead.size))
            dead = dead[~S[:, dead].any(axis=0)]
    return S


def compose_x(lam, alpha) -> np.ndarray:
    """Sparse gain vector ``x = lambda * alpha`` (element-wise)."""
    lam = np.asarray(lam)
    alpha = np.asarray(alpha, dtype=float)
    if lam.shape != alpha.shape:
        raise ValueError(f"length mismatch: lambda {lam.shape} vs alpha {alpha.shape}")
    return lam * alpha


def noise_variance_for_snr(S: np.ndarray, x: np.ndarray, snr_db: float) -> float:
    """Noise variance giving the requested per-sample received SNR.

    Signal power is the mean square of the noiseless received samples ``S @ x``
    for this particular receiver position.
    """
    z = S @ x
    p_sig = float(np.mean(z * z))
    if p_sig == 0.0:
        raise ValueError("noiseless received signal is identically zero; SNR is undefined")
    return p_sig / 10.0 ** (snr_db / 10.0)


def synthesize(S: np.ndarray, x: np.ndarray, noise_variance: float, seed=None, snr_db=None) -> ReceivedSignal:
    """``y = S x + n`` with ``n ~ N(0, noise_variance I)``."""
    if noise_variance < 0:
        raise ValueError(f"noise variance must be >= 0, got {noise_variance}")
    S = np.asarray(S, dtype=float)
    x = np.asarray(x, dtype=float)
    if S.shape[1] != x.shape[0]:
        raise ValueError(f"S has {S.shape[1]} columns but x has length {x.shape[0]}")
    y = S @ x
    if noise_variance > 0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, np.sqrt(noise_variance), size=S.shape[0])
    return ReceivedSignal(y=y, noise_variance=float(noise_variance), snr_db=snr_db)
