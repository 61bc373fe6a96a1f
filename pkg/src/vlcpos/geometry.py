"""Floor plane, ceiling LED grid and circular coverage areas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

# Absolute slack (m) on the coverage boundary so that points lying on the
# circle up to floating-point rounding count as covered.
COVERAGE_ATOL = 1e-9


@dataclass(frozen=True)
class SceneGeometry:
    """Square floor with an ``n_led_per_side`` x ``n_led_per_side`` LED grid.

    Parameters
    ----------
    floor_side : float
        Side length of the square floor (m).
    ceiling_height : float
        Height ``h`` of every LED above the floor (m).
    n_led_per_side : int
        Number of LEDs along one side; the scene holds ``N = n_led_per_side**2``.
    coverage_radius : float
        Radius ``r`` of each LED's circular footprint on the floor (m).
    """

    floor_side: float = 50.0
    ceiling_height: float = 3.0
    n_led_per_side: int = 25
    coverage_radius: float = 4.0

    def __post_init__(self):
        if not self.floor_side > 0:
            raise ValueError(f"floor_side must be > 0, got {self.floor_side}")
        if not self.ceiling_height > 0:
            raise ValueError(f"ceiling_height must be > 0, got {self.ceiling_height}")
        if int(self.n_led_per_side) != self.n_led_per_side or self.n_led_per_side < 1:
            raise ValueError(f"n_led_per_side must be an integer >= 1, got {self.n_led_per_side}")
        if not self.coverage_radius > 0:
            raise ValueError(f"coverage_radius must be > 0, got {self.coverage_radius}")

    @property
    def n_leds(self) -> int:
        return int(self.n_led_per_side) ** 2

    @property
    def spacing(self) -> float:
        return self.floor_side / self.n_led_per_side


def led_grid(geom: SceneGeometry) -> np.ndarray:
    """Cell-centred LED positions.

    Returns
    -------
    ndarray of shape (N, 3)
        Rows ``[a_i, b_i, h]``. LED ``i`` sits at grid cell
        ``(i // n, i % n)`` so the x coordinate varies slowest.
    """
    n = int(geom.n_led_per_side)
    s = geom.spacing
    c = (np.arange(n) + 0.5) * s
    a, b = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([a.ravel(), b.ravel(), np.full(n * n, geom.ceiling_height)])


def horizontal_distance(leds: np.ndarray, u) -> np.ndarray:
    leds = np.atleast_2d(leds)
    u = np.asarray(u, dtype=float)
    return np.hypot(leds[:, 0] - u[0], leds[:, 1] - u[1])


def coverage_indicator(geom: SceneGeometry, led, u) -> int:
    """1 if ``u`` lies inside (or on) the coverage circle of ``led``."""
    d = horizontal_distance(np.asarray(led, dtype=float)[None, :2], u)[0]
    return int(d <= geom.coverage_radius + COVERAGE_ATOL)


def coverage_vector(geom: SceneGeometry, leds: np.ndarray, u) -> tuple[np.ndarray, int]:
    """Binary coverage vector ``lambda`` at ``u`` and its support size ``K``."""
    lam = (horizontal_distance(leds, u) <= geom.coverage_radius + COVERAGE_ATOL).astype(np.int8)
    return lam, int(lam.sum())


def sample_grid(floor_side: float, resolution: float, margin: float = 0.0) -> np.ndarray:
    """Points ``margin + k * resolution`` covering ``[margin, floor_side - margin]``.

    Coordinates are built as integer multiples of ``resolution`` so that grid
    points align with the LED lattice where the two are commensurate.
    """
    if not resolution > 0:
        raise ValueError(f"sample_resolution must be > 0, got {resolution}")
    lo, hi = margin, floor_side - margin
    if hi < lo:
        raise ValueError(f"margin {margin} leaves no floor area")
    k0 = int(np.ceil(lo / resolution - 1e-9))
    k1 = int(np.floor(hi / resolution + 1e-9))
    return np.arange(k0, k1 + 1) * resolution


def sparsity_map(
    geom: SceneGeometry,
    leds: np.ndarray,
    sample_resolution: float = 0.1,
    margin: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Number of covering LEDs ``K(u)`` on a regular sampling grid.

    Returns ``(xs, ys, K)`` where ``K[i, j]`` is the count at ``(xs[i], ys[j])``.
    """
    xs = sample_grid(geom.floor_side, sample_resolution, margin)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    tree = cKDTree(np.asarray(leds)[:, :2])
    counts = tree.query_ball_point(pts, geom.coverage_radius + COVERAGE_ATOL, return_length=True)
    return xs, xs.copy(), np.asarray(counts, dtype=int).reshape(X.shape)


def k_max(geom: SceneGeometry, leds: np.ndarray, sample_resolution: float = 0.1) -> int:
    """Maximum sparsity over the floor, estimated on a sampling grid."""
    _, _, K = sparsity_map(geom, leds, sample_resolution)
    return int(K.max())
