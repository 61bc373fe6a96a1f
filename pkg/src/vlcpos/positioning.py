"""Receiver position from recovered channel gains (proximity method with distance gating)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import Point, box

from .geometry import SceneGeometry
from .recovery import SparseEstimate

ESTIMATORS = ("gated-prox", "area-centroid")


class NoDetectionError(ValueError):
    """Raised when the recovered gain vector holds no detection at all."""


@dataclass(frozen=True)
class PositionEstimate:
    u_hat: np.ndarray
    accepted_support: tuple[int, ...]


def prox(led_positions) -> np.ndarray:
    """Average horizontal position of a set of LEDs."""
    pts = np.atleast_2d(np.asarray(led_positions, dtype=float))
    if pts.shape[0] == 0 or pts.size == 0:
        raise ValueError("prox needs at least one LED position")
    return pts[:, :2].mean(axis=0)


def area_centroid(leds: np.ndarray, indices, radius: float, floor_side: float | None = None,
                  quad_segs: int = 64) -> np.ndarray:
    """Centroid of the union of coverage disks of the given LEDs.

    Disks are clipped to the floor square when ``floor_side`` is given.
    """
    indices = list(indices)
    if not indices:
        raise ValueError("area_centroid needs at least one LED")
    pts = np.asarray(leds, dtype=float)[indices, :2]
    disks = [Point(x, y).buffer(radius, quad_segs=quad_segs) for x, y in pts]
    region = shapely.union_all(disks)
    if floor_side is not None:
        region = region.intersection(box(0.0, 0.0, floor_side, floor_side))
    c = region.centroid
    return np.array([c.x, c.y])


def ranked_detections(x_hat: np.ndarray) -> np.ndarray:
    """Indices of non-zero entries, sorted by value descending, ties by index."""
    nz = np.flatnonzero(x_hat)
    # lexsort: last key is primary
    order = np.lexsort((nz, -x_hat[nz]))
    return nz[order]


def recover_position(
    x_hat,
    leds: np.ndarray,
    k_max: int,
    d_th: float,
    estimator: str = "gated-prox",
    geom: SceneGeometry | None = None,
) -> PositionEstimate:
    """Distance-gated proximity estimate from a recovered gain vector.

    The strongest detection seeds the estimate. Each of the next strongest
    ``k_max - 1`` detections is accepted only if its LED lies strictly within
    ``d_th`` (horizontal distance) of the running estimate, which is then
    recomputed as the mean of all accepted LED positions.

    With ``estimator="area-centroid"`` the accepted set is chosen the same way
    and the final position is the centroid of the union of their coverage
    disks instead; ``geom`` is then required for the radius.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if not d_th > 0:
        raise ValueError(f"d_th must be > 0, got {d_th}")
    if isinstance(x_hat, SparseEstimate):
        x_hat = x_hat.x_hat
    x_hat = np.asarray(x_hat, dtype=float)
    leds = np.asarray(leds, dtype=float)

    candidates = ranked_detections(x_hat)[:k_max]
    if candidates.size == 0:
        raise NoDetectionError("recovered gain vector is identically zero")

    accepted = [int(candidates[0])]
    u_hat = leds[candidates[0], :2].copy()
    for i in candidates[1:]:
        if np.hypot(*(leds[i, :2] - u_hat)) < d_th:
            accepted.append(int(i))
            u_hat = prox(leds[accepted])

    if estimator == "area-centroid":
        if geom is None:
            raise ValueError("area-centroid estimator needs the scene geometry")
        u_hat = area_centroid(leds, accepted, geom.coverage_radius, geom.floor_side)
    return PositionEstimate(u_hat=u_hat, accepted_support=tuple(accepted))
