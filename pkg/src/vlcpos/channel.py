"""Lambertian line-of-sight optical channel gain.

The photodiode faces straight up and every LED faces straight down, so the
radiation angle at the LED equals the incidence angle at the receiver and
``cos(phi) = cos(psi) = h / d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# integer snapping window for lambertian_order, in ulps
ORDER_SNAP_ULPS = 8


@dataclass(frozen=True)
class ChannelParams:
    """LED and photodiode constants. Angles are in radians."""

    detector_area: float = 1e-4
    half_power_semiangle: float = np.deg2rad(30.0)
    optical_filter_gain: float = 1.0
    refractive_index: float = 1.5
    fov: float = np.deg2rad(80.0)

    def __post_init__(self):
        if not self.detector_area > 0:
            raise ValueError(f"detector_area must be > 0, got {self.detector_area}")
        if not 0 < self.half_power_semiangle < np.pi / 2:
            raise ValueError("half_power_semiangle must lie in (0, pi/2)")
        if not 0 < self.fov <= np.pi / 2:
            raise ValueError("fov must lie in (0, pi/2]")
        if not self.refractive_index >= 1:
            raise ValueError(f"refractive_index must be >= 1, got {self.refractive_index}")
        if not self.optical_filter_gain > 0:
            raise ValueError(f"optical_filter_gain must be > 0, got {self.optical_filter_gain}")

    @classmethod
    def from_degrees(cls, half_power_semiangle_deg=30.0, fov_deg=80.0, **kwargs):
        return cls(
            half_power_semiangle=np.deg2rad(half_power_semiangle_deg),
            fov=np.deg2rad(fov_deg),
            **kwargs,
        )

    @property
    def lambertian_order(self) -> float:
        return lambertian_order(self.half_power_semiangle)


def lambertian_order(half_power_semiangle: float) -> float:
    """Lambertian order ``m = -ln 2 / ln cos(half_power_semiangle)``.

    Results within a few ulps of an integer are snapped to it, so nominal
    angles such as 60 degrees (where ``cos`` of the rounded radian value is
    off by one ulp) give the exact integer order.
    """
    if not 0 < half_power_semiangle < np.pi / 2:
        raise ValueError(f"half-power semi-angle must lie in (0, pi/2), got {half_power_semiangle}")
    m = float(-np.log(2.0) / np.log(np.cos(half_power_semiangle)))
    nearest = round(m)
    if nearest and abs(m - nearest) <= ORDER_SNAP_ULPS * np.spacing(nearest):
        return float(nearest)
    return m


def concentrator_gain(params: ChannelParams, psi):
    """Non-imaging concentrator gain: ``n_r**2 / sin(fov)**2`` inside the FOV, else 0."""
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0):
        raise ValueError("incidence angle must be >= 0")
    g = params.refractive_index**2 / np.sin(params.fov) ** 2
    out = np.where(psi <= params.fov, g, 0.0)
    return float(out) if out.ndim == 0 else out


def _gains(params: ChannelParams, dx, dy, dz):
    d2 = dx * dx + dy * dy + dz * dz
    cos_psi = dz / np.sqrt(d2)
    psi = np.arccos(np.clip(cos_psi, -1.0, 1.0))
    m = params.lambertian_order
    g = params.refractive_index**2 / np.sin(params.fov) ** 2
    alpha = (
        params.detector_area * (m + 1) / (2 * np.pi * d2)
        * cos_psi**m * g * params.optical_filter_gain * cos_psi
    )
    return np.where(psi <= params.fov, alpha, 0.0)


def channel_gain(params: ChannelParams, led, u) -> float:
    """LOS DC gain between one LED ``[a, b, h]`` and a receiver at ``(x, y)`` on the floor."""
    led = np.asarray(led, dtype=float)
    u = np.asarray(u, dtype=float)
    dz = led[2] - (u[2] if u.size > 2 else 0.0)
    if dz <= 0:
        raise ValueError("LED must be above the receiver")
    return float(_gains(params, led[0] - u[0], led[1] - u[1], dz))


def gain_vector(params: ChannelParams, leds: np.ndarray, u) -> np.ndarray:
    """Channel gains from every LED to the receiver at ``u``, shape (N,)."""
    leds = np.atleast_2d(np.asarray(leds, dtype=float))
    u = np.asarray(u, dtype=float)
    dz = leds[:, 2] - (u[2] if u.size > 2 else 0.0)
    if np.any(dz <= 0):
        raise ValueError("LEDs must be above the receiver")
    return _gains(params, leds[:, 0] - u[0], leds[:, 1] - u[1], dz)
