"""
Line-of-sight channel gain
==========================

Gain of a Lambertian LED pointing down onto an upward-facing photodiode,
as a function of horizontal offset. The receiver concentrator cuts the gain
to zero past its field of view.
"""

import numpy as np

from vlcpos import ChannelParams, channel_gain

params = ChannelParams()
print(f"Lambertian order m = {params.lambertian_order:.4f}")

led = (0.0, 0.0, 3.0)
for offset in (0.0, 1.0, 2.0, 3.0, 4.0, 8.0, 16.0, 20.0):
    g = channel_gain(params, led, (offset, 0.0))
    angle = np.degrees(np.arctan2(offset, 3.0))
    print(f"offset {offset:5.1f} m  incidence {angle:5.1f} deg  gain {g:.3e}")

# %%
# A narrower beam concentrates power under the lamp.
for deg in (15, 30, 60):
    p = ChannelParams.from_degrees(half_power_semiangle_deg=deg)
    print(f"semi-angle {deg:2d} deg: m = {p.lambertian_order:.3f}, "
          f"nadir {channel_gain(p, led, (0, 0)):.3e}, 3 m off {channel_gain(p, led, (3, 0)):.3e}")
