"""
LED grid and coverage
=====================

The ceiling carries an ``n x n`` grid of LEDs, one at the centre of each
cell. A receiver on the floor hears an LED when the horizontal distance is
at most the coverage radius ``r``. The number of LEDs heard at a point is
the sparsity ``K`` of the signal the receiver has to unmix.
"""

import numpy as np

from vlcpos import SceneGeometry, led_grid, sparsity_map
from vlcpos.geometry import coverage_vector

geom = SceneGeometry()
leds = led_grid(geom)
print(f"{geom.n_leds} LEDs, spacing {geom.spacing} m, first LED at {leds[0]}")

# %%
# A single point in the middle of the room.
lam, K = coverage_vector(geom, leds, (25.0, 25.0))
print("covered by", K, "LEDs:", np.flatnonzero(lam))

# %%
# Sparsity over the whole floor and over the interior (one radius away from
# the walls). Near the walls fewer LEDs reach the receiver.
for margin in (0.0, geom.coverage_radius):
    _, _, Kmap = sparsity_map(geom, leds, 0.25, margin=margin)
    vals, counts = np.unique(Kmap, return_counts=True)
    print(f"margin {margin} m: K in [{Kmap.min()}, {Kmap.max()}], mean {Kmap.mean():.2f}")
    print("   histogram", dict(zip(vals.tolist(), counts.tolist())))
