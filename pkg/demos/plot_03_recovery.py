"""
Recovering the active LEDs
==========================

Every LED repeats its own random on/off signature of ``M`` symbols. The
photodiode sees the gain-weighted sum ``y = S x + n``; since only the few
covering LEDs have nonzero gain, ``x`` is sparse and orthogonal matching
pursuit recovers it from far fewer samples than LEDs.
"""

import numpy as np

from vlcpos import (
    ChannelParams, SceneGeometry, compose_x, gain_vector, generate_signatures, led_grid,
    noise_variance_for_snr, omp, synthesize,
)
from vlcpos.geometry import coverage_vector

geom, params = SceneGeometry(), ChannelParams()
leds = led_grid(geom)
u = np.array([17.3, 31.8])
lam, K = coverage_vector(geom, leds, u)
x = compose_x(lam, gain_vector(params, leds, u))

S = generate_signatures(200, geom.n_leds, seed=1, nonzero_columns=True)
truth = set(np.flatnonzero(x))
print(f"K = {K} active LEDs out of {geom.n_leds}")

# %%
# Recovery gets cleaner as SNR grows. The stopping residual is the
# expected noise norm.
for snr in (10, 20, 30, 40):
    sigma2 = noise_variance_for_snr(S, x, snr)
    y = synthesize(S, x, sigma2, seed=2, snr_db=snr)
    est = omp(y, S, max_iters=14, residual_tol=np.sqrt(y.M * sigma2))
    found = set(est.selected_indices)
    print(f"{snr:2d} dB: {len(found & truth)}/{K} true LEDs found, {len(found - truth)} spurious, "
          f"residual {est.residual_norm:.2e}")
