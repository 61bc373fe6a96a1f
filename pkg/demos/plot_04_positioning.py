"""
From detections to a position
=============================

The receiver ranks recovered gains, keeps the strongest LED, then accepts
further LEDs only while they stay within ``d_th`` of the running centroid.
The estimate is the mean position of the accepted LEDs.
"""

import numpy as np

from vlcpos import RunConfig, recover_position
from vlcpos.evaluation import min_mpe_oracle, prepare, recover, simulate_received

config = RunConfig()
sc = prepare(config)
u = np.array([12.4, 40.1])

lam, x, y = simulate_received(config, u, noise_seed=5)
est = recover(config, y)
pos = recover_position(est.x_hat, sc.leds, sc.k_max, sc.d_th)
oracle = min_mpe_oracle(config.scene, sc.leds, u)

print("true position     ", u)
print("estimate          ", pos.u_hat.round(3), f"error {np.hypot(*(pos.u_hat - u)):.3f} m")
print("oracle (true set) ", oracle.round(3), f"error {np.hypot(*(oracle - u)):.3f} m")
print("accepted LEDs     ", sorted(pos.accepted_support))
print("covering LEDs     ", np.flatnonzero(lam).tolist())

# %%
# A far-away spurious detection is ignored by the distance gate.
x_hat = est.x_hat.copy()
x_hat[0] = 0.5 * x_hat.max()
gated = recover_position(x_hat, sc.leds, sc.k_max, sc.d_th)
print("with a fake LED 0:", gated.u_hat.round(3), "LED 0 accepted:", 0 in gated.accepted_support)
