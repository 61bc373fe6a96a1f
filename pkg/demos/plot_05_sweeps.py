"""
Parameter sweeps
================

Monte-Carlo sweeps over SNR, signature length, coverage radius and LED
density. Each point averages the position error (MPE), the support error
(SRE) and the error of the proximity estimate built from the true LED set
(min-MPE) over random receivers. Pass a UD count on the command line for
smoother curves, e.g. ``python plot_05_sweeps.py 1000``.
"""

import sys
from dataclasses import replace

from vlcpos import RunConfig, run_sweep
from vlcpos.config import SignalConfig

n_ud = int(sys.argv[1]) if len(sys.argv) > 1 else 100
base = RunConfig()


def show(title, res):
    print(f"\n{title}  ({res.axis_name}, {n_ud} UDs)")
    print("  value    MPE     SRE   min-MPE")
    for p in res.points:
        print(f"  {p.axis_value:5.1f}  {p.mpe:6.3f}  {p.mean_sre:5.2f}  {p.min_mpe:6.3f}")


# %%
# Error against SNR, M = 200.
show("SNR sweep", run_sweep(replace(base, signal=SignalConfig(M=200)), "snr", range(10, 50, 5), n_ud))

# %%
# Error against signature length at 20 dB.
show("M sweep", run_sweep(replace(base, signal=SignalConfig(snr_db=20)), "m", [25, 50, 75, 100, 150, 200], n_ud))

# %%
# Coverage radius, M = 100 at 20 dB. A larger radius means more LEDs to
# unmix per receiver.
show("r sweep", run_sweep(replace(base, signal=SignalConfig(M=100, snr_db=20)), "r",
                          [2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0], n_ud))

# %%
# LED density at two SNRs.
for snr in (20, 30):
    show(f"density sweep at {snr} dB",
         run_sweep(replace(base, signal=SignalConfig(M=100, snr_db=snr)), "nled", [10, 15, 20, 25, 30], n_ud))
