# %% [markdown]
# Signal quality numbers
#
# SNR here is mean-square over variance in dB. A signal riding on a large
# resting level therefore scores high even if it barely moves, which the
# band-power estimate does not.

# %%
import math

import numpy as np

from eogforge import mean_latency, preset, simulate, snr_db
from eogforge.metrics import band_power_snr_db

ms, var = 5773240121, 19807119
s, m = math.sqrt(var), math.sqrt(ms - var)
seq = np.array([m + s, m - s] * 500)
print(f"two-level sequence: {snr_db(seq).snr_db:.5f} dB")

# %%
sim = simulate(preset("fig6"))
v = sim.stream.volts
print(f"fig6 run, mean-square/variance: {snr_db(v).snr_db:6.2f} dB")
print(f"fig6 run, 0.1-10 Hz band power: {band_power_snr_db(v, 256.0).snr_db:6.2f} dB")

# %% [markdown]
# Latency pairs each stimulus with the first unclaimed detection inside the
# window; leftovers count as misses and false positives.

# %%
r = mean_latency([1.0, 2.0, 3.0], [1.004, 2.00432, 3.9], 0.5)
print(f"mean {r.mean_latency * 1e3:.2f} ms over {r.n_pairs} pairs, "
      f"{r.misses} miss, {r.false_positives} false positive")
