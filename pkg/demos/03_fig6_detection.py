# %% [markdown]
# Ten alternating saccades through the whole chain
#
# The fig6 preset attenuates the electrode signal, parks the resting level at
# 0.049 V, and uses 0.050 V / 0.040 V thresholds. Rightward glances push the
# signal up through the first, leftward glances pull it under the second.

# %%
import numpy as np

from eogforge import accuracy_report, detect_events, digital_output, preset, simulate

cfg = preset("fig6")
sim = simulate(cfg)
print("config hash", sim.config_hash)
print(f"{len(sim.stream)} samples, ADC range {sim.stream.volts.min():.4f}..{sim.stream.volts.max():.4f} V")

# %%
events = detect_events(sim.stream, cfg.detector)
for e in events:
    print(f"{e.onset:7.3f} s  {e.polarity:4s}  peak {e.peak_value:.4f} V at {e.peak_time:.3f} s")

# %% [markdown]
# Score against the scenario: UP events must answer rightward saccades and
# DOWN events leftward ones, within half a second.

# %%
rep = accuracy_report(sim.scenario, events, cfg.match_window)
print(f"hits {rep.hits}  misses {rep.misses}  false positives {rep.false_positives}")
print("latencies (ms):", np.round(np.array(rep.latencies) * 1e3, 1).tolist())

# %% [markdown]
# The comparator line the microcontroller would drive: high while a rightward
# event is open.

# %%
d = digital_output(sim.stream, cfg.detector)
print("rising edges:", int(np.count_nonzero(np.diff(np.concatenate([[0], d])) == 1)))
