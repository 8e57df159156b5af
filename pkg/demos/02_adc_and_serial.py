# %% [markdown]
# From volts to a serial log
#
# The microcontroller samples at 256 Hz with a 10-bit converter on a 5 V
# reference and prints one `timestamp_ms,code` line per sample.

# %%
import numpy as np

from eogforge import AdcConfig, SerialLog, acquire, lsb, parse_serial_csv, write_serial_csv

adc = AdcConfig()
print(f"one code = {lsb(adc) * 1e3:.4f} mV")

# %% [markdown]
# A slow 1 Hz sine simulated at 1024 Hz, decimated by the acquirer to 256 Hz.

# %%
fs = 1024.0
t = np.arange(int(fs)) / fs
volts = 2.5 + 2.0 * np.sin(2 * np.pi * t)
stream = acquire(volts, fs, adc)
print(len(stream), "samples; first codes:", stream.codes[:8].tolist())

# %% [markdown]
# Write the log, read it back. Timestamps are whole milliseconds on the wire,
# so a second pass is an exact fixed point.

# %%
text = write_serial_csv(SerialLog(stream, source="demo"))
print(text.splitlines()[:6])
back = parse_serial_csv(text)
assert np.array_equal(back.records.codes, stream.codes)
assert parse_serial_csv(write_serial_csv(back)) == back
print("round trip ok")
