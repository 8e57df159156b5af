# %% [markdown]
# Analog front end
#
# The electrodes see a few millivolts at most. A three op-amp instrumentation
# amplifier takes that to volts, a second non-inverting stage adds a little
# more, and two first-order sections keep only 0.5-30 Hz.

# %%
import numpy as np

from eogforge import AfeConfig, CrpModel, design_filter, ina_gain, magnitude_response, stage2_gain, total_gain
from eogforge.afe import digital_response

afe = AfeConfig()
print(f"INA gain      {ina_gain(afe):10.1f} V/V")
print(f"stage 2 gain  {stage2_gain(afe):10.2f} V/V")
print(f"total gain    {total_gain(afe):10.1f} V/V")

# %% [markdown]
# A full 30 degree glance is 3.5 mV at the skin. Through 50000 V/V that is far
# past the 5 V rails, which is why the fig6 preset puts a divider in front.

# %%
crp = CrpModel()
peak_uv = crp.max_amplitude_uv
print(f"30 deg -> {peak_uv:.0f} uV -> {peak_uv * 1e-6 * total_gain(afe):.1f} V unclipped")

# %% [markdown]
# Magnitude response, analytic against the bilinear-transform version at
# 256 Hz. Both corners are prewarped, so the digital curve also sits at -3 dB
# exactly at 0.5 Hz and 30 Hz.

# %%
f = np.array([0.1, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0, 100.0])
analog_db = 20 * np.log10(magnitude_response(afe, f))
digital_db = 20 * np.log10(np.abs(digital_response(design_filter(afe, 256.0), f)))
print(" f_hz   analog_db  digital_db")
for row in zip(f, analog_db, digital_db):
    print("{:6.1f} {:10.3f} {:11.3f}".format(*row))
