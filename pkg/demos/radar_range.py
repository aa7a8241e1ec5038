"""
Radar range: detection plateau versus resolution limit
======================================================

The radar range is bounded twice by the same echo SNR curve: once by the
detection threshold and once by the SNR needed to estimate range to a given
variance. Below the crossover bandwidth the second bound is tighter and grows
as sqrt(B).
"""

# %%
# Load the bundled parameter set
import numpy as np

from jrcc import radar
from jrcc.experiments import radar_range_rows
from jrcc.scenario import load_bundled

sc = load_bundled("paper_fig4")
params = sc.radar
power = sc.budgets.radar_power
print(f"radar power {power:g} W, threshold {10 * np.log10(params.snr_threshold):.1f} dB")

# %%
# Sweep the bandwidth
bws = np.geomspace(1e5, 1e8, 7)
for row in radar_range_rows(sc, bws):
    print(f"{row['block']:>6}  B = {row['bandwidth_hz']:9.3g} Hz  "
          f"range {row['max_effective_m'] / 1e3:7.2f} km  ({row['limiting_factor']})")

# %%
# Crossover and the fourth-root law
print("crossover bandwidth:", radar.crossover_bandwidth(params))
r1 = radar.detection_limited_range(params, power)
r2 = radar.detection_limited_range(params, 2 * power)
print("doubling power scales range by", r2 / r1)
