"""
Trading radar range for covert rate, and adding elements
========================================================

Moving power from the radar to communication shortens the radar range and
raises the covert rate, with diminishing returns at both ends. A larger
surface raises the covert rate; worst-case CSI lowers it.
"""

# %%
from jrcc.experiments import parse_sweep, pap_tradeoff_rows, rate_vs_elements_rows
from jrcc.mpso import SwarmConfig
from jrcc.scenario import load_bundled

rows = pap_tradeoff_rows(load_bundled("paper_fig7"), parse_sweep("0:1:6"), channel_seeds=5)
for r in rows:
    print(f"pap {r['pap']:.1f}: range {r['max_effective_radar_range_m'] / 1e3:6.2f} km, "
          f"sum covert rate {r['sum_covert_rate_bps'] / 1e6:6.2f} Mbit/s")

# %%
# A short run: 2 channel seeds and 100 iterations instead of 10 and 300.
sc = load_bundled("paper_fig6")
rows = rate_vs_elements_rows(sc, [90, 180, 270], channel_seeds=2,
                             config=SwarmConfig(iterations=100))
for r in rows:
    print(f"L = {r['num_elements']}: perfect {r['sum_covert_rate_perfect_csi']:9.0f}  "
          f"worst case {r['sum_covert_rate_worst_case']:9.0f}  no RIS {r['baseline_no_ris']:6.0f}")
