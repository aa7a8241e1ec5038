"""
How hard is it for the warden to notice?
========================================

The warden compares the average received power over n samples with a
threshold. Its best total error (false alarm plus missed detection) falls
from 1 as the received signal power grows. Covertness asks that it stays
above a threshold such as 0.95.
"""

# %%
import numpy as np

from jrcc.covert import detection_error, detection_error_mc, max_covert_ratio

for ratio in (0.0, 0.005, 0.0125, 0.05, 0.2, 1.0):
    analytic = detection_error(ratio, 1.0, 100)
    mc = detection_error_mc(ratio, 1.0, 100, trials=50_000, seed=1)
    print(f"p/s2 = {ratio:6.4f}: analytic {analytic.total_error:.4f}  monte carlo {mc:.4f}")

# %%
# The largest warden-side SNR that still keeps the error at 0.95
for n in (50, 100, 200, 400):
    print(f"n = {n:3d}: p/s2 <= {max_covert_ratio(n, 0.95):.5f}")
