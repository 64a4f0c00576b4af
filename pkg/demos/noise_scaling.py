"""
Noise power against signal on log-log axes
==========================================

Off-tone noise tracks the photon-number variance, and the root of the
sideband-minus-noise power tracks the mean. Their log-log slope moves from 1
(Poissonian, dark side) to 2 (super-Poissonian, bright side).
"""

# %%
import numpy as np

from sagnac_nli import NliConfig, TraceModel, noise, sweep_scan

g, alpha2 = 4.1, 1e6
cfg = NliConfig(g1=g, g2=g, alpha2=alpha2)
phi_dark = np.arccos(np.sqrt(0.04 / (4 * g * (g - 1))))
tm = TraceModel(k_const=1.0, electronics_floor=0.0, noise_jitter_db=0.0)
scan = sweep_scan(cfg, tm, np.linspace(0, phi_dark, 100))

# %%
for degree in (1, 2, 3):
    res = noise.analyze_scan(scan, degree=degree, n_boot=0)
    print(f"degree {degree}: slope at dark end {res.slope_low:.3f}, bright end {res.slope_high:.3f}")

# %%
# The electronics floor hides the darkest points; the cut drops anything
# within two jitter widths of it.
tm_floor = TraceModel(k_const=1e-12, electronics_floor=1e-7, noise_jitter_db=0.0)
res = noise.analyze_scan(sweep_scan(cfg, tm_floor, np.linspace(0, np.pi / 2 - 1e-3, 100)),
                         jitter_db=0.3, n_boot=200)
print(f"{res.n_excluded} points cut at {res.cut_threshold:.2e} mW; "
      f"slopes {res.slope_low:.2f} +/- {res.sigma_low:.2f} -> {res.slope_high:.2f} +/- {res.sigma_high:.2f}")
