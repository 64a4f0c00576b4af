"""
Phase sensitivity against amplifier gain
========================================

Find the best operating point of the interferometer and compare its phase
uncertainty with a shot-noise-limited double-pass linear interferometer that
uses the same seed photons.
"""

# %%
import numpy as np

from sagnac_nli import NliConfig, linear_baseline, optimal_sensitivity

alpha2 = 1e6
print(f"{'G':>4} {'phi*':>10} {'dphi':>10} {'ratio':>8} {'2G':>5}")
for g in (2, 4, 8, 10, 16):
    cfg = NliConfig(g1=g, g2=g, alpha2=alpha2)
    phi_star, dphi = optimal_sensitivity(cfg)
    ratio = linear_baseline(alpha2, passes=2) / dphi
    print(f"{g:4d} {phi_star:10.6f} {dphi:10.3e} {ratio:8.2f} {2 * g:5d}")

# %%
# Without loss the optimum sits right at the dark fringe. Loss in the loop
# pulls it away and costs sensitivity.
for eta in (1.0, 0.99, 0.9):
    cfg = NliConfig(g1=4, g2=4, alpha2=alpha2, probe_eta=eta, conj_eta=eta)
    phi_star, dphi = optimal_sensitivity(cfg)
    print(f"eta = {eta}: phi* = {phi_star:.4f}, dphi = {dphi:.3e}")
