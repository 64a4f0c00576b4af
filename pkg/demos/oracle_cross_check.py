"""
Checking the Gaussian engine against a Fock-space simulation
============================================================

The covariance-matrix engine is exact for Gaussian states. A truncated
photon-number simulation provides an independent reference.
"""

# %%
from sagnac_nli import fock, run_exact, NliConfig
from sagnac_nli.validation import oracle_check

state = fock.run_circuit_adaptive(1.5, 1.5, 1.0, 0.0, tail_threshold=1e-14)
print("Fock cutoff:", state.n_max)
print("Fock  (mean, <n^2>, var):", fock.photon_moments(state, "conj"))
m = run_exact(NliConfig(g1=1.5, g2=1.5, alpha2=1.0), 0.0)
print("Gauss (mean, <n^2>, var):", (m.mean_c, m.second_c, m.var_c))

# %%
report = oracle_check(n_cases=10, seed=1)
print(f"passed: {report.passed}, worst relative error {report.max_rel_err:.1e}")
