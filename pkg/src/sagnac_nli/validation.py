"""Cross-check of the Gaussian engine against the truncated-Fock oracle on random circuits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fock
from .model import CONJ, PROBE, NliConfig, interferometer_state
from . import gaussian as gc

# (g1, g2, alpha, phi, pump_phase) -> {"mean_c", "var_c", "mean_p", "var_p"}
Engine = Callable[[float, float, complex, float, float], dict]


def gaussian_engine(g1, g2, alpha, phi, pump_phase):
    cfg = NliConfig(g1=g1, g2=g2, alpha2=abs(alpha) ** 2, pump_phase=pump_phase)
    state = interferometer_state(cfg, phi, alpha_phase=float(np.angle(alpha)))
    return {
        "mean_c": gc.mode_mean_photon(state, CONJ),
        "var_c": gc.mode_photon_variance(state, CONJ),
        "mean_p": gc.mode_mean_photon(state, PROBE),
        "var_p": gc.mode_photon_variance(state, PROBE),
    }


def fock_engine(g1, g2, alpha, phi, pump_phase, tail_threshold=1e-12):
    state = fock.run_circuit_adaptive(
        g1, g2, alpha, phi, pump_phase, tail_threshold=tail_threshold
    )
    mean_c, _, var_c = fock.photon_moments(state, "conj")
    mean_p, _, var_p = fock.photon_moments(state, "probe")
    return {"mean_c": mean_c, "var_c": var_c, "mean_p": mean_p, "var_p": var_p}


@dataclass
class OracleCase:
    g1: float
    g2: float
    alpha: complex
    phi: float
    pump_phase: float
    engine: dict
    oracle: dict
    rel_err: float


@dataclass
class OracleReport:
    passed: bool
    max_rel_err: float
    rtol: float
    cases: list[OracleCase] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_rel_err": self.max_rel_err,
            "rtol": self.rtol,
            "n_cases": len(self.cases),
            "cases": [
                {
                    "g1": c.g1,
                    "g2": c.g2,
                    "alpha_re": c.alpha.real,
                    "alpha_im": c.alpha.imag,
                    "phi": c.phi,
                    "pump_phase": c.pump_phase,
                    "rel_err": c.rel_err,
                }
                for c in self.cases
            ],
        }


def random_circuits(n_cases: int, max_gain: float, max_alpha: float, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        g1, g2 = rng.uniform(1.0, max_gain, size=2)
        alpha = rng.uniform(0.0, max_alpha) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        phi = rng.uniform(0.0, np.pi)
        pump = rng.uniform(0.0, 2 * np.pi)
        yield float(g1), float(g2), complex(alpha), float(phi), float(pump)


def _rel_err(a: float, b: float, atol: float) -> float:
    diff = abs(a - b)
    if diff <= atol:
        return 0.0
    return diff / abs(b) if b != 0 else float("inf")


def oracle_check(
    max_gain: float = 2.0,
    max_alpha: float = 1.5,
    n_cases: int = 50,
    seed: int = 0,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    engine: Engine = gaussian_engine,
) -> OracleReport:
    """Compare ``engine`` with the Fock oracle on ``n_cases`` seeded random lossless circuits.

    Relative error is taken per moment; differences below ``atol`` count as zero.
    """
    if n_cases < 1:
        raise ValueError("n_cases must be >= 1")
    if max_gain < 1.0 or max_alpha < 0.0:
        raise ValueError("max_gain must be >= 1 and max_alpha >= 0")
    cases = []
    for g1, g2, alpha, phi, pump in random_circuits(n_cases, max_gain, max_alpha, seed):
        got = engine(g1, g2, alpha, phi, pump)
        ref = fock_engine(g1, g2, alpha, phi, pump)
        err = max(_rel_err(got[k], ref[k], atol) for k in ref)
        cases.append(OracleCase(g1, g2, alpha, phi, pump, got, ref, err))
    worst = max(c.rel_err for c in cases)
    return OracleReport(passed=worst < rtol, max_rel_err=worst, rtol=rtol, cases=cases)
