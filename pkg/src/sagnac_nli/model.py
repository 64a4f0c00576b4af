"""
The double-pass nonlinear interferometer.

A seeded probe and a vacuum conjugate pass through a parametric amplifier,
the probe picks up a phase, both fields return through the same amplifier
and the conjugate is detected. ``phi`` is always the single-pass phase; in
the double-pass geometry the probe accumulates ``2 phi`` in total.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from . import gaussian as gc

PROBE, CONJ = 0, 1

DEFAULT_FD_STEP = 1e-5
EDGE_MARGIN = 1e-6
# A central difference is called stationary when it is below this fraction
# of fringe_scale/step, which is where round-off in f(phi +/- h) lives.
STATIONARY_RTOL = 1e-12


class StationaryPointError(ValueError):
    """The fringe slope vanishes, so the error-propagation sensitivity is undefined."""


@dataclass(frozen=True)
class NliConfig:
    """Experiment description.

    ``phase_sensing`` selects the photon number a linear interferometer is
    granted in the sensitivity comparison: ``"seed"`` uses ``alpha2``,
    ``"amplified"`` uses ``g1 * alpha2``.
    """

    g1: float = 2.0
    g2: float = 2.0
    alpha2: float = 100.0
    pump_phase: float = 0.0
    probe_eta: float = 1.0
    conj_eta: float = 1.0
    det_eta: float = 1.0
    double_pass: bool = True
    second_pump_offset: float = 0.0
    phase_sensing: Literal["seed", "amplified"] = "seed"

    def __post_init__(self):
        for name in ("g1", "g2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 1.0):
                raise ValueError(f"{name} must be a finite gain >= 1, got {v}")
        if not (np.isfinite(self.alpha2) and self.alpha2 >= 0.0):
            raise ValueError(f"alpha2 must be >= 0, got {self.alpha2}")
        for name in ("probe_eta", "conj_eta", "det_eta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.phase_sensing not in ("seed", "amplified"):
            raise ValueError(f"unknown phase_sensing {self.phase_sensing!r}")

    @property
    def lossless(self) -> bool:
        return self.probe_eta == 1.0 and self.conj_eta == 1.0 and self.det_eta == 1.0

    @property
    def phase_sensing_photons(self) -> float:
        return self.alpha2 if self.phase_sensing == "seed" else self.g1 * self.alpha2


@dataclass(frozen=True)
class OutputMoments:
    mean_c: float
    second_c: float
    var_c: float
    mean_p: float = float("nan")
    var_p: float = float("nan")

    @property
    def fano_c(self) -> float:
        """var_c / mean_c, NaN on an exact null."""
        return self.var_c / self.mean_c if self.mean_c > 0 else float("nan")

    def as_dict(self) -> dict:
        return {
            "mean_c": self.mean_c,
            "second_c": self.second_c,
            "var_c": self.var_c,
            "mean_p": self.mean_p,
            "var_p": self.var_p,
            "fano_c": self.fano_c,
        }


def total_phase(config: NliConfig, phi: float) -> float:
    return 2.0 * phi if config.double_pass else phi


def interferometer_state(
    config: NliConfig, phi: float, alpha_phase: float = 0.0
) -> gc.GaussianState:
    """Two-mode output state (probe = mode 0, conjugate = mode 1) before detection loss."""
    state = gc.displace(gc.vacuum_state(2), PROBE, np.sqrt(config.alpha2) * np.exp(1j * alpha_phase))
    state = gc.apply(gc.two_mode_squeezer(config.g1, config.pump_phase), state)
    state = gc.apply(gc.phase_shift(total_phase(config, phi), PROBE), state)
    state = gc.loss_channel(state, PROBE, config.probe_eta)
    state = gc.loss_channel(state, CONJ, config.conj_eta)
    pump2 = config.pump_phase + config.second_pump_offset
    return gc.apply(gc.two_mode_squeezer(config.g2, pump2), state)


def run_exact(config: NliConfig, phi: float, alpha_phase: float = 0.0) -> OutputMoments:
    """Exact Gaussian-model photon statistics at single-pass phase ``phi``."""
    state = interferometer_state(config, phi, alpha_phase)
    detected = gc.loss_channel(state, CONJ, config.det_eta)
    mean_c = gc.mode_mean_photon(detected, CONJ)
    var_c = gc.mode_photon_variance(detected, CONJ)
    return OutputMoments(
        mean_c=mean_c,
        second_c=var_c + mean_c**2,
        var_c=var_c,
        mean_p=gc.mode_mean_photon(state, PROBE),
        var_p=gc.mode_photon_variance(state, PROBE),
    )


def closed_form_moments(gain: float, alpha2: float, phi: float) -> OutputMoments:
    """Bright-seed, equal-gain, lossless moments of the detected conjugate.

    ``mean_c = 4G(G-1) alpha2 cos^2 phi``, ``second_c = mean_c (1 + mean_c)`` and
    ``var_c = mean_c (1 + 8G(G-1) cos^2 phi)``. Spontaneous-emission terms of
    relative size ``1/alpha2`` are dropped, so ``second_c`` and
    ``var_c + mean_c**2`` differ at that order. The probe fields carry the
    analogous stimulated-only expressions.
    """
    if not gain >= 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    if alpha2 < 0:
        raise ValueError("alpha2 must be >= 0")
    m = 4.0 * gain * (gain - 1.0) * np.cos(phi) ** 2
    mean_c = m * alpha2
    # probe amplitude transfer G e^{2i phi} + (G - 1)
    probe_t = abs(gain * np.exp(2j * phi) + gain - 1.0) ** 2
    return OutputMoments(
        mean_c=float(mean_c),
        second_c=float(mean_c * (1.0 + mean_c)),
        var_c=float(mean_c * (1.0 + 2.0 * m)),
        mean_p=float(probe_t * alpha2),
        var_p=float(probe_t * alpha2 * (1.0 + 2.0 * m)),
    )


def closed_form_variance_identity(gain: float, alpha2: float, phi: float) -> float:
    """The same variance written as ``<n>(1 + 2 <n> / alpha2)``."""
    if alpha2 <= 0:
        raise ValueError("the identity form divides by alpha2, which must be > 0")
    mean_c = closed_form_moments(gain, alpha2, phi).mean_c
    return mean_c * (1.0 + 2.0 * mean_c / alpha2)


@functools.lru_cache(maxsize=256)
def fringe_scale(config: NliConfig) -> float:
    """Largest conjugate mean photon number over a period, used to scale tolerances."""
    phis = np.linspace(0.0, np.pi, 17)
    return max(1.0, max(run_exact(config, p).mean_c for p in phis))


def _mean_c(config: NliConfig, phi: float) -> float:
    return run_exact(config, phi).mean_c


def fringe_slope(config: NliConfig, phi: float, step: float = DEFAULT_FD_STEP) -> float:
    """d<n_c>/d phi by central differences with one Richardson extrapolation."""
    f = functools.partial(_mean_c, config)
    d_h = (f(phi + step) - f(phi - step)) / (2 * step)
    half = step / 2
    d_h2 = (f(phi + half) - f(phi - half)) / (2 * half)
    slope = (4.0 * d_h2 - d_h) / 3.0
    tol = max(STATIONARY_RTOL * fringe_scale(config) / step, 10.0 * abs(slope - d_h2))
    if abs(slope) <= tol:
        raise StationaryPointError(
            f"fringe slope vanishes at phi={phi:.12g}; sensitivity is undefined here"
        )
    return slope


def phase_sensitivity(config: NliConfig, phi: float, step: float = DEFAULT_FD_STEP) -> float:
    """Error-propagation phase uncertainty ``sqrt(Var n_c) / |d<n_c>/d phi|`` per single-pass radian."""
    slope = fringe_slope(config, phi, step)
    return float(np.sqrt(run_exact(config, phi).var_c) / abs(slope))


def optimal_sensitivity(config: NliConfig, n_grid: int = 64) -> tuple[float, float]:
    """Minimise :func:`phase_sensitivity` over the open quarter period ``(0, pi/2)``.

    A coarse grid brackets the minimum, bounded Brent refines it.
    """
    lo, hi = EDGE_MARGIN, np.pi / 2 - EDGE_MARGIN
    grid = np.linspace(lo, hi, n_grid)

    def objective(p):
        try:
            return phase_sensitivity(config, p)
        except StationaryPointError:
            return np.inf

    values = np.array([objective(p) for p in grid])
    if not np.any(np.isfinite(values)):
        raise StationaryPointError("no point with a nonzero fringe slope in (0, pi/2)")
    k = int(np.argmin(values))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    res = minimize_scalar(objective, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-10})
    if res.fun <= values[k]:
        return float(res.x), float(res.fun)
    return float(grid[k]), float(values[k])


def linear_baseline(n_phase_sensing: float, passes: int = 1) -> float:
    """Shot-noise-limited ``1 / (passes sqrt(N))`` of a coherent-state interferometer."""
    if not n_phase_sensing > 0:
        raise ValueError("phase-sensing photon number must be > 0")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    return 1.0 / (passes * np.sqrt(n_phase_sensing))


def snr_enhancement(config: NliConfig) -> float:
    """Double-pass linear baseline divided by the best NLI phase uncertainty."""
    if config.g1 != config.g2:
        raise ValueError("the enhancement comparison is defined for equal gains only")
    _, dphi = optimal_sensitivity(config)
    return linear_baseline(config.phase_sensing_photons, passes=2) / dphi


def fano_profile(config: NliConfig, phis) -> tuple[list[tuple[float, float]], list[float]]:
    """Fano factor of the detected conjugate along ``phis``.

    Returns ``(points, nulls)``: the ``(phi, fano)`` pairs and the phases
    skipped because the conjugate is dark there.
    """
    null_level = 1e-12 * fringe_scale(config)
    points, nulls = [], []
    for p in phis:
        m = run_exact(config, p)
        if m.mean_c <= null_level:
            nulls.append(float(p))
        else:
            points.append((float(p), m.var_c / m.mean_c))
    return points, nulls


def with_gain(config: NliConfig, gain: float) -> NliConfig:
    return replace(config, g1=gain, g2=gain)
