"""
Noise power against the root of the signal contrast, on log-log axes.

``x = sqrt(P_sideband - P_noise)`` is proportional to the conjugate mean photon
number and ``y = P_noise - floor`` to its variance, so the local log-log slope
reads 1 for Poissonian and 2 for fully super-Poissonian statistics. Slopes are
taken as tangents of a polynomial fit at the two ends of the fitted domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .traces import FringeScan, db_to_rel_sigma

DEFAULT_DEGREE = 3
DEFAULT_REL_SIGMA = 0.2


@dataclass(frozen=True)
class ScalingPoint:
    x: float
    y: float
    included: bool
    p_noise: float
    phi: float = float("nan")


@dataclass(frozen=True, eq=False)
class SlopeResult:
    degree: int
    coeffs: np.ndarray  # increasing powers of log10(x)
    slope_low: float
    slope_high: float
    sigma_low: float
    sigma_high: float
    log_x_range: tuple[float, float]
    cut_threshold: float = float("nan")
    n_included: int = 0
    n_excluded: int = 0

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": np.asarray(self.coeffs).tolist(),
            "slope_low": self.slope_low,
            "sigma_low": self.sigma_low,
            "slope_high": self.slope_high,
            "sigma_high": self.sigma_high,
            "cut_threshold": self.cut_threshold,
            "n_included": self.n_included,
            "n_excluded": self.n_excluded,
        }


def build_points(scan: FringeScan, floor: float | None = None) -> list[ScalingPoint]:
    """One point per phase; points with zero contrast or noise at/below the floor are excluded."""
    if len(scan) == 0:
        raise ValueError("empty scan")
    floor = scan.floor if floor is None else floor
    points = []
    for phi, sb, nz in zip(scan.phi, scan.p_sideband, scan.p_noise):
        x = float(np.sqrt(max(sb - nz, 0.0)))
        y = float(nz - floor)
        points.append(ScalingPoint(x, y, x > 0 and y > 0, float(nz), float(phi)))
    return points


def apply_floor_cut(
    points: list[ScalingPoint],
    floor: float,
    k_sigma: float = 2.0,
    jitter_db: float | None = None,
) -> tuple[list[ScalingPoint], float]:
    """Exclude points whose raw noise is within ``k_sigma`` jitter of the electronics floor.

    The threshold is ``floor * (1 + k_sigma * rel_sigma)``, with ``rel_sigma``
    from ``jitter_db`` when given and 0.2 otherwise. Returns the updated
    points and the threshold.
    """
    if floor < 0:
        raise ValueError("floor must be >= 0")
    rel = DEFAULT_REL_SIGMA if jitter_db is None else db_to_rel_sigma(jitter_db)
    threshold = floor * (1.0 + k_sigma * rel)
    out = [
        ScalingPoint(p.x, p.y, p.included and p.p_noise >= threshold, p.p_noise, p.phi)
        for p in points
    ]
    if not any(p.included for p in out):
        raise ValueError(f"all points fall below the floor cut at {threshold:.3g}")
    return out, threshold


def _tangents(coeffs, lo, hi):
    d = P.polyder(coeffs)
    return float(P.polyval(lo, d)), float(P.polyval(hi, d))


def loglog_fit(
    points: list[ScalingPoint],
    degree: int = DEFAULT_DEGREE,
    n_boot: int = 500,
    seed: int = 0,
    cut_threshold: float = float("nan"),
) -> SlopeResult:
    """Polynomial fit of log10(y) on log10(x) over the included points.

    Slope uncertainties come from a residual bootstrap with ``n_boot``
    resamples (``n_boot=0`` skips it and reports zero).
    """
    if degree not in (1, 2, 3):
        raise ValueError("degree must be 1, 2 or 3")
    inc = [p for p in points if p.included]
    if len(inc) < degree + 2:
        raise ValueError(f"need at least {degree + 2} included points, got {len(inc)}")
    lx = np.log10([p.x for p in inc])
    ly = np.log10([p.y for p in inc])
    lo, hi = float(lx.min()), float(lx.max())
    if hi - lo < 1e-9:
        raise ValueError("degenerate x range")

    coeffs = P.polyfit(lx, ly, degree)
    s_lo, s_hi = _tangents(coeffs, lo, hi)

    sig_lo = sig_hi = 0.0
    if n_boot > 0:
        fitted = P.polyval(lx, coeffs)
        resid = ly - fitted
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, lx.size, size=(n_boot, lx.size))
        boot = np.array([_tangents(P.polyfit(lx, fitted + resid[i], degree), lo, hi) for i in picks])
        sig_lo, sig_hi = (float(s) for s in boot.std(axis=0, ddof=1))

    return SlopeResult(
        degree=degree,
        coeffs=coeffs,
        slope_low=s_lo,
        slope_high=s_hi,
        sigma_low=sig_lo,
        sigma_high=sig_hi,
        log_x_range=(lo, hi),
        cut_threshold=cut_threshold,
        n_included=len(inc),
        n_excluded=len(points) - len(inc),
    )


def analyze_scan(
    scan: FringeScan,
    degree: int = DEFAULT_DEGREE,
    k_sigma: float = 2.0,
    jitter_db: float | None = None,
    n_boot: int = 500,
    seed: int = 0,
) -> SlopeResult:
    """build_points, floor cut and log-log fit in one call."""
    points = build_points(scan)
    points, threshold = apply_floor_cut(points, scan.floor, k_sigma, jitter_db)
    return loglog_fit(points, degree, n_boot, seed, cut_threshold=threshold)
