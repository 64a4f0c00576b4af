"""
Fringe fits of sideband power against phase.

The model ``P(phi) = C0 + C1 cos^2 phi + C2 cos^4 phi`` is linear in the
coefficients, so the core is a linear least-squares solve in the basis
``{1, u, u^2}`` with ``u = cos^2 phi``. An optional outer search calibrates
the recorded phase as ``phi_offset + phi_scale * phi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .traces import FringeScan, apply_jitter

MIN_POINTS = 5


class FitError(ValueError):
    """The fringe fit is ill-posed or failed."""


@dataclass(frozen=True, eq=False)
class FitResult:
    c0: float
    c1: float
    c2: float
    cov: np.ndarray
    visibility: float
    visibility_sigma: float
    residual_rms: float
    phi_offset: float = 0.0
    phi_scale: float = 1.0
    weighting: str = "none"

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2])

    def predict(self, phi) -> np.ndarray:
        u = np.cos(self.phi_offset + self.phi_scale * np.asarray(phi, dtype=float)) ** 2
        return self.c0 + self.c1 * u + self.c2 * u * u

    @property
    def min_power(self) -> float:
        return _extremes(self.coeffs)[1][0]

    @property
    def is_physical(self) -> bool:
        """False when the fitted curve dips below zero by more than its own uncertainty."""
        (_, _), (pmin, umin) = _extremes(self.coeffs)
        basis = np.array([1.0, umin, umin * umin])
        sigma = float(np.sqrt(max(basis @ self.cov @ basis, 0.0)))
        return pmin >= -sigma

    def as_dict(self) -> dict:
        return {
            "c0": self.c0,
            "c1": self.c1,
            "c2": self.c2,
            "cov": np.asarray(self.cov).tolist(),
            "visibility": self.visibility,
            "visibility_sigma": self.visibility_sigma,
            "residual_rms": self.residual_rms,
            "phi_offset": self.phi_offset,
            "phi_scale": self.phi_scale,
        }


def _design(u: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones_like(u), u, u * u])


def _extremes(c) -> tuple[tuple[float, float], tuple[float, float]]:
    """((P_max, u_at_max), (P_min, u_at_min)) of the fitted quadratic on u in [0, 1]."""
    c0, c1, c2 = c
    cands = [0.0, 1.0]
    if c2 != 0:
        vertex = -c1 / (2 * c2)
        if 0.0 < vertex < 1.0:
            cands.append(vertex)
    vals = [(c0 + c1 * u + c2 * u * u, u) for u in cands]
    return max(vals), min(vals)


def _weighted_solve(A, y, w):
    Aw = A * w[:, None]
    coef, *_ = np.linalg.lstsq(Aw, y * w, rcond=None)
    return coef


def _linear_fit(u, y, weighting, sigma=None):
    """Solve for the coefficients at fixed phases. Returns (coef, cov, chi2)."""
    A = _design(u)
    if np.linalg.matrix_rank(A) < 3:
        raise FitError("design matrix is rank deficient; need at least 3 distinct cos^2(phi) values")
    n = y.size
    if weighting == "none":
        w = np.ones(n)
        coef = _weighted_solve(A, y, w)
    elif weighting == "sigma":
        w = 1.0 / np.asarray(sigma, dtype=float)
        coef = _weighted_solve(A, y, w)
    elif weighting == "relative":
        # iteratively reweighted: sigma_i proportional to the model value
        scale = np.max(np.abs(y))
        tiny = 1e-12 * scale if scale > 0 else 1.0
        w = 1.0 / np.maximum(np.abs(y), tiny)
        coef = _weighted_solve(A, y, w)
        for _ in range(100):
            w = 1.0 / np.maximum(A @ coef, tiny)
            new = _weighted_solve(A, y, w)
            done = np.allclose(new, coef, rtol=1e-13, atol=1e-13 * scale)
            coef = new
            if done:
                break
        w = 1.0 / np.maximum(A @ coef, tiny)
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    r = (y - A @ coef) * w
    chi2 = float(r @ r)
    s2 = chi2 / (n - 3) if weighting != "sigma" else 1.0
    Aw = A * w[:, None]
    cov = s2 * np.linalg.inv(Aw.T @ Aw)
    return coef, cov, chi2


def _visibility_from(coef, cov) -> tuple[float, float]:
    (pmax, umax), (pmin, umin) = _extremes(coef)
    total = pmax + pmin
    if not total > 0:
        raise FitError("P_max + P_min <= 0; visibility undefined")
    v = (pmax - pmin) / total
    grad = (2 * pmin / total**2) * np.array([1.0, umax, umax**2]) - (
        2 * pmax / total**2
    ) * np.array([1.0, umin, umin**2])
    sigma = float(np.sqrt(max(grad @ cov @ grad, 0.0)))
    return float(np.clip(v, 0.0, 1.0)), sigma


def _wrap_offset(x: float) -> float:
    # shifting by pi/2 maps u -> 1 - u, which the quadratic basis absorbs,
    # so the offset is only defined modulo pi/2
    return float((x + np.pi / 4) % (np.pi / 2) - np.pi / 4)


def _fit_arrays(
    phi, y, calibrate_phase=False, weighting="none", sigma=None,
    scale_bounds=(0.8, 1.25),
) -> FitResult:
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    if phi.size < MIN_POINTS:
        raise FitError(f"need at least {MIN_POINTS} points, got {phi.size}")
    if weighting == "sigma" and sigma is None:
        raise ValueError("weighting='sigma' needs per-point sigma")

    def objective(params):
        off, sc = params
        try:
            return _linear_fit(np.cos(off + sc * phi) ** 2, y, weighting, sigma)[2]
        except (FitError, np.linalg.LinAlgError):
            return np.inf

    offset, scale = 0.0, 1.0
    if calibrate_phase:
        offsets = np.linspace(-np.pi / 4, np.pi / 4, 61, endpoint=False)
        scales = np.linspace(scale_bounds[0], scale_bounds[1], 15)
        grid = [(objective((o, s)), o, s) for o in offsets for s in scales]
        _, o0, s0 = min(grid)
        res = minimize(objective, x0=[o0, s0], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        offset, scale = _wrap_offset(res.x[0]), float(res.x[1])
        if scale < 0:
            offset, scale = _wrap_offset(-offset), -scale

    u = np.cos(offset + scale * phi) ** 2
    coef, cov, _ = _linear_fit(u, y, weighting, sigma)
    v, v_sigma = _visibility_from(coef, cov)
    resid = y - _design(u) @ coef
    return FitResult(
        c0=float(coef[0]), c1=float(coef[1]), c2=float(coef[2]), cov=cov,
        visibility=v, visibility_sigma=v_sigma,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        phi_offset=offset, phi_scale=scale, weighting=weighting,
    )


def fit_fringe(
    scan: FringeScan,
    calibrate_phase: bool = False,
    weighting: str = "none",
    sigma=None,
    subtract_floor: bool = False,
    scale_bounds: tuple[float, float] = (0.8, 1.25),
) -> FitResult:
    """Fit ``C0 + C1 u + C2 u^2`` (``u = cos^2 phi``) to the scan's sideband power.

    Parameters
    ----------
    scan : FringeScan
        At least five points; cos^2(phi) must take three or more distinct values.
    calibrate_phase : bool
        Also fit ``phi -> phi_offset + phi_scale * phi``. The coefficient
        covariance is then conditional on the calibrated phases. The offset
        is reported in ``[-pi/4, pi/4)``: an extra ``pi/2`` turns ``u`` into
        ``1 - u`` and fits equally well with reshuffled coefficients.
    weighting : {"none", "relative", "sigma"}
        ``"relative"`` treats the noise as a fixed fraction of the power
        (multiplicative analyzer jitter) and reweights iteratively;
        ``"sigma"`` uses the per-point ``sigma`` given.
    subtract_floor : bool
        Remove ``scan.floor`` before fitting instead of letting C0 absorb it.
    """
    y = scan.p_sideband - scan.floor if subtract_floor else scan.p_sideband
    return _fit_arrays(scan.phi, y, calibrate_phase, weighting, sigma, scale_bounds)


def visibility(fit: FitResult) -> tuple[float, float]:
    """Visibility ``(P_max - P_min)/(P_max + P_min)`` of the fitted curve on ``u in [0, 1]``,
    with its delta-method standard error."""
    return _visibility_from(fit.coeffs, fit.cov)


def bootstrap_visibility(
    scan: FringeScan,
    n_resamples: int = 1000,
    seed: int = 0,
    calibrate_phase: bool = False,
    weighting: str = "none",
    subtract_floor: bool = False,
) -> tuple[float, float]:
    """Residual-resampling bootstrap of the visibility.

    Returns the visibility of the original fit and the standard deviation of
    the resampled visibilities. With ``weighting="relative"`` the residuals
    are resampled as fractions of the fitted power.
    """
    if n_resamples < 100:
        raise ValueError("n_resamples must be >= 100")
    y = scan.p_sideband - scan.floor if subtract_floor else scan.p_sideband
    base = _fit_arrays(scan.phi, y, calibrate_phase, weighting)
    yhat = base.predict(scan.phi)
    n = y.size
    inflate = np.sqrt(n / (n - 3))
    relative = weighting == "relative"
    resid = (y - yhat) / yhat if relative else y - yhat
    resid = (resid - resid.mean()) * inflate

    rng = np.random.default_rng(seed)
    picks = rng.integers(0, n, size=(n_resamples, n))
    vs, failures = [], 0
    for idx in picks:
        ystar = yhat * (1.0 + resid[idx]) if relative else yhat + resid[idx]
        try:
            fit = _fit_arrays(scan.phi, ystar, calibrate_phase, weighting)
        except (FitError, np.linalg.LinAlgError):
            failures += 1
            continue
        vs.append(fit.visibility)
    if failures > 0.1 * n_resamples:
        raise FitError(f"{failures} of {n_resamples} bootstrap refits failed")
    return base.visibility, float(np.std(vs, ddof=1))


def offset_for_visibility(c1: float, c2: float, target: float) -> float:
    """C0 that gives a fringe with shape (C1, C2 >= 0) the requested visibility."""
    if not 0 < target <= 1:
        raise ValueError("visibility must lie in (0, 1]")
    if c1 < 0 or c2 < 0 or c1 + c2 <= 0:
        raise ValueError("expects a non-negative fringe shape")
    return (c1 + c2) * (1.0 - target) / (2.0 * target)


def synthetic_scan(
    coeffs, phis, jitter_db: float = 0.0, seed: int = 0, floor: float = 0.0
) -> FringeScan:
    """Scan sampled from ``C0 + C1 u + C2 u^2`` with multiplicative jitter on each point.

    The noise column is set to the fringe's C0 level.
    """
    c0, c1, c2 = coeffs
    phis = np.asarray(phis, dtype=float)
    u = np.cos(phis) ** 2
    clean = c0 + c1 * u + c2 * u * u
    rng = np.random.default_rng(seed)
    sb = apply_jitter(clean, jitter_db, rng)
    return FringeScan(phis, sb, np.full_like(phis, c0), floor=floor)
