"""
Spectrum-analyzer view of the detected conjugate.

The probe is chopped at ``f_mod``; the analyzer bin at the tone reads
``K <n_c^2>`` and the surrounding bins read ``K Var(n_c)``, both sitting on an
electronics floor. All arithmetic is in linear power (mW); dBm only appears
at the file boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import NliConfig, OutputMoments, closed_form_moments, run_exact


def dbm_linear(x_dbm):
    """dBm -> mW."""
    return 10.0 ** (np.asarray(x_dbm, dtype=float) / 10.0)


def linear_dbm(p_mw):
    """mW -> dBm. Zero power maps to -inf."""
    p = np.asarray(p_mw, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(p)


def db_to_rel_sigma(jitter_db: float) -> float:
    """Relative (1-sigma) power fluctuation equivalent to a Gaussian spread in dB."""
    return float(np.log(10.0) / 10.0 * jitter_db)


def apply_jitter(powers, jitter_db: float, rng: np.random.Generator | None) -> np.ndarray:
    """Multiply each value by an independent lognormal factor with ``jitter_db`` spread in dB.

    The factor has unit mean, so averaged linear powers stay unbiased.
    """
    powers = np.asarray(powers, dtype=float)
    if jitter_db == 0:
        return powers.copy()
    s = db_to_rel_sigma(jitter_db)
    return powers * np.exp(s * rng.standard_normal(powers.shape) - 0.5 * s * s)


@dataclass(frozen=True)
class TraceModel:
    """Analyzer and detection settings.

    ``excess_noise`` adds classical intensity noise ``K * excess_noise * <n_c>^2``
    to the off-tone bins; it is off by default.
    """

    k_const: float = 1e-12
    f_mod: float = 750e3
    f_span: float = 500e3
    n_bins: int = 401
    rbw: float = 3e3
    electronics_floor: float = 1e-12
    noise_jitter_db: float = 0.3
    rng_seed: int = 0
    f_center: float | None = None
    excess_noise: float = 0.0

    def __post_init__(self):
        if self.n_bins < 16:
            raise ValueError("n_bins must be >= 16")
        if not self.f_span > 4 * self.rbw:
            raise ValueError("f_span must exceed 4 * rbw")
        if not (self.k_const > 0 and self.rbw > 0 and self.f_span > 0):
            raise ValueError("k_const, rbw and f_span must be positive")
        if self.electronics_floor < 0:
            raise ValueError("electronics_floor must be >= 0")
        if self.noise_jitter_db < 0 or self.excess_noise < 0:
            raise ValueError("noise_jitter_db and excess_noise must be >= 0")

    @property
    def center(self) -> float:
        return self.f_mod if self.f_center is None else self.f_center

    def freqs(self) -> np.ndarray:
        return self.center + np.linspace(-self.f_span / 2, self.f_span / 2, self.n_bins)

    def background(self, moments: OutputMoments) -> float:
        """Expected off-tone bin power."""
        return (
            self.k_const * (moments.var_c + self.excess_noise * moments.mean_c**2)
            + self.electronics_floor
        )

    def tone(self, moments: OutputMoments) -> float:
        """Expected power in the bin at the modulation frequency."""
        return (
            self.k_const * (moments.second_c + self.excess_noise * moments.mean_c**2)
            + self.electronics_floor
        )


@dataclass(frozen=True, eq=False)
class SpectrumTrace:
    freqs: np.ndarray
    powers: np.ndarray
    phi: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.array(self.freqs, dtype=float)
        p = np.array(self.powers, dtype=float)
        if f.ndim != 1 or f.shape != p.shape or f.size < 2:
            raise ValueError("freqs and powers must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("trace powers must be finite and >= 0")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "powers", p)

    @property
    def bin_width(self) -> float:
        return float(np.median(np.diff(self.freqs)))


@dataclass(frozen=True, eq=False)
class FringeScan:
    """Sideband and noise power (linear, mW) per phase setting."""

    phi: np.ndarray
    p_sideband: np.ndarray
    p_noise: np.ndarray
    floor: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        sb = np.array(self.p_sideband, dtype=float)
        nz = np.array(self.p_noise, dtype=float)
        if not (phi.ndim == 1 and phi.shape == sb.shape == nz.shape):
            raise ValueError("phi, p_sideband and p_noise must be 1-D arrays of equal length")
        if np.any(np.diff(phi) <= 0):
            raise ValueError("phases must be strictly increasing")
        for name, arr in (("p_sideband", sb), ("p_noise", nz)):
            if np.any(~np.isfinite(arr)) or np.any(arr < 0):
                raise ValueError(f"{name} must be finite and >= 0")
        if not self.floor >= 0:
            raise ValueError("floor must be >= 0")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "p_sideband", sb)
        object.__setattr__(self, "p_noise", nz)

    def __len__(self) -> int:
        return self.phi.size


def synth_trace(
    model: TraceModel,
    moments: OutputMoments,
    phi: float,
    seed=None,
) -> SpectrumTrace:
    """Analyzer trace for one phase setting.

    ``seed`` defaults to ``model.rng_seed``; anything accepted by
    :func:`numpy.random.default_rng` works.
    """
    freqs = model.freqs()
    if not freqs[0] <= model.f_mod <= freqs[-1]:
        raise ValueError(f"f_mod={model.f_mod:g} Hz lies outside the trace grid")
    powers = np.full(model.n_bins, model.background(moments))
    powers[int(np.argmin(np.abs(freqs - model.f_mod)))] = model.tone(moments)
    if model.noise_jitter_db > 0:
        rng = np.random.default_rng(model.rng_seed if seed is None else seed)
        powers = apply_jitter(powers, model.noise_jitter_db, rng)
    return SpectrumTrace(freqs, powers, float(phi), {"f_mod_hz": model.f_mod})


def _window_mask(trace: SpectrumTrace, f_mod: float, window: float) -> np.ndarray:
    f = trace.freqs
    if not f[0] <= f_mod <= f[-1]:
        raise ValueError(f"f_mod={f_mod:g} Hz lies outside the trace grid")
    mask = np.abs(f - f_mod) <= window / 2
    if not mask.any():
        raise ValueError(f"window of {window:g} Hz around {f_mod:g} Hz contains no bins")
    return mask


def extract_peak(
    trace: SpectrumTrace,
    f_mod: float,
    window: float | None = None,
    integrate: bool = False,
) -> float:
    """Marker reading at the tone: the largest bin within ``f_mod +/- window/2``.

    ``integrate=True`` sums the window instead. The default window is three bins.
    """
    if window is None:
        window = 3 * trace.bin_width
    if window < trace.bin_width * (1 - 1e-9):
        raise ValueError(f"window of {window:g} Hz is narrower than one bin")
    mask = _window_mask(trace, f_mod, window)
    vals = trace.powers[mask]
    return float(vals.sum() if integrate else vals.max())


def estimate_noise(
    trace: SpectrumTrace,
    f_mod: float,
    guard: float | None = None,
    span: float | None = None,
) -> float:
    """Mean linear power adjacent to the tone.

    Averages bins with ``guard < |f - f_mod| <= guard + span`` on both sides.
    Defaults: a three-bin guard and a span of a quarter of the grid per side.
    """
    df = trace.bin_width
    if guard is None:
        guard = 3 * df
    if span is None:
        span = 0.25 * (trace.freqs[-1] - trace.freqs[0])
    offset = np.abs(trace.freqs - f_mod)
    mask = (offset > guard + 1e-9 * df) & (offset <= guard + span + 1e-9 * df)
    if mask.sum() < 4:
        raise ValueError(
            f"only {int(mask.sum())} bins outside the guard band; need at least 4"
        )
    return float(trace.powers[mask].mean())


def _derived_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(index)])


def synth_scan(
    config: NliConfig, model: TraceModel, phis
) -> tuple[list[SpectrumTrace], FringeScan]:
    """Synthesize one trace per phase and reduce each to (peak, adjacent noise).

    Trace ``i`` draws its jitter from ``SeedSequence([rng_seed, i])``, so the
    result does not depend on evaluation order.
    """
    phis = np.asarray(phis, dtype=float)
    traces, peaks, noises = [], [], []
    for i, p in enumerate(phis):
        tr = synth_trace(model, run_exact(config, p), p, seed=_derived_seed(model.rng_seed, i))
        traces.append(tr)
        peaks.append(extract_peak(tr, model.f_mod))
        noises.append(estimate_noise(tr, model.f_mod))
    scan = FringeScan(phis, peaks, noises, floor=model.electronics_floor)
    return traces, scan


def sweep_scan(
    config: NliConfig, model: TraceModel, phis, closed_form: bool = False
) -> FringeScan:
    """Noiseless scan straight from the model moments (no trace, no jitter)."""
    phis = np.asarray(phis, dtype=float)
    if closed_form and config.g1 != config.g2:
        raise ValueError("closed-form moments need equal gains")
    sb, nz = [], []
    for p in phis:
        m = closed_form_moments(config.g1, config.alpha2, p) if closed_form else run_exact(config, p)
        sb.append(model.tone(m))
        nz.append(model.background(m))
    return FringeScan(phis, sb, nz, floor=model.electronics_floor)
