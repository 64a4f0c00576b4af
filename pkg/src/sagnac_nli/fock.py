"""
Brute-force two-mode simulation in a truncated photon-number basis.

This is the independent check on :mod:`sagnac_nli.gaussian`: the amplifier
is built as the matrix exponential of its generator
``r (e^{i theta} a^dag b^dag - e^{-i theta} a b)`` on the truncated space and
photon statistics are read off the amplitudes directly. Nothing here uses
covariance matrices.

Amplitudes are indexed ``(n_probe, n_conj)`` and flattened row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

PROBE, CONJ = 0, 1
DEFAULT_TAIL_THRESHOLD = 1e-10
MIN_N_MAX = 8


class TruncationError(ValueError):
    """The photon-number cutoff is too small for the requested state."""


def _mode_index(mode) -> int:
    if mode in (PROBE, "probe"):
        return PROBE
    if mode in (CONJ, "conj", "conjugate"):
        return CONJ
    raise ValueError(f"unknown mode {mode!r}; use 'probe' or 'conj'")


@dataclass(frozen=True, eq=False)
class FockState:
    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.n_max**2:
            raise ValueError(f"expected {self.n_max ** 2} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def grid(self) -> np.ndarray:
        """Amplitudes as an ``(n_max, n_max)`` array indexed ``[n_probe, n_conj]``."""
        return self.amplitudes.reshape(self.n_max, self.n_max)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def marginal(self, mode) -> np.ndarray:
        p = np.abs(self.grid) ** 2
        return p.sum(axis=1) if _mode_index(mode) == PROBE else p.sum(axis=0)


def number_state(n_probe: int, n_conj: int, n_max: int) -> FockState:
    amps = np.zeros((n_max, n_max), dtype=complex)
    amps[n_probe, n_conj] = 1.0
    return FockState(n_max, amps)


def coherent_vacuum(
    alpha: complex,
    n_max: int,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
    validate: bool = True,
) -> FockState:
    """Coherent probe ``|alpha>`` (truncated, renormalised) times conjugate vacuum."""
    if n_max < MIN_N_MAX:
        raise ValueError(f"n_max must be >= {MIN_N_MAX}")
    n = np.arange(n_max)
    if alpha == 0:
        c = (n == 0).astype(complex)
    else:
        logmag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        c = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    c /= np.linalg.norm(c)
    amps = np.zeros((n_max, n_max), dtype=complex)
    amps[:, 0] = c
    state = FockState(n_max, amps)
    if validate:
        if abs(alpha) ** 2 > n_max / 4:
            raise TruncationError(
                f"|alpha|^2 = {abs(alpha) ** 2:g} exceeds n_max/4 = {n_max / 4:g}"
            )
        _check_tail(state, tail_threshold)
    return state


def _ladder(n_max: int) -> sp.csr_array:
    return sp.diags_array(np.sqrt(np.arange(1, n_max, dtype=float)), offsets=1).tocsr()


def tms_generator(gain: float, pump_phase: float, n_max: int) -> sp.csr_array:
    """Anti-Hermitian generator ``r (e^{i theta} a^dag b^dag - h.c.)``, ``r = arccosh sqrt(G)``."""
    if not gain >= 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    r = np.arccosh(np.sqrt(gain))
    a = _ladder(n_max)
    eye = sp.eye_array(n_max, format="csr")
    ab = sp.kron(a, eye, format="csr") @ sp.kron(eye, a, format="csr")
    up = ab.T.tocsr()  # a^dag b^dag
    return (r * (np.exp(1j * pump_phase) * up - np.exp(-1j * pump_phase) * ab)).tocsr()


def tms_unitary(gain: float, pump_phase: float, n_max: int) -> sp.csr_array:
    """Two-mode squeezing unitary on the truncated space.

    The generator only couples states with equal ``n_probe - n_conj``, so the
    exponential is taken block by block (one dense ``expm`` per block).
    """
    K = tms_generator(gain, pump_phase, n_max).tocsr()
    idx = np.arange(n_max**2)
    diff = idx // n_max - idx % n_max
    rows, cols, vals = [], [], []
    for d in range(-(n_max - 1), n_max):
        members = idx[diff == d]
        block = K[members][:, members].toarray()
        U = expm(block)
        rr, cc = np.meshgrid(members, members, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(U.ravel())
    U = sp.coo_array(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_max**2, n_max**2),
    ).tocsr()
    U.eliminate_zeros()
    return U


def phase_unitary(phi: float, mode, n_max: int) -> sp.dia_array:
    """Diagonal unitary ``e^{i n phi}`` on the chosen mode."""
    n = np.arange(n_max)
    phases = np.exp(1j * n * phi)
    ones = np.ones(n_max)
    diag = np.kron(phases, ones) if _mode_index(mode) == PROBE else np.kron(ones, phases)
    return sp.dia_array((diag[None, :], [0]), shape=(n_max**2, n_max**2))


def apply_unitary(U, state: FockState) -> FockState:
    return FockState(state.n_max, U @ state.amplitudes)


def apply_tms(state: FockState, gain: float, pump_phase: float = 0.0) -> FockState:
    """Evolve ``state`` through the amplifier without forming the dense unitary."""
    K = tms_generator(gain, pump_phase, state.n_max)
    return FockState(state.n_max, expm_multiply(K, state.amplitudes))


def apply_phase(state: FockState, phi: float, mode) -> FockState:
    n = np.arange(state.n_max)
    grid = state.grid.copy()
    if _mode_index(mode) == PROBE:
        grid *= np.exp(1j * n * phi)[:, None]
    else:
        grid *= np.exp(1j * n * phi)[None, :]
    return FockState(state.n_max, grid)


def photon_moments(state: FockState, mode) -> tuple[float, float, float]:
    """(mean, second moment, variance) of the mode's photon-number distribution."""
    p = state.marginal(mode)
    p = p / p.sum()
    n = np.arange(state.n_max, dtype=float)
    mean = float(p @ n)
    second = float(p @ n**2)
    return mean, second, second - mean**2


def truncation_tail(state: FockState) -> float:
    """Probability that either mode sits in one of its top two levels."""
    p = np.abs(state.grid) ** 2
    p = p / p.sum()
    edge = state.n_max - 2
    return float(p[edge:, :].sum() + p[:edge, edge:].sum())


def _check_tail(state: FockState, threshold: float) -> None:
    tail = truncation_tail(state)
    if tail > threshold:
        raise TruncationError(
            f"truncation tail {tail:.3g} exceeds {threshold:.3g} at n_max={state.n_max}"
        )


def run_circuit(
    g1: float,
    g2: float,
    alpha: complex,
    phi: float,
    pump_phase: float = 0.0,
    double_pass: bool = True,
    n_max: int = 40,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> FockState:
    """Amplifier, probe phase, amplifier at a fixed cutoff.

    Raises :class:`TruncationError` if the state touches the cutoff at any
    stage.
    """
    total_phase = 2.0 * phi if double_pass else phi
    state = coherent_vacuum(alpha, n_max, tail_threshold)
    state = apply_tms(state, g1, pump_phase)
    _check_tail(state, tail_threshold)
    state = apply_phase(state, total_phase, PROBE)
    state = apply_tms(state, g2, pump_phase)
    _check_tail(state, tail_threshold)
    return state


def run_circuit_adaptive(
    g1: float,
    g2: float,
    alpha: complex,
    phi: float,
    pump_phase: float = 0.0,
    double_pass: bool = True,
    n_start: int = 32,
    n_limit: int = 600,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> FockState:
    """:func:`run_circuit` with the cutoff grown by 1.5x until the tail check passes."""
    n_max = max(n_start, MIN_N_MAX, int(np.ceil(4 * abs(alpha) ** 2)))
    while True:
        try:
            return run_circuit(
                g1, g2, alpha, phi, pump_phase, double_pass, n_max, tail_threshold
            )
        except TruncationError:
            if n_max >= n_limit:
                raise
            n_max = min(n_limit, int(np.ceil(1.5 * n_max)))
