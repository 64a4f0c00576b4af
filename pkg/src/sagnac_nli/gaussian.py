"""
Gaussian states of a few bosonic modes and the linear optics acting on them.

Conventions
-----------
Quadratures are ordered ``(x1, p1, x2, p2, ...)`` and scaled so that the
vacuum covariance is the identity (hbar = 2). With ``a = (x + i p) / 2`` a
coherent amplitude ``alpha`` sits at ``mean = (2 Re alpha, 2 Im alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-12
PHYSICAL_TOL = 1e-9
MAX_MODES = 4


def symplectic_form(num_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with 2x2 blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(num_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_mode(mode: int, num_modes: int) -> None:
    if not 0 <= mode < num_modes:
        raise IndexError(f"mode {mode} out of range for {num_modes}-mode state")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadrature vector and covariance matrix of an M-mode Gaussian state.

    Arrays are copied and made read-only on construction.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.ndim != 1 or mean.size % 2 or mean.size == 0:
            raise ValueError(f"mean must be a vector of even length, got shape {mean.shape}")
        n = mean.size
        if cov.shape != (n, n):
            raise ValueError(f"cov must have shape {(n, n)}, got {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("state contains non-finite entries")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def num_modes(self) -> int:
        return self.mean.size // 2

    def mode_block(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(d_m, sigma_m)``, the mode's mean sub-vector and 2x2 covariance block."""
        _check_mode(mode, self.num_modes)
        s = slice(2 * mode, 2 * mode + 2)
        return self.mean[s], self.cov[s, s]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        """True if the covariance obeys the uncertainty principle (all nu_k >= 1 - tol)."""
        return bool(np.all(self.symplectic_eigenvalues() >= 1.0 - tol))

    def allclose(self, other: "GaussianState", atol: float = 1e-10) -> bool:
        return (
            self.mean.shape == other.mean.shape
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Affine quadrature map ``r -> S r + d`` with ``S`` symplectic."""

    matrix: np.ndarray
    displacement: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        disp = _frozen(self.displacement)
        n = disp.size
        if matrix.shape != (n, n) or n % 2 or n == 0:
            raise ValueError(
                f"matrix shape {matrix.shape} incompatible with displacement length {n}"
            )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "displacement", disp)

    @property
    def num_modes(self) -> int:
        return self.displacement.size // 2

    def symplectic_residual(self) -> float:
        """max |S Omega S^T - Omega|."""
        omega = symplectic_form(self.num_modes)
        return float(np.max(np.abs(self.matrix @ omega @ self.matrix.T - omega)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.symplectic_residual() < tol

    def __matmul__(self, other: "SymplecticOp") -> "SymplecticOp":
        # (A @ B) applies B first, then A.
        if other.num_modes != self.num_modes:
            raise ValueError("cannot compose ops acting on different numbers of modes")
        return SymplecticOp(
            self.matrix @ other.matrix,
            self.matrix @ other.displacement + self.displacement,
        )

    def inverse(self) -> "SymplecticOp":
        inv = np.linalg.inv(self.matrix)
        return SymplecticOp(inv, -inv @ self.displacement)


def identity_op(num_modes: int) -> SymplecticOp:
    return SymplecticOp(np.eye(2 * num_modes), np.zeros(2 * num_modes))


def vacuum_state(num_modes: int) -> GaussianState:
    if num_modes < 1:
        raise ValueError("num_modes must be >= 1")
    if num_modes > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes are supported")
    return GaussianState(np.zeros(2 * num_modes), np.eye(2 * num_modes))


def coherent_state(alphas) -> GaussianState:
    """Product of coherent states with the given complex amplitudes."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    state = vacuum_state(alphas.size)
    for mode, amp in enumerate(alphas):
        state = displace(state, mode, amp)
    return state


def displace(state: GaussianState, mode: int, amp: complex) -> GaussianState:
    """Displace ``mode`` by the complex amplitude ``amp`` (``a -> a + amp``)."""
    _check_mode(mode, state.num_modes)
    mean = state.mean.copy()
    mean[2 * mode] += 2.0 * np.real(amp)
    mean[2 * mode + 1] += 2.0 * np.imag(amp)
    return GaussianState(mean, state.cov)


def two_mode_squeezer(
    gain: float,
    pump_phase: float = 0.0,
    modes: tuple[int, int] = (0, 1),
    num_modes: int = 2,
) -> SymplecticOp:
    """Parametric amplifier with intensity gain ``gain`` on a mode pair.

    Implements ``a -> sqrt(G) a + e^{i theta} sqrt(G-1) b^dagger`` and the same
    map with ``a`` and ``b`` exchanged, where ``G = cosh^2 r``.
    """
    if not gain >= 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    i, j = modes
    if i == j:
        raise ValueError("two_mode_squeezer needs two distinct modes")
    _check_mode(i, num_modes)
    _check_mode(j, num_modes)
    c = np.sqrt(gain)
    s = np.sqrt(gain - 1.0)
    ct, st = np.cos(pump_phase), np.sin(pump_phase)
    coupling = s * np.array([[ct, st], [st, -ct]])
    S = np.eye(2 * num_modes)
    bi = slice(2 * i, 2 * i + 2)
    bj = slice(2 * j, 2 * j + 2)
    S[bi, bi] = c * np.eye(2)
    S[bj, bj] = c * np.eye(2)
    S[bi, bj] = coupling
    S[bj, bi] = coupling
    return SymplecticOp(S, np.zeros(2 * num_modes))


def phase_shift(phi: float, mode: int = 0, num_modes: int = 2) -> SymplecticOp:
    """Phase rotation ``a -> e^{i phi} a`` on one mode."""
    _check_mode(mode, num_modes)
    c, s = np.cos(phi), np.sin(phi)
    S = np.eye(2 * num_modes)
    S[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = [[c, -s], [s, c]]
    return SymplecticOp(S, np.zeros(2 * num_modes))


def apply(op: SymplecticOp, state: GaussianState) -> GaussianState:
    if op.num_modes != state.num_modes:
        raise ValueError(
            f"op acts on {op.num_modes} modes but state has {state.num_modes}"
        )
    S = op.matrix
    cov = S @ state.cov @ S.T
    return GaussianState(S @ state.mean + op.displacement, 0.5 * (cov + cov.T))


def loss_channel(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure-loss channel: beamsplitter of transmission ``eta`` mixing ``mode`` with vacuum."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    _check_mode(mode, state.num_modes)
    t = np.ones(2 * state.num_modes)
    t[2 * mode : 2 * mode + 2] = np.sqrt(eta)
    cov = state.cov * np.outer(t, t)
    blk = slice(2 * mode, 2 * mode + 2)
    cov[blk, blk] += (1.0 - eta) * np.eye(2)
    return GaussianState(state.mean * t, cov)


def mode_mean_photon(state: GaussianState, mode: int) -> float:
    """<n> = (tr sigma_m - 2)/4 + |d_m|^2/4."""
    d, sigma = state.mode_block(mode)
    n = (np.trace(sigma) - 2.0) / 4.0 + d @ d / 4.0
    return max(float(n), 0.0)


def mode_photon_variance(state: GaussianState, mode: int) -> float:
    """Photon-number variance of one mode.

    Uses the Gaussian fourth-moment reduction
    ``Var n = (tr sigma_m^2 - 2)/8 + d_m^T sigma_m d_m / 4``.
    """
    d, sigma = state.mode_block(mode)
    v = (np.trace(sigma @ sigma) - 2.0) / 8.0 + d @ sigma @ d / 4.0
    return max(float(v), 0.0)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a 2M x 2M covariance matrix, ascending, length M."""
    cov = np.asarray(cov, dtype=float)
    m = cov.shape[0] // 2
    # sigma^1/2 Omega sigma^1/2 is antisymmetric (normal), so its spectrum is
    # well conditioned even for strongly squeezed states, unlike Omega sigma
    w, v = np.linalg.eigh(cov)
    if w.min() <= 0:
        return np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(m) @ cov)))[::2]
    root = (v * np.sqrt(w)) @ v.T
    ev = np.sort(np.abs(np.linalg.eigvals(root @ symplectic_form(m) @ root)))
    # eigenvalues come in +/- pairs
    return ev[::2]


def purity(state: GaussianState) -> float:
    """1/sqrt(det sigma) in the vacuum-is-identity convention."""
    return float(1.0 / np.sqrt(np.linalg.det(state.cov)))
