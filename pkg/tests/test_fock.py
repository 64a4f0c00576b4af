import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sagnac_nli import fock


def test_number_state_moments():
    s = fock.number_state(3, 1, 10)
    assert fock.photon_moments(s, "probe") == pytest.approx((3.0, 9.0, 0.0))
    assert fock.photon_moments(s, "conj") == pytest.approx((1.0, 1.0, 0.0))


def test_coherent_vacuum_is_poissonian():
    s = fock.coherent_vacuum(1.5 + 0.5j, 40)
    mean, second, var = fock.photon_moments(s, fock.PROBE)
    assert mean == pytest.approx(2.5, rel=1e-12)
    assert var == pytest.approx(2.5, rel=1e-10)
    assert s.norm == pytest.approx(1.0, abs=1e-14)


def test_coherent_vacuum_validation():
    with pytest.raises(ValueError):
        fock.coherent_vacuum(1.0, 7)
    with pytest.raises(fock.TruncationError):
        fock.coherent_vacuum(4.0, 40)  # |alpha|^2 = 16 > n_max/4
    with pytest.raises(fock.TruncationError):
        fock.coherent_vacuum(3.0, 40, tail_threshold=1e-30)
    fock.coherent_vacuum(4.0, 40, validate=False)


def test_unit_gain_is_identity():
    s = fock.coherent_vacuum(1.0, 20)
    out = fock.apply_tms(s, 1.0)
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-15)


def test_squeezed_vacuum_is_thermal():
    g = 1.8
    out = fock.apply_tms(fock.number_state(0, 0, 60), g, 0.7)
    n = np.arange(60)
    thermal = (g - 1) ** n / g ** (n + 1)
    assert np.allclose(out.marginal("probe")[:30], thermal[:30], atol=1e-12)
    # perfectly correlated photon numbers
    p = np.abs(out.grid) ** 2
    assert np.sum(p) - np.trace(p) < 1e-24


def test_sparse_unitary_matches_expm_multiply():
    s = fock.coherent_vacuum(0.8 * np.exp(0.3j), 30)
    U = fock.tms_unitary(1.6, 1.1, 30)
    a = fock.apply_unitary(U, s)
    b = fock.apply_tms(s, 1.6, 1.1)
    assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_truncated_unitary_is_unitary():
    U = fock.tms_unitary(2.0, 0.4, 12).toarray()
    assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12)


def test_phase_unitary():
    s = fock.number_state(2, 0, 10)
    out = fock.apply_phase(s, np.pi / 4, "probe")
    assert out.grid[2, 0] == pytest.approx(np.exp(1j * np.pi / 2))
    out = fock.apply_phase(fock.number_state(0, 3, 10), 0.5, "probe")
    assert out.grid[0, 3] == pytest.approx(1.0)


def test_seeded_amplifier_moments():
    out = fock.apply_tms(fock.coherent_vacuum(1.0, 80), 2.0)
    assert fock.photon_moments(out, "probe")[0] == pytest.approx(3.0, rel=1e-8)
    assert fock.photon_moments(out, "conj")[0] == pytest.approx(2.0, rel=1e-8)


def test_interferometer_reference_values():
    # G = 1.5, |alpha|^2 = 1, phi = 0, double pass
    state = fock.run_circuit_adaptive(1.5, 1.5, 1.0, 0.0, tail_threshold=1e-14)
    mean, second, var = fock.photon_moments(state, "conj")
    assert (mean, second, var) == pytest.approx((6.0, 69.0, 33.0), rel=1e-9)


def test_run_circuit_reports_truncation():
    with pytest.raises(fock.TruncationError):
        fock.run_circuit(2.0, 2.0, 1.0, 0.0, n_max=20)


def test_adaptive_cutoff_limit():
    with pytest.raises(fock.TruncationError):
        fock.run_circuit_adaptive(2.0, 2.0, 1.0, 0.0, n_start=16, n_limit=24)


def test_mode_names():
    s = fock.number_state(1, 2, 8)
    assert fock.photon_moments(s, 0) == fock.photon_moments(s, "probe")
    with pytest.raises(ValueError):
        fock.photon_moments(s, "idler")


@settings(max_examples=20, deadline=None)
@given(st.floats(1.0, 2.5), st.floats(0, 2 * np.pi), st.floats(0.0, 1.5), st.floats(0, 2 * np.pi))
def test_norm_and_number_difference_conserved(gain, theta, amp, phase):
    s = fock.coherent_vacuum(amp * np.exp(1j * phase), 60)
    out = fock.apply_tms(s, gain, theta)
    assert out.norm == pytest.approx(1.0, abs=1e-12)
    dp = fock.photon_moments(out, "probe")[0] - fock.photon_moments(s, "probe")[0]
    dc = fock.photon_moments(out, "conj")[0]
    if fock.truncation_tail(out) < 1e-12:
        assert dp == pytest.approx(dc, rel=1e-9, abs=1e-9)
