"""Simulation and analysis of a double-pass SU(1,1) interferometer."""

__version__ = "0.1.0"

from .gaussian import (
    GaussianState,
    SymplecticOp,
    apply,
    displace,
    loss_channel,
    mode_mean_photon,
    mode_photon_variance,
    phase_shift,
    two_mode_squeezer,
    vacuum_state,
)
from .model import (
    NliConfig,
    OutputMoments,
    closed_form_moments,
    fano_profile,
    linear_baseline,
    optimal_sensitivity,
    phase_sensitivity,
    run_exact,
    snr_enhancement,
)
from .traces import FringeScan, SpectrumTrace, TraceModel, synth_scan, sweep_scan
from .fringe import FitResult, bootstrap_visibility, fit_fringe, visibility
from .noise import SlopeResult, analyze_scan, loglog_fit
