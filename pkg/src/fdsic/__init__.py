"""Digital self-interference cancellation for full-duplex massive-MIMO OFDM.

Simulates one OFDM symbol of a full-duplex node whose own transmit array
leaks into its receiver through multipath while every oscillator carries
Wiener phase noise, and provides two cancellers for it: the optimal weighted
linear canceller driven by the phase-noise statistics, and the conventional
least-squares baseline.  A seeded Monte Carlo harness sweeps INR, SNR and
oscillator quality and reports empirical and theoretical cancellation
ability.
"""

__version__ = "0.1.0"

from .cancellation import (
    CancellationReport,
    cancel,
    cancellation_ability,
    expected_residual_power,
    max_cancellation_ability,
    reconstruct_si,
    si_power,
)
from .estimator import (
    CovarianceBundle,
    EstimatorStatistics,
    SingularMatrixError,
    WeightSolution,
    covariance_bundle,
    estimate_si_channel,
    estimator_from_weights,
    ls_estimate,
    ls_weight_matrix,
    optimal_weights,
    real_embedding,
    real_qp_blocks,
    si_covariance,
    solve_qp,
)
from .harness import (
    PowerAllocation,
    Scenario,
    SimConfig,
    SweepRecord,
    TrialResult,
    derive_powers,
    emit_csv,
    pdp_profile,
    read_csv,
    run_trial,
    sweep,
    write_json_summary,
)
from .impairments import (
    PhaseNoiseTrace,
    PnCovarianceTable,
    ReceivedSymbol,
    SiChannelSet,
    gen_awgn,
    gen_si_channel,
    gen_wiener_phase,
    ici_coefficients,
    phase_increment_variance,
    pn_covariance_table,
    synthesize_received,
)
from .ofdm import OfdmFrame, demodulate, dft_matrix, gen_bpsk_symbols, modulate

__all__ = [
    "CancellationReport",
    "CovarianceBundle",
    "EstimatorStatistics",
    "OfdmFrame",
    "PhaseNoiseTrace",
    "PnCovarianceTable",
    "PowerAllocation",
    "ReceivedSymbol",
    "Scenario",
    "SiChannelSet",
    "SimConfig",
    "SingularMatrixError",
    "SweepRecord",
    "TrialResult",
    "WeightSolution",
    "cancel",
    "cancellation_ability",
    "covariance_bundle",
    "demodulate",
    "derive_powers",
    "dft_matrix",
    "emit_csv",
    "estimate_si_channel",
    "estimator_from_weights",
    "expected_residual_power",
    "gen_awgn",
    "gen_bpsk_symbols",
    "gen_si_channel",
    "gen_wiener_phase",
    "ici_coefficients",
    "ls_estimate",
    "ls_weight_matrix",
    "max_cancellation_ability",
    "modulate",
    "optimal_weights",
    "pdp_profile",
    "phase_increment_variance",
    "pn_covariance_table",
    "read_csv",
    "real_embedding",
    "real_qp_blocks",
    "reconstruct_si",
    "run_trial",
    "si_covariance",
    "si_power",
    "solve_qp",
    "sweep",
    "synthesize_received",
    "write_json_summary",
]
