"""Self-check suites that compare closed-form statistics against independent
Monte Carlo oracles and alternative computation routes.

These back the `fdsic validate` command and the heavier regression tests:
the phase-noise mixing covariance against simulated traces, the SI covariance
against the sample covariance of synthesized symbols, the real-embedded
quadratic programs against the complex normal equations, and the
subcarrier-domain synthesis against a sample-domain FIR reference.
"""

from dataclasses import dataclass

import numpy as np

from .estimator import (
    CovarianceBundle,
    EstimatorStatistics,
    optimal_weights,
    si_covariance,
)
from .impairments import (
    PhaseNoiseTrace,
    SiChannelSet,
    gen_si_channel,
    gen_wiener_phase,
    phase_increment_variance,
    pn_covariance_table,
    synthesize_received,
)
from .ofdm import gen_bpsk_symbols, modulate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_error: float
    tolerance: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: worst error {self.worst_error:.3e} "
            f"(tolerance {self.tolerance:.3e}) {self.detail}"
        )


def simulate_mixing_covariance(
    delta_f: float,
    n_subcarriers: int,
    n_traces: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Monte Carlo E[delta_a conj(delta_b)] from independent transmit and
    receive Wiener traces, by direct transform of the rotation samples."""
    sigma = np.sqrt(phase_increment_variance(delta_f, n_subcarriers))
    phases = np.zeros((n_traces, n_subcarriers))
    # Two independent oscillators per trace, summed.
    for _ in range(2):
        steps = sigma * rng.standard_normal((n_traces, n_subcarriers - 1))
        phases[:, 1:] += np.cumsum(steps, axis=1)
    coeffs = np.fft.ifft(np.exp(1j * phases), axis=1)
    return np.einsum("ta,tb->ab", coeffs, coeffs.conj()) / n_traces


def check_pn_covariance(
    delta_f: float = 1e-3,
    n_subcarriers: int = 32,
    n_traces: int = 100_000,
    seed: int = 7001,
    tolerance: float = 2e-3,
) -> CheckResult:
    """Closed-form mixing covariance versus the Monte Carlo oracle."""
    rng = np.random.default_rng(seed)
    table = pn_covariance_table(delta_f, n_subcarriers)
    estimate = simulate_mixing_covariance(delta_f, n_subcarriers, n_traces, rng)
    worst = float(np.max(np.abs(estimate - table.gamma)))
    return CheckResult(
        name="pn-covariance",
        passed=worst <= tolerance,
        worst_error=worst,
        tolerance=tolerance,
        detail=f"delta_f={delta_f:g} N={n_subcarriers} traces={n_traces}",
    )


def simulate_si_covariance(
    symbols: np.ndarray,
    pdp: np.ndarray,
    n_tx: int,
    delta_f: float,
    n_trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample covariance of synthesized SI vectors for fixed symbols.

    Vectorized mirror of synthesize_received with SOI and noise disabled:
    fresh channels and per-antenna oscillator pairs each trial.
    """
    n = symbols.size
    n_taps = pdp.size
    sigma = np.sqrt(phase_increment_variance(delta_f, n))
    scale = np.sqrt(pdp / 2.0)
    taps = scale[None, None, :] * (
        rng.standard_normal((n_trials, n_tx, n_taps))
        + 1j * rng.standard_normal((n_trials, n_tx, n_taps))
    )
    phases = np.zeros((n_trials, n_tx, n))
    for _ in range(2):
        steps = sigma * rng.standard_normal((n_trials, n_tx, n - 1))
        phases[:, :, 1:] += np.cumsum(steps, axis=2)
    response = np.fft.fft(taps, n=n, axis=2)
    waveform = np.fft.ifft(symbols[None, None, :] * response, axis=2)
    si = np.fft.fft((np.exp(1j * phases) * waveform).sum(axis=1), axis=1)
    return np.einsum("ta,tb->ab", si, si.conj()) / n_trials


def check_si_covariance(
    n_subcarriers: int = 8,
    n_taps: int = 2,
    n_tx: int = 4,
    delta_f: float = 1e-3,
    n_trials: int = 100_000,
    seed: int = 7002,
    tolerance: float = 0.03,
) -> CheckResult:
    """Analytic SI covariance versus the sample covariance of simulated SI,
    entrywise within tolerance * max |entry|."""
    rng = np.random.default_rng(seed)
    symbols = gen_bpsk_symbols(n_subcarriers, 1.0, rng)
    pdp = np.exp(-np.arange(n_taps) / 4.0)
    stats = EstimatorStatistics(
        symbols=symbols,
        pn=pn_covariance_table(delta_f, n_subcarriers),
        pdp=pdp,
        n_tx=n_tx,
        noise_power=0.0,
        soi_power=0.0,
    )
    analytic = si_covariance(stats)
    estimate = simulate_si_covariance(
        symbols, pdp, n_tx, delta_f, n_trials, rng
    )
    scale = float(np.max(np.abs(analytic)))
    worst = float(np.max(np.abs(estimate - analytic))) / scale
    return CheckResult(
        name="si-covariance",
        passed=worst <= tolerance,
        worst_error=worst,
        tolerance=tolerance,
        detail=(
            f"N={n_subcarriers} L={n_taps} n_tx={n_tx} "
            f"delta_f={delta_f:g} trials={n_trials} (relative to max entry)"
        ),
    )


def check_qp_oracle(
    sizes: tuple[int, ...] = (4, 8, 16),
    n_instances: int = 100,
    seed: int = 7003,
    tolerance: float = 1e-8,
) -> CheckResult:
    """Real-embedded per-subcarrier programs versus the complex normal
    equations on random Hermitian positive definite instances; also enforces
    that every program optimum is non-positive."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in sizes:
        for _ in range(n_instances):
            root = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            received = root @ root.conj().T + 0.1 * np.eye(n)
            herm = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            si_noise = 0.5 * (herm + herm.conj().T)
            real_path = _solve_pair(received, si_noise, "real")
            complex_path = _solve_pair(received, si_noise, "complex")
            oracle = si_noise.conj().T @ np.linalg.inv(received)
            worst = max(
                worst,
                float(np.max(np.abs(real_path.weights - oracle))),
                float(np.max(np.abs(complex_path.weights - oracle))),
                float(np.max(np.abs(real_path.weights - complex_path.weights))),
            )
            if real_path.opt_values.max() > 1e-12 or complex_path.opt_values.max() > 1e-12:
                return CheckResult(
                    name="qp-oracle",
                    passed=False,
                    worst_error=float(
                        max(real_path.opt_values.max(), complex_path.opt_values.max())
                    ),
                    tolerance=0.0,
                    detail="positive program optimum encountered",
                )
    return CheckResult(
        name="qp-oracle",
        passed=worst <= tolerance,
        worst_error=worst,
        tolerance=tolerance,
        detail=f"sizes={sizes} instances={n_instances} per size",
    )


def _solve_pair(received: np.ndarray, si_noise: np.ndarray, method: str):
    # Synthetic matrices, not diagonal loadings of an SI covariance, so the
    # bundle is assembled directly.
    bundle = CovarianceBundle(si=si_noise, si_noise=si_noise, received=received)
    return optimal_weights(bundle, method=method)


def time_domain_si_reference(
    symbols: np.ndarray,
    channels: SiChannelSet,
    tx_traces: list[PhaseNoiseTrace],
    rx_trace: PhaseNoiseTrace,
    cp_length: int,
) -> np.ndarray:
    """Sample-domain reference for the SI part of one symbol.

    Modulates with a cyclic prefix, runs a plain linear FIR per antenna over
    the prefixed stream, applies the combined oscillator rotation at the
    receive window, sums antennas and transforms.  Requires the channel to
    fit inside the prefix so the window sees only circular history.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    n = symbols.size
    if channels.n_taps > cp_length + 1:
        raise ValueError("channel must fit inside the cyclic prefix")
    prefixed = modulate(symbols, cp_length)
    window = np.zeros(n, dtype=np.complex128)
    n_osc = len(tx_traces)
    for antenna in range(channels.n_tx):
        trace = tx_traces[antenna if n_osc > 1 else 0]
        convolved = np.convolve(prefixed, channels.taps[antenna])
        body = convolved[cp_length : cp_length + n]
        window += np.exp(1j * (trace.phases + rx_trace.phases)) * body
    return np.fft.fft(window)


def check_model_equivalence(
    n_subcarriers: int = 32,
    n_taps: int = 4,
    n_tx: int = 3,
    n_trials: int = 100,
    delta_f: float = 1e-3,
    seed: int = 7004,
    tolerance: float = 1e-8,
) -> CheckResult:
    """Subcarrier-domain synthesis versus the sample-domain FIR reference."""
    rng = np.random.default_rng(seed)
    cp_length = n_taps + 2
    variance = phase_increment_variance(delta_f, n_subcarriers)
    pdp = np.exp(-np.arange(n_taps) / 4.0)
    worst = 0.0
    for _ in range(n_trials):
        symbols = gen_bpsk_symbols(n_subcarriers, 1.0, rng)
        channels = gen_si_channel(n_tx, n_taps, pdp, rng)
        tx_traces = [
            gen_wiener_phase(n_subcarriers, variance, rng) for _ in range(n_tx)
        ]
        rx_trace = gen_wiener_phase(n_subcarriers, variance, rng)
        received = synthesize_received(
            symbols, channels, tx_traces, rx_trace, 0.0, 0.0, rng
        )
        reference = time_domain_si_reference(
            symbols, channels, tx_traces, rx_trace, cp_length
        )
        worst = max(
            worst,
            float(
                np.linalg.norm(received.si - reference)
                / np.linalg.norm(reference)
            ),
        )
    return CheckResult(
        name="model-equivalence",
        passed=worst <= tolerance,
        worst_error=worst,
        tolerance=tolerance,
        detail=(
            f"N={n_subcarriers} L={n_taps} n_tx={n_tx} trials={n_trials} "
            "(relative)"
        ),
    )


def run_all(fast: bool = False) -> list[CheckResult]:
    """Run every validation suite; fast mode shrinks the Monte Carlo sizes."""
    traces = 20_000 if fast else 100_000
    trials = 20_000 if fast else 100_000
    instances = 25 if fast else 100
    return [
        check_pn_covariance(delta_f=1e-4, n_traces=traces,
                            tolerance=2e-3 if not fast else 5e-3),
        check_pn_covariance(delta_f=1e-3, n_traces=traces,
                            tolerance=2e-3 if not fast else 5e-3),
        check_si_covariance(n_trials=trials,
                            tolerance=0.03 if not fast else 0.06),
        check_qp_oracle(n_instances=instances),
        check_model_equivalence(),
    ]
