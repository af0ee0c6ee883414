"""Cancellation step and the power accounting around it.

The residual after subtracting an SI estimate V y from the received vector is
r = (I - V)(si + noise) - V soi; its expected power for fixed symbols is the
quadratic functional evaluated by expected_residual_power.  Cancellation
ability is the ratio of pre-cancellation power (SI plus the noise floor) to
the residual power, in dB.
"""

import math
from dataclasses import dataclass

import numpy as np


def reconstruct_si(symbols: np.ndarray, channel_estimate: np.ndarray) -> np.ndarray:
    """SI reconstruction diag(symbols) F h for an L-tap channel estimate."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    channel_estimate = np.asarray(channel_estimate, dtype=np.complex128)
    if channel_estimate.ndim != 1 or not 1 <= channel_estimate.size <= symbols.size:
        raise ValueError("channel estimate must have between 1 and N taps")
    return symbols * np.fft.fft(channel_estimate, n=symbols.size)


def cancel(received: np.ndarray, si_estimate: np.ndarray) -> np.ndarray:
    """Subtract the SI estimate from the received vector."""
    received = np.asarray(received, dtype=np.complex128)
    si_estimate = np.asarray(si_estimate, dtype=np.complex128)
    if received.shape != si_estimate.shape:
        raise ValueError("received and si_estimate shapes disagree")
    return received - si_estimate


def expected_residual_power(
    si_cov: np.ndarray,
    weights: np.ndarray,
    noise_power: float,
    soi_power: float,
) -> float:
    """Expected residual power of weights V for fixed transmit symbols:
    N*noise + tr{A} + tr{V C conj(V).T} - 2 Re tr{V B}."""
    si_cov = np.asarray(si_cov, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.complex128)
    n = si_cov.shape[0]
    if si_cov.shape != (n, n) or weights.shape != (n, n):
        raise ValueError("si_cov and weights must be square and equally sized")
    if noise_power < 0.0 or soi_power < 0.0:
        raise ValueError("powers must be non-negative")
    eye = np.eye(n)
    si_noise = si_cov + noise_power * eye
    received = si_noise + soi_power * eye
    quad = np.einsum("km,km->", weights @ received, weights.conj()).real
    cross = np.einsum("km,mk->", weights, si_noise).real
    value = n * noise_power + np.trace(si_cov).real + quad - 2.0 * cross
    return max(float(value), 0.0)


def si_power(
    symbol_power: float, pdp: np.ndarray, n_tx: int, n_subcarriers: int
) -> float:
    """Mean received SI power over one symbol,
    N * symbol_power * n_tx * sum(pdp)."""
    pdp = np.asarray(pdp, dtype=np.float64)
    if symbol_power < 0.0 or np.any(pdp < 0.0):
        raise ValueError("powers must be non-negative")
    if n_tx < 1 or n_subcarriers < 1:
        raise ValueError("n_tx and n_subcarriers must be positive")
    return float(n_subcarriers * symbol_power * n_tx * pdp.sum())


def cancellation_ability(
    si_power: float, noise_floor: float, residual_power: float
) -> float:
    """Cancellation ability 10 log10((si_power + noise_floor) / residual) in
    dB; +inf when the residual is not positive."""
    if si_power < 0.0 or noise_floor < 0.0:
        raise ValueError("powers must be non-negative")
    if residual_power <= 0.0:
        return math.inf
    return 10.0 * math.log10((si_power + noise_floor) / residual_power)


def max_cancellation_ability(
    si_power: float, noise_floor: float, mean_opt_value_sum: float
) -> float:
    """Upper bound on the ability of any linear canceller: the pre-
    cancellation power divided by the mean optimal residual
    si_power + noise_floor + E[sum_k f_k]."""
    if si_power < 0.0 or noise_floor < 0.0:
        raise ValueError("powers must be non-negative")
    residual = si_power + noise_floor + mean_opt_value_sum
    return cancellation_ability(si_power, noise_floor, residual)


@dataclass(frozen=True)
class CancellationReport:
    """Outcome of cancelling one received symbol with one method."""

    method: str
    residual_power_empirical: float
    residual_power_theoretical: float
    si_power: float
    noise_floor: float
    ability_db: float
