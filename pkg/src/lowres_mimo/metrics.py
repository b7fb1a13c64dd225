"""Effective SINR, spectral efficiency and energy efficiency.

All functions broadcast over leading (subcarrier) axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class StreamMetrics:
    gain: np.ndarray       # (N, L, L)
    error_var: np.ndarray  # (N, L)
    sinr: np.ndarray       # (N, L)
    se: float
    ee: float


def channel_gain_matrix(q: np.ndarray, true_h: np.ndarray, f: np.ndarray,
                        p: np.ndarray) -> np.ndarray:
    """``Q^H H F P^(1/2)``: the streams as seen through the true channel."""
    return (q.conj().swapaxes(-1, -2) @ true_h @ f) * np.sqrt(p)[..., None, :]


def estimation_error_variance(gain_est: np.ndarray, gain_ideal: np.ndarray) -> np.ndarray:
    """Diagonal of ``(1/L) e e^H`` with ``e = gain_est - gain_ideal``.

    Entry ``mu`` is the mean squared error along row ``mu``.
    """
    err = np.asarray(gain_est) - np.asarray(gain_ideal)
    return np.sum(np.abs(err) ** 2, axis=-1) / err.shape[-1]


def sinr_terms(gain: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Desired power ``|G_mm|^2`` and inter-stream interference per row."""
    power = np.abs(gain) ** 2
    signal = np.diagonal(power, axis1=-2, axis2=-1)
    return signal, power.sum(axis=-1) - signal


def sinr_from_terms(signal, interference, total_noise, q_norm_sq) -> np.ndarray:
    denom = interference + total_noise * q_norm_sq
    out = np.zeros(np.broadcast(signal, denom).shape)
    np.divide(signal, denom, out=out, where=denom > 0)
    return out


def stream_sinr(gain: np.ndarray, error_var: np.ndarray, sigma_w_sq: float,
                sigma_d_sq: float, sigma_q_rx_sq: float, q_col_norms: np.ndarray) -> np.ndarray:
    """Per-stream effective SINR.

    Parameters
    ----------
    gain : ndarray, (..., L, L)
        Channel gain matrix built from the estimated precoders.
    error_var : ndarray, (..., L)
        Estimation-error variance per stream.
    sigma_w_sq, sigma_d_sq, sigma_q_rx_sq : float
        Thermal noise, transmit impairment and ADC noise powers.
    q_col_norms : ndarray, (..., L)
        Euclidean norms of the combiner columns.

    Returns
    -------
    ndarray, (..., L)
        ``|G_mm|^2 / (sum_{n != m} |G_mn|^2 + sigma_tot^2 ||q_m||^2)``.
        A stream whose denominator is zero scores 0.
    """
    for v in (sigma_w_sq, sigma_d_sq, sigma_q_rx_sq):
        if v < 0:
            raise DomainError("noise variances must be non-negative")
    if np.any(np.asarray(error_var) < 0):
        raise DomainError("error variances must be non-negative")
    signal, interference = sinr_terms(gain)
    total = np.asarray(error_var) + sigma_w_sq + sigma_d_sq + sigma_q_rx_sq
    return sinr_from_terms(signal, interference, total, np.abs(q_col_norms) ** 2)


def degenerate_streams(gain: np.ndarray, error_var: np.ndarray, total_noise_floor: float,
                       q_col_norms: np.ndarray) -> np.ndarray:
    """Mask of streams whose SINR denominator vanishes."""
    _, interference = sinr_terms(gain)
    total = np.asarray(error_var) + total_noise_floor
    return interference + total * np.abs(q_col_norms) ** 2 <= 0


def spectral_efficiency(sinr: np.ndarray) -> float:
    """Sum of per-stream rates averaged over subcarriers, bits/s/Hz."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise DomainError("SINR must be non-negative")
    sinr = sinr.reshape(-1, sinr.shape[-1]) if sinr.ndim > 1 else sinr[None, :]
    return float(np.log2(1.0 + sinr).sum(axis=-1).mean())


def energy_efficiency(se: float, p_tot_mw: float) -> float:
    """Bits/s/Hz per watt."""
    if not p_tot_mw > 0:
        raise DomainError("total power must be positive")
    return se / (p_tot_mw / 1000.0)
