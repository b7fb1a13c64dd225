"""SVD precoding/combining with water-filled power loading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DomainError, NumericError
from .quantization import ImpairmentPowers, QuantizerSpec, aqnm_apply
from .units import complex_normal


@dataclass(frozen=True)
class PrecoderSet:
    """Per-subcarrier precoders; leading axis is the subcarrier."""

    q: np.ndarray      # (N, M_Rx, L) combiners
    f: np.ndarray      # (N, M_Tx, L) precoders
    sigma: np.ndarray  # (N, L)
    p: np.ndarray      # (N, L)

    @property
    def num_streams(self) -> int:
        return self.sigma.shape[-1]


def _fix_phase(u: np.ndarray, vh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # rotate each singular pair so the largest-magnitude entry of the right
    # vector is real positive; u is rotated alike to keep u s v^H unchanged
    v = vh.conj().swapaxes(-1, -2)
    idx = np.argmax(np.abs(v), axis=-2)[..., None, :]
    pivot = np.take_along_axis(v, idx, axis=-2)
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1.0), 1.0)
    return u * phase.conj(), v * phase.conj()


def svd_precoder(h_bar: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact SVD ``h_bar = q diag(sigma) f^H`` with a deterministic phase.

    Works on a single matrix or a stack of matrices (leading axes).

    Returns
    -------
    q : ndarray, (..., M_Rx, L)
    sigma : ndarray, (..., L), non-increasing
    f : ndarray, (..., M_Tx, L)
    """
    h_bar = np.asarray(h_bar, dtype=complex)
    if not np.all(np.isfinite(h_bar)):
        raise NumericError("channel estimate contains non-finite entries")
    u, s, vh = np.linalg.svd(h_bar, full_matrices=False)
    q, f = _fix_phase(u, vh)
    return q, s, f


def water_fill(sigma, total_power: float, noise_power: float) -> np.ndarray:
    """Rate-maximizing power loading over parallel channels.

    ``p_l = max(0, mu - noise_power / sigma_l**2)`` with the water level
    ``mu`` found exactly from the sorted breakpoints: the largest active set
    whose level stays above the floor of its weakest member wins.

    Parameters
    ----------
    sigma : array_like
        Channel singular values (any order, non-negative).
    total_power : float
        Sum power to distribute.
    noise_power : float
        Noise power per stream.

    Returns
    -------
    ndarray
        Powers in the order of ``sigma``; zero for streams with ``sigma == 0``.
    """
    sigma = np.asarray(sigma, dtype=float)
    if total_power <= 0 or noise_power <= 0:
        raise DomainError("total_power and noise_power must be positive")
    if np.any(sigma < 0):
        raise DomainError("singular values must be non-negative")
    usable = sigma > 0
    if not np.any(usable):
        raise DegenerateChannelError("all singular values are zero")

    order = np.argsort(-sigma[usable], kind="stable")
    # an underflowing sigma gives an infinite floor, which never becomes active
    with np.errstate(over="ignore", divide="ignore"):
        floors = noise_power / sigma[usable][order] ** 2      # ascending
    levels = (total_power + np.cumsum(floors)) / np.arange(1, floors.size + 1)
    active = int(np.nonzero(levels > floors)[0][-1]) + 1
    mu = levels[active - 1]

    loaded = np.zeros(floors.size)
    loaded[:active] = mu - floors[:active]
    out_usable = np.empty(floors.size)
    out_usable[order] = loaded
    p = np.zeros_like(sigma)
    p[usable] = out_usable
    return p


def design_precoders(h_bar: np.ndarray, total_power: float, noise_power: float) -> PrecoderSet:
    """SVD and water-filling on every subcarrier of ``h_bar`` (N, M_Rx, M_Tx)."""
    q, s, f = svd_precoder(h_bar)
    p = np.stack([water_fill(s_n, total_power, noise_power) for s_n in s])
    return PrecoderSet(q=q, f=f, sigma=s, p=p)


def simulate_data_transmission(channel, precoders: PrecoderSet, impairments: ImpairmentPowers,
                               noise_power: float, spec: QuantizerSpec, symbols: np.ndarray,
                               rng: np.random.Generator) -> np.ndarray:
    """Quantized combiner outputs for one OFDM data symbol, shape (N, L).

    ``x_bar = F P^(1/2) x + d``, ``y = Q^H (H x_bar + w)``, then the ADC.
    """
    h = channel.h if hasattr(channel, "h") else np.asarray(channel)
    symbols = np.asarray(symbols, dtype=complex)
    n_sc, m_rx, m_tx = h.shape
    if symbols.shape != precoders.sigma.shape:
        raise DomainError("symbols must have shape (N, num_streams)")
    x_bar = np.einsum("ntl,nl->nt", precoders.f, np.sqrt(precoders.p) * symbols)
    if impairments.sigma_d_sq > 0:
        x_bar = x_bar + complex_normal(rng, x_bar.shape, impairments.sigma_d_sq)
    r = np.einsum("nij,nj->ni", h, x_bar)
    if noise_power > 0:
        r = r + complex_normal(rng, r.shape, noise_power)
    y = np.einsum("nil,ni->nl", precoders.q.conj(), r)
    return aqnm_apply(y, spec, impairments.sigma_q_rx_sq, rng)
