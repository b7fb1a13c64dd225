"""Pilot-based training phase and least-squares channel estimation.

Pilots form a frequency comb: transmit antenna ``t`` (0-based) sounds the
tones ``t, t + M_Tx, t + 2 M_Tx, ...``, so a single OFDM symbol reveals one
column of the channel matrix per tone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelRealization
from .errors import ConfigError, EstimationError
from .quantization import ImpairmentPowers, QuantizerSpec, aqnm_apply
from .units import complex_normal

PILOT_SYMBOL = 1.0 + 0.0j


class EstimatorKind(str, Enum):
    CONVENTIONAL = "conventional"
    OMP = "omp"


@dataclass(frozen=True)
class PilotGrid:
    num_subcarriers: int
    num_tx: int
    symbol: complex = PILOT_SYMBOL

    def tones(self, antenna: int) -> np.ndarray:
        """0-based tone indices occupied by 0-based transmit ``antenna``."""
        return np.arange(antenna, self.num_subcarriers, self.num_tx)

    @property
    def occupancy(self) -> list[np.ndarray]:
        return [self.tones(t) for t in range(self.num_tx)]

    def pilot_matrix(self) -> np.ndarray:
        """Transmitted pilot vectors ``phi[n]``, shape (N, M_Tx)."""
        phi = np.zeros((self.num_subcarriers, self.num_tx), dtype=complex)
        n = np.arange(self.num_subcarriers)
        phi[n, n % self.num_tx] = self.symbol
        return phi


@dataclass(frozen=True)
class ChannelEstimate:
    h_tilde: np.ndarray  # (N, M_Rx, M_Tx)
    method_tag: EstimatorKind = EstimatorKind.CONVENTIONAL


def build_pilot_grid(n: int, m_tx: int) -> PilotGrid:
    if n < 1 or m_tx < 1:
        raise ConfigError("subcarrier and antenna counts must be positive")
    if n % m_tx:
        raise ConfigError(f"m_tx={m_tx} must divide the number of subcarriers n={n}")
    return PilotGrid(num_subcarriers=n, num_tx=m_tx)


def simulate_training(channel: ChannelRealization, grid: PilotGrid,
                      impairments: ImpairmentPowers, noise_power: float,
                      spec: QuantizerSpec, rng: np.random.Generator) -> np.ndarray:
    """Quantized received training symbols, shape (N, M_Rx).

    Per tone ``y = H (phi + d) + w`` with transmit impairments
    ``d ~ CN(0, sigma_d^2 I)`` and thermal noise ``w ~ CN(0, noise_power I)``,
    then ``y`` goes through the ADC quantizer.
    """
    h = channel.h
    n_sc, m_rx, m_tx = h.shape
    if (grid.num_subcarriers, grid.num_tx) != (n_sc, m_tx):
        raise ConfigError("pilot grid does not match the channel dimensions")
    x = grid.pilot_matrix()
    if impairments.sigma_d_sq > 0:
        x = x + complex_normal(rng, x.shape, impairments.sigma_d_sq)
    y = np.einsum("nij,nj->ni", h, x)
    if noise_power > 0:
        y = y + complex_normal(rng, y.shape, noise_power)
    return aqnm_apply(y, spec, impairments.sigma_q_rx_sq, rng)


def simulate_training_combined(channel: ChannelRealization, grid: PilotGrid,
                               noise_cov: np.ndarray, spec: QuantizerSpec,
                               sigma_q_rx_sq: float, rng: np.random.Generator) -> np.ndarray:
    """Training with one Gaussian noise term of covariance ``noise_cov``.

    This is the equivalent form ``y = H phi + w'`` with
    ``w' ~ CN(0, sigma_w^2 I + sigma_d^2 R_H)``.
    """
    h = channel.h
    n_sc, m_rx, _ = h.shape
    y = np.einsum("nij,nj->ni", h, grid.pilot_matrix())
    vals, vecs = np.linalg.eigh(noise_cov)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    y = y + complex_normal(rng, (n_sc, m_rx)) @ root.T
    return aqnm_apply(y, spec, sigma_q_rx_sq, rng)


def _interpolation_matrix(pilot_tones: np.ndarray, num_subcarriers: int) -> np.ndarray:
    # column j is the piecewise-linear hat function of pilot j, held constant
    # beyond the outermost pilots
    tones = np.arange(num_subcarriers)
    eye = np.eye(len(pilot_tones))
    return np.stack([np.interp(tones, pilot_tones, e) for e in eye], axis=1)


def ls_estimate_interpolate(received: np.ndarray, grid: PilotGrid) -> ChannelEstimate:
    """LS estimate at the pilot tones, linear interpolation in between.

    Parameters
    ----------
    received : ndarray, shape (N, M_Rx)
        Quantized training symbols.
    grid : PilotGrid

    Returns
    -------
    ChannelEstimate
        ``h_tilde`` of shape (N, M_Rx, M_Tx).
    """
    received = np.asarray(received)
    n_sc, m_rx = received.shape
    if n_sc != grid.num_subcarriers:
        raise ConfigError("received symbols do not match the pilot grid")
    h_tilde = np.empty((n_sc, m_rx, grid.num_tx), dtype=complex)
    for t in range(grid.num_tx):
        tones = grid.tones(t)
        if tones.size == 0:
            raise EstimationError(f"transmit antenna {t} has no pilot tones")
        ls = received[tones] / grid.symbol
        h_tilde[:, :, t] = _interpolation_matrix(tones, n_sc) @ ls
    return ChannelEstimate(h_tilde=h_tilde)
