"""Frequency-selective clustered Rician MIMO channel with ULA arrays.

The model is a tapped delay line: a frequency-flat line-of-sight (LOS)
outer product sits on tap 0 and ``num_clusters`` rank-1 scattered rays are
spread over the taps according to the power delay profile. The per-entry
channel power is one on average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .units import complex_normal, db_to_linear

ANGLE_SPREAD = math.pi / 3


@dataclass(frozen=True)
class ArrayGeometry:
    num_elements: int
    element_spacing: float = 0.5  # wavelengths

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ConfigError(f"num_elements must be a positive integer, got {self.num_elements}")
        if not self.element_spacing > 0:
            raise ConfigError("element_spacing must be positive")


def exponential_pdp(num_taps: int, decay_db: float = 3.0) -> np.ndarray:
    """Exponentially decaying power delay profile normalized to unit sum."""
    if num_taps < 1:
        raise ConfigError("num_taps must be >= 1")
    pdp = db_to_linear(-decay_db * np.arange(num_taps))
    pdp = np.atleast_1d(pdp)
    return pdp / pdp.sum()


@dataclass(frozen=True)
class ChannelParams:
    """Everything needed to draw a channel realization.

    ``los_angles`` fixes the (departure, arrival) LOS angles; when ``None``
    they are drawn per realization.
    """

    tx_geometry: ArrayGeometry
    rx_geometry: ArrayGeometry
    num_subcarriers: int = 64
    k_factor_db: float = 0.0
    num_taps: int = 8
    num_clusters: int = 8
    power_delay_profile: np.ndarray | None = None
    los_angles: tuple[float, float] | None = None

    def __post_init__(self):
        if self.num_subcarriers < 1:
            raise ConfigError("num_subcarriers must be >= 1")
        if self.num_taps < 1 or self.num_clusters < 1:
            raise ConfigError("num_taps and num_clusters must be >= 1")
        if self.num_taps > self.num_subcarriers:
            raise ConfigError("num_taps cannot exceed num_subcarriers")
        if self.power_delay_profile is None:
            pdp = exponential_pdp(self.num_taps)
        else:
            pdp = np.asarray(self.power_delay_profile, dtype=float)
        if pdp.shape != (self.num_taps,):
            raise ConfigError(f"power_delay_profile must have {self.num_taps} entries")
        if np.any(pdp < 0) or abs(pdp.sum() - 1.0) > 1e-12:
            raise ConfigError("power_delay_profile must be non-negative and sum to 1")
        object.__setattr__(self, "power_delay_profile", pdp)

    @property
    def m_tx(self) -> int:
        return self.tx_geometry.num_elements

    @property
    def m_rx(self) -> int:
        return self.rx_geometry.num_elements

    @property
    def k_linear(self) -> float:
        return db_to_linear(self.k_factor_db)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the channel.

    Attributes
    ----------
    h : ndarray, shape (N, M_Rx, M_Tx)
        Frequency response per subcarrier.
    taps : ndarray, shape (L, M_Rx, M_Tx)
        Time-domain taps; ``h`` is their N-point DFT.
    los : ndarray, shape (M_Rx, M_Tx)
        The scaled LOS part contained in tap 0.
    """

    h: np.ndarray
    seed: int
    params: ChannelParams
    taps: np.ndarray = field(repr=False)
    los: np.ndarray = field(repr=False)


def ula_steering(angle: float, geometry: ArrayGeometry) -> np.ndarray:
    """ULA response ``exp(-2j*pi*spacing*m*sin(angle))`` for ``m = 0..M-1``."""
    if not -math.pi / 2 <= angle <= math.pi / 2:
        raise DomainError(f"steering angle {angle} outside [-pi/2, pi/2]")
    m = np.arange(geometry.num_elements)
    return np.exp(-2j * np.pi * geometry.element_spacing * m * math.sin(angle))


def _steering_columns(angles: np.ndarray, geometry: ArrayGeometry) -> np.ndarray:
    # (M, len(angles)); callers guarantee the angle range
    m = np.arange(geometry.num_elements)[:, None]
    return np.exp(-2j * np.pi * geometry.element_spacing * m * np.sin(angles)[None, :])


def taps_to_frequency(taps: np.ndarray, num_subcarriers: int) -> np.ndarray:
    """N-point DFT of the taps along the delay axis."""
    return np.fft.fft(taps, n=num_subcarriers, axis=0)


def generate_channel(params: ChannelParams, seed: int) -> ChannelRealization:
    """Draw a channel realization, deterministic in ``seed``.

    Cluster ``c`` lands on tap ``c mod num_taps``; each tap's power is shared
    equally by its clusters. Taps left without a cluster get no power and the
    profile is renormalized over the occupied ones.
    """
    rng = np.random.default_rng(seed)
    k = params.k_linear
    if math.isinf(k):
        los_weight, nlos_weight = 1.0, 0.0
    else:
        los_weight, nlos_weight = math.sqrt(k / (1 + k)), math.sqrt(1 / (1 + k))

    if params.los_angles is None:
        aod, aoa = rng.uniform(-ANGLE_SPREAD, ANGLE_SPREAD, size=2)
    else:
        aod, aoa = params.los_angles
    los = los_weight * np.outer(ula_steering(aoa, params.rx_geometry),
                                ula_steering(aod, params.tx_geometry).conj())

    tap_of_cluster = np.arange(params.num_clusters) % params.num_taps
    counts = np.bincount(tap_of_cluster, minlength=params.num_taps)
    pdp = np.where(counts > 0, params.power_delay_profile, 0.0)
    if pdp.sum() == 0:
        raise ConfigError("power delay profile has no power on taps carrying clusters")
    pdp = pdp / pdp.sum()

    angles = rng.uniform(-ANGLE_SPREAD, ANGLE_SPREAD, size=(params.num_clusters, 2))
    gains = complex_normal(rng, params.num_clusters)
    weights = nlos_weight * np.sqrt(pdp[tap_of_cluster] / counts[tap_of_cluster]) * gains
    a_tx = _steering_columns(angles[:, 0], params.tx_geometry)
    a_rx = _steering_columns(angles[:, 1], params.rx_geometry)
    # one-hot cluster-to-tap assignment sums the rays of each tap
    assign = np.zeros((params.num_taps, params.num_clusters))
    assign[tap_of_cluster, np.arange(params.num_clusters)] = 1.0
    taps = np.einsum("lc,c,ic,jc->lij", assign, weights, a_rx, a_tx.conj())
    taps[0] += los

    h = taps_to_frequency(taps, params.num_subcarriers)
    return ChannelRealization(h=h, seed=seed, params=params, taps=taps, los=los)


def channel_correlation(params: ChannelParams, num_samples: int, seed: int) -> np.ndarray:
    """Sample estimate of ``E[H[n] H[n]^H]`` over realizations and subcarriers."""
    if num_samples < 1:
        raise ConfigError("num_samples must be >= 1")
    seeds = np.random.SeedSequence(seed).generate_state(num_samples)
    acc = np.zeros((params.m_rx, params.m_rx), dtype=complex)
    for s in seeds:
        h = generate_channel(params, int(s)).h
        acc += np.einsum("nij,nkj->ik", h, h.conj())
    r = acc / (num_samples * params.num_subcarriers)
    return 0.5 * (r + r.conj().T)
