"""Additive quantization noise model (AQNM) for DACs and ADCs.

A uniform quantizer with ``n_b`` bits is replaced by a linear gain
``1 - gamma`` followed by additive white Gaussian noise, where ``gamma`` is
the inverse coding gain of the quantizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .units import complex_normal

INFINITE = math.inf

# pi * sqrt(3) / 2
_GAIN_CONSTANT = math.pi * math.sqrt(3.0) / 2.0


def _check_bits(bits) -> None:
    if bits == INFINITE:
        return
    if isinstance(bits, bool) or not float(bits).is_integer():
        raise DomainError(f"quantizer bits must be an integer or infinite, got {bits!r}")
    if bits < 2:
        raise DomainError(f"AQNM requires at least 2 bits (inverse coding gain < 1), got {bits}")


def inverse_coding_gain(bits) -> float:
    """Inverse coding gain ``(pi*sqrt(3)/2) * bits**-2``; zero for infinite resolution."""
    _check_bits(bits)
    if bits == INFINITE:
        return 0.0
    return _GAIN_CONSTANT / float(bits) ** 2


@dataclass(frozen=True)
class QuantizerSpec:
    """Converter resolution and the AQNM distortion factor derived from it."""

    bits: float | int = INFINITE
    gain_inverse: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gain_inverse", inverse_coding_gain(self.bits))
        if self.bits != INFINITE:
            object.__setattr__(self, "bits", int(self.bits))

    @property
    def is_ideal(self) -> bool:
        return self.gain_inverse == 0.0

    @property
    def distortion(self) -> float:
        """``gamma * (1 - gamma)``, the noise-to-signal factor of the AQNM."""
        return self.gain_inverse * (1.0 - self.gain_inverse)


@dataclass(frozen=True)
class ImpairmentPowers:
    """Linear noise powers of the transmit chain and the ADC."""

    sigma_rf_sq: float
    sigma_q_tx_sq: float
    sigma_q_rx_sq: float

    def __post_init__(self):
        for name in ("sigma_rf_sq", "sigma_q_tx_sq", "sigma_q_rx_sq"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")

    @property
    def sigma_d_sq(self) -> float:
        """Aggregate transmit impairment: RF impairments plus DAC noise."""
        return self.sigma_rf_sq + self.sigma_q_tx_sq

    @classmethod
    def for_link(cls, spec: QuantizerSpec, m_tx: int, sigma_rf_sq: float,
                 noise_power: float) -> "ImpairmentPowers":
        """Impairments of a link whose DACs and ADCs share one resolution.

        The ADC input power is taken as ``1 + noise_power`` (unit channel
        gain and unit pilot power).
        """
        return cls(
            sigma_rf_sq=sigma_rf_sq,
            sigma_q_tx_sq=dac_noise_power(spec, m_tx),
            sigma_q_rx_sq=adc_noise_power(spec, 1.0 + noise_power),
        )


def dac_noise_power(spec: QuantizerSpec, m_tx: int) -> float:
    """Per-antenna DAC quantization noise power ``gamma (1 - gamma) / m_tx``."""
    if m_tx < 1:
        raise DomainError("m_tx must be at least 1")
    return spec.distortion / m_tx


def adc_noise_power(spec: QuantizerSpec, signal_power: float) -> float:
    if signal_power < 0:
        raise DomainError("signal_power must be non-negative")
    return spec.distortion * signal_power


def aqnm_apply(signal, spec: QuantizerSpec, noise_power: float,
               rng: np.random.Generator) -> np.ndarray:
    """Pass ``signal`` through the AQNM quantizer.

    Parameters
    ----------
    signal : array_like
        Complex samples of any shape.
    spec : QuantizerSpec
        Quantizer resolution.
    noise_power : float
        Variance of the additive quantization noise per entry.
    rng : numpy.random.Generator
        Source of the noise samples. Not consumed when ``noise_power`` is 0.

    Returns
    -------
    numpy.ndarray
        ``(1 - gamma) * signal + w_q`` with ``w_q ~ CN(0, noise_power)``.
    """
    if noise_power < 0:
        raise DomainError("noise_power must be non-negative")
    signal = np.asarray(signal, dtype=complex)
    out = (1.0 - spec.gain_inverse) * signal
    if noise_power > 0:
        out = out + complex_normal(rng, signal.shape, noise_power)
    return out
