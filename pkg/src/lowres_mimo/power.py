"""Transceiver power consumption of a fully digital RF front end.

Every chain carries a mixer and a pair (I/Q) of converters; the transmit
chains add a PA sized for a fixed EIRP, the receive chains an LNA.
All outputs are in mW.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError
from .quantization import INFINITE
from .units import dbm_to_mw


@dataclass(frozen=True)
class PowerModelParams:
    eirp_dbm: float = 30.0
    eta_pa: float = 0.2
    p_in_bb_dbm: float = 0.0
    il_mix_db: float = 6.0
    p_lo_mw: float = 10.0           # 10 dBm
    p_lna_mw: float = 11.0
    fom_dac_fj: float = 65.0        # fJ / conversion step
    fom_adc_fj: float = 67.6
    f_s_hz: float = 806.4e6

    def __post_init__(self):
        if not self.eta_pa > 0:
            raise DomainError("eta_pa must be positive")
        for name in ("p_lo_mw", "p_lna_mw", "fom_dac_fj", "fom_adc_fj", "f_s_hz"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")

    def as_dict(self) -> dict:
        return asdict(self)


def pa_output_power_dbm(params: PowerModelParams, m_tx: int) -> float:
    """Per-PA output power that yields the target EIRP with ``m_tx`` elements."""
    _check_antennas(m_tx)
    return params.eirp_dbm - 20.0 * math.log10(m_tx)


def pa_input_power_dbm(params: PowerModelParams, m_tx: int) -> float:
    _check_antennas(m_tx)
    return params.p_in_bb_dbm - 10.0 * math.log10(m_tx) - params.il_mix_db


def pa_dc_power_mw(params: PowerModelParams, m_tx: int) -> float:
    """DC power drawn by one PA.

    Raises
    ------
    DomainError
        If the PA would have to attenuate (output below input), which the
        power-added-efficiency model cannot represent.
    """
    p_out = dbm_to_mw(pa_output_power_dbm(params, m_tx))
    p_in = dbm_to_mw(pa_input_power_dbm(params, m_tx))
    if p_out < p_in:
        raise DomainError(
            f"PA output ({p_out:.4g} mW) below its input ({p_in:.4g} mW) for m_tx={m_tx}; "
            "check eirp_dbm / p_in_bb_dbm"
        )
    return (p_out - p_in) / params.eta_pa


def converter_power_mw(bits, f_s_hz: float, fom_fj: float) -> float:
    """Power of one DAC or ADC: ``2**bits * f_s * FoM``."""
    if bits == INFINITE:
        raise DomainError("converter power is undefined for infinite resolution")
    if bits < 1:
        raise DomainError(f"converter bits must be >= 1, got {bits}")
    # fJ * Hz = 1e-15 W = 1e-12 mW
    return 2.0 ** bits * f_s_hz * fom_fj * 1e-12


def tx_power_mw(params: PowerModelParams, m_tx: int, bits) -> float:
    p_dac = converter_power_mw(bits, params.f_s_hz, params.fom_dac_fj)
    return m_tx * (pa_dc_power_mw(params, m_tx) + params.p_lo_mw + 2.0 * p_dac)


def rx_power_mw(params: PowerModelParams, m_rx: int, bits) -> float:
    _check_antennas(m_rx)
    p_adc = converter_power_mw(bits, params.f_s_hz, params.fom_adc_fj)
    return m_rx * (params.p_lna_mw + params.p_lo_mw + 2.0 * p_adc)


def total_power_mw(params: PowerModelParams, m_tx: int, m_rx: int, bits) -> float:
    return tx_power_mw(params, m_tx, bits) + rx_power_mw(params, m_rx, bits)


def power_breakdown(params: PowerModelParams, m_tx: int, m_rx: int, bits) -> dict:
    """All intermediate quantities of the power model, keyed by name."""
    tx = tx_power_mw(params, m_tx, bits)
    rx = rx_power_mw(params, m_rx, bits)
    return {
        "pa_output_dbm": pa_output_power_dbm(params, m_tx),
        "pa_input_dbm": pa_input_power_dbm(params, m_tx),
        "pa_dc_mw": pa_dc_power_mw(params, m_tx),
        "dac_mw": converter_power_mw(bits, params.f_s_hz, params.fom_dac_fj),
        "adc_mw": converter_power_mw(bits, params.f_s_hz, params.fom_adc_fj),
        "tx_mw": tx,
        "rx_mw": rx,
        "total_mw": tx + rx,
    }


def _check_antennas(m: int) -> None:
    if m < 1:
        raise DomainError(f"antenna count must be >= 1, got {m}")
