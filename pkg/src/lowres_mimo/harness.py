"""Monte Carlo orchestration: configuration, link trials, sweeps and CSV output."""

from __future__ import annotations

import csv
import dataclasses
import functools
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable

import numpy as np

from .channel import ArrayGeometry, ChannelParams, exponential_pdp, generate_channel
from .errors import ConfigError, SimulationError
from .estimators import build_dictionary, conventional, omp_estimate
from .metrics import (channel_gain_matrix, energy_efficiency, estimation_error_variance,
                      sinr_from_terms, sinr_terms, spectral_efficiency)
from .power import PowerModelParams, total_power_mw
from .precoding import design_precoders
from .quantization import INFINITE, ImpairmentPowers, QuantizerSpec
from .training import (EstimatorKind, build_pilot_grid, ls_estimate_interpolate,
                       simulate_training)
from .units import db_to_linear

log = logging.getLogger(__name__)

CSV_HEADER = ["m_tx", "m_rx", "bits", "k_factor_db", "estimator", "mean_se_bps_hz",
              "se_stderr", "p_tot_mw", "mean_ee_bps_hz_w"]
ERROR_VAR_MODES = ("per_trial", "averaged")


def parse_bits(value) -> float | int:
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinite", "infinity"):
            return INFINITE
        try:
            value = int(text)
        except ValueError:
            raise ConfigError(f"bits must be an integer or 'inf', got {value!r}") from None
    if value == INFINITE:
        return INFINITE
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"bits must be an integer or 'inf', got {value!r}")
    return int(value)


def format_bits(bits) -> str:
    return "inf" if bits == INFINITE else str(int(bits))


@dataclass(frozen=True)
class LinkConfig:
    """One point of the experiment grid.

    ``sigma_w^2 = 10**(-snr_db/10)``: the SNR is referenced to unit signal
    and unit channel power at a receive antenna.
    """

    m_tx: int = 8
    m_rx: int = 8
    n: int = 64
    snr_db: float = 0.0
    k_factor_db: float = -20.0
    bits: float | int = 4
    sigma_rf_sq_db: float = -25.0
    estimator: str = "conventional"
    trials: int = 200
    seed: int = 0
    p_t: float = 1.0
    num_taps: int = 8
    num_clusters: int = 8
    pdp_decay_db: float = 3.0
    element_spacing: float = 0.5
    omp_oversampling: float = 2.0
    omp_max_paths: int = 8
    omp_residual_tol: float = 0.1
    error_var_mode: str = "per_trial"
    power: PowerModelParams = field(default_factory=PowerModelParams)

    def __post_init__(self):
        object.__setattr__(self, "bits", parse_bits(self.bits))
        try:
            EstimatorKind(self.estimator)
        except ValueError:
            raise ConfigError(f"unknown estimator {self.estimator!r}") from None
        if self.m_tx < 1 or self.m_rx < 1 or self.n < 1:
            raise ConfigError("m_tx, m_rx and n must be positive")
        if self.n % self.m_tx:
            raise ConfigError(f"m_tx={self.m_tx} must divide n={self.n}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not self.p_t > 0:
            raise ConfigError("p_t must be positive")
        if self.error_var_mode not in ERROR_VAR_MODES:
            raise ConfigError(f"error_var_mode must be one of {ERROR_VAR_MODES}")
        self.quantizer  # validates the resolution
        self.channel

    @property
    def noise_power(self) -> float:
        return db_to_linear(-self.snr_db)

    @property
    def sigma_rf_sq(self) -> float:
        return db_to_linear(self.sigma_rf_sq_db)

    @property
    def quantizer(self) -> QuantizerSpec:
        try:
            return QuantizerSpec(self.bits)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(
            tx_geometry=ArrayGeometry(self.m_tx, self.element_spacing),
            rx_geometry=ArrayGeometry(self.m_rx, self.element_spacing),
            num_subcarriers=self.n,
            k_factor_db=self.k_factor_db,
            num_taps=self.num_taps,
            num_clusters=self.num_clusters,
            power_delay_profile=exponential_pdp(self.num_taps, self.pdp_decay_db),
        )

    @property
    def impairments(self) -> ImpairmentPowers:
        return ImpairmentPowers.for_link(self.quantizer, self.m_tx, self.sigma_rf_sq,
                                         self.noise_power)

    def total_power_mw(self) -> float:
        """Transceiver power; NaN when the resolution is infinite."""
        if self.bits == INFINITE:
            return math.nan
        return total_power_mw(self.power, self.m_tx, self.m_rx, self.bits)

    def replace(self, **changes) -> "LinkConfig":
        power_changes = {k: changes.pop(k) for k in list(changes) if k in _POWER_KEYS}
        if power_changes:
            changes["power"] = dataclasses.replace(self.power, **power_changes)
        return dataclasses.replace(self, **changes)


_POWER_KEYS = {f.name for f in fields(PowerModelParams)}
_LINK_KEYS = {f.name for f in fields(LinkConfig)} - {"power"}


@dataclass
class TrialResult:
    """Outcome of one link trial.

    ``signal``, ``interference`` and ``q_norm_sq`` are kept so SINRs can be
    recomputed with trial-averaged error variances.
    """

    trial_index: int
    se: float
    sinr: np.ndarray
    error_var: np.ndarray
    signal: np.ndarray
    interference: np.ndarray
    q_norm_sq: np.ndarray
    noise_floor: float
    nmse: float
    ee: float = math.nan


@dataclass(frozen=True)
class SweepRow:
    m_tx: int
    m_rx: int
    bits: float | int
    k_factor_db: float
    estimator: str
    mean_se: float
    se_stderr: float
    p_tot_mw: float
    mean_ee: float
    error: str | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)


def trial_seed(seed: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, trial_index])


@functools.lru_cache(maxsize=32)
def _dictionary(m_tx: int, m_rx: int, oversampling: float, spacing: float):
    return build_dictionary(m_tx, m_rx, oversampling, spacing)


def refine_estimate(config: LinkConfig, estimate):
    if config.estimator == EstimatorKind.OMP.value:
        dictionary = _dictionary(config.m_tx, config.m_rx, config.omp_oversampling,
                                 config.element_spacing)
        return omp_estimate(estimate, dictionary, config.omp_max_paths, config.omp_residual_tol)
    return conventional(estimate)


def run_link_trial(config: LinkConfig, trial_index: int) -> TrialResult:
    """Training, estimation, precoding and SINR evaluation for one channel draw."""
    channel_ss, noise_ss = trial_seed(config.seed, trial_index).spawn(2)
    channel = generate_channel(config.channel, int(channel_ss.generate_state(1)[0]))
    rng = np.random.default_rng(noise_ss)

    noise_power = config.noise_power
    spec = config.quantizer
    impairments = config.impairments
    grid = build_pilot_grid(config.n, config.m_tx)

    received = simulate_training(channel, grid, impairments, noise_power, spec, rng)
    estimate = refine_estimate(config, ls_estimate_interpolate(received, grid))

    h = channel.h
    est = design_precoders(estimate.h_tilde, config.p_t, noise_power)
    ideal = design_precoders(h, config.p_t, noise_power)
    gain = channel_gain_matrix(est.q, h, est.f, est.p)
    gain_ideal = channel_gain_matrix(ideal.q, h, ideal.f, ideal.p)
    error_var = estimation_error_variance(gain, gain_ideal)

    signal, interference = sinr_terms(gain)
    q_norm_sq = np.sum(np.abs(est.q) ** 2, axis=-2)
    floor = noise_power + impairments.sigma_d_sq + impairments.sigma_q_rx_sq
    sinr = sinr_from_terms(signal, interference, error_var + floor, q_norm_sq)
    se = spectral_efficiency(sinr)

    nmse = float(np.sum(np.abs(estimate.h_tilde - h) ** 2) / np.sum(np.abs(h) ** 2))
    p_tot = config.total_power_mw()
    ee = energy_efficiency(se, p_tot) if math.isfinite(p_tot) else math.nan
    return TrialResult(trial_index=trial_index, se=se, sinr=sinr, error_var=error_var,
                       signal=signal, interference=interference, q_norm_sq=q_norm_sq,
                       noise_floor=floor, nmse=nmse, ee=ee)


def averaged_error_se(trials: list[TrialResult]) -> list[float]:
    """Per-trial SE recomputed with the error variance averaged over trials."""
    mean_var = np.mean([t.error_var for t in trials], axis=0)
    return [spectral_efficiency(sinr_from_terms(t.signal, t.interference,
                                                mean_var + t.noise_floor, t.q_norm_sq))
            for t in trials]


def summarize(config: LinkConfig, trials: list[TrialResult]) -> SweepRow:
    if config.error_var_mode == "averaged":
        se = np.array(averaged_error_se(trials))
    else:
        se = np.array([t.se for t in trials])
    mean_se = float(se.mean())
    stderr = float(se.std(ddof=1) / math.sqrt(se.size)) if se.size > 1 else 0.0
    p_tot = config.total_power_mw()
    if math.isfinite(p_tot):
        mean_ee = energy_efficiency(mean_se, p_tot)
    else:
        log.info("bits=inf: power model undefined, EE reported as NaN")
        mean_ee = math.nan
    return SweepRow(config.m_tx, config.m_rx, config.bits, config.k_factor_db,
                    config.estimator, mean_se, stderr, p_tot, mean_ee)


def _error_row(config: LinkConfig, exc: Exception) -> SweepRow:
    nan = math.nan
    return SweepRow(config.m_tx, config.m_rx, config.bits, config.k_factor_db,
                    config.estimator, nan, nan, nan, nan, error=f"{type(exc).__name__}: {exc}")


def run_sweep(configs: Iterable[LinkConfig], threads: int = 1) -> SweepResult:
    """Run every configuration and aggregate per row, in input order.

    Trials are scheduled on a thread pool when ``threads > 1``. Each trial
    seeds itself from ``(seed, trial_index)`` and results are collected in
    trial order, so the output does not depend on ``threads``.
    """
    configs = list(configs)
    if not configs:
        raise ConfigError("run_sweep needs at least one configuration")

    def run_config(config: LinkConfig, pool) -> SweepRow:
        try:
            indices = range(config.trials)
            if pool is None:
                results = [run_link_trial(config, i) for i in indices]
            else:
                results = list(pool.map(functools.partial(run_link_trial, config), indices))
            return summarize(config, results)
        except SimulationError as exc:
            log.warning("config %s failed: %s", config, exc)
            return _error_row(config, exc)

    if threads <= 1:
        return SweepResult([run_config(c, None) for c in configs])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return SweepResult([run_config(c, pool) for c in configs])


def _fmt(x: float) -> str:
    return f"{x:#.6g}"


def write_csv(result: SweepResult, path) -> None:
    """Write the sweep as CSV; failed rows carry NaN in the numeric columns."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in result.rows:
                writer.writerow([
                    row.m_tx, row.m_rx, format_bits(row.bits), _fmt(row.k_factor_db),
                    row.estimator, _fmt(row.mean_se), _fmt(row.se_stderr),
                    _fmt(row.p_tot_mw), _fmt(row.mean_ee),
                ])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc


def read_csv(path) -> list[dict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# --- configuration files ----------------------------------------------------

_INT_KEYS = {"m_tx", "m_rx", "n", "trials", "seed", "num_taps", "num_clusters", "omp_max_paths"}
_STR_KEYS = {"estimator", "error_var_mode"}


def _convert(key: str, raw: str):
    if key not in _LINK_KEYS and key not in _POWER_KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    raw = raw.strip()
    try:
        if key == "bits":
            return parse_bits(raw)
        if key in _STR_KEYS:
            return raw
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {key!r}") from None


def _read_pairs(text: str, source: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if any(key == k for k, _ in pairs):
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs.append((key, value))
    return pairs


def config_from_mapping(values: dict, base: LinkConfig | None = None) -> LinkConfig:
    base = base or LinkConfig()
    unknown = set(values) - _LINK_KEYS - _POWER_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    try:
        return base.replace(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str, source: str = "<config>") -> LinkConfig:
    """Parse a flat ``key = value`` file with ``#`` comments."""
    values = {k: _convert(k, v) for k, v in _read_pairs(text, source)}
    return config_from_mapping(values)


def load_config(path) -> LinkConfig:
    path = Path(path)
    return parse_config(_read_text(path), str(path))


def parse_grid(text: str, source: str = "<grid>") -> list[LinkConfig]:
    """Expand a grid file into configurations.

    Same syntax as a config file, but any value may be a comma-separated
    list. The special key ``antennas`` takes ``MTXxMRX`` pairs
    (e.g. ``8x8, 16x16``). The Cartesian product runs in file order with
    the last key varying fastest.
    """
    axes: list[list[dict]] = []
    for key, raw in _read_pairs(text, source):
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if not items:
            raise ConfigError(f"{source}: empty value for {key!r}")
        if key == "antennas":
            axis = []
            for item in items:
                try:
                    m_tx, m_rx = (int(v) for v in item.lower().split("x"))
                except ValueError:
                    raise ConfigError(f"{source}: bad antenna pair {item!r}") from None
                axis.append({"m_tx": m_tx, "m_rx": m_rx})
        else:
            axis = [{key: _convert(key, item)} for item in items]
        axes.append(axis)
    configs = []
    for combo in itertools.product(*axes):
        merged: dict = {}
        for part in combo:
            merged.update(part)
        configs.append(config_from_mapping(merged))
    return configs


def load_grid(path) -> list[LinkConfig]:
    path = Path(path)
    return parse_grid(_read_text(path), str(path))


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read {path}: {exc.strerror}") from exc
