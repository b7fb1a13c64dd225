"""Refinement of the raw LS estimate.

``conventional`` keeps the LS estimate as is. ``omp_estimate`` runs a
simultaneous orthogonal matching pursuit over a beamspace dictionary of
(receive, transmit) steering-vector pairs: the angular support is shared by
all subcarriers while the path coefficients are refit on every subcarrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import ArrayGeometry, ula_steering
from .errors import ConfigError
from .training import ChannelEstimate, EstimatorKind


@dataclass(frozen=True)
class BeamspaceDictionary:
    tx_atoms: np.ndarray  # (M_Tx, D_tx), unit-norm columns
    rx_atoms: np.ndarray  # (M_Rx, D_rx)
    tx_grid: np.ndarray   # sin-angle grid points
    rx_grid: np.ndarray

    @property
    def grid_angles(self) -> tuple[np.ndarray, np.ndarray]:
        return np.arcsin(self.tx_grid), np.arcsin(self.rx_grid)


@dataclass(frozen=True)
class OmpResult:
    estimate: ChannelEstimate
    support: list[tuple[int, int]]
    coefficients: np.ndarray        # (N, len(support))
    residual_norms: list[float]     # Frobenius norm over all subcarriers, per iteration

    @property
    def iterations(self) -> int:
        return len(self.support)


def conventional(estimate: ChannelEstimate) -> ChannelEstimate:
    return replace(estimate, method_tag=EstimatorKind.CONVENTIONAL)


def _atoms(m: int, oversampling: float, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    size = math.ceil(oversampling * m)
    grid = -1.0 + 2.0 * np.arange(size) / size
    geometry = ArrayGeometry(m, spacing)
    atoms = np.stack([ula_steering(math.asin(u), geometry) for u in grid], axis=1)
    return atoms / math.sqrt(m), grid


def build_dictionary(m_tx: int, m_rx: int, oversampling: float = 2.0,
                     spacing: float = 0.5) -> BeamspaceDictionary:
    """Unit-norm ULA atoms on ``ceil(oversampling * M)`` points of sin-angle in [-1, 1)."""
    if oversampling < 1:
        raise ConfigError("oversampling must be >= 1")
    tx_atoms, tx_grid = _atoms(m_tx, oversampling, spacing)
    rx_atoms, rx_grid = _atoms(m_rx, oversampling, spacing)
    return BeamspaceDictionary(tx_atoms=tx_atoms, rx_atoms=rx_atoms,
                               tx_grid=tx_grid, rx_grid=rx_grid)


def omp_decompose(estimate: ChannelEstimate, dictionary: BeamspaceDictionary,
                  max_paths: int = 8, residual_tol: float = 0.1) -> OmpResult:
    """Simultaneous OMP returning the support and coefficients as well.

    Each iteration picks the atom pair whose correlation energy with the
    residual, summed over subcarriers, is largest (ties go to the lowest flat
    index), then refits all selected coefficients by least squares on every
    subcarrier. Iteration stops once the residual norm drops to
    ``residual_tol * ||H_tilde||_F`` or ``max_paths`` pairs are selected.
    """
    a_tx, a_rx = dictionary.tx_atoms, dictionary.rx_atoms
    if a_tx.size == 0 or a_rx.size == 0:
        raise ConfigError("beamspace dictionary is empty")
    d_rx, d_tx = a_rx.shape[1], a_tx.shape[1]
    if not 1 <= max_paths <= min(d_tx, d_rx):
        raise ConfigError(f"max_paths must lie in [1, {min(d_tx, d_rx)}]")

    h = estimate.h_tilde
    n_sc, m_rx, m_tx = h.shape
    if (a_rx.shape[0], a_tx.shape[0]) != (m_rx, m_tx):
        raise ConfigError("dictionary does not match the estimate dimensions")

    target = h.reshape(n_sc, -1)
    h_norm = np.linalg.norm(target)
    residual = h
    support: list[tuple[int, int]] = []
    basis = np.empty((m_rx * m_tx, 0), dtype=complex)
    coeffs = np.zeros((n_sc, 0), dtype=complex)
    norms = [float(h_norm)]

    while len(support) < max_paths and norms[-1] > residual_tol * h_norm:
        corr = a_rx.conj().T @ residual @ a_tx
        score = np.sum(np.abs(corr) ** 2, axis=0)
        flat = int(np.argmax(score))
        i, j = divmod(flat, d_tx)
        # residual is orthogonal to the current support after every refit
        if score[i, j] <= 1e-24 * max(h_norm ** 2, 1e-300) or (i, j) in support:
            break
        support.append((i, j))
        atom = np.outer(a_rx[:, i], a_tx[:, j].conj()).reshape(-1, 1)
        basis = np.hstack([basis, atom])
        sol, *_ = np.linalg.lstsq(basis, target.T, rcond=None)
        coeffs = sol.T
        fitted = coeffs @ basis.T
        residual = (target - fitted).reshape(h.shape)
        norms.append(float(np.linalg.norm(residual)))

    h_bar = (coeffs @ basis.T).reshape(h.shape) if support else np.zeros_like(h)
    return OmpResult(
        estimate=ChannelEstimate(h_tilde=h_bar, method_tag=EstimatorKind.OMP),
        support=support, coefficients=coeffs, residual_norms=norms,
    )


def omp_estimate(estimate: ChannelEstimate, dictionary: BeamspaceDictionary,
                 max_paths: int = 8, residual_tol: float = 0.1) -> ChannelEstimate:
    return omp_decompose(estimate, dictionary, max_paths, residual_tol).estimate
