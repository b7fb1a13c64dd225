"""Decibel conversions used throughout the power and link models."""

import numpy as np


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def db_to_linear(value_db):
    return _scalar_or_array(10.0 ** (np.asarray(value_db, dtype=float) / 10.0))


def linear_to_db(value):
    return _scalar_or_array(10.0 * np.log10(np.asarray(value, dtype=float)))


def dbm_to_mw(value_dbm):
    # dBm is referenced to 1 mW, so the conversion is the plain dB one
    return db_to_linear(value_dbm)


def mw_to_dbm(value_mw):
    return linear_to_db(value_mw)


def complex_normal(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with the given variance."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
