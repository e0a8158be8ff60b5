"""
Measurement Service - simulated homodyne and heterodyne data

This module contains functions for:
- Measurement settings (commuting quadrature sets) and their validation
- The n+3 measurement rounds consumed by moment estimation
- Heterodyne sampling: outcomes ~ N(m, (V + I)/2)
- Joint homodyne sampling: outcomes ~ N(R m, R V R^T / 2)

Every draw goes through ``StateSource.consume`` so the copy counter always
equals the number of shots handed out.
"""

import logging
from typing import Optional

import numpy as np

from cvtomo.constants import SettingKind
from cvtomo.exceptions import InvalidInputError
from cvtomo.models import GaussianState, MeasurementSetting, SampleBatch, StateSource

from .fock_service import gaussianification
from .gaussian_service import validate
from .symplectic_service import omega

logger = logging.getLogger(__name__)


# =========================
# 1. SETTINGS
# =========================

def _unit_rows(n: int, indices) -> np.ndarray:
    rows = np.zeros((len(indices), 2 * n))
    rows[np.arange(len(indices)), indices] = 1.0
    return rows


def position_setting(n: int) -> MeasurementSetting:
    return MeasurementSetting(
        'positions', SettingKind.POSITIONS.value,
        _unit_rows(n, [2 * i for i in range(n)]),
        tuple(f'x{i + 1}' for i in range(n)),
    )


def momentum_setting(n: int) -> MeasurementSetting:
    return MeasurementSetting(
        'momenta', SettingKind.MOMENTA.value,
        _unit_rows(n, [2 * i + 1 for i in range(n)]),
        tuple(f'p{i + 1}' for i in range(n)),
    )


def rotated_setting(n: int) -> MeasurementSetting:
    """u_i = (x_i + p_i)/sqrt(2) on every mode; stands in for the joint {x_i, p_i} round."""
    rows = np.zeros((n, 2 * n))
    for i in range(n):
        rows[i, 2 * i] = rows[i, 2 * i + 1] = 1 / np.sqrt(2)
    return MeasurementSetting('rotated', SettingKind.ROTATED.value, rows, tuple(f'u{i + 1}' for i in range(n)))


def pair_setting(n: int, k: int) -> MeasurementSetting:
    """Positions of every mode except k, together with p_k."""
    if not 0 <= k < n:
        raise InvalidInputError(f"mode {k} out of range for {n} modes")
    indices = [2 * i for i in range(n) if i != k] + [2 * k + 1]
    names = tuple(f'x{i + 1}' for i in range(n) if i != k) + (f'p{k + 1}',)
    return MeasurementSetting(f'pair{k + 1}', SettingKind.PAIR.value, _unit_rows(n, indices), names)


def custom_setting(rows, label: str = 'custom', names: Optional[tuple] = None) -> MeasurementSetting:
    """Setting from explicit linear forms; commutation is checked at sampling time."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    names = names or tuple(f'q{i + 1}' for i in range(rows.shape[0]))
    return MeasurementSetting(label, SettingKind.CUSTOM.value, rows, names)


def commutes(setting: MeasurementSetting, tol: float = 1e-12) -> bool:
    """[r_a . R, r_b . R] = i r_a^T Omega r_b vanishes for every pair of rows."""
    rows = setting.rows
    if rows.shape[1] % 2:
        return False
    pattern = rows @ omega(rows.shape[1] // 2) @ rows.T
    return bool(np.max(np.abs(pattern)) <= tol)


def table2_sample_plan(n: int) -> list:
    """
    The n+3 measurement rounds of moment estimation.

    Args:
        n: Number of modes (>= 1)

    Returns:
        [positions, momenta, rotated, pair_1, ..., pair_n]

    Example:
        >>> [s.label for s in table2_sample_plan(2)]
        ['positions', 'momenta', 'rotated', 'pair1', 'pair2']
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f"mode count must be a positive integer, got {n}")
    n = int(n)
    return [position_setting(n), momentum_setting(n), rotated_setting(n)] + [pair_setting(n, k) for k in range(n)]


# =========================
# 2. SAMPLING
# =========================

def source_moments(source: StateSource) -> GaussianState:
    """Moments of the source state; a Fock source is replaced by its Gaussianification."""
    if source.gaussian is not None:
        return source.gaussian
    if source.moments_cache is None:
        source.moments_cache = gaussianification(source.density)
        logger.debug("source_moments: Gaussianified a %d-mode Fock source", source.n)
    return source.moments_cache


def sample_gaussian(mean, cov, count: int, rng: np.random.Generator) -> np.ndarray:
    """count draws from N(mean, cov); eigen fallback when cov is singular."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    cov = (cov + cov.T) / 2
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, U = np.linalg.eigh(cov)
        factor = U * np.sqrt(np.clip(w, 0.0, None))
    return mean + rng.standard_normal((count, mean.size)) @ factor.T


def _checked_moments(source: StateSource) -> GaussianState:
    if source.noiseless:
        raise InvalidInputError("a noiseless source hands out expectations, not samples")
    state = source_moments(source)
    if source.gaussian is not None and not validate(state):
        raise InvalidInputError("source state violates the uncertainty relation")
    return state


def heterodyne_sample(source: StateSource, count: int, rng: np.random.Generator) -> SampleBatch:
    """
    Heterodyne outcomes on ``count`` copies.

    Outcomes follow the Husimi function, N(m, (V + I)/2), one vector of
    length 2n per copy.
    """
    if count < 0:
        raise InvalidInputError("count must be non-negative")
    state = _checked_moments(source)
    source.consume(count)
    n = state.n
    setting = MeasurementSetting(
        'heterodyne', SettingKind.HETERODYNE.value, np.eye(2 * n),
        tuple(name for i in range(n) for name in (f'x{i + 1}', f'p{i + 1}')),
    )
    shots = sample_gaussian(state.mean, (state.cov + np.eye(2 * n)) / 2, count, rng)
    return SampleBatch(setting, shots)


def homodyne_joint_sample(
    source: StateSource,
    setting: MeasurementSetting,
    count: int,
    rng: np.random.Generator,
) -> SampleBatch:
    """
    Joint homodyne outcomes of a commuting quadrature set.

    Args:
        source: Copies of the state
        setting: Rows r_a defining the measured quadratures r_a . R
        count: Number of copies to measure
        rng: numpy Generator

    Raises:
        InvalidInputError: rows that do not commute or do not fit the source
        SampleStarvationError: not enough copies left
    """
    if count < 0:
        raise InvalidInputError("count must be non-negative")
    if setting.rows.shape[1] != 2 * source.n:
        raise InvalidInputError(f"setting acts on {setting.rows.shape[1] // 2} modes, source has {source.n}")
    if not commutes(setting):
        raise InvalidInputError(f"setting '{setting.label}' contains non-commuting quadratures")
    state = _checked_moments(source)
    source.consume(count)
    R = setting.rows
    shots = sample_gaussian(R @ state.mean, R @ state.cov @ R.T / 2, count, rng)
    return SampleBatch(setting, shots)
