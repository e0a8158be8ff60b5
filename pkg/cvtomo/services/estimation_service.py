"""
Estimation Service - median-of-means moment estimation

This module contains functions for:
- The median-of-means estimator and its bin count
- The copy count sufficient for moment estimation
- Estimating first moments and the covariance matrix from the n+3 rounds
- Regularizing the estimate back into the physical cone
"""

import logging
from math import ceil, log, sqrt
from typing import Optional

import numpy as np

from cvtomo.constants import COV_VARIANCE_CONSTANT, MOM_CONSTANT, Regularization
from cvtomo.exceptions import InvalidInputError, SampleStarvationError, UncertaintyViolation
from cvtomo.models import GaussianState, MomentEstimate, StateSource

from .gaussian_service import uncertainty_gap
from .measurement_service import homodyne_joint_sample, source_moments, table2_sample_plan
from .symplectic_service import operator_norm

logger = logging.getLogger(__name__)


def _check_targets(epsilon: float, delta: float) -> None:
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")


def median_of_means(samples, bins: int):
    """
    Median of ``bins`` bin averages.

    Trailing samples that do not fill a bin are dropped. A 2-D input is
    treated column by column.

    Args:
        samples: 1-D array, or 2-D array with one column per quantity
        bins: Number of bins K (>= 1)

    Example:
        >>> median_of_means([1.0, 2.0, 3.0, 4.0], 1)
        2.5
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] == 0:
        raise InvalidInputError("median of means of an empty sample")
    if int(bins) != bins or bins < 1:
        raise InvalidInputError(f"bin count must be a positive integer, got {bins}")
    bins = int(bins)
    if bins > samples.shape[0]:
        raise InvalidInputError(f"{bins} bins need at least as many samples, got {samples.shape[0]}")
    usable = (samples.shape[0] // bins) * bins
    means = samples[:usable].reshape(bins, usable // bins, *samples.shape[1:]).mean(axis=1)
    result = np.median(means, axis=0)
    return float(result) if np.ndim(result) == 0 else result


def mom_bin_count(n: int, delta: float) -> int:
    """K = ceil(2 log(2 (2n^2 + 3n) / delta)), shared by all estimated entries."""
    return ceil(2 * log(2 * (2 * n ** 2 + 3 * n) / delta))


def moment_sample_count(n: int, epsilon: float, delta: float, energy_second: float) -> int:
    """
    Copies sufficient for moment estimation.

    N = (n+3) * ceil(68 log(2(2n^2+3n)/delta) * 200 (8 n^2 E2^2 + 3n) / eps^2)

    Args:
        n: Number of modes
        epsilon: Covariance accuracy in operator norm
        delta: Failure probability
        energy_second: E2 with sqrt(Tr[E^2 rho]) <= n E2
    """
    _check_targets(epsilon, delta)
    if energy_second < 0.5:
        raise InvalidInputError(f"second-moment budget must be >= 1/2, got {energy_second}")
    per_round = MOM_CONSTANT * log(2 * (2 * n ** 2 + 3 * n) / delta) \
        * COV_VARIANCE_CONSTANT * (8 * n ** 2 * energy_second ** 2 + 3 * n) / epsilon ** 2
    return (n + 3) * ceil(per_round)


def mean_error_target(epsilon: float, n: int, energy_second: float) -> float:
    """Accuracy of the first moments that comes with an eps-accurate covariance: eps / (10 sqrt(8 E2 n))."""
    return epsilon / (10 * sqrt(8 * energy_second * n))


def regularize(raw_cov, epsilon: float, mode: str = Regularization.FIXED.value):
    """
    V' = V + mu I.

    'fixed' uses mu = eps/2; 'adaptive' uses max(eps/2, mu_min) where mu_min
    is the least shift that restores V + i Omega >= 0.

    Returns:
        (V', mu)
    """
    raw_cov = np.asarray(raw_cov, dtype=float)
    shift = epsilon / 2
    if Regularization(mode) is Regularization.ADAPTIVE:
        shift = max(shift, -uncertainty_gap(raw_cov))
    return raw_cov + shift * np.eye(raw_cov.shape[0]), shift


def _second_moments(shots: np.ndarray, bins: int):
    """Median-of-means estimates of E[q_a] and E[q_a q_b] within one round."""
    means = median_of_means(shots, bins)
    products = (shots[:, :, None] * shots[:, None, :]).reshape(shots.shape[0], -1)
    second = median_of_means(products, bins).reshape(shots.shape[1], shots.shape[1])
    return np.atleast_1d(means), np.atleast_2d(second)


def _assemble(n: int, rounds: dict, bins: int):
    """Combine the n+3 rounds into (m, W) with W_jk = Tr[rho {R_j, R_k}]."""
    x_mean, xx = _second_moments(rounds['positions'], bins)
    p_mean, pp = _second_moments(rounds['momenta'], bins)
    _, uu = _second_moments(rounds['rotated'], bins)

    mean = np.empty(2 * n)
    mean[0::2] = x_mean
    mean[1::2] = p_mean

    W = np.empty((2 * n, 2 * n))
    W[0::2, 0::2] = 2 * xx
    W[1::2, 1::2] = 2 * pp
    for i in range(n):
        # {x, p} = 2u^2 - x^2 - p^2
        W[2 * i, 2 * i + 1] = W[2 * i + 1, 2 * i] = 2 * uu[i, i] - xx[i, i] - pp[i, i]
    for k in range(n):
        _, pair = _second_moments(rounds[f'pair{k + 1}'], bins)
        others = [i for i in range(n) if i != k]
        for column, i in enumerate(others):
            W[2 * i, 2 * k + 1] = W[2 * k + 1, 2 * i] = 2 * pair[column, -1]
    return mean, W


def estimate_moments(
    source: StateSource,
    n: int,
    epsilon: float,
    delta: float,
    energy_second: float,
    copies: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    regularization: Optional[str] = None,
    tol: float = 1e-10,
) -> MomentEstimate:
    """
    Estimate the first moments and the covariance matrix of the source.

    The n+3 rounds of ``table2_sample_plan`` are measured with equal shares
    of the copies; every entry is a median of means; V = W - 2 m m^T is
    shifted by mu I and checked against the uncertainty relation.

    Args:
        source: Copies of the unknown state
        n: Number of modes
        epsilon: Target covariance accuracy (operator norm)
        delta: Failure probability
        energy_second: Second-moment budget E2
        copies: Explicit copy budget; defaults to ``moment_sample_count``
        rng: numpy Generator
        regularization: 'fixed' or 'adaptive'; defaults to 'fixed' for the
            formula-sized budget and 'adaptive' for an explicit one

    Returns:
        MomentEstimate

    Raises:
        SampleStarvationError: fewer copies per round than bins
        UncertaintyViolation: V' + i Omega is not positive semidefinite
    """
    _check_targets(epsilon, delta)
    if source.n != n:
        raise InvalidInputError(f"source has {source.n} modes, expected {n}")
    if regularization is None:
        regularization = Regularization.FIXED.value if copies is None else Regularization.ADAPTIVE.value
    regularization = Regularization(regularization).value
    bins = mom_bin_count(n, delta)

    if source.noiseless:
        truth = source_moments(source)
        mean, raw_cov, used = truth.mean.copy(), truth.cov.copy(), 0
    else:
        rng = np.random.default_rng() if rng is None else rng
        total = moment_sample_count(n, epsilon, delta, energy_second) if copies is None else int(copies)
        plan = table2_sample_plan(n)
        per_round = total // len(plan)
        if per_round < bins:
            raise SampleStarvationError(
                f"{total} copies give {per_round} per round, median of means needs {bins}"
            )
        before = source.copies_consumed
        rounds = {
            setting.label: homodyne_joint_sample(source, setting, per_round, rng).shots for setting in plan
        }
        used = source.copies_consumed - before
        mean, raw_cov = _assemble(n, rounds, bins)
        raw_cov = raw_cov - 2 * np.outer(mean, mean)
        logger.info("estimate_moments: n=%d, %d rounds of %d copies, K=%d", n, len(plan), per_round, bins)

    cov, shift = regularize(raw_cov, epsilon, regularization)
    gap = uncertainty_gap(cov)
    estimate = MomentEstimate(
        mean=mean, cov=cov, raw_cov=raw_cov, epsilon=epsilon, delta=delta, samples_used=used,
        uncertainty_ok=gap >= -tol, shift=shift, regularization=regularization, bins=bins,
    )
    logger.debug("estimate_moments: shift=%.4g, uncertainty gap=%.4g", shift, gap)
    if not estimate.uncertainty_ok:
        raise UncertaintyViolation(f"estimated covariance violates the uncertainty relation (gap {gap:.3g})", estimate)
    return estimate


def moment_errors(estimate: MomentEstimate, truth: GaussianState):
    """(||V' - V|| operator norm, ||m~ - m||_2) against the true moments."""
    return (
        operator_norm(estimate.cov - truth.cov),
        float(np.linalg.norm(estimate.mean - truth.mean)),
    )
