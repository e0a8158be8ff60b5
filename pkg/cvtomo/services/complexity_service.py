"""
Complexity Service - sample-complexity calculators

This module contains functions for:
- Bosonic and binary entropies
- Effective dimension and effective rank of energy-constrained states
- Lower bounds on the copies any learner needs (pure, mixed, t-compressible)
- Copy counts sufficient for the learners, and the derived counts of the
  filtering and success-amplification steps
- Bound tables over parameter grids

Integer quantities (dimensions, counts) are exact Python integers; products
with real prefactors are evaluated as fractions so that large n does not
overflow. Ceilings that cannot be represented as a float are reported as inf.
"""

import logging
from fractions import Fraction
from math import ceil, comb, e, inf, log, log2, pi, sqrt

from cvtomo.constants import (
    ENERGY_CONSTRAINED_PREFACTOR,
    GAUSSIAN_MIXED_SPLIT,
    GAUSSIAN_PURE_SPLIT,
    HEAD_ENERGY_FACTOR,
    RANK_ACCURACY_DIVISOR,
)
from cvtomo.exceptions import InvalidInputError
from cvtomo.models import BoundQuery

from .estimation_service import moment_sample_count

logger = logging.getLogger(__name__)


def _check_targets(epsilon: float, delta: float) -> None:
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")


def _power(base: float, exponent: int) -> float:
    try:
        return base ** exponent
    except OverflowError:
        return inf


def _stable_ceil(value: float) -> int:
    """Ceiling that ignores float noise in the last digits (25.000000000000004 -> 25)."""
    return ceil(value - 1e-9 * max(1.0, abs(value)))


def _ceil_times(integer: int, factor: float) -> int:
    """ceil(integer * factor) with the product evaluated exactly."""
    return ceil(Fraction(integer) * Fraction(factor))


# =========================
# 1. ENTROPIES
# =========================

def bosonic_entropy(x: float) -> float:
    """g(x) = (x+1) log2(x+1) - x log2(x); g(0) = 0."""
    if x < 0:
        raise InvalidInputError(f"bosonic entropy needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    return (x + 1) * log2(x + 1) - x * log2(x)


def binary_entropy(x: float) -> float:
    """H2(x) = -x log2(x) - (1-x) log2(1-x); H2(0) = H2(1) = 0."""
    if not 0 <= x <= 1:
        raise InvalidInputError(f"binary entropy needs x in [0, 1], got {x}")
    if x in (0, 1):
        return 0.0
    return -x * log2(x) - (1 - x) * log2(1 - x)


# =========================
# 2. DIMENSION AND RANK
# =========================

def effective_dimension(n: int, k: int, epsilon: float, photons: float):
    """
    Dimension of H_m with m = ceil(n N_phot / eps^(2/k)).

    Returns:
        (m, dim, ceiling) with dim = C(m+n, n) exact and
        ceiling = (e N_phot / eps^(2/k) + 2e)^n

    Example:
        >>> effective_dimension(1, 1, 0.1, 1.0)[:2]
        (100, 101)
    """
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    scale = epsilon ** (2 / k)
    m = _stable_ceil(n * photons / scale)
    return m, comb(m + n, n), _power(e * photons / scale + 2 * e, n)


def effective_rank(n: int, k: int, epsilon: float, photons: float):
    """
    Rank of the low-rank approximation: C(m'+n, n) with m' = ceil(n N_phot / eps^(1/k)).

    Returns:
        (m', rank, ceiling) with ceiling = (e N_phot / eps^(1/k) + 2e)^n
    """
    if not 0 < epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    scale = epsilon ** (1 / k)
    m = _stable_ceil(n * photons / scale)
    return m, comb(m + n, n), _power(e * photons / scale + 2 * e, n)


def low_rank_error(epsilon: float) -> float:
    """eta(eps) = (2 + 1/sqrt(1 - eps)) eps."""
    if not 0 <= epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in [0, 1), got {epsilon}")
    return (2 + 1 / sqrt(1 - epsilon)) * epsilon


# =========================
# 3. LOWER BOUNDS
# =========================

def lower_bound_pure(n: int, k: int, epsilon: float, delta: float, photons: float) -> float:
    """
    [2(1-d)(N/(12 eps)^(2/k) - 1/n)^n - (1-d) log2(32 pi) - H2(d)] / (n g(N)), at least 1.
    """
    _check_targets(epsilon, delta)
    base = photons / (12 * epsilon) ** (2 / k) - 1 / n
    if base <= 0 or photons == 0:
        return 1.0
    numerator = 2 * (1 - delta) * _power(base, n) - (1 - delta) * log2(32 * pi) - binary_entropy(delta)
    return max(1.0, numerator / (n * bosonic_entropy(photons)))


def lower_bound_mixed(n: int, k: int, epsilon: float, delta: float, photons: float) -> float:
    """
    [(1-d)(N/(16 eps)^(1/k) - 1/n)^(2n) - (1-d)/2 - 2 H2(d)] / (2n g(N)), at least 1.
    """
    _check_targets(epsilon, delta)
    base = photons / (16 * epsilon) ** (1 / k) - 1 / n
    if base <= 0 or photons == 0:
        return 1.0
    numerator = (1 - delta) * _power(base, 2 * n) - (1 - delta) / 2 - 2 * binary_entropy(delta)
    return max(1.0, numerator / (2 * n * bosonic_entropy(photons)))


def lower_bound_t_compressible(n: int, t: int, epsilon: float, delta: float, energy: float) -> float:
    """
    Lower bound for t-compressible pure states with energy per mode E.

    With x = (n/t)(E - 1/2):
    [2(1-d)(x/(12 eps) - 1/t)^t - (1-d) log2(32 pi) - H2(d)] / (t g(x)), at least 1.
    """
    _check_targets(epsilon, delta)
    if not 1 <= t <= n:
        raise InvalidInputError(f"t must lie in [1, {n}], got {t}")
    x = (n / t) * (energy - 0.5)
    base = x / (12 * epsilon) - 1 / t
    if base <= 0 or x <= 0:
        return 1.0
    numerator = 2 * (1 - delta) * _power(base, t) - (1 - delta) * log2(32 * pi) - binary_entropy(delta)
    return max(1.0, numerator / (t * bosonic_entropy(x)))


# =========================
# 4. UPPER BOUNDS
# =========================

def upper_bound_counts(n: int, k: int, epsilon: float, delta: float, photons: float, pure: bool) -> int:
    """
    Copies sufficient for moment-constrained tomography.

    pure:  ceil(2^21 d_eff / eps^2 log(4/delta))
    mixed: ceil(2^21 r_eff d_eff / eps^2 log(4/delta)), r_eff taken at eps/20
    """
    _check_targets(epsilon, delta)
    _, d_eff, _ = effective_dimension(n, k, epsilon, photons)
    factor = ENERGY_CONSTRAINED_PREFACTOR * log(4 / delta) / epsilon ** 2
    if pure:
        return _ceil_times(d_eff, factor)
    _, r_eff, _ = effective_rank(n, k, epsilon / RANK_ACCURACY_DIVISOR, photons)
    return _ceil_times(r_eff * d_eff, factor)


def filtered_copy_count(inner_copies: int, delta: float, parts: int = 2) -> int:
    """ceil(2 N' + 24 log(parts/delta)): enough copies for N' successes of a POVM with success >= 3/4."""
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    return 2 * int(inner_copies) + ceil(24 * log(parts / delta))


def amplified_copy_count(success_probability: float, successes: int, delta: float) -> int:
    """ceil(3N'/(2p) + 18 log(1/delta)/p): copies giving N' successes w.p. >= 1 - delta."""
    if not 0 < success_probability <= 1:
        raise InvalidInputError(f"success probability must lie in (0, 1], got {success_probability}")
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    p = success_probability
    return ceil(3 * successes / (2 * p) + 18 * log(1 / delta) / p)


def moment_constrained_copy_count(n: int, k: int, epsilon: float, delta: float, photons: float, pure: bool) -> int:
    """Total copies of the moment-constrained learner: ceil(2N' + 24 log(2/delta))."""
    return filtered_copy_count(upper_bound_counts(n, k, epsilon, delta, photons, pure), delta, parts=2)


def gaussian_accuracy(n: int, epsilon: float, energy: float, pure: bool = False) -> float:
    """Covariance accuracy of Gaussian tomography: eps^2/(2^7 E n^2), or eps^2/(4 n E) for pure states."""
    if pure:
        return epsilon ** 2 / (GAUSSIAN_PURE_SPLIT * n * energy)
    return epsilon ** 2 / (GAUSSIAN_MIXED_SPLIT * energy * n ** 2)


def gaussian_sample_counts(n: int, epsilon: float, delta: float, energy: float, pure: bool = False) -> int:
    """
    Copies for Gaussian tomography at trace-distance accuracy eps.

    Moment estimation at ``gaussian_accuracy`` with E2 = sqrt(3) E, which
    bounds the second energy moment of any Gaussian state of energy E. The
    mixed count carries 2^14 E^2 n^4 / eps^4, the pure one 16 E^2 n^2 / eps^4.
    """
    _check_targets(epsilon, delta)
    if energy < 0.5:
        raise InvalidInputError(f"energy per mode must be >= 1/2, got {energy}")
    return moment_sample_count(n, gaussian_accuracy(n, epsilon, energy, pure), delta, sqrt(3) * energy)


def covariance_accuracy(n: int, epsilon: float, energy_second: float) -> float:
    """eps_cov = eps^2 / (2 (n+1) (1 + 4 n E2)^2)."""
    return epsilon ** 2 / (2 * (n + 1) * (1 + 4 * n * energy_second) ** 2)


def t_compressible_sample_count(n: int, t: int, epsilon: float, delta: float, energy_second: float) -> int:
    """
    Copies of the t-compressible learner.

    N_cov(n, eps_cov, delta/3, E2) + ceil(2 N_tom(t, eps/2, delta/3, 80 n^2 E2^2) + 24 log(3/delta)),
    where N_tom is the pure moment-constrained count at k = 1 with the head energy as budget.
    """
    _check_targets(epsilon, delta)
    if not 1 <= t <= n:
        raise InvalidInputError(f"t must lie in [1, {n}], got {t}")
    moments = moment_sample_count(n, covariance_accuracy(n, epsilon, energy_second), delta / 3, energy_second)
    head_energy = HEAD_ENERGY_FACTOR * n ** 2 * energy_second ** 2
    inner = upper_bound_counts(t, 1, epsilon / 2, delta / 3, head_energy, pure=True)
    return moments + filtered_copy_count(inner, delta, parts=3)


# =========================
# 5. TABLES
# =========================

def bound_row(query: BoundQuery) -> dict:
    """Every calculator at one grid point, keyed like ``BOUND_TABLE_COLUMNS``."""
    n, k, epsilon, delta, photons = query.n, query.k, query.epsilon, query.delta, query.photons
    energy = photons + 0.5
    return {
        'n': n,
        'k': k,
        'epsilon': epsilon,
        'delta': delta,
        'photons': photons,
        'd_eff': effective_dimension(n, k, epsilon, photons)[1],
        'r_eff': effective_rank(n, k, epsilon, photons)[1],
        'lower_pure': lower_bound_pure(n, k, epsilon, delta, photons),
        'lower_mixed': lower_bound_mixed(n, k, epsilon, delta, photons),
        'upper_pure': upper_bound_counts(n, k, epsilon, delta, photons, pure=True),
        'upper_mixed': upper_bound_counts(n, k, epsilon, delta, photons, pure=False),
        'gaussian_mixed': gaussian_sample_counts(n, epsilon, delta, energy, pure=False),
        'gaussian_pure': gaussian_sample_counts(n, epsilon, delta, energy, pure=True),
    }


def bound_table(queries) -> list:
    """Rows of ``bound_row`` over a grid of queries."""
    rows = [bound_row(query) for query in queries]
    logger.info("bound_table: evaluated %d grid points", len(rows))
    return rows
