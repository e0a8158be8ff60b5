"""
Gaussian Service - the (m, V) model of n-mode Gaussian states

This module contains functions for:
- Constructing vacuum, thermal, coherent and squeezed states
- Checking the uncertainty relation V + i Omega >= 0
- Energy and photon-number moments computed from (m, V)
- Gaussian unitaries, additive noise and marginals at the moment level
- Random states with a controlled energy

Energy convention: E = Tr[rho (N + n/2)], so the vacuum has E = n/2.
"""

import logging
from typing import Iterable, Optional

import numpy as np

from cvtomo.conf import get_setting
from cvtomo.constants import Purity
from cvtomo.exceptions import InvalidInputError
from cvtomo.models import GaussianState

from .symplectic_service import haar_unitary, is_symplectic, omega, unitary_to_passive

logger = logging.getLogger(__name__)


def _tolerance(tol: Optional[float]) -> float:
    return get_setting('TOLERANCE') if tol is None else tol


def uncertainty_gap(cov) -> float:
    """Smallest eigenvalue of the Hermitian matrix V + i Omega."""
    cov = np.asarray(cov, dtype=float)
    return float(np.linalg.eigvalsh(cov + 1j * omega(cov.shape[0] // 2))[0])


def validate(state: GaussianState, tol: Optional[float] = None) -> bool:
    """
    Check the uncertainty relation of a Gaussian state.

    Args:
        state: Gaussian state
        tol: Allowed negativity of V + i Omega (defaults to settings)

    Returns:
        True iff V is symmetric and min eig(V + i Omega) >= -tol
    """
    tol = _tolerance(tol)
    if not isinstance(state, GaussianState):
        raise InvalidInputError("validate expects a GaussianState")
    cov = state.cov
    if np.max(np.abs(cov - cov.T)) > tol * max(1.0, float(np.max(np.abs(cov)))):
        return False
    return uncertainty_gap((cov + cov.T) / 2) >= -tol


def from_moments(mean, cov, tol: Optional[float] = None) -> GaussianState:
    """Gaussian state with the given moments; refuses unphysical covariance matrices."""
    cov = np.asarray(cov, dtype=float)
    state = GaussianState(mean, (cov + cov.T) / 2)
    if np.max(np.abs(cov - cov.T)) > _tolerance(tol) * max(1.0, float(np.max(np.abs(cov)))):
        raise InvalidInputError("covariance matrix is not symmetric")
    if not validate(state, tol):
        raise InvalidInputError(
            f"covariance matrix violates the uncertainty relation (gap {uncertainty_gap(state.cov):.3g})"
        )
    return state


# =========================
# 1. CONSTRUCTORS
# =========================

def vacuum(n: int) -> GaussianState:
    """n-mode vacuum: m = 0, V = I."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"mode count must be a positive integer, got {n}")
    return GaussianState(np.zeros(2 * int(n)), np.eye(2 * int(n)))


def thermal(nu: Iterable[float]) -> GaussianState:
    """Product of thermal states with mean photon numbers ``nu``: V = (+)(2 nu_i + 1) I_2."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if nu.size == 0:
        raise InvalidInputError("at least one mode is required")
    if np.any(nu < 0):
        raise InvalidInputError(f"thermal photon numbers must be non-negative, got {nu}")
    return GaussianState(np.zeros(2 * nu.size), np.diag(np.repeat(2 * nu + 1, 2)))


def coherent(r) -> GaussianState:
    """Coherent state with first moment r: V = I."""
    r = np.ravel(np.asarray(r, dtype=float))
    if r.size == 0 or r.size % 2:
        raise InvalidInputError("displacement must have even length 2n")
    return GaussianState(r, np.eye(r.size))


def squeezed_vacuum(z) -> GaussianState:
    """Squeezed vacuum with V = (+)diag(z_j^2, 1/z_j^2)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z <= 0):
        raise InvalidInputError("squeezing factors must be positive")
    diagonal = np.column_stack([z ** 2, z ** -2]).ravel()
    return GaussianState(np.zeros(2 * z.size), np.diag(diagonal))


# =========================
# 2. ENERGY MOMENTS
# =========================

def mean_energy(state: GaussianState) -> float:
    """E = Tr V / 4 + ||m||^2 / 2."""
    return float(np.trace(state.cov) / 4 + state.mean @ state.mean / 2)


def mean_photon_number(state: GaussianState) -> float:
    """N = Tr(V - I) / 4 + ||m||^2 / 2."""
    return mean_energy(state) - state.n / 2


def energy_second_moment(state: GaussianState) -> float:
    """
    Tr[rho E^2] of a Gaussian state.

    (Tr V/4 + ||m||^2/2)^2 + Tr(V^2)/8 + m^T V m / 2 - n/4; the formula
    holds for Gaussian states only.
    """
    V, m = state.cov, state.mean
    first = mean_energy(state)
    return float(first ** 2 + np.trace(V @ V) / 8 + m @ V @ m / 2 - state.n / 4)


def energy_second_moment_bound(state: GaussianState) -> float:
    """3 (Tr[rho E])^2, an upper bound on ``energy_second_moment``."""
    return 3 * mean_energy(state) ** 2


def photon_second_moment(state: GaussianState) -> float:
    """Tr[rho N^2] with N = E - n/2."""
    n = state.n
    return energy_second_moment(state) - n * mean_energy(state) + n ** 2 / 4


def displacement_energy(state: GaussianState, r) -> float:
    """Mean energy after displacing by r: E + r^T m + ||r||^2 / 2."""
    r = np.ravel(np.asarray(r, dtype=float))
    if r.shape != state.mean.shape:
        raise InvalidInputError("displacement length does not match the state")
    return mean_energy(state) + float(r @ state.mean + r @ r / 2)


# =========================
# 3. MAPS ON MOMENTS
# =========================

def apply_gaussian_map(state: GaussianState, S, d=None, tol: Optional[float] = None) -> GaussianState:
    """Gaussian unitary U = D_d U_S: m -> S m + d, V -> S V S^T."""
    S = np.asarray(S, dtype=float)
    if S.shape != state.cov.shape:
        raise InvalidInputError(f"symplectic matrix of shape {S.shape} does not act on {state.n} modes")
    if not is_symplectic(S, tol):
        raise InvalidInputError("map is not symplectic")
    d = np.zeros(2 * state.n) if d is None else np.ravel(np.asarray(d, dtype=float))
    if d.shape != state.mean.shape:
        raise InvalidInputError("displacement length does not match the state")
    cov = S @ state.cov @ S.T
    return GaussianState(S @ state.mean + d, (cov + cov.T) / 2)


def gaussian_noise(state: GaussianState, K, tol: Optional[float] = None) -> GaussianState:
    """Additive Gaussian noise: m unchanged, V -> V + K with K >= 0."""
    K = np.asarray(K, dtype=float)
    if K.shape != state.cov.shape:
        raise InvalidInputError("noise matrix does not match the state")
    K = (K + K.T) / 2
    if np.linalg.eigvalsh(K)[0] < -_tolerance(tol):
        raise InvalidInputError("noise matrix is not positive semidefinite")
    return GaussianState(state.mean, state.cov + K)


def quadrature_indices(modes: Iterable[int]) -> np.ndarray:
    """Rows (x_j, p_j) of the listed modes, in the given order."""
    return np.array([q for j in modes for q in (2 * j, 2 * j + 1)], dtype=int)


def reduced_state(state: GaussianState, modes: Iterable[int]) -> GaussianState:
    """Marginal on ``modes`` (0-based), keeping their order."""
    modes = list(modes)
    if not modes:
        raise InvalidInputError("mode set must not be empty")
    if len(set(modes)) != len(modes) or min(modes) < 0 or max(modes) >= state.n:
        raise InvalidInputError(f"modes {modes} are not a subset of 0..{state.n - 1}")
    rows = quadrature_indices(modes)
    return GaussianState(state.mean[rows], state.cov[np.ix_(rows, rows)])


def tensor_product(*states: GaussianState) -> GaussianState:
    """Moments of a product state."""
    if not states:
        raise InvalidInputError("nothing to combine")
    size = sum(s.cov.shape[0] for s in states)
    cov = np.zeros((size, size))
    offset = 0
    for s in states:
        k = s.cov.shape[0]
        cov[offset:offset + k, offset:offset + k] = s.cov
        offset += k
    return GaussianState(np.concatenate([s.mean for s in states]), cov)


# =========================
# 4. RANDOM STATES
# =========================

def _scaled_state(left, right, z, d, m, s: float) -> GaussianState:
    squeeze = np.diag(np.column_stack([z ** s, z ** -s]).ravel())
    S = left @ squeeze @ right
    D = np.diag(np.repeat(1 + s * (d - 1), 2))
    cov = S @ D @ S.T
    return GaussianState(s * m, (cov + cov.T) / 2)


def random_gaussian_state(
    n: int,
    energy_cap: float,
    purity: str = Purity.MIXED.value,
    rng: Optional[np.random.Generator] = None,
) -> GaussianState:
    """
    Random valid Gaussian state with mean energy <= energy_cap.

    Squeezing, thermal excitation and displacement are drawn at a scale set
    by the cap; when the draw overshoots, all three are shrunk together along
    s in [0, 1] (s = 0 is the vacuum) by bisection.

    Args:
        n: Number of modes
        energy_cap: Upper bound on the mean energy (>= n/2)
        purity: 'pure' (all symplectic eigenvalues 1) or 'mixed'
        rng: numpy Generator; a fixed seed reproduces the state
    """
    if energy_cap < n / 2:
        raise InvalidInputError(f"energy cap {energy_cap} is below the vacuum energy {n / 2}")
    purity = Purity(purity)
    rng = np.random.default_rng() if rng is None else rng

    excess = (energy_cap - n / 2) / n
    left = unitary_to_passive(haar_unitary(n, rng))
    right = unitary_to_passive(haar_unitary(n, rng))
    z = np.exp(rng.uniform(0.0, np.arcsinh(np.sqrt(2 * excess)) + 1e-12, size=n))
    if purity is Purity.PURE:
        d = np.ones(n)
    else:
        d = rng.uniform(1.0, 1.0 + 4 * excess + 1e-12, size=n)
    m = rng.standard_normal(2 * n) * np.sqrt(excess)

    state = _scaled_state(left, right, z, d, m, 1.0)
    if mean_energy(state) <= energy_cap:
        return state
    low, high = 0.0, 1.0
    for _ in range(60):
        middle = (low + high) / 2
        if mean_energy(_scaled_state(left, right, z, d, m, middle)) <= energy_cap:
            low = middle
        else:
            high = middle
    logger.debug("random_gaussian_state: shrunk draw by s=%.6f to meet cap %.4g", low, energy_cap)
    return _scaled_state(left, right, z, d, m, low)


def max_energy(*states: GaussianState) -> float:
    return max(mean_energy(s) for s in states)


def max_photon_number(*states: GaussianState) -> float:
    return max(mean_photon_number(s) for s in states)
