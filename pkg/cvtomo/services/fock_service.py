"""
Fock Service - brute-force oracle on truncated Fock spaces

This module contains functions for:
- Ladder and quadrature operators on H_m (total photon number <= m)
- Gaussian unitaries as dense matrices, composed from Bloch-Messiah factors
- Density matrices of Gaussian states, with the discarded weight recorded
- Exact trace distance, energy-subspace projection, vacuum post-selection
- Moments of arbitrary truncated states (energy, first and second moments)

Gaussian unitaries are assembled on a working space H_{m+buffer}: single-mode
squeezers and displacements are exponentiated on a large single-mode space
and tensored, passive factors are exponentiated block by block (they conserve
photon number), and the product is cut back to H_m.
"""

import logging
from functools import lru_cache
from math import ceil
from typing import Iterable, Optional

import numpy as np
from scipy.linalg import expm, schur

from cvtomo.conf import get_setting
from cvtomo.exceptions import InvalidInputError, PostSelectionFailure, TruncationError
from cvtomo.models import FockDensity, FockSpace, GaussianState

from .gaussian_service import mean_photon_number, photon_second_moment
from .symplectic_service import bloch_messiah, passive_to_unitary, williamson

logger = logging.getLogger(__name__)

_MAX_SINGLE_MODE = 4000


# =========================
# 1. OPERATORS
# =========================

@lru_cache(maxsize=32)
def annihilation_operators(space: FockSpace) -> tuple:
    """a_j as dense real matrices; a_j^dagger is the transpose (truncated at the cutoff)."""
    index = space.index
    operators = []
    for j in range(space.n):
        a = np.zeros((space.dim, space.dim))
        for col, k in enumerate(space.basis):
            if k[j]:
                lowered = k[:j] + (k[j] - 1,) + k[j + 1:]
                a[index[lowered], col] = np.sqrt(k[j])
        a.setflags(write=False)
        operators.append(a)
    return tuple(operators)


def quadrature_operators(space: FockSpace) -> list:
    """[x1, p1, ..., xn, pn] with x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2))."""
    quadratures = []
    for a in annihilation_operators(space):
        quadratures.append((a + a.T) / np.sqrt(2))
        quadratures.append(-1j * (a - a.T) / np.sqrt(2))
    return quadratures


def number_operator(space: FockSpace) -> np.ndarray:
    return np.diag(space.totals.astype(float))


def energy_operator(space: FockSpace) -> np.ndarray:
    """E = N + n/2."""
    return np.diag(space.totals + space.n / 2)


def fock_state(space: FockSpace, occupation: Iterable[int]) -> np.ndarray:
    """State vector |k>."""
    occupation = tuple(int(k) for k in occupation)
    if occupation not in space.index:
        raise InvalidInputError(f"{occupation} is not a basis state of the truncated space")
    vector = np.zeros(space.dim, dtype=complex)
    vector[space.index[occupation]] = 1.0
    return vector


def pure_density(space: FockSpace, vector, deficit: float = 0.0) -> FockDensity:
    """|psi><psi| for a (renormalized) state vector."""
    vector = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise InvalidInputError("zero vector is not a state")
    vector = vector / norm
    return FockDensity(space, np.outer(vector, vector.conj()), deficit)


def apply_unitary(rho: FockDensity, U) -> FockDensity:
    """U rho U^dagger without renormalization."""
    matrix = U @ rho.matrix @ U.conj().T
    return FockDensity(rho.space, (matrix + matrix.conj().T) / 2, rho.deficit)


# =========================
# 2. GAUSSIAN UNITARIES
# =========================

def _ladder(size: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, size)), 1)


@lru_cache(maxsize=256)
def _single_mode_squeezer(log_z: float, size: int) -> np.ndarray:
    """exp((ln z / 2)(a^dag^2 - a^2)) on photon numbers 0..size-1 (maps x -> z x)."""
    r = abs(log_z)
    big = int(min(_MAX_SINGLE_MODE, ceil(size * (np.cosh(2 * r) + 10 * np.sinh(2 * r))) + 60))
    a = _ladder(big)
    a2 = a @ a
    return expm((log_z / 2) * (a2.T - a2))[:size, :size]


@lru_cache(maxsize=256)
def _single_mode_displacement(alpha: complex, size: int) -> np.ndarray:
    """exp(alpha a^dag - conj(alpha) a) on photon numbers 0..size-1."""
    magnitude = abs(alpha)
    big = int(min(_MAX_SINGLE_MODE, ceil(size + 10 * magnitude * np.sqrt(size) + 2 * magnitude ** 2) + 60))
    a = _ladder(big)
    return expm(alpha * a.T - np.conj(alpha) * a)[:size, :size]


def _tensor_restrict(factors: list, space: FockSpace) -> np.ndarray:
    """Matrix of a product of single-mode operators, restricted to ``space``."""
    result = np.ones((space.dim, space.dim), dtype=complex)
    occupations = space.occupations
    for j, factor in enumerate(factors):
        levels = occupations[:, j]
        result *= factor[np.ix_(levels, levels)]
    return result


def _passive_unitary(u: np.ndarray, space: FockSpace) -> np.ndarray:
    """Photon-number-conserving unitary with U^dag a U = u a, exact on every block."""
    n = space.n
    if np.allclose(u, np.eye(n), atol=1e-14):
        return np.eye(space.dim, dtype=complex)
    T, Z = schur(u, output='complex')
    phases = np.angle(np.diag(T))
    h = -(Z * phases) @ Z.conj().T

    index = space.index
    H = np.zeros((space.dim, space.dim), dtype=complex)
    for col, occupation in enumerate(space.basis):
        for k in range(n):
            if occupation[k] == 0:
                continue
            lowered = list(occupation)
            lowered[k] -= 1
            amplitude = np.sqrt(occupation[k])
            for j in range(n):
                raised = list(lowered)
                raised[j] += 1
                H[index[tuple(raised)], col] += h[j, k] * amplitude * np.sqrt(raised[j])

    U = np.zeros_like(H)
    totals = space.totals
    for total in range(space.cutoff + 1):
        block = np.flatnonzero(totals == total)
        U[np.ix_(block, block)] = expm(-1j * H[np.ix_(block, block)])
    return U


def working_unitary(work: FockSpace, S, d=None) -> np.ndarray:
    """
    Gaussian unitary W = D_d U_S on ``work`` (W^dag R W = S R + d).

    U_S = U_{O1} U_Z U_{O2} follows the Bloch-Messiah factors of S.
    """
    S = np.asarray(S, dtype=float)
    n = work.n
    if S.shape != (2 * n, 2 * n):
        raise InvalidInputError(f"symplectic matrix of shape {S.shape} does not act on {n} modes")
    d = np.zeros(2 * n) if d is None else np.ravel(np.asarray(d, dtype=float))
    euler = bloch_messiah(S)
    size = work.cutoff + 1

    squeeze = _tensor_restrict(
        [_single_mode_squeezer(float(np.log(z)), size) for z in euler.squeezing], work
    )
    alphas = (d[0::2] + 1j * d[1::2]) / np.sqrt(2)
    displace = _tensor_restrict(
        [_single_mode_displacement(complex(alpha), size) for alpha in alphas], work
    )
    left = _passive_unitary(passive_to_unitary(euler.left), work)
    right = _passive_unitary(passive_to_unitary(euler.right), work)
    return displace @ left @ squeeze @ right


def suggest_cutoff(state: GaussianState, budget: float) -> int:
    """Cutoff m with Tr[N^2 rho] / m^2 <= budget (Markov bound on the photon tail)."""
    second = max(photon_second_moment(state), 0.0)
    return int(ceil(np.sqrt(second / budget))) + get_setting('FOCK_BUFFER')


def gaussian_unitary_matrix(
    space: FockSpace,
    S,
    d=None,
    buffer: Optional[int] = None,
    budget: Optional[float] = None,
) -> np.ndarray:
    """
    Dense matrix of the Gaussian unitary D_d U_S on ``space``.

    The operator is built on H_{cutoff + buffer} and cut back to H_cutoff.

    Args:
        space: Truncated Fock space
        S: Symplectic matrix
        d: Displacement (defaults to zero)
        buffer: Extra photons of the working space (defaults to settings)
        budget: Largest tolerated weight of W|0> outside the space

    Raises:
        TruncationError: W|0> leaks more than ``budget`` past the cutoff
    """
    buffer = get_setting('FOCK_BUFFER') if buffer is None else buffer
    budget = get_setting('TRUNCATION_BUDGET') if budget is None else budget
    work = FockSpace(space.n, space.cutoff + buffer)
    U = working_unitary(work, S, d)[:space.dim, :space.dim]

    leakage = 1.0 - float(np.linalg.norm(U[:, 0]) ** 2)
    if leakage > budget:
        S = np.asarray(S, dtype=float)
        d = np.zeros(2 * space.n) if d is None else np.ravel(np.asarray(d, dtype=float))
        image = GaussianState(d, S @ S.T)
        raise TruncationError("Gaussian unitary leaks past the cutoff", leakage, suggest_cutoff(image, budget))
    return U


def _thermal_weights(nu: np.ndarray, space: FockSpace) -> np.ndarray:
    """Product of geometric laws nu^k / (nu + 1)^(k + 1) on the basis."""
    weights = np.ones(space.dim)
    occupations = space.occupations
    for j, value in enumerate(nu):
        weights *= (value / (value + 1)) ** occupations[:, j] / (value + 1)
    return weights


def gaussian_density_matrix(
    space: FockSpace,
    state: GaussianState,
    buffer: Optional[int] = None,
    budget: Optional[float] = None,
) -> FockDensity:
    """
    Fock representation of a Gaussian state.

    A product of thermal states with the Williamson eigenvalues is
    conjugated by D_m U_S, cut to the space and renormalized; the weight cut
    away is kept in ``deficit``.

    Raises:
        TruncationError: deficit above ``budget`` (with a suggested cutoff)
    """
    if state.n != space.n:
        raise InvalidInputError(f"state has {state.n} modes, space has {space.n}")
    buffer = get_setting('FOCK_BUFFER') if buffer is None else buffer
    budget = get_setting('TRUNCATION_BUDGET') if budget is None else budget

    decomposition = williamson(state.cov)
    nu = np.clip((decomposition.eigenvalues - 1) / 2, 0.0, None)
    work = FockSpace(space.n, space.cutoff + buffer)
    weights = _thermal_weights(nu, work)
    keep = np.flatnonzero(weights > 1e-18 * weights.max())

    W = working_unitary(work, decomposition.symplectic, state.mean)[:space.dim, keep]
    block = (W * weights[keep]) @ W.conj().T
    retained = float(np.trace(block).real)
    deficit = max(0.0, 1.0 - retained)
    if deficit > budget:
        raise TruncationError("Gaussian state does not fit the cutoff", deficit, suggest_cutoff(state, budget))
    block = block / retained
    logger.debug("gaussian_density_matrix: dim=%d, deficit=%.3g", space.dim, deficit)
    return FockDensity(space, (block + block.conj().T) / 2, deficit)


# =========================
# 3. DISTANCES AND PROJECTIONS
# =========================

def trace_distance_exact(rho1: FockDensity, rho2: FockDensity) -> float:
    """1/2 ||rho1 - rho2||_1 from the spectrum of the Hermitian difference."""
    if rho1.space != rho2.space:
        raise InvalidInputError("densities live on different truncated spaces")
    difference = rho1.matrix - rho2.matrix
    difference = (difference + difference.conj().T) / 2
    distance = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(difference))))
    return min(distance, 1.0)


def project_energy_subspace(rho: FockDensity, cutoff: int):
    """
    Pi_m rho Pi_m / Tr[Pi_m rho] and the retained weight Tr[Pi_m rho].

    The result stays on rho's space (zero outside H_m); by the gentle
    measurement lemma its trace distance to rho is at most sqrt(1 - weight).
    """
    if cutoff < 0:
        raise InvalidInputError("cutoff must be non-negative")
    keep = np.flatnonzero(rho.space.totals <= cutoff)
    weight = float(np.trace(rho.matrix[np.ix_(keep, keep)]).real)
    if weight <= 0:
        raise InvalidInputError(f"no weight retained below {cutoff} photons")
    projected = np.zeros_like(rho.matrix)
    projected[np.ix_(keep, keep)] = rho.matrix[np.ix_(keep, keep)] / weight
    return FockDensity(rho.space, projected, rho.deficit), weight


def restrict_density(rho: FockDensity, cutoff: int, normalize: bool = True) -> FockDensity:
    """Top-left block of rho as a density on H_cutoff."""
    if cutoff > rho.space.cutoff:
        raise InvalidInputError("restriction cannot enlarge the space")
    small = FockSpace(rho.space.n, cutoff)
    block = rho.matrix[:small.dim, :small.dim]
    weight = float(np.trace(block).real)
    if normalize:
        if weight <= 0:
            raise InvalidInputError("restricted block carries no weight")
        block = block / weight
    return FockDensity(small, block, rho.deficit + max(0.0, rho.trace - weight))


def embed_density(rho: FockDensity, space: FockSpace) -> FockDensity:
    """Zero-pad rho into a larger space with the same mode count."""
    if space.n != rho.space.n or space.cutoff < rho.space.cutoff:
        raise InvalidInputError("target space must contain the source space")
    matrix = np.zeros((space.dim, space.dim), dtype=complex)
    matrix[:rho.space.dim, :rho.space.dim] = rho.matrix
    return FockDensity(space, matrix, rho.deficit)


def photon_tail_bound(n: int, photons: float, cutoff: int, k: int = 1) -> float:
    """Tr[(1 - Pi_m) rho] <= (n N_phot)^k / m^k for (Tr[N^k rho])^(1/k) <= n N_phot."""
    if cutoff <= 0:
        raise InvalidInputError("cutoff must be positive")
    return min(1.0, (n * photons / cutoff) ** k)


def truncation_bound(state: GaussianState, cutoff: int) -> float:
    """sqrt(n N_phot / m): trace-distance ceiling of projecting onto H_m (k = 1)."""
    photons = max(mean_photon_number(state), 0.0) / state.n
    if cutoff <= 0:
        raise InvalidInputError("cutoff must be positive")
    return float(np.sqrt(state.n * photons / cutoff))


def select_cutoff(n: int, photons: float, accuracy: float, k: int = 1, buffer: Optional[int] = None) -> int:
    """Smallest m with sqrt(tail bound) <= accuracy, plus the working buffer."""
    if not 0 < accuracy < 1:
        raise InvalidInputError("accuracy must lie in (0, 1)")
    buffer = get_setting('FOCK_BUFFER') if buffer is None else buffer
    return int(ceil(n * photons / accuracy ** (2 / k))) + buffer


def vacuum_projector_measurement(rho: FockDensity, tail_modes: Iterable[int], floor: Optional[float] = None):
    """
    Measure {I (x) |0><0|, rest} on the tail modes.

    Returns:
        (success_prob, post_state) with the post state on the head modes,
        or (0.0, None) when the outcome is impossible

    Raises:
        PostSelectionFailure: success_prob below ``floor``
    """
    space = rho.space
    tail = sorted(set(int(j) for j in tail_modes))
    if tail and (tail[0] < 0 or tail[-1] >= space.n):
        raise InvalidInputError(f"tail modes {tail} are not a subset of 0..{space.n - 1}")
    if len(tail) == space.n:
        raise InvalidInputError("at least one head mode must remain")
    head = [j for j in range(space.n) if j not in tail]

    occupations = space.occupations
    selected = np.flatnonzero(np.all(occupations[:, tail] == 0, axis=1)) if tail else np.arange(space.dim)
    success = float(np.trace(rho.matrix[np.ix_(selected, selected)]).real)
    if floor is not None and success < floor:
        raise PostSelectionFailure("vacuum post-selection on the tail modes failed", success)
    if success <= 1e-300:
        return 0.0, None

    head_space = FockSpace(len(head), space.cutoff)
    positions = np.array([head_space.index[tuple(occupations[i, head])] for i in selected])
    post = np.zeros((head_space.dim, head_space.dim), dtype=complex)
    post[np.ix_(positions, positions)] = rho.matrix[np.ix_(selected, selected)] / success
    return success, FockDensity(head_space, post, rho.deficit)


# =========================
# 4. MOMENTS OF TRUNCATED STATES
# =========================

def energy_moments(rho: FockDensity):
    """(Tr[rho E], Tr[rho E^2]) from the diagonal; exact on the truncated space."""
    energies = rho.space.totals + rho.space.n / 2
    populations = np.diag(rho.matrix).real
    return float(populations @ energies), float(populations @ energies ** 2)


def gaussianification(rho: FockDensity) -> GaussianState:
    """
    First moments and covariance matrix of a truncated state.

    Operators are built two photons above the cutoff, so every product
    R_j R_k is exact on the support of rho.
    """
    big = FockSpace(rho.space.n, rho.space.cutoff + 2)
    matrix = embed_density(rho, big).matrix
    quadratures = quadrature_operators(big)
    mean = np.array([np.sum(matrix * R.T).real for R in quadratures])
    products = [matrix @ R for R in quadratures]
    size = len(quadratures)
    second = np.empty((size, size))
    for j in range(size):
        for k in range(size):
            second[j, k] = np.sum(products[j] * quadratures[k].T).real
    cov = second + second.T - 2 * np.outer(mean, mean)
    return GaussianState(mean, (cov + cov.T) / 2)


def anticommutator_sum(rho: FockDensity) -> float:
    """Sum over j, k of Tr[rho {R_j, R_k}^2]; equals 16 Tr[rho E^2] + 6n."""
    big = FockSpace(rho.space.n, rho.space.cutoff + 4)
    matrix = embed_density(rho, big).matrix
    quadratures = quadrature_operators(big)
    total = 0.0
    for j, Rj in enumerate(quadratures):
        for Rk in quadratures:
            A = Rj @ Rk + Rk @ Rj
            total += np.sum((matrix @ A) * A.T).real
    return float(total)
