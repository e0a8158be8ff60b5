"""
Tomography Service - end-to-end learners

This module contains functions for:
- Gaussian tomography (moment estimation at a squared accuracy)
- Moment-constrained tomography: energy-subspace filtering, then
  finite-dimensional tomography of the retained copies
- t-compressible tomography: moments, Williamson, un-doing the Gaussian
  part, vacuum post-selection of the tail, tomography of the head
- Synthesis of t-doped states with their compressed ground truth
- Oracle evaluation of every estimator on a truncated Fock space

The finite-dimensional inner learner measures a fixed family of d+1
orthonormal bases (the computational basis and d Haar-random ones drawn
from a fixed seed), inverts the linear map from the state to the outcome
frequencies, clips negative eigenvalues and renormalizes; the pure variant
keeps the top eigenvector.
"""

import logging
from functools import lru_cache
from math import ceil
from typing import Optional

import numpy as np

from cvtomo.conf import get_setting
from cvtomo.constants import GAUSSIAN_DIMENSION_TOL, HEAD_ENERGY_FACTOR, Pipeline
from cvtomo.exceptions import (
    BudgetViolationError,
    InvalidInputError,
    PostSelectionFailure,
    SampleStarvationError,
    TruncationError,
)
from cvtomo.models import CompressedEstimate, FockDensity, FockSpace, GaussianState, StateSource, TomographyReport

from .complexity_service import (
    covariance_accuracy,
    filtered_copy_count,
    gaussian_accuracy,
    gaussian_sample_counts,
    moment_constrained_copy_count,
    moment_sample_count,
    t_compressible_sample_count,
    upper_bound_counts,
)
from .estimation_service import estimate_moments
from .fock_service import (
    apply_unitary,
    energy_moments,
    gaussian_density_matrix,
    gaussian_unitary_matrix,
    gaussianification,
    photon_tail_bound,
    project_energy_subspace,
    pure_density,
    restrict_density,
    trace_distance_exact,
    vacuum_projector_measurement,
)
from .gaussian_service import mean_energy
from .measurement_service import source_moments
from .symplectic_service import haar_unitary, random_symplectic, williamson

logger = logging.getLogger(__name__)


def gaussian_dimension(V, tol: float = GAUSSIAN_DIMENSION_TOL) -> int:
    """Number of symplectic eigenvalues d_i with |d_i - 1| <= tol."""
    eigenvalues = williamson(V).eigenvalues
    return int(np.sum(np.abs(eigenvalues - 1) <= tol))


def _stable_ceil(value: float) -> int:
    return ceil(value - 1e-9 * max(1.0, abs(value)))


def _copies_used(source: StateSource, before: int) -> int:
    return source.copies_consumed - before


# =========================
# 1. GAUSSIAN TOMOGRAPHY
# =========================

def gaussian_tomography(
    source: StateSource,
    n: int,
    epsilon: float,
    delta: float,
    energy: float,
    copies: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    pure: bool = False,
    regularization: Optional[str] = None,
) -> TomographyReport:
    """
    Learn a Gaussian state to trace-distance accuracy eps.

    The moments are estimated at eps' = eps^2/(2^7 E n^2) (eps^2/(4 n E)
    for pure states) with the second-moment budget sqrt(3) E, and the
    Gaussian state with the regularized moments is returned. A non-Gaussian
    source yields its Gaussianification.

    Args:
        source: Copies of the unknown state
        n: Number of modes
        epsilon, delta: Accuracy and failure probability
        energy: Energy per mode E, Tr[rho E] <= n E
        copies: Explicit copy budget (defaults to ``gaussian_sample_counts``)
        rng: numpy Generator
        pure: Use the pure-state accuracy split
        regularization: Covariance regularization mode (see ``estimate_moments``)

    Raises:
        BudgetViolationError: the source exceeds the energy budget
    """
    if energy < 0.5:
        raise InvalidInputError(f"energy per mode must be >= 1/2, got {energy}")
    actual = mean_energy(source_moments(source))
    if actual > n * energy * (1 + 1e-9):
        raise BudgetViolationError("source mean energy", actual, n * energy)

    before = source.copies_consumed
    internal = gaussian_accuracy(n, epsilon, energy, pure)
    logger.info("gaussian_tomography: n=%d, internal accuracy %.4g", n, internal)
    estimate = estimate_moments(
        source, n, internal, delta, np.sqrt(3) * energy, copies=copies, rng=rng, regularization=regularization,
    )
    return TomographyReport(
        pipeline=Pipeline.GAUSSIAN.value,
        estimator=estimate.as_state(),
        copies_used=_copies_used(source, before),
        epsilon=epsilon,
        delta=delta,
        diagnostics={
            'internal_epsilon': internal,
            'regularization_shift': estimate.shift,
            'regularization': estimate.regularization,
            'bins': estimate.bins,
            'formula_copies': gaussian_sample_counts(n, epsilon, delta, energy, pure),
        },
    )


# =========================
# 2. INNER FINITE-DIMENSIONAL TOMOGRAPHY
# =========================

@lru_cache(maxsize=16)
def _measurement_family(dim: int, seed: int):
    """The d+1 bases and the pseudo-inverse of their design matrix."""
    rng = np.random.default_rng(seed)
    bases = [np.eye(dim, dtype=complex)] + [haar_unitary(dim, rng) for _ in range(dim)]
    rows = [np.outer(U[:, i].conj(), U[:, i]).ravel() for U in bases for i in range(dim)]
    inverse = np.linalg.pinv(np.array(rows))
    return tuple(bases), inverse


def _closest_state(matrix: np.ndarray) -> np.ndarray:
    matrix = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    if values.sum() <= 0:
        values = np.zeros_like(values)
        values[-1] = 1.0
    values = values / values.sum()
    return (vectors * values) @ vectors.conj().T


def top_eigenvector(rho: FockDensity) -> np.ndarray:
    """Leading eigenvector, phase fixed so its largest entry is real positive."""
    _, vectors = np.linalg.eigh(rho.matrix)
    vector = vectors[:, -1]
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def inner_tomography(
    rho: FockDensity,
    copies: int,
    rng: np.random.Generator,
    pure: bool = False,
) -> FockDensity:
    """
    Tomography of a state on a truncated space from ``copies`` copies.

    Copies are split evenly over the d+1 bases (remainder to the first
    ones), outcome frequencies are inverted linearly and the result is
    pushed to the nearest density matrix in spectrum.

    Raises:
        InvalidInputError: dimension above INNER_MAX_DIM
        SampleStarvationError: fewer copies than bases
    """
    dim = rho.space.dim
    if dim > get_setting('INNER_MAX_DIM'):
        raise InvalidInputError(f"inner tomography is limited to dimension {get_setting('INNER_MAX_DIM')}, got {dim}")
    bases, inverse = _measurement_family(dim, get_setting('INNER_BASIS_SEED'))
    if copies < len(bases):
        raise SampleStarvationError(f"{len(bases)} bases need at least as many copies, got {copies}")

    shares = np.full(len(bases), copies // len(bases))
    shares[:copies % len(bases)] += 1
    frequencies = []
    for U, share in zip(bases, shares):
        probabilities = np.clip(np.einsum('ki,kl,li->i', U.conj(), rho.matrix, U).real, 0.0, None)
        probabilities = probabilities / probabilities.sum()
        frequencies.append(rng.multinomial(int(share), probabilities) / share)
    estimate = (inverse @ np.concatenate(frequencies)).reshape(dim, dim)
    estimate = _closest_state(estimate)
    if pure:
        vector = top_eigenvector(FockDensity(rho.space, estimate))
        return pure_density(rho.space, vector)
    return FockDensity(rho.space, estimate)


# =========================
# 3. MOMENT-CONSTRAINED TOMOGRAPHY
# =========================

def _inner_cutoff(n: int, cutoff: int) -> int:
    """Largest cutoff <= ``cutoff`` whose space fits INNER_MAX_DIM."""
    limit = get_setting('INNER_MAX_DIM')
    while cutoff > 0 and FockSpace(n, cutoff).dim > limit:
        cutoff -= 1
    return cutoff


def moment_constrained_tomography(
    source: StateSource,
    n: int,
    k: int,
    epsilon: float,
    delta: float,
    photons: float,
    pure: bool = False,
    copies: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> TomographyReport:
    """
    Full tomography of a state with a k-th moment photon constraint.

    Each copy is filtered by {Pi_m, 1 - Pi_m} with
    m = ceil(n N_phot / (eps/2)^(2/k)); the retained copies go to the inner
    learner on H_m. The estimator lives on the source's space.

    Args:
        source: Fock-density source
        n, k: Modes and moment order
        epsilon, delta: Accuracy and failure probability
        photons: Budget N_phot with (Tr[N^k rho])^(1/k) <= n N_phot
        pure: Return the top eigenvector of the inner estimate
        copies: Explicit copy budget (defaults to ceil(2N' + 24 log(2/delta)))
        rng: numpy Generator
    """
    if source.density is None:
        raise InvalidInputError("moment-constrained tomography needs a Fock-density source")
    if source.n != n:
        raise InvalidInputError(f"source has {source.n} modes, expected {n}")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise InvalidInputError("epsilon and delta must lie in (0, 1)")
    rng = np.random.default_rng() if rng is None else rng
    rho = source.density

    m = _stable_ceil(n * photons / (epsilon / 2) ** (2 / k))
    total = moment_constrained_copy_count(n, k, epsilon, delta, photons, pure) if copies is None else int(copies)
    before = source.copies_consumed
    source.consume(total)

    projected, retention = project_energy_subspace(rho, min(m, rho.space.cutoff))
    successes = int(rng.binomial(total, min(1.0, retention)))
    suspicious = retention < 0.5
    if suspicious:
        logger.warning("moment_constrained_tomography: retention %.4g below 1/2, budget probably violated", retention)

    inner_cutoff = _inner_cutoff(n, min(m, rho.space.cutoff))
    inner_rho = restrict_density(projected, inner_cutoff)
    inner_retention = float(np.trace(projected.matrix[:inner_rho.space.dim, :inner_rho.space.dim]).real)
    if inner_cutoff < min(m, rho.space.cutoff):
        logger.warning("moment_constrained_tomography: inner space capped at cutoff %d (m=%d)", inner_cutoff, m)

    estimate = inner_tomography(inner_rho, successes, rng, pure)
    padded = np.zeros((rho.space.dim, rho.space.dim), dtype=complex)
    padded[:estimate.space.dim, :estimate.space.dim] = estimate.matrix
    logger.info("moment_constrained_tomography: m=%d, retention=%.6g, %d of %d copies kept", m, retention, successes, total)
    return TomographyReport(
        pipeline=Pipeline.MOMENT.value,
        estimator=FockDensity(rho.space, padded),
        copies_used=_copies_used(source, before),
        epsilon=epsilon,
        delta=delta,
        diagnostics={
            'cutoff': m,
            'retention': retention,
            'successes': successes,
            'inner_cutoff': inner_cutoff,
            'inner_dim': inner_rho.space.dim,
            'inner_retention': inner_retention,
            'tail_bound': photon_tail_bound(n, photons, m, k) if m > 0 else 1.0,
            'budget_violation_suspected': suspicious,
            'formula_copies': upper_bound_counts(n, k, epsilon, delta, photons, pure),
        },
    )


# =========================
# 4. COMPRESSION
# =========================

def _tail(n: int, t: int) -> list:
    return list(range(t, n))


def compress_state(
    rho: FockDensity,
    mean,
    symplectic,
    t: int,
    floor: Optional[float] = None,
):
    """
    Undo D_m U_S and post-select the last n - t modes on the vacuum.

    Returns:
        (success_prob, head state on t modes or None)
    """
    n = rho.space.n
    if not 1 <= t <= n:
        raise InvalidInputError(f"t must lie in [1, {n}], got {t}")
    U = gaussian_unitary_matrix(rho.space, symplectic, mean, budget=1.0)
    undone = apply_unitary(rho, U.conj().T)
    return vacuum_projector_measurement(undone, _tail(n, t), floor)


def _embed_head(vector: np.ndarray, head_space: FockSpace, space: FockSpace) -> np.ndarray:
    """phi (x) |0...0> on ``space``; head components above the cutoff are dropped."""
    padded = np.zeros(space.dim, dtype=complex)
    tail = (0,) * (space.n - head_space.n)
    for i, occupation in enumerate(head_space.basis):
        if sum(occupation) <= space.cutoff:
            padded[space.index[occupation + tail]] = vector[i]
    return padded


def reconstruct_compressed(
    estimate: CompressedEstimate,
    space: FockSpace,
    budget: Optional[float] = None,
) -> FockDensity:
    """Density of D_m U_S (phi (x) |0>^(n-t)) on ``space``."""
    if space.n != estimate.n:
        raise InvalidInputError(f"space has {space.n} modes, estimate has {estimate.n}")
    U = gaussian_unitary_matrix(space, estimate.symplectic, estimate.mean, budget=budget)
    head_space = estimate.head.space
    if estimate.head_vector is not None:
        psi = U @ _embed_head(np.asarray(estimate.head_vector), head_space, space)
        return pure_density(space, psi, deficit=max(0.0, 1.0 - float(np.linalg.norm(psi) ** 2)))
    values, vectors = np.linalg.eigh(estimate.head.matrix)
    matrix = np.zeros((space.dim, space.dim), dtype=complex)
    for value, vector in zip(values, vectors.T):
        if value > 1e-14:
            psi = U @ _embed_head(vector, head_space, space)
            matrix += value * np.outer(psi, psi.conj())
    weight = float(np.trace(matrix).real)
    return FockDensity(space, matrix / weight, max(0.0, 1.0 - weight))


# =========================
# 5. t-DOPED SYNTHESIS
# =========================

def _random_head(head_space: FockSpace, rng: np.random.Generator, level: int = 2) -> np.ndarray:
    """Random superposition of the head Fock states with at most ``level`` photons."""
    vector = np.zeros(head_space.dim, dtype=complex)
    low = head_space.totals <= level
    count = int(low.sum())
    vector[low] = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    return vector / np.linalg.norm(vector)


def canonical_form(rho: FockDensity, t: int):
    """
    Compressed form read off the state's own moments.

    m and the Williamson symplectic S of the Gaussianification are undone and
    the last n - t modes are projected on the vacuum; for a t-compressible
    pure state the tail weight is 1 up to truncation.

    Returns:
        (tail vacuum weight, CompressedEstimate)
    """
    moments = gaussianification(rho)
    symplectic = williamson(moments.cov).symplectic
    success, head = compress_state(rho, moments.mean, symplectic, t)
    if head is None:
        raise PostSelectionFailure("state has no weight on the tail vacuum", 0.0)
    vector = top_eigenvector(head)
    return success, CompressedEstimate(mean=moments.mean, symplectic=symplectic, head=head, head_vector=vector)


def synth_t_doped(
    n: int,
    t: int,
    kappa: int,
    rng: np.random.Generator,
    energy_cap: float,
    cutoff: Optional[int] = None,
    head: Optional[np.ndarray] = None,
    symplectic=None,
    displacement=None,
    attempts: int = 50,
):
    """
    A (t, kappa)-doped pure state G(|phi> (x) |0>^(n-h)) and its compressed form.

    kappa counts the quadratures a non-Gaussian gate touches, so the head
    spans h = min(n, t ceil(kappa/2)) modes. Unless given, the head is a
    random superposition of low Fock states and G a random Gaussian unitary
    with mild squeezing and displacement, redrawn (and damped) until the
    mean energy is at most ``energy_cap``.

    The returned truth is the generating triple (d, S, phi); reconstructing it
    on the same cutoff gives back the state exactly. canonical_form reads the
    moment-based equivalent off the state.

    Args:
        n, t, kappa: Modes, non-Gaussian gates, gate locality (kappa t <= n)
        rng: numpy Generator
        energy_cap: Largest accepted mean energy
        cutoff: Fock cutoff (defaults to ORACLE_CUTOFF)
        head: Explicit head vector on FockSpace(h, cutoff)
        symplectic, displacement: Explicit Gaussian unitary

    Returns:
        (FockDensity, CompressedEstimate)

    Raises:
        TruncationError: the state does not fit the cutoff
        BudgetViolationError: no draw met the energy cap
    """
    if n < 1 or t < 0 or kappa < 1:
        raise InvalidInputError("need n >= 1, t >= 0 and kappa >= 1")
    if kappa * t > n:
        raise InvalidInputError(f"kappa t = {kappa * t} exceeds the mode count {n}")
    cutoff = get_setting('ORACLE_CUTOFF') if cutoff is None else cutoff
    space = FockSpace(n, cutoff)
    head_modes = min(n, t * ceil(kappa / 2))
    budget = get_setting('TRUNCATION_BUDGET')

    if head_modes:
        head_space = FockSpace(head_modes, cutoff)
        if head is None:
            head = _random_head(head_space, rng)
        head = np.asarray(head, dtype=complex)
        if head.shape != (head_space.dim,):
            raise InvalidInputError(f"head vector must have length {head_space.dim}")
        start = _embed_head(head / np.linalg.norm(head), head_space, space)
    else:
        start = np.zeros(space.dim, dtype=complex)
        start[0] = 1.0

    scale = 1.0
    for attempt in range(attempts):
        S = random_symplectic(n, 1 + 0.3 * scale, rng) if symplectic is None else np.asarray(symplectic, dtype=float)
        d = rng.standard_normal(2 * n) * 0.3 * scale if displacement is None else np.asarray(displacement, dtype=float)
        psi = gaussian_unitary_matrix(space, S, d, budget=1.0) @ start
        leaked = 1.0 - float(np.linalg.norm(psi) ** 2)
        if leaked > budget:
            raise TruncationError("doped state does not fit the cutoff", leaked)
        rho = pure_density(space, psi, deficit=max(0.0, leaked))
        energy = energy_moments(rho)[0]
        if energy <= energy_cap:
            break
        if symplectic is not None and displacement is not None:
            raise BudgetViolationError("doped state mean energy", energy, energy_cap)
        scale *= 0.7
    else:
        raise BudgetViolationError("doped state mean energy", energy, energy_cap)

    if head_modes:
        vector = head / np.linalg.norm(head)
    else:
        vector = np.zeros(cutoff + 1, dtype=complex)
        vector[0] = 1.0
    truth = CompressedEstimate(
        mean=d, symplectic=S, head=pure_density(FockSpace(max(head_modes, 1), cutoff), vector), head_vector=vector,
    )
    logger.info("synth_t_doped: n=%d, head modes=%d, energy=%.4g after %d draws", n, head_modes, energy, attempt + 1)
    return rho, truth


# =========================
# 6. t-COMPRESSIBLE TOMOGRAPHY
# =========================

def t_compressible_tomography(
    source: StateSource,
    n: int,
    t: int,
    epsilon: float,
    delta: float,
    energy_second: float,
    copies: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    exact_parameters: Optional[tuple] = None,
    head_cutoff: Optional[int] = None,
    floor: Optional[float] = None,
    regularization: Optional[str] = None,
) -> TomographyReport:
    """
    Learn a t-compressible pure state.

    Stage 1 estimates the moments at eps_cov = eps^2/(2(n+1)(1+4nE2)^2);
    stage 2 takes the Williamson symplectic of the estimate; stage 3 undoes
    D_m U_S on every remaining copy and keeps those whose last n - t modes
    are found in the vacuum; stage 4 learns the t-mode head as a pure state.

    Args:
        source: Fock-density source (moments are sampled from its
            Gaussianification)
        n, t: Modes and compressibility
        epsilon, delta: Accuracy and failure probability
        energy_second: Second-moment budget E2
        copies: Explicit budget, split by TCOMP_MOMENT_FRACTION
        rng: numpy Generator
        exact_parameters: (m, S) to skip stages 1 and 2
        head_cutoff: Photon cutoff of the head (defaults to HEAD_CUTOFF)
        floor: Post-selection floor (defaults to POST_SELECTION_FLOOR)
        regularization: Covariance regularization mode of stage 1

    Returns:
        TomographyReport with a CompressedEstimate

    Raises:
        PostSelectionFailure: empirical success rate below the floor
        SampleStarvationError: a stage ran out of copies
    """
    if source.density is None:
        raise InvalidInputError("t-compressible tomography needs a Fock-density source")
    if source.n != n:
        raise InvalidInputError(f"source has {source.n} modes, expected {n}")
    if not 1 <= t <= n:
        raise InvalidInputError(f"t must lie in [1, {n}], got {t}")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise InvalidInputError("epsilon and delta must lie in (0, 1)")
    rng = np.random.default_rng() if rng is None else rng
    floor = get_setting('POST_SELECTION_FLOOR') if floor is None else floor
    head_cutoff = get_setting('HEAD_CUTOFF') if head_cutoff is None else head_cutoff
    before = source.copies_consumed
    epsilon_cov = covariance_accuracy(n, epsilon, energy_second)
    diagnostics = {'epsilon_cov': epsilon_cov}

    # stage 1 and 2
    if exact_parameters is not None:
        mean, symplectic = (np.asarray(a, dtype=float) for a in exact_parameters)
        stage_copies = int(copies) if copies is not None else filtered_copy_count(
            upper_bound_counts(t, 1, epsilon / 2, delta / 3, HEAD_ENERGY_FACTOR * n ** 2 * energy_second ** 2, pure=True),
            delta, parts=3,
        )
        diagnostics['moment_copies'] = 0
    else:
        if copies is None:
            moment_copies = moment_sample_count(n, epsilon_cov, delta / 3, energy_second)
            stage_copies = t_compressible_sample_count(n, t, epsilon, delta, energy_second) - moment_copies
        else:
            moment_copies = int(copies * get_setting('TCOMP_MOMENT_FRACTION'))
            stage_copies = int(copies) - moment_copies
        estimate = estimate_moments(
            source, n, epsilon_cov, delta / 3, energy_second,
            copies=None if copies is None else moment_copies, rng=rng, regularization=regularization,
        )
        mean = estimate.mean
        symplectic = williamson(estimate.cov).symplectic
        diagnostics.update(
            moment_copies=estimate.samples_used,
            regularization_shift=estimate.shift,
            regularization=estimate.regularization,
            estimated_gaussian_dimension=gaussian_dimension(estimate.cov, max(GAUSSIAN_DIMENSION_TOL, estimate.shift * 2)),
        )
        logger.info("t_compressible_tomography: moments from %d copies", estimate.samples_used)

    # stage 3
    source.consume(stage_copies)
    success_probability, head = compress_state(source.density, mean, symplectic, t)
    successes = int(rng.binomial(stage_copies, success_probability)) if stage_copies else 0
    rate = successes / stage_copies if stage_copies else 0.0
    diagnostics.update(stage_copies=stage_copies, success_probability=success_probability, post_selection_rate=rate)
    if rate < floor or head is None:
        raise PostSelectionFailure("tail vacuum post-selection failed", rate)

    head_energy = energy_moments(head)[0]
    head_bound = HEAD_ENERGY_FACTOR * n ** 2 * energy_second ** 2
    logger.info("t_compressible_tomography: head energy %.4g (bound %.4g), %d successes", head_energy, head_bound, successes)
    cutoff = min(_inner_cutoff(t, head_cutoff), head.space.cutoff)
    projected, head_retention = project_energy_subspace(head, cutoff)
    inner_head = restrict_density(projected, cutoff)
    diagnostics.update(head_energy=head_energy, head_energy_bound=head_bound, head_cutoff=cutoff, head_retention=head_retention)

    # stage 4
    learned = inner_tomography(inner_head, successes, rng, pure=True)
    vector = top_eigenvector(learned)
    result = CompressedEstimate(mean=mean, symplectic=symplectic, head=learned, head_vector=vector)
    return TomographyReport(
        pipeline=Pipeline.TCOMP.value,
        estimator=result,
        copies_used=_copies_used(source, before),
        epsilon=epsilon,
        delta=delta,
        diagnostics=diagnostics,
    )


# =========================
# 7. ORACLE EVALUATION
# =========================

def render_estimator(estimator, space: FockSpace) -> FockDensity:
    """Any estimator as a density on ``space`` (no truncation check)."""
    if isinstance(estimator, GaussianState):
        return gaussian_density_matrix(space, estimator, budget=1.0)
    if isinstance(estimator, CompressedEstimate):
        return reconstruct_compressed(estimator, space, budget=1.0)
    if isinstance(estimator, FockDensity):
        if estimator.space == space:
            return estimator
        if estimator.space.n == space.n and estimator.space.cutoff > space.cutoff:
            return restrict_density(estimator, space.cutoff)
        matrix = np.zeros((space.dim, space.dim), dtype=complex)
        matrix[:estimator.space.dim, :estimator.space.dim] = estimator.matrix
        return FockDensity(space, matrix, estimator.deficit)
    raise InvalidInputError(f"cannot render an estimator of type {type(estimator).__name__}")


def achieved_distance(estimator, truth: FockDensity) -> float:
    """Oracle trace distance between an estimator and the true density."""
    return trace_distance_exact(render_estimator(estimator, truth.space), truth)
