"""
Bounds Service - trace distance between Gaussian states from their moments

This module contains functions for:
- f(N) and the moment-based upper bound for mixed states
- The sharper upper bound when one of the states is pure
- Lower bounds from the first moments and from the covariance matrices
- A report bundling all of them, with the Fock-oracle value on request

Norms: trace norm via SVD, Hilbert-Schmidt via Frobenius, operator norm
via the largest singular value. Budgets must dominate both states; the
lower bounds use the energy form 4E + 1 (= 4N + 2n + 1 with E = N + n/2).
"""

import logging
from typing import Optional, Union

import numpy as np

from cvtomo.constants import GAUSSIAN_DIMENSION_TOL, LOWER_BOUND_PREFACTOR, BoundForm
from cvtomo.exceptions import BudgetViolationError, InvalidInputError
from cvtomo.models import BoundReport, FockSpace, GaussianState

from .fock_service import gaussian_density_matrix, trace_distance_exact
from .gaussian_service import max_energy, max_photon_number, mean_energy, mean_photon_number
from .symplectic_service import operator_norm, symplectic_eigenvalues

logger = logging.getLogger(__name__)

_BUDGET_SLACK = 1e-9


def trace_norm(matrix) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(matrix), compute_uv=False)))


def hilbert_schmidt_norm(matrix) -> float:
    return float(np.linalg.norm(np.asarray(matrix), 'fro'))


def f_of_N(N: float) -> float:
    """(sqrt(N) + sqrt(N + 1)) / sqrt(2)."""
    if N < 0:
        raise InvalidInputError(f"photon number must be non-negative, got {N}")
    return float((np.sqrt(N) + np.sqrt(N + 1)) / np.sqrt(2))


def _same_size(s1: GaussianState, s2: GaussianState) -> None:
    if s1.n != s2.n:
        raise InvalidInputError(f"states have {s1.n} and {s2.n} modes")


def _check_photons(N: float, *states: GaussianState) -> None:
    for state in states:
        value = mean_photon_number(state)
        if value > N + _BUDGET_SLACK * max(1.0, N):
            raise BudgetViolationError("mean photon number", value, N)


def _check_energy(E: float, *states: GaussianState) -> None:
    for state in states:
        value = mean_energy(state)
        if value > E + _BUDGET_SLACK * max(1.0, E):
            raise BudgetViolationError("mean energy", value, E)


def upper_bound_mixed(s1: GaussianState, s2: GaussianState, N: float) -> float:
    """
    f(N) (||m1 - m2||_2 + sqrt(2) sqrt(||V1 - V2||_1)).

    Args:
        s1, s2: Gaussian states on the same modes
        N: Photon budget dominating both mean photon numbers

    Raises:
        BudgetViolationError: a state has more than N photons on average
    """
    _same_size(s1, s2)
    _check_photons(N, s1, s2)
    mean_gap = float(np.linalg.norm(s1.mean - s2.mean))
    return f_of_N(N) * (mean_gap + np.sqrt(2) * np.sqrt(trace_norm(s1.cov - s2.cov)))


def is_pure(state: GaussianState, tol: float = GAUSSIAN_DIMENSION_TOL) -> bool:
    return bool(np.all(np.abs(symplectic_eigenvalues(state.cov) - 1) <= tol))


def upper_bound_pure(
    psi: GaussianState,
    rho: Union[GaussianState, tuple],
    form: str = BoundForm.TRACE_V.value,
    E: Optional[float] = None,
) -> float:
    """
    Upper bound on 1/2 ||rho - psi||_1 when psi is pure.

    form='traceV': 1/2 sqrt(Tr V_psi) sqrt(||dV||_op + 2 ||dm||^2)
    form='energy': sqrt(E) sqrt(2 ||dm||^2 + ||dV||_op)
    """
    if not isinstance(rho, GaussianState):
        rho = GaussianState(*rho)
    _same_size(psi, rho)
    if not is_pure(psi):
        raise InvalidInputError("first argument of the pure-state bound must be a pure Gaussian state")
    form = BoundForm(form)
    dm2 = float(np.sum((psi.mean - rho.mean) ** 2))
    dV = operator_norm(psi.cov - rho.cov)
    if form is BoundForm.TRACE_V:
        return float(0.5 * np.sqrt(np.trace(psi.cov)) * np.sqrt(dV + 2 * dm2))
    if E is None:
        raise InvalidInputError("the energy form needs an energy budget E")
    _check_energy(E, psi, rho)
    return float(np.sqrt(E) * np.sqrt(2 * dm2 + dV))


def lower_bounds(s1: GaussianState, s2: GaussianState, E: float):
    """
    (from_mean, from_cov) lower bounds on the trace distance.

    from_mean = min(1, ||dm||_2 / sqrt(4E + 1)) / 200
    from_cov  = min(1, ||dV||_HS / (4E + 1)) / 200
    """
    _same_size(s1, s2)
    _check_energy(E, s1, s2)
    h = 4 * E + 1
    from_mean = LOWER_BOUND_PREFACTOR * min(1.0, float(np.linalg.norm(s1.mean - s2.mean)) / np.sqrt(h))
    from_cov = LOWER_BOUND_PREFACTOR * min(1.0, hilbert_schmidt_norm(s1.cov - s2.cov) / h)
    return from_mean, from_cov


def oracle_distance(s1: GaussianState, s2: GaussianState, cutoff: int) -> float:
    """Trace distance of the two states on H_cutoff."""
    space = FockSpace(s1.n, cutoff)
    return trace_distance_exact(gaussian_density_matrix(space, s1), gaussian_density_matrix(space, s2))


def bound_report(
    s1: GaussianState,
    s2: GaussianState,
    N: Optional[float] = None,
    E: Optional[float] = None,
    clip: bool = True,
    oracle_cutoff: Optional[int] = None,
) -> BoundReport:
    """
    Every bound for a pair of states.

    Budgets left as None are inferred as the larger of the two states'
    values and flagged in the report. The pure-state bound is included when
    either state is pure; ``oracle_cutoff`` adds the exact Fock-space value.
    """
    inferred = N is None or E is None
    N = max_photon_number(s1, s2) if N is None else N
    E = max_energy(s1, s2) if E is None else E
    if inferred:
        logger.info("bound_report: inferred budgets N=%.6g, E=%.6g", N, E)

    upper_mixed = upper_bound_mixed(s1, s2, N)
    from_mean, from_cov = lower_bounds(s1, s2, E)
    upper_pure = None
    for psi, other in ((s1, s2), (s2, s1)):
        if is_pure(psi):
            upper_pure = upper_bound_pure(psi, other, BoundForm.TRACE_V.value)
            break
    if clip:
        upper_mixed = min(1.0, upper_mixed)
        upper_pure = None if upper_pure is None else min(1.0, upper_pure)

    exact = oracle_distance(s1, s2, oracle_cutoff) if oracle_cutoff else None
    return BoundReport(
        upper_mixed=upper_mixed,
        lower_from_mean=from_mean,
        lower_from_cov=from_cov,
        upper_pure=upper_pure,
        photon_budget=N,
        energy_budget=E,
        clipped=clip,
        budgets_inferred=inferred,
        exact_distance=exact,
    )
