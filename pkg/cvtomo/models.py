"""
Value types for cvtomo

Immutable containers passed between the services. Arrays are copied on
construction and frozen, so a state can be shared between threads and
trials without defensive copies downstream.

Conventions: quadratures are ordered (x1, p1, x2, p2, ...), the vacuum has
covariance matrix V = I and a = (x + ip)/sqrt(2).
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Any, Optional

import numpy as np

from .exceptions import InvalidInputError, SampleStarvationError


def _frozen(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def _compositions(total: int, parts: int):
    """Multi-indices of ``parts`` entries summing to ``total``, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# =========================
# 1. SYMPLECTIC STRUCTURE
# =========================

@dataclass(frozen=True, eq=False)
class SymplecticForm:
    """The n-mode symplectic form, block-diagonal [[0, 1], [-1, 0]]."""
    n: int
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class SymplecticDecomposition:
    """Williamson factorization V = S D S^T, eigenvalues sorted descending."""
    symplectic: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'symplectic', _frozen(self.symplectic))
        object.__setattr__(self, 'eigenvalues', _frozen(self.eigenvalues))

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def diagonal(self) -> np.ndarray:
        """D = diag(d1, d1, ..., dn, dn)."""
        return np.diag(np.repeat(self.eigenvalues, 2))

    def reconstruct(self) -> np.ndarray:
        return self.symplectic @ self.diagonal @ self.symplectic.T


@dataclass(frozen=True, eq=False)
class EulerDecomposition:
    """Bloch-Messiah factorization S = O1 Z O2 with passive O1, O2."""
    left: np.ndarray
    squeezing: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'left', _frozen(self.left))
        object.__setattr__(self, 'squeezing', _frozen(self.squeezing))
        object.__setattr__(self, 'right', _frozen(self.right))

    @property
    def squeezing_matrix(self) -> np.ndarray:
        """Z = diag(z1, 1/z1, ..., zn, 1/zn)."""
        pairs = np.column_stack([self.squeezing, 1.0 / self.squeezing]).ravel()
        return np.diag(pairs)

    def reconstruct(self) -> np.ndarray:
        return self.left @ self.squeezing_matrix @ self.right


# =========================
# 2. GAUSSIAN STATES
# =========================

@dataclass(frozen=True, eq=False)
class GaussianState:
    """First moment ``mean`` (length 2n) and covariance matrix ``cov`` (2n x 2n)."""
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = _frozen(self.cov)
        mean = _frozen(np.ravel(np.asarray(self.mean, dtype=float)))
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.shape[0] == 0:
            raise InvalidInputError(f"covariance matrix must be 2n x 2n, got shape {cov.shape}")
        if mean.shape != (cov.shape[0],):
            raise InvalidInputError(
                f"mean of length {mean.shape[0]} does not match covariance of size {cov.shape[0]}"
            )
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'cov', cov)

    @property
    def n(self) -> int:
        return self.cov.shape[0] // 2


@dataclass(frozen=True)
class EnergyBudget:
    """Energy budget E (energy operator N + n/2) of an n-mode system."""
    n: int
    energy: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("mode count must be positive")
        if self.energy < self.n / 2:
            raise InvalidInputError(f"energy {self.energy} is below the vacuum value {self.n / 2}")

    @property
    def photons(self) -> float:
        return self.energy - self.n / 2

    @classmethod
    def from_photons(cls, n: int, photons: float) -> 'EnergyBudget':
        if photons < 0:
            raise InvalidInputError("photon number must be non-negative")
        return cls(n=n, energy=photons + n / 2)


# =========================
# 3. FOCK SPACE
# =========================

@dataclass(frozen=True)
class FockSpace:
    """Span of n-mode Fock states with total photon number <= cutoff."""
    n: int
    cutoff: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("a Fock space needs at least one mode")
        if self.cutoff < 0:
            raise InvalidInputError("cutoff must be non-negative")

    @property
    def dim(self) -> int:
        return comb(self.cutoff + self.n, self.n)

    @cached_property
    def basis(self) -> tuple:
        """Graded lexicographic enumeration: by total, then descending lex."""
        return tuple(
            k for total in range(self.cutoff + 1) for k in _compositions(total, self.n)
        )

    @cached_property
    def index(self) -> dict:
        return {k: i for i, k in enumerate(self.basis)}

    @cached_property
    def occupations(self) -> np.ndarray:
        return _frozen(self.basis, dtype=int).reshape(self.dim, self.n)

    @cached_property
    def totals(self) -> np.ndarray:
        return _frozen(self.occupations.sum(axis=1), dtype=int)


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Density matrix on a truncated Fock space; ``deficit`` is the weight cut away."""
    space: FockSpace
    matrix: np.ndarray
    deficit: float = 0.0

    def __post_init__(self):
        matrix = _frozen(self.matrix, dtype=complex)
        if matrix.shape != (self.space.dim, self.space.dim):
            raise InvalidInputError(
                f"density of shape {matrix.shape} does not fit a space of dimension {self.space.dim}"
            )
        object.__setattr__(self, 'matrix', matrix)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


# =========================
# 4. MEASUREMENT DATA
# =========================

@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """A set of commuting quadratures, each row a linear form on (x1, p1, ...)."""
    label: str
    kind: str
    rows: np.ndarray
    names: tuple

    def __post_init__(self):
        object.__setattr__(self, 'rows', _frozen(np.atleast_2d(self.rows)))
        if len(self.names) != self.rows.shape[0]:
            raise InvalidInputError("one name per measured quadrature is required")

    @property
    def size(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Measurement outcomes: one row per consumed copy, one column per quadrature."""
    setting: MeasurementSetting
    shots: np.ndarray

    def __post_init__(self):
        shots = _frozen(self.shots).reshape(-1, self.setting.size)
        object.__setattr__(self, 'shots', shots)

    @property
    def count(self) -> int:
        return self.shots.shape[0]


@dataclass(eq=False)
class StateSource:
    """
    Copies of an unknown state.

    Exactly one of ``gaussian`` (sampling mode) and ``density`` (exact
    simulation mode) is set. ``copies_consumed`` only grows; ``copy_limit``
    caps it. A ``noiseless`` source hands out exact expectations instead of
    samples.
    """
    gaussian: Optional[GaussianState] = None
    density: Optional[FockDensity] = None
    copy_limit: Optional[int] = None
    noiseless: bool = False
    copies_consumed: int = 0
    moments_cache: Optional[GaussianState] = field(default=None, repr=False)

    def __post_init__(self):
        if (self.gaussian is None) == (self.density is None):
            raise InvalidInputError("a source wraps either a Gaussian state or a Fock density")

    @property
    def n(self) -> int:
        return self.gaussian.n if self.gaussian is not None else self.density.space.n

    @property
    def remaining(self) -> Optional[int]:
        if self.copy_limit is None:
            return None
        return self.copy_limit - self.copies_consumed

    def consume(self, count: int) -> None:
        if count < 0:
            raise InvalidInputError("cannot consume a negative number of copies")
        if self.copy_limit is not None and self.copies_consumed + count > self.copy_limit:
            raise SampleStarvationError(
                f"requested {count} copies, only {self.copy_limit - self.copies_consumed} left"
            )
        self.copies_consumed += count


# =========================
# 5. ESTIMATES AND REPORTS
# =========================

@dataclass(frozen=True, eq=False)
class MomentEstimate:
    """Output of the moment-estimation algorithm (regularized covariance in ``cov``)."""
    mean: np.ndarray
    cov: np.ndarray
    raw_cov: np.ndarray
    epsilon: float
    delta: float
    samples_used: int
    uncertainty_ok: bool
    shift: float
    regularization: str
    bins: int

    def __post_init__(self):
        for name in ('mean', 'cov', 'raw_cov'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def as_state(self) -> GaussianState:
        return GaussianState(self.mean, self.cov)


@dataclass(frozen=True)
class BoundReport:
    """Trace-distance bounds between two Gaussian states."""
    upper_mixed: float
    lower_from_mean: float
    lower_from_cov: float
    upper_pure: Optional[float] = None
    photon_budget: Optional[float] = None
    energy_budget: Optional[float] = None
    clipped: bool = False
    budgets_inferred: bool = False
    exact_distance: Optional[float] = None

    @property
    def lower(self) -> float:
        return max(self.lower_from_mean, self.lower_from_cov)

    @property
    def upper(self) -> float:
        values = [self.upper_mixed]
        if self.upper_pure is not None:
            values.append(self.upper_pure)
        return min(values)


@dataclass(frozen=True, eq=False)
class CompressedEstimate:
    """Triplet (m, S, phi): the state D_m U_S (|phi> (x) |0...0>)."""
    mean: np.ndarray
    symplectic: np.ndarray
    head: FockDensity
    head_vector: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'mean', _frozen(self.mean))
        object.__setattr__(self, 'symplectic', _frozen(self.symplectic))
        if self.head_vector is not None:
            object.__setattr__(self, 'head_vector', _frozen(self.head_vector, dtype=complex))

    @property
    def n(self) -> int:
        return len(self.mean) // 2

    @property
    def t(self) -> int:
        return self.head.space.n


@dataclass(eq=False)
class TomographyReport:
    """Result of one learner run; ``achieved_distance`` is always an oracle value."""
    pipeline: str
    estimator: Any
    copies_used: int
    epsilon: float
    delta: float
    achieved_distance: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


# =========================
# 6. COMMAND-LINE PLUMBING
# =========================

@dataclass(frozen=True)
class BoundQuery:
    """One grid point of the sample-complexity calculators."""
    n: int
    k: int
    epsilon: float
    delta: float
    photons: float
    t: Optional[int] = None
    kappa: Optional[int] = None

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise InvalidInputError("n and k must be positive")
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise InvalidInputError("epsilon and delta must lie in (0, 1)")
        if self.photons < 0:
            raise InvalidInputError("photon budget must be non-negative")
        if self.t is not None and not 1 <= self.t <= self.n:
            raise InvalidInputError("t must lie in [1, n]")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Everything a seeded batch of tomography trials needs."""
    pipeline: str
    trials: int
    seed: int
    epsilon: float
    delta: float
    n: int = 1
    copies: Optional[int] = None
    t: int = 1
    kappa: int = 2
    energy: Optional[float] = None
    photons: Optional[float] = None
    cutoff: Optional[int] = None
    oracle_accuracy: Optional[float] = None
    regularization: Optional[str] = None
    state: Optional[GaussianState] = None
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInputError("at least one trial is required")
        if self.seed < 0:
            raise InvalidInputError("seed must be a non-negative integer")


@dataclass(frozen=True)
class TrialResult:
    """One row of the trial table."""
    trial: int
    pipeline: str
    copies_used: int
    epsilon: float
    delta: float
    achieved_distance: Optional[float]
    success: bool
    declared_failure: bool
    post_selection_rate: Optional[float] = None
    retention: Optional[float] = None
    regularization_shift: Optional[float] = None
    regularization: Optional[str] = None
    oracle_cutoff: Optional[int] = None
    failure_reason: str = ''
    report: Optional[TomographyReport] = field(default=None, compare=False, repr=False)
