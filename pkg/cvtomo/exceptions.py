"""
Exceptions for cvtomo

Services raise these; management commands map them onto exit codes
(see ``constants.ExitCode``).
"""

from typing import Optional


class CVTomoError(Exception):
    """Base class of every error raised by the toolkit."""


class InvalidInputError(CVTomoError, ValueError):
    """Malformed or out-of-domain input (shapes, ranges, physicality)."""


class BudgetViolationError(InvalidInputError):
    """An energy or photon-number budget does not dominate a state."""

    def __init__(self, message: str, value: float, budget: float):
        super().__init__(f"{message}: {value:.6g} exceeds budget {budget:.6g}")
        self.value = value
        self.budget = budget


class ConditioningError(CVTomoError):
    """A factorization was refused because its input is numerically singular."""


class TruncationError(CVTomoError):
    """Discarded Fock-space weight is above the configured budget."""

    def __init__(self, message: str, deficit: float, suggested_cutoff: Optional[int] = None):
        hint = f" (try cutoff >= {suggested_cutoff})" if suggested_cutoff else ''
        super().__init__(f"{message}: discarded weight {deficit:.3g}{hint}")
        self.deficit = deficit
        self.suggested_cutoff = suggested_cutoff


class PipelineFailure(CVTomoError):
    """A learner declared failure and aborted."""


class UncertaintyViolation(PipelineFailure):
    """The regularized covariance estimate violates V + i*Omega >= 0."""

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SampleStarvationError(PipelineFailure):
    """A stage has fewer copies than it needs."""


class PostSelectionFailure(PipelineFailure):
    """The vacuum post-selection succeeded less often than the floor."""

    def __init__(self, message: str, success_rate: float):
        super().__init__(f"{message}: success rate {success_rate:.4g}")
        self.success_rate = success_rate
