"""
Experiment Service - seeded batches of tomography trials

This module contains functions for:
- Building the true state and the source of one trial
- Running a learner and scoring it with the Fock oracle
- Running a batch inline or on a process pool

Trial i draws every random number from default_rng(SeedSequence([seed, i])),
so results do not depend on the worker count or on scheduling order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np

from cvtomo.conf import get_setting
from cvtomo.constants import Pipeline, Purity, Regularization
from cvtomo.exceptions import PipelineFailure
from cvtomo.models import ExperimentConfig, FockSpace, StateSource, TrialResult

from .fock_service import energy_moments, gaussian_density_matrix, select_cutoff
from .gaussian_service import mean_energy, mean_photon_number, random_gaussian_state
from .tomography_service import (
    achieved_distance,
    gaussian_tomography,
    moment_constrained_tomography,
    synth_t_doped,
    t_compressible_tomography,
)

logger = logging.getLogger(__name__)

DEFAULT_ENERGY_PER_MODE = 1.0


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream of trial ``trial``."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _energy_per_mode(config: ExperimentConfig) -> float:
    if config.energy is not None:
        return config.energy
    if config.state is not None:
        return max(0.5, mean_energy(config.state) / config.state.n)
    return DEFAULT_ENERGY_PER_MODE


def _gaussian_truth(config: ExperimentConfig, rng: np.random.Generator):
    if config.state is not None:
        return config.state
    return random_gaussian_state(config.n, config.n * _energy_per_mode(config), Purity.MIXED.value, rng)


def oracle_cutoff(config: ExperimentConfig, photons: float) -> int:
    """
    Fock cutoff of the trace-distance oracle.

    An explicit ``cutoff`` wins; otherwise ``oracle_accuracy`` sizes it with
    select_cutoff from the photon number per mode of the true state, and
    ORACLE_CUTOFF is the fallback.
    """
    if config.cutoff:
        return config.cutoff
    if config.oracle_accuracy is not None:
        return select_cutoff(config.n, max(photons, 1e-3), config.oracle_accuracy)
    return get_setting('ORACLE_CUTOFF')


def _run_pipeline(config: ExperimentConfig, rng: np.random.Generator):
    """(report, true density) of one trial."""
    pipeline = Pipeline(config.pipeline)

    if pipeline is Pipeline.TCOMP:
        energy = _energy_per_mode(config)
        cutoff = oracle_cutoff(config, energy - 0.5)
        truth, _ = synth_t_doped(config.n, config.t, config.kappa, rng, config.n * energy, cutoff=cutoff)
        energy_second = max(0.5, np.sqrt(energy_moments(truth)[1]) / config.n)
        source = StateSource(density=truth, copy_limit=config.copies)
        report = t_compressible_tomography(
            source, config.n, config.t, config.epsilon, config.delta, energy_second,
            copies=config.copies, rng=rng, regularization=config.regularization,
        )
        return report, truth

    state = _gaussian_truth(config, rng)
    cutoff = oracle_cutoff(config, mean_photon_number(state) / state.n)
    truth = gaussian_density_matrix(FockSpace(state.n, cutoff), state)
    if pipeline is Pipeline.GAUSSIAN:
        source = StateSource(gaussian=state, copy_limit=config.copies)
        report = gaussian_tomography(
            source, state.n, config.epsilon, config.delta, _energy_per_mode(config),
            copies=config.copies, rng=rng, regularization=config.regularization,
        )
    else:
        photons = config.photons if config.photons is not None else max(mean_photon_number(state) / state.n, 1e-3)
        source = StateSource(density=truth, copy_limit=config.copies)
        report = moment_constrained_tomography(
            source, state.n, 1, config.epsilon, config.delta, photons,
            copies=config.copies, rng=rng,
        )
    return report, truth


def _regularization_mode(config: ExperimentConfig):
    """Mode estimate_moments resolves to for this batch; None for the moment pipeline."""
    if Pipeline(config.pipeline) is Pipeline.MOMENT:
        return None
    if config.regularization:
        return config.regularization
    return Regularization.FIXED.value if config.copies is None else Regularization.ADAPTIVE.value


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    """
    One seeded trial.

    A learner that declares failure yields a row with ``declared_failure``
    set; numerical errors propagate.
    """
    rng = trial_rng(config.seed, trial)
    try:
        report, truth = _run_pipeline(config, rng)
    except PipelineFailure as exc:
        logger.info("trial %d: declared failure (%s)", trial, exc)
        return TrialResult(
            trial=trial,
            pipeline=config.pipeline,
            copies_used=config.copies or 0,
            epsilon=config.epsilon,
            delta=config.delta,
            achieved_distance=None,
            success=False,
            declared_failure=True,
            post_selection_rate=getattr(exc, 'success_rate', None),
            regularization=_regularization_mode(config),
            failure_reason=type(exc).__name__,
        )

    distance = achieved_distance(report.estimator, truth)
    report.achieved_distance = distance
    diagnostics = report.diagnostics
    return TrialResult(
        trial=trial,
        pipeline=config.pipeline,
        copies_used=report.copies_used,
        epsilon=config.epsilon,
        delta=config.delta,
        achieved_distance=distance,
        success=distance <= config.epsilon,
        declared_failure=False,
        post_selection_rate=diagnostics.get('post_selection_rate'),
        retention=diagnostics.get('retention'),
        regularization_shift=diagnostics.get('regularization_shift'),
        regularization=diagnostics.get('regularization'),
        oracle_cutoff=truth.space.cutoff,
        report=report,
    )


def run_trials(config: ExperimentConfig) -> list:
    """
    Run ``config.trials`` trials and return their rows ordered by trial index.

    With more than one worker the trials are spread over a process pool;
    the rows are identical to an inline run.
    """
    workers = config.workers or get_setting('WORKERS')
    logger.info("run_trials: %s x %d on %d worker(s), seed %d", config.pipeline, config.trials, workers, config.seed)
    if workers <= 1:
        return [run_trial(config, trial) for trial in range(config.trials)]

    results = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_trial, config, trial): trial for trial in range(config.trials)}
        for future in as_completed(futures):
            results.append(future.result())
    return sorted(results, key=lambda row: row.trial)


def summarize(results: list) -> dict:
    """Success and failure counts of a batch."""
    distances = [row.achieved_distance for row in results if row.achieved_distance is not None]
    return {
        'trials': len(results),
        'successes': sum(row.success for row in results),
        'declared_failures': sum(row.declared_failure for row in results),
        'median_distance': float(np.median(distances)) if distances else None,
    }
