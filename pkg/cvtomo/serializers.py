"""
Serializers for cvtomo

JSON for states, decompositions and reports; CSV for sample batches, trial
tables and bound tables. Output is deterministic: keys are sorted, floats in
CSV are written with ``FLOAT_FORMAT`` and rows keep their input order.

State schema: {"n": int, "mean": [2n floats], "cov": [[2n floats] x 2n]}.
"""

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import IO, Any, Iterable

import numpy as np

from .constants import BOUND_TABLE_COLUMNS, TRIAL_COLUMNS
from .exceptions import InvalidInputError
from .models import (
    BoundReport,
    CompressedEstimate,
    FockDensity,
    GaussianState,
    SampleBatch,
    SymplecticDecomposition,
    TomographyReport,
)
from .services.gaussian_service import from_moments

FLOAT_FORMAT = '.10e'


def _plain(value: Any) -> Any:
    """numpy values to JSON-ready Python values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def dumps(payload: dict) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + '\n'


# =========================
# 1. STATES
# =========================

def state_to_dict(state: GaussianState) -> dict:
    return {'n': state.n, 'mean': state.mean.tolist(), 'cov': state.cov.tolist()}


def state_from_dict(data: dict) -> GaussianState:
    """Validated Gaussian state from the JSON schema."""
    try:
        n, mean, cov = data['n'], data['mean'], data['cov']
    except (KeyError, TypeError):
        raise InvalidInputError("state must provide 'n', 'mean' and 'cov'")
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if mean.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
        raise InvalidInputError(f"mean and cov do not match n={n}")
    return from_moments(mean, cov)


def load_state(path) -> GaussianState:
    """Read a state file; OSError and json.JSONDecodeError propagate."""
    with open(path, encoding='utf-8') as handle:
        return state_from_dict(json.load(handle))


def dump_state(state: GaussianState, path) -> None:
    Path(path).write_text(dumps(state_to_dict(state)), encoding='utf-8')


def density_to_dict(rho: FockDensity) -> dict:
    return {
        'n': rho.space.n,
        'cutoff': rho.space.cutoff,
        'deficit': rho.deficit,
        'real': rho.matrix.real.tolist(),
        'imag': rho.matrix.imag.tolist(),
    }


# =========================
# 2. RESULTS
# =========================

def decomposition_to_dict(decomposition: SymplecticDecomposition) -> dict:
    return {'symplectic': decomposition.symplectic, 'eigenvalues': decomposition.eigenvalues}


def bound_report_to_dict(report: BoundReport) -> dict:
    data = asdict(report)
    data.update(lower=report.lower, upper=report.upper)
    return data


def compressed_to_dict(estimate: CompressedEstimate) -> dict:
    data = {
        'n': estimate.n,
        't': estimate.t,
        'mean': estimate.mean,
        'symplectic': estimate.symplectic,
        'head': density_to_dict(estimate.head),
    }
    if estimate.head_vector is not None:
        data['head_vector'] = {'real': estimate.head_vector.real, 'imag': estimate.head_vector.imag}
    return data


def estimator_to_dict(estimator: Any) -> dict:
    if isinstance(estimator, GaussianState):
        return state_to_dict(estimator)
    if isinstance(estimator, CompressedEstimate):
        return compressed_to_dict(estimator)
    if isinstance(estimator, FockDensity):
        return density_to_dict(estimator)
    raise InvalidInputError(f"no JSON form for {type(estimator).__name__}")


def report_to_dict(report: TomographyReport) -> dict:
    return {
        'pipeline': report.pipeline,
        'copies_used': report.copies_used,
        'epsilon': report.epsilon,
        'delta': report.delta,
        'achieved_distance': report.achieved_distance,
        'estimator': estimator_to_dict(report.estimator),
        'diagnostics': report.diagnostics,
    }


# =========================
# 3. CSV
# =========================

def _cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def _write_table(stream: IO, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])


def write_sample_batch_csv(batch: SampleBatch, stream: IO) -> None:
    """One shot per row; the header names the measured quadratures and the setting."""
    header = [f'{batch.setting.label}:{name}' for name in batch.setting.names]
    _write_table(stream, header, batch.shots)


def _header(columns: dict) -> list:
    """'column: description' cells; the part before the colon is the column key."""
    return [f'{key}: {description}' for key, description in columns.items()]


def write_trials_csv(results: Iterable, stream: IO) -> None:
    columns = list(TRIAL_COLUMNS)
    _write_table(stream, _header(TRIAL_COLUMNS), ([getattr(row, column) for column in columns] for row in results))


def write_bound_table_csv(rows: Iterable[dict], stream: IO) -> None:
    columns = list(BOUND_TABLE_COLUMNS)
    _write_table(stream, _header(BOUND_TABLE_COLUMNS), ([row[column] for column in columns] for row in rows))
