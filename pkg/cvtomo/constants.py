"""
Constants for cvtomo

This module holds every project-wide constant:
- Enum choices shared by services, forms and commands
- Defaults for the numerical settings in ``settings.CVTOMO``
- The numeric constants of the sample-complexity formulas
- CSV column descriptions
"""

from enum import Enum


class Purity(str, Enum):
    """Purity class of a state or of a learning task."""
    PURE = 'pure'
    MIXED = 'mixed'

    @classmethod
    def choices(cls):
        """For use in Django forms."""
        return [(item.value, item.name.title()) for item in cls]


class BoundForm(str, Enum):
    """Variant of the pure-state trace-distance upper bound."""
    TRACE_V = 'traceV'
    ENERGY = 'energy'

    @classmethod
    def choices(cls):
        return [(item.value, item.name.title()) for item in cls]


class Pipeline(str, Enum):
    """End-to-end learners driven by ``simulate_tomography``."""
    GAUSSIAN = 'gaussian'
    MOMENT = 'moment'
    TCOMP = 'tcomp'

    @classmethod
    def choices(cls):
        return [(item.value, item.name.title()) for item in cls]


class Regularization(str, Enum):
    """How the estimated covariance matrix is pushed back into the physical cone."""
    FIXED = 'fixed'
    ADAPTIVE = 'adaptive'

    @classmethod
    def choices(cls):
        return [(item.value, item.name.title()) for item in cls]


class SettingKind(str, Enum):
    """Families of jointly measured quadrature sets."""
    POSITIONS = 'positions'
    MOMENTA = 'momenta'
    ROTATED = 'rotated'
    PAIR = 'pair'
    HETERODYNE = 'heterodyne'
    CUSTOM = 'custom'


class ExitCode(int, Enum):
    """Process exit statuses of the command-line surface."""
    SUCCESS = 0
    USAGE = 2
    NUMERICAL = 3
    PIPELINE = 4
    IO = 5


# Defaults for settings.CVTOMO (used when a key is missing there)
DEFAULTS = {
    'TOLERANCE': 1e-8,
    'CONDITIONING_FLOOR': 1e-12,
    'FOCK_BUFFER': 5,
    'TRUNCATION_BUDGET': 1e-3,
    'POST_SELECTION_FLOOR': 0.25,
    'INNER_MAX_DIM': 48,
    'INNER_BASIS_SEED': 20240917,
    'HEAD_CUTOFF': 8,
    'ORACLE_CUTOFF': 30,
    'TCOMP_MOMENT_FRACTION': 0.5,
    'WORKERS': 1,
}

# Tolerance for counting unit symplectic eigenvalues of estimated matrices
GAUSSIAN_DIMENSION_TOL = 1e-6

# Median-of-means: N >= MOM_CONSTANT * log(2/delta) * sigma^2 / eps^2
MOM_CONSTANT = 68

# Variance constant of the moment-estimation copy count
COV_VARIANCE_CONSTANT = 200

# Accuracy splits of the Gaussian learners
GAUSSIAN_MIXED_SPLIT = 2 ** 7
GAUSSIAN_PURE_SPLIT = 4

# Copy-count prefactor of the moment-constrained learners
ENERGY_CONSTRAINED_PREFACTOR = 2 ** 21

# Head energy factor of the t-compressible learner (80 n^2 E^2)
HEAD_ENERGY_FACTOR = 80

# Lower bounds on trace distance from moments
LOWER_BOUND_PREFACTOR = 1 / 200

# Tail-rank slack in the mixed moment-constrained count: r_eff at eps/20
RANK_ACCURACY_DIVISOR = 20

# Column descriptions of the CSV artifacts (column -> quantity it realizes);
# headers read "column: description"
TRIAL_COLUMNS = {
    'trial': 'trial index',
    'pipeline': 'learner (gaussian | moment | tcomp)',
    'copies_used': 'copies N consumed from the source',
    'epsilon': 'target accuracy eps in trace distance',
    'delta': 'target failure probability delta',
    'achieved_distance': 'oracle trace distance 1/2||rho_hat - rho||_1',
    'success': 'achieved_distance <= eps',
    'declared_failure': 'learner aborted (uncertainty check or starvation or post-selection)',
    'post_selection_rate': 'empirical success rate of the vacuum post-selection',
    'retention': 'Tr[Pi_m rho] of the energy-subspace POVM',
    'regularization_shift': 'shift mu added to the estimated covariance matrix',
    'regularization': 'covariance regularization mode (fixed | adaptive)',
    'oracle_cutoff': 'Fock cutoff m of the trace-distance oracle',
}

BOUND_TABLE_COLUMNS = {
    'n': 'number of modes n',
    'k': 'moment order k',
    'epsilon': 'accuracy eps',
    'delta': 'failure probability delta',
    'photons': 'photon budget N_phot per mode',
    'd_eff': 'effective dimension of H_m (binomial m+n over n)',
    'r_eff': 'effective rank at the tail cutoff m\' (binomial m\'+n over n)',
    'lower_pure': 'copy lower bound for pure states',
    'lower_mixed': 'copy lower bound for mixed states',
    'upper_pure': 'copy upper bound for pure states',
    'upper_mixed': 'copy upper bound for mixed states',
    'gaussian_mixed': 'Gaussian tomography copies (mixed)',
    'gaussian_pure': 'Gaussian tomography copies (pure)',
}
