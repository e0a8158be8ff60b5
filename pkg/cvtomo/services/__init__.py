"""
Service layer of cvtomo

Numerical core of the toolkit, kept apart from the management commands.
"""

from .symplectic_service import (
    symplectic_form,
    is_symplectic,
    williamson,
    symplectic_eigenvalues,
    bloch_messiah,
    random_symplectic,
    symplectic_norm_bound_check,
)

from .gaussian_service import (
    validate,
    vacuum,
    thermal,
    coherent,
    squeezed_vacuum,
    mean_energy,
    mean_photon_number,
    energy_second_moment,
    apply_gaussian_map,
    gaussian_noise,
    reduced_state,
    displacement_energy,
    random_gaussian_state,
)

from .fock_service import (
    quadrature_operators,
    gaussian_unitary_matrix,
    gaussian_density_matrix,
    trace_distance_exact,
    project_energy_subspace,
    truncation_bound,
    vacuum_projector_measurement,
)

from .measurement_service import (
    heterodyne_sample,
    homodyne_joint_sample,
    table2_sample_plan,
)

from .estimation_service import (
    median_of_means,
    moment_sample_count,
    estimate_moments,
)

from .bounds_service import (
    f_of_N,
    upper_bound_mixed,
    upper_bound_pure,
    lower_bounds,
    bound_report,
)

from .complexity_service import (
    bosonic_entropy,
    binary_entropy,
    effective_dimension,
    effective_rank,
    lower_bound_pure,
    lower_bound_mixed,
    lower_bound_t_compressible,
    upper_bound_counts,
    gaussian_sample_counts,
    t_compressible_sample_count,
)

from .tomography_service import (
    canonical_form,
    gaussian_tomography,
    moment_constrained_tomography,
    synth_t_doped,
    gaussian_dimension,
    t_compressible_tomography,
)

from .experiment_service import run_trials

__all__ = [
    'symplectic_form',
    'is_symplectic',
    'williamson',
    'symplectic_eigenvalues',
    'bloch_messiah',
    'random_symplectic',
    'symplectic_norm_bound_check',
    'validate',
    'vacuum',
    'thermal',
    'coherent',
    'squeezed_vacuum',
    'mean_energy',
    'mean_photon_number',
    'energy_second_moment',
    'apply_gaussian_map',
    'gaussian_noise',
    'reduced_state',
    'displacement_energy',
    'random_gaussian_state',
    'quadrature_operators',
    'gaussian_unitary_matrix',
    'gaussian_density_matrix',
    'trace_distance_exact',
    'project_energy_subspace',
    'truncation_bound',
    'vacuum_projector_measurement',
    'heterodyne_sample',
    'homodyne_joint_sample',
    'table2_sample_plan',
    'median_of_means',
    'moment_sample_count',
    'estimate_moments',
    'f_of_N',
    'upper_bound_mixed',
    'upper_bound_pure',
    'lower_bounds',
    'bound_report',
    'bosonic_entropy',
    'binary_entropy',
    'effective_dimension',
    'effective_rank',
    'lower_bound_pure',
    'lower_bound_mixed',
    'lower_bound_t_compressible',
    'upper_bound_counts',
    'gaussian_sample_counts',
    't_compressible_sample_count',
    'gaussian_tomography',
    'moment_constrained_tomography',
    'synth_t_doped',
    'canonical_form',
    'gaussian_dimension',
    't_compressible_tomography',
    'run_trials',
]
