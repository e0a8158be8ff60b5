import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose

from cvtomo.exceptions import (
    BudgetViolationError,
    InvalidInputError,
    PipelineFailure,
    PostSelectionFailure,
    SampleStarvationError,
)
from cvtomo.models import CompressedEstimate, FockSpace, StateSource
from cvtomo.services.fock_service import (
    fock_state,
    gaussian_density_matrix,
    gaussianification,
    pure_density,
    trace_distance_exact,
)
from cvtomo.services.gaussian_service import coherent, squeezed_vacuum, thermal, vacuum
from cvtomo.services.tomography_service import (
    achieved_distance,
    canonical_form,
    compress_state,
    gaussian_dimension,
    gaussian_tomography,
    inner_tomography,
    moment_constrained_tomography,
    reconstruct_compressed,
    render_estimator,
    synth_t_doped,
    t_compressible_tomography,
)


class GaussianDimensionTests(SimpleTestCase):
    def test_pure_and_mixed(self):
        self.assertEqual(gaussian_dimension(vacuum(2).cov), 2)
        self.assertEqual(gaussian_dimension(thermal([1.0, 0.0]).cov), 1)
        self.assertEqual(gaussian_dimension(thermal([1.0, 0.5]).cov), 0)
        self.assertEqual(gaussian_dimension(squeezed_vacuum([2.0]).cov), 1)


class InnerTomographyTests(SimpleTestCase):
    def setUp(self):
        space = FockSpace(1, 2)
        self.rho = pure_density(space, [0.6, 0.8j, 0.0])

    def test_converges(self):
        estimate = inner_tomography(self.rho, 40000, np.random.default_rng(0))
        self.assertLess(trace_distance_exact(estimate, self.rho), 0.05)
        self.assertAlmostEqual(estimate.trace, 1.0)
        self.assertGreaterEqual(np.linalg.eigvalsh(estimate.matrix)[0], -1e-12)

    def test_pure_variant_has_rank_one(self):
        estimate = inner_tomography(self.rho, 40000, np.random.default_rng(1), pure=True)
        eigenvalues = np.linalg.eigvalsh(estimate.matrix)
        assert_allclose(eigenvalues, [0.0, 0.0, 1.0], atol=1e-10)
        self.assertLess(trace_distance_exact(estimate, self.rho), 0.05)

    def test_starvation(self):
        with self.assertRaises(SampleStarvationError):
            inner_tomography(self.rho, 3, np.random.default_rng(0))

    def test_dimension_cap(self):
        space = FockSpace(1, 60)
        with self.assertRaises(InvalidInputError):
            inner_tomography(pure_density(space, fock_state(space, [0])), 10 ** 6, np.random.default_rng(0))


class GaussianTomographyTests(SimpleTestCase):
    def test_noiseless_source(self):
        state = thermal([0.5])
        report = gaussian_tomography(StateSource(gaussian=state, noiseless=True), 1, 0.1, 0.1, 1.0)
        self.assertEqual(report.pipeline, 'gaussian')
        self.assertEqual(report.copies_used, 0)
        assert_allclose(report.estimator.cov, state.cov + report.diagnostics['regularization_shift'] * np.eye(2))
        self.assertAlmostEqual(report.diagnostics['internal_epsilon'], 0.01 / 128)
        self.assertGreater(report.diagnostics['formula_copies'], 10 ** 6)

    def test_energy_budget_is_enforced(self):
        with self.assertRaises(BudgetViolationError):
            gaussian_tomography(StateSource(gaussian=thermal([2.0])), 1, 0.1, 0.1, 1.0, copies=1000)

    def test_thermal_state(self):
        state = thermal([1.0])
        source = StateSource(gaussian=state, copy_limit=100000)
        report = gaussian_tomography(source, 1, 0.1, 0.1, 1.5, copies=100000, rng=np.random.default_rng(5))
        self.assertEqual(report.copies_used, 100000)
        truth = gaussian_density_matrix(FockSpace(1, 30), state)
        self.assertLess(achieved_distance(report.estimator, truth), 0.08)

    def test_single_photon_converges_to_its_gaussianification(self):
        space = FockSpace(1, 6)
        source = StateSource(density=pure_density(space, fock_state(space, [1])))
        report = gaussian_tomography(source, 1, 0.1, 0.1, 1.5, copies=100000, rng=np.random.default_rng(6))
        target = gaussian_density_matrix(FockSpace(1, 30), thermal([1.0]))
        self.assertLess(achieved_distance(report.estimator, target), 0.08)

    def accepted_trials(self, source_factory, target, trials=100, copies=10 ** 5, seed=0):
        accepted = 0
        for trial in range(trials):
            report = gaussian_tomography(
                source_factory(), 1, 0.05, 0.1, 1.5, copies=copies, rng=np.random.default_rng([seed, trial]),
            )
            accepted += achieved_distance(report.estimator, target) <= 0.05
        return accepted

    @tag('slow')
    def test_thermal_state_acceptance(self):
        state = thermal([1.0])
        truth = gaussian_density_matrix(FockSpace(1, 30), state)
        self.assertGreaterEqual(self.accepted_trials(lambda: StateSource(gaussian=state), truth, seed=61), 90)

    @tag('slow')
    def test_single_photon_gaussianification_acceptance(self):
        space = FockSpace(1, 6)
        photon = pure_density(space, fock_state(space, [1]))
        target = gaussian_density_matrix(FockSpace(1, 30), thermal([1.0]))
        self.assertGreaterEqual(self.accepted_trials(lambda: StateSource(density=photon), target, seed=62), 90)

    @tag('slow')
    def test_error_shrinks_with_copies(self):
        state = squeezed_vacuum([1.5])
        truth = gaussian_density_matrix(FockSpace(1, 30), state)
        medians = []
        for copies in (10 ** 3, 10 ** 4, 10 ** 5):
            distances = []
            for trial in range(15):
                rng = np.random.default_rng([copies, trial])
                report = gaussian_tomography(StateSource(gaussian=state), 1, 0.1, 0.1, 1.0, copies=copies, rng=rng)
                distances.append(achieved_distance(report.estimator, truth))
            medians.append(np.median(distances))
        self.assertGreater(medians[0], medians[1])
        self.assertGreater(medians[1], medians[2])


class MomentConstrainedTests(SimpleTestCase):
    def setUp(self):
        self.state = coherent([np.sqrt(0.1), 0.0])
        self.rho = gaussian_density_matrix(FockSpace(1, 12), self.state)

    def test_weak_coherent_state(self):
        source = StateSource(density=self.rho)
        report = moment_constrained_tomography(
            source, 1, 1, 0.3, 0.1, 0.05, copies=40000, rng=np.random.default_rng(2),
        )
        diagnostics = report.diagnostics
        self.assertEqual(diagnostics['cutoff'], 3)
        self.assertEqual(diagnostics['inner_dim'], 4)
        self.assertGreater(diagnostics['retention'], 0.999)
        self.assertAlmostEqual(diagnostics['tail_bound'], 0.05 / 3)
        self.assertGreaterEqual(diagnostics['tail_bound'], 1 - diagnostics['retention'])
        self.assertFalse(diagnostics['budget_violation_suspected'])
        self.assertEqual(report.copies_used, 40000)
        self.assertEqual(report.estimator.space, self.rho.space)
        self.assertLess(achieved_distance(report.estimator, self.rho), 0.1)

    def test_pure_variant(self):
        report = moment_constrained_tomography(
            StateSource(density=self.rho), 1, 1, 0.3, 0.1, 0.05, pure=True, copies=40000, rng=np.random.default_rng(3),
        )
        self.assertAlmostEqual(float(np.trace(report.estimator.matrix @ report.estimator.matrix).real), 1.0)
        self.assertLess(achieved_distance(report.estimator, self.rho), 0.1)

    def test_violated_budget_is_flagged(self):
        rho = gaussian_density_matrix(FockSpace(1, 20), thermal([2.0]))
        report = moment_constrained_tomography(
            StateSource(density=rho), 1, 1, 0.3, 0.1, 0.0, copies=1000, rng=np.random.default_rng(4),
        )
        self.assertEqual(report.diagnostics['cutoff'], 0)
        self.assertTrue(report.diagnostics['budget_violation_suspected'])

    def test_gaussian_source_rejected(self):
        with self.assertRaises(InvalidInputError):
            moment_constrained_tomography(StateSource(gaussian=self.state), 1, 1, 0.3, 0.1, 0.05, copies=100)

    def test_copy_limit(self):
        with self.assertRaises(SampleStarvationError):
            moment_constrained_tomography(
                StateSource(density=self.rho, copy_limit=100), 1, 1, 0.3, 0.1, 0.05, copies=1000,
            )


class SynthTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.rho, cls.truth = synth_t_doped(2, 1, 2, np.random.default_rng(17), 4.0, cutoff=20)

    def test_ground_truth_reconstructs_the_state(self):
        rebuilt = reconstruct_compressed(self.truth, self.rho.space)
        self.assertLess(trace_distance_exact(rebuilt, self.rho), 1e-8)

    def test_canonical_form_matches_the_state(self):
        success, canonical = canonical_form(self.rho, 1)
        self.assertGreater(success, 0.99)
        assert_allclose(canonical.mean, gaussianification(self.rho).mean)
        rebuilt = reconstruct_compressed(canonical, self.rho.space, budget=1.0)
        self.assertLess(trace_distance_exact(rebuilt, self.rho), 0.05)

    def test_shapes(self):
        self.assertEqual(self.truth.n, 2)
        self.assertEqual(self.truth.t, 1)
        self.assertEqual(self.rho.space, FockSpace(2, 20))
        self.assertAlmostEqual(float(np.trace(self.rho.matrix @ self.rho.matrix).real), 1.0)

    def test_exact_compression_keeps_the_tail_in_vacuum(self):
        success, head = compress_state(self.rho, self.truth.mean, self.truth.symplectic, 1)
        self.assertGreater(success, 1 - 1e-3)
        self.assertEqual(head.space.n, 1)

    def test_seeded_synthesis_repeats(self):
        rho, _ = synth_t_doped(2, 1, 2, np.random.default_rng(17), 4.0, cutoff=20)
        assert_allclose(rho.matrix, self.rho.matrix, rtol=0, atol=0)

    def test_no_gates_gives_a_gaussian_state(self):
        rho, truth = synth_t_doped(2, 0, 2, np.random.default_rng(3), 2.0, cutoff=12)
        self.assertEqual(gaussian_dimension(gaussianification(rho).cov, 1e-4), 2)
        self.assertIsInstance(truth, CompressedEstimate)

    def test_locality_constraint(self):
        with self.assertRaises(InvalidInputError):
            synth_t_doped(2, 2, 2, np.random.default_rng(0), 4.0, cutoff=8)


class TCompressibleTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.rho, cls.truth = synth_t_doped(2, 1, 2, np.random.default_rng(23), 4.0, cutoff=20)

    def test_exact_parameters(self):
        source = StateSource(density=self.rho)
        report = t_compressible_tomography(
            source, 2, 1, 0.2, 0.1, 1.5, copies=200000, rng=np.random.default_rng(1),
            exact_parameters=(self.truth.mean, self.truth.symplectic),
        )
        self.assertEqual(report.pipeline, 'tcomp')
        self.assertEqual(report.copies_used, 200000)
        self.assertEqual(report.diagnostics['moment_copies'], 0)
        self.assertGreater(report.diagnostics['post_selection_rate'], 0.99)
        self.assertIsInstance(report.estimator, CompressedEstimate)
        self.assertLess(achieved_distance(report.estimator, self.rho), 0.1)

    def test_wrong_displacement_fails_post_selection(self):
        shift = 3 * np.asarray(self.truth.symplectic)[:, 2]
        with self.assertRaises(PostSelectionFailure) as raised:
            t_compressible_tomography(
                StateSource(density=self.rho), 2, 1, 0.2, 0.1, 1.5, copies=5000, rng=np.random.default_rng(2),
                exact_parameters=(self.truth.mean + shift, self.truth.symplectic), head_cutoff=3,
            )
        self.assertLess(raised.exception.success_rate, 0.25)

    def test_gaussian_source_rejected(self):
        with self.assertRaises(InvalidInputError):
            t_compressible_tomography(StateSource(gaussian=vacuum(2)), 2, 1, 0.2, 0.1, 1.5, copies=100)

    def test_regularization_mode_is_reported(self):
        report = t_compressible_tomography(
            StateSource(density=self.rho), 2, 1, 0.2, 0.1, 1.5, copies=100000, rng=np.random.default_rng(5),
            regularization='adaptive', head_cutoff=4,
        )
        self.assertEqual(report.diagnostics['regularization'], 'adaptive')
        self.assertGreaterEqual(report.diagnostics['regularization_shift'], 0.0)

    @tag('slow')
    def test_full_pipeline(self):
        source = StateSource(density=self.rho)
        report = t_compressible_tomography(
            source, 2, 1, 0.2, 0.1, 1.5, copies=200000, rng=np.random.default_rng(7),
        )
        self.assertGreaterEqual(report.diagnostics['post_selection_rate'], 0.5)
        self.assertEqual(report.diagnostics['regularization'], 'adaptive')
        self.assertLessEqual(report.copies_used, 200000)
        self.assertLess(achieved_distance(report.estimator, self.rho), 0.3)


class TCompressibleBatteryTests(SimpleTestCase):
    """Twenty seeded two-mode states with one gate of locality two."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.battery = [synth_t_doped(2, 1, 2, np.random.default_rng([71, seed]), 4.0, cutoff=20) for seed in range(20)]

    @tag('slow')
    def test_ground_truths_reconstruct(self):
        for rho, truth in self.battery:
            self.assertLess(trace_distance_exact(reconstruct_compressed(truth, rho.space), rho), 1e-8)

    @tag('slow')
    def test_learner_acceptance(self):
        accepted = 0
        for seed, (rho, _) in enumerate(self.battery):
            try:
                report = t_compressible_tomography(
                    StateSource(density=rho), 2, 1, 0.1, 0.1, 1.5, copies=10 ** 5, rng=np.random.default_rng([72, seed]),
                )
            except PipelineFailure:
                continue
            rate = report.diagnostics['post_selection_rate']
            accepted += rate >= 0.5 and achieved_distance(report.estimator, rho) <= 0.1
        self.assertGreaterEqual(accepted, 16)

class RenderTests(SimpleTestCase):
    def test_gaussian_estimator(self):
        truth = gaussian_density_matrix(FockSpace(1, 30), thermal([1.0]))
        self.assertAlmostEqual(achieved_distance(vacuum(1), truth), 0.5, places=6)

    def test_smaller_density_is_padded(self):
        small = pure_density(FockSpace(1, 2), [1.0, 0.0, 0.0])
        rendered = render_estimator(small, FockSpace(1, 5))
        self.assertEqual(rendered.space, FockSpace(1, 5))
        self.assertAlmostEqual(rendered.matrix[0, 0].real, 1.0)

    def test_unknown_estimator(self):
        with self.assertRaises(InvalidInputError):
            render_estimator('state', FockSpace(1, 2))
