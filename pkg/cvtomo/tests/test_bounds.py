import numpy as np
from django.test import SimpleTestCase, tag

from cvtomo.exceptions import BudgetViolationError, InvalidInputError, TruncationError
from cvtomo.models import FockSpace, GaussianState
from cvtomo.services.bounds_service import (
    bound_report,
    f_of_N,
    lower_bounds,
    oracle_distance,
    upper_bound_mixed,
    upper_bound_pure,
)
from cvtomo.services.fock_service import gaussian_density_matrix, trace_distance_exact
from cvtomo.services.gaussian_service import (
    coherent,
    max_energy,
    max_photon_number,
    random_gaussian_state,
    thermal,
    vacuum,
)


def overlap_distance(r) -> float:
    """Trace distance between the vacuum and the coherent state with first moment r."""
    return float(np.sqrt(1 - np.exp(-np.dot(r, r) / 2)))


class FofNTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(f_of_N(0), 1 / np.sqrt(2))
        self.assertAlmostEqual(f_of_N(1), (1 + np.sqrt(2)) / np.sqrt(2))

    def test_monotone(self):
        values = [f_of_N(N) for N in np.linspace(0, 10, 50)]
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))

    def test_negative_rejected(self):
        with self.assertRaises(InvalidInputError):
            f_of_N(-0.1)


class UpperBoundTests(SimpleTestCase):
    def test_identical_states(self):
        state = thermal([0.4])
        self.assertEqual(upper_bound_mixed(state, state, 1.0), 0.0)

    def test_vacuum_against_thermal(self):
        self.assertAlmostEqual(upper_bound_mixed(vacuum(1), thermal([1.0]), 1.0), f_of_N(1) * np.sqrt(2) * 2)

    def test_vacuum_against_weak_coherent(self):
        r = [0.1, 0.0]
        bound = upper_bound_mixed(vacuum(1), coherent(r), 0.005)
        self.assertAlmostEqual(bound, f_of_N(0.005) * 0.1)
        self.assertGreaterEqual(bound, overlap_distance(r))

    def test_budget_violation_reports_value(self):
        with self.assertRaises(BudgetViolationError) as raised:
            upper_bound_mixed(vacuum(1), thermal([1.0]), 0.5)
        self.assertAlmostEqual(raised.exception.value, 1.0)
        self.assertEqual(raised.exception.budget, 0.5)

    def test_pure_bound(self):
        r = [0.2, 0.0]
        bound = upper_bound_pure(vacuum(1), coherent(r), 'energy', E=0.52)
        self.assertAlmostEqual(bound, np.sqrt(0.52) * np.sqrt(0.08))
        self.assertGreaterEqual(bound, overlap_distance(r))
        self.assertAlmostEqual(
            upper_bound_pure(vacuum(1), (np.array(r), np.eye(2))),
            0.5 * np.sqrt(2) * np.sqrt(0.08),
        )

    def test_pure_bound_of_identical_states(self):
        self.assertEqual(upper_bound_pure(vacuum(2), vacuum(2)), 0.0)

    def test_pure_bound_needs_pure_state(self):
        with self.assertRaises(InvalidInputError):
            upper_bound_pure(thermal([0.5]), vacuum(1))
        with self.assertRaises(InvalidInputError):
            upper_bound_pure(vacuum(1), coherent([0.2, 0.0]), 'energy')

    def test_mode_mismatch(self):
        with self.assertRaises(InvalidInputError):
            upper_bound_mixed(vacuum(1), vacuum(2), 1.0)


class LowerBoundTests(SimpleTestCase):
    def test_identical_states(self):
        self.assertEqual(lower_bounds(thermal([1.0]), thermal([1.0]), 1.5), (0.0, 0.0))

    def test_vacuum_against_thermal(self):
        _, from_cov = lower_bounds(vacuum(1), thermal([1.0]), 1.5)
        self.assertAlmostEqual(from_cov, 2 * np.sqrt(2) / 7 / 200)

    def test_vacuum_against_coherent(self):
        from_mean, _ = lower_bounds(vacuum(1), coherent([np.sqrt(2), 0.0]), 1.5)
        self.assertAlmostEqual(from_mean, np.sqrt(2) / np.sqrt(7) / 200)
        self.assertLessEqual(from_mean, overlap_distance([np.sqrt(2), 0.0]))

    def test_values_are_capped(self):
        from_mean, from_cov = lower_bounds(vacuum(1), coherent([30.0, 0.0]), 451.0)
        self.assertLessEqual(from_mean, 1 / 200)
        self.assertLessEqual(from_cov, 1 / 200)

    def test_budget_violation(self):
        with self.assertRaises(BudgetViolationError):
            lower_bounds(vacuum(1), thermal([1.0]), 1.0)


class ErrorPropagationTests(SimpleTestCase):
    def _slope(self, values, epsilons):
        return np.polyfit(np.log(epsilons), np.log(values), 1)[0]

    def test_upper_bound_scales_as_square_root(self):
        base = random_gaussian_state(2, 2.0, 'mixed', np.random.default_rng(31))
        epsilons = np.logspace(-6, -2, 9)
        values = [
            upper_bound_mixed(base, GaussianState(base.mean, base.cov + eps * np.eye(4)), 5.0) for eps in epsilons
        ]
        self.assertAlmostEqual(self._slope(values, epsilons), 0.5, delta=0.05)

    def test_lower_bound_scales_linearly(self):
        base = random_gaussian_state(2, 2.0, 'mixed', np.random.default_rng(32))
        epsilons = np.logspace(-6, -2, 9)
        values = [
            lower_bounds(base, GaussianState(base.mean, base.cov + eps * np.eye(4)), 5.0)[1] for eps in epsilons
        ]
        self.assertAlmostEqual(self._slope(values, epsilons), 1.0, delta=0.05)


class BoundReportTests(SimpleTestCase):
    def test_vacuum_against_thermal_with_oracle(self):
        report = bound_report(vacuum(1), thermal([1.0]), oracle_cutoff=30)
        self.assertTrue(report.budgets_inferred)
        self.assertEqual(report.photon_budget, 1.0)
        self.assertEqual(report.energy_budget, 1.5)
        self.assertAlmostEqual(report.lower, 0.00202, places=5)
        self.assertAlmostEqual(report.exact_distance, 0.5, places=6)
        self.assertEqual(report.upper_mixed, 1.0)
        self.assertEqual(report.upper, 1.0)
        self.assertIsNotNone(report.upper_pure)

    def test_unclipped(self):
        report = bound_report(vacuum(1), thermal([1.0]), N=1.0, E=1.5, clip=False)
        self.assertFalse(report.budgets_inferred)
        self.assertGreater(report.upper_mixed, 4.8)
        self.assertIsNone(report.exact_distance)

    def test_mixed_pair_has_no_pure_bound(self):
        self.assertIsNone(bound_report(thermal([0.2]), thermal([0.3])).upper_pure)

    def assert_sandwich(self, s1, s2, cutoff, budget=None, slack=2e-4):
        space = FockSpace(s1.n, cutoff)
        rho1 = gaussian_density_matrix(space, s1, budget=budget)
        rho2 = gaussian_density_matrix(space, s2, budget=budget)
        exact = trace_distance_exact(rho1, rho2)
        report = bound_report(s1, s2, N=max_photon_number(s1, s2), E=max_energy(s1, s2))
        self.assertLessEqual(report.lower, exact + slack)
        self.assertLessEqual(exact, report.upper + slack)
        if report.upper_pure is not None:
            self.assertLessEqual(exact, report.upper_pure + slack)

    def test_sandwich(self):
        rng = np.random.default_rng(2025)
        for _ in range(20):
            purity = 'pure' if rng.random() < 0.5 else 'mixed'
            s1 = random_gaussian_state(1, 1.5, purity, rng)
            s2 = random_gaussian_state(1, 1.5, 'mixed', rng)
            self.assert_sandwich(s1, s2, 40, budget=1e-4)

    @tag('slow')
    def test_sandwich_on_many_pairs(self):
        rng = np.random.default_rng(2026)
        checked = 0
        for _ in range(2000):
            n = int(rng.integers(1, 3))
            cap = n * float(rng.uniform(0.6, 3.0))
            purity = 'pure' if rng.random() < 0.5 else 'mixed'
            s1 = random_gaussian_state(n, cap, purity, rng)
            s2 = random_gaussian_state(n, cap, 'mixed', rng)
            try:
                self.assert_sandwich(s1, s2, 80 if n == 1 else 40, budget=1e-4)
            except TruncationError:
                continue
            checked += 1
            if checked == 200:
                break
        self.assertEqual(checked, 200)

    def test_oracle_distance_of_coherent_pair(self):
        r = [np.sqrt(2), 0.0]
        self.assertAlmostEqual(oracle_distance(vacuum(1), coherent(r), 30), overlap_distance(r), places=6)
