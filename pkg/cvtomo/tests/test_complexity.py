from fractions import Fraction
from itertools import product
from math import ceil, comb, e, isinf, log, log2, pi, sqrt

from django.test import SimpleTestCase

from cvtomo.constants import BOUND_TABLE_COLUMNS
from cvtomo.exceptions import InvalidInputError
from cvtomo.models import BoundQuery
from cvtomo.services.complexity_service import (
    amplified_copy_count,
    binary_entropy,
    bosonic_entropy,
    bound_row,
    bound_table,
    covariance_accuracy,
    effective_dimension,
    effective_rank,
    filtered_copy_count,
    gaussian_sample_counts,
    lower_bound_mixed,
    lower_bound_pure,
    lower_bound_t_compressible,
    t_compressible_sample_count,
    upper_bound_counts,
)
from cvtomo.services.estimation_service import moment_sample_count


def g(x):
    return 0.0 if x == 0 else (x + 1) * log2(x + 1) - x * log2(x)


def h2(x):
    return 0.0 if x in (0, 1) else -x * log2(x) - (1 - x) * log2(1 - x)


class EntropyTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(bosonic_entropy(1), 2.0)
        self.assertEqual(bosonic_entropy(0), 0.0)
        self.assertAlmostEqual(binary_entropy(0.5), 1.0)
        self.assertEqual(binary_entropy(1), 0.0)

    def test_domain(self):
        with self.assertRaises(InvalidInputError):
            bosonic_entropy(-1)
        with self.assertRaises(InvalidInputError):
            binary_entropy(1.5)


class DimensionTests(SimpleTestCase):
    def test_effective_dimension(self):
        m, dim, ceiling = effective_dimension(1, 1, 0.1, 1.0)
        self.assertEqual((m, dim), (100, 101))
        self.assertAlmostEqual(ceiling, 100 * e + 2 * e)

    def test_effective_rank(self):
        m, rank, _ = effective_rank(1, 1, 0.1, 1.0)
        self.assertEqual((m, rank), (10, 11))

    def test_float_noise_does_not_bump_the_ceiling(self):
        self.assertEqual(effective_dimension(1, 1, 0.2, 1.0)[0], 25)

    def test_high_order_moments(self):
        self.assertEqual(effective_dimension(2, 1000, 0.1, 1.4)[0], 3)

    def test_exact_integers_for_many_modes(self):
        m, dim, _ = effective_dimension(40, 1, 0.01, 2.0)
        self.assertEqual(dim, comb(m + 40, 40))
        self.assertIsInstance(dim, int)

    def test_rank_below_dimension(self):
        for n, k, epsilon, photons in product((1, 2, 3), (1, 2), (0.3, 0.1, 0.01), (0.1, 1.0, 4.0)):
            self.assertLessEqual(
                effective_rank(n, k, epsilon, photons)[1], effective_dimension(n, k, epsilon, photons)[1]
            )


class LowerBoundTests(SimpleTestCase):
    def test_pure_bound_value(self):
        base = 1 / (12 * 0.01) ** 2 - 1
        expected = (2 * 0.9 * base - 0.9 * log2(32 * pi) - h2(0.1)) / g(1)
        self.assertAlmostEqual(lower_bound_pure(1, 1, 0.01, 0.1, 1.0), expected, places=9)

    def test_mixed_bound_value(self):
        base = 2.0 / (16 * 0.01) - 1 / 2
        expected = (0.9 * base ** 4 - 0.45 - 2 * h2(0.1)) / (4 * g(2.0))
        self.assertAlmostEqual(lower_bound_mixed(2, 1, 0.01, 0.1, 2.0) / expected, 1.0, places=12)

    def test_clamped_to_one(self):
        self.assertEqual(lower_bound_pure(1, 1, 0.01, 0.999999, 1.0), 1.0)
        self.assertEqual(lower_bound_pure(1, 1, 0.5, 0.1, 0.01), 1.0)
        self.assertEqual(lower_bound_mixed(1, 1, 0.5, 0.1, 0.0), 1.0)

    def test_t_compressible_bound(self):
        x = (4 / 2) * (3.0 - 0.5)
        expected = (2 * 0.9 * (x / 0.12 - 0.5) ** 2 - 0.9 * log2(32 * pi) - h2(0.1)) / (2 * g(x))
        self.assertAlmostEqual(lower_bound_t_compressible(4, 2, 0.01, 0.1, 3.0) / expected, 1.0, places=12)
        with self.assertRaises(InvalidInputError):
            lower_bound_t_compressible(2, 3, 0.1, 0.1, 1.0)

    def test_overflow_is_infinite(self):
        self.assertTrue(isinf(lower_bound_mixed(300, 1, 0.01, 0.1, 5.0)))

    def test_invalid_targets(self):
        with self.assertRaises(InvalidInputError):
            lower_bound_pure(1, 1, 1.5, 0.1, 1.0)


class UpperBoundTests(SimpleTestCase):
    def test_pure_count(self):
        factor = 2 ** 21 * log(8) / 0.5 ** 2
        self.assertEqual(upper_bound_counts(1, 1, 0.5, 0.5, 1.0, pure=True), ceil(Fraction(5) * Fraction(factor)))

    def test_mixed_count_multiplies_rank(self):
        factor = 2 ** 21 * log(8) / 0.5 ** 2
        rank = effective_rank(1, 1, 0.5 / 20, 1.0)[1]
        self.assertEqual(
            upper_bound_counts(1, 1, 0.5, 0.5, 1.0, pure=False), ceil(Fraction(5 * rank) * Fraction(factor))
        )

    def test_filter_and_amplification(self):
        self.assertEqual(filtered_copy_count(100, 0.1), 200 + ceil(24 * log(20)))
        self.assertEqual(filtered_copy_count(100, 0.1, parts=3), 200 + ceil(24 * log(30)))
        self.assertEqual(amplified_copy_count(0.5, 100, 0.1), ceil(300 + 18 * log(10) / 0.5))
        with self.assertRaises(InvalidInputError):
            amplified_copy_count(0.0, 100, 0.1)

    def test_gaussian_counts(self):
        energy = 1.5
        mixed = moment_sample_count(2, 0.1 ** 2 / (2 ** 7 * energy * 4), 0.1, sqrt(3) * energy)
        pure = moment_sample_count(2, 0.1 ** 2 / (4 * 2 * energy), 0.1, sqrt(3) * energy)
        self.assertEqual(gaussian_sample_counts(2, 0.1, 0.1, energy), mixed)
        self.assertEqual(gaussian_sample_counts(2, 0.1, 0.1, energy, pure=True), pure)
        self.assertGreater(mixed, pure)

    def test_gaussian_counts_need_physical_energy(self):
        with self.assertRaises(InvalidInputError):
            gaussian_sample_counts(1, 0.1, 0.1, 0.4)

    def test_t_compressible_count(self):
        n, t, epsilon, delta, energy_second = 2, 1, 0.2, 0.1, 1.0
        eps_cov = epsilon ** 2 / (2 * 3 * (1 + 8) ** 2)
        self.assertAlmostEqual(covariance_accuracy(n, epsilon, energy_second), eps_cov)
        moments = moment_sample_count(n, eps_cov, delta / 3, energy_second)
        inner = upper_bound_counts(t, 1, epsilon / 2, delta / 3, 80 * 4 * 1.0, pure=True)
        expected = moments + 2 * inner + ceil(24 * log(3 / delta))
        self.assertEqual(t_compressible_sample_count(n, t, epsilon, delta, energy_second), expected)


class ConsistencyTests(SimpleTestCase):
    def test_lower_bounds_below_upper_bounds(self):
        grid = product((1, 2, 3, 4), (1, 2, 3), (0.3, 0.1, 0.03, 0.01), (0.3, 0.1, 0.01), (0.1, 1.0, 5.0))
        for n, k, epsilon, delta, photons in grid:
            with self.subTest(n=n, k=k, epsilon=epsilon, delta=delta, photons=photons):
                self.assertLessEqual(
                    lower_bound_pure(n, k, epsilon, delta, photons),
                    upper_bound_counts(n, k, epsilon, delta, photons, pure=True),
                )
                self.assertLessEqual(
                    lower_bound_mixed(n, k, epsilon, delta, photons),
                    upper_bound_counts(n, k, epsilon, delta, photons, pure=False),
                )

    def test_second_arithmetic_path(self):
        for n, k, epsilon, photons in product((1, 2, 3), (1, 2), (0.3, 0.05), (0.5, 2.0)):
            m = ceil(n * photons / epsilon ** (2 / k) - 1e-9 * n * photons / epsilon ** (2 / k))
            self.assertEqual(effective_dimension(n, k, epsilon, photons)[1], comb(m + n, n))


class BoundTableTests(SimpleTestCase):
    def test_row_has_every_column(self):
        row = bound_row(BoundQuery(n=1, k=1, epsilon=0.1, delta=0.1, photons=1.0))
        self.assertEqual(list(row), list(BOUND_TABLE_COLUMNS))
        self.assertEqual(row['d_eff'], 101)
        self.assertEqual(row['r_eff'], 11)

    def test_table_keeps_grid_order(self):
        queries = [BoundQuery(n=n, k=1, epsilon=0.1, delta=0.1, photons=1.0) for n in (1, 2, 3)]
        self.assertEqual([row['n'] for row in bound_table(queries)], [1, 2, 3])

    def test_query_validation(self):
        with self.assertRaises(InvalidInputError):
            BoundQuery(n=0, k=1, epsilon=0.1, delta=0.1, photons=1.0)
        with self.assertRaises(InvalidInputError):
            BoundQuery(n=1, k=1, epsilon=1.5, delta=0.1, photons=1.0)
