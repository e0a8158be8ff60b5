import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose

from cvtomo.exceptions import ConditioningError, InvalidInputError
from cvtomo.services.gaussian_service import random_gaussian_state
from cvtomo.services.symplectic_service import (
    bloch_messiah,
    is_symplectic,
    omega,
    operator_norm,
    perturbation_bound,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_norm_bound_check,
    williamson,
)


class SymplecticFormTests(SimpleTestCase):
    def test_single_mode(self):
        assert_allclose(symplectic_form(1).matrix, [[0, 1], [-1, 0]])

    def test_two_modes_is_block_diagonal(self):
        matrix = symplectic_form(2).matrix
        assert_allclose(matrix[:2, :2], [[0, 1], [-1, 0]])
        assert_allclose(matrix[2:, 2:], [[0, 1], [-1, 0]])
        assert_allclose(matrix[:2, 2:], np.zeros((2, 2)))

    def test_orthogonal_and_antisymmetric(self):
        for n in (1, 2, 5):
            matrix = omega(n)
            assert_allclose(matrix @ matrix.T, np.eye(2 * n))
            assert_allclose(matrix @ matrix, -np.eye(2 * n))
            assert_allclose(matrix.T, -matrix)

    def test_zero_modes_rejected(self):
        with self.assertRaises(InvalidInputError):
            symplectic_form(0)


class IsSymplecticTests(SimpleTestCase):
    def test_identity_and_form(self):
        self.assertTrue(is_symplectic(np.eye(2), 1e-12))
        self.assertTrue(is_symplectic(omega(1), 1e-12))

    def test_scaled_identity_is_not(self):
        self.assertFalse(is_symplectic(np.diag([2.0, 2.0]), 1e-6))

    def test_odd_dimension_rejected(self):
        with self.assertRaises(InvalidInputError):
            is_symplectic(np.eye(3), 1e-6)


class WilliamsonTests(SimpleTestCase):
    def test_vacuum(self):
        decomposition = williamson(np.eye(2))
        assert_allclose(decomposition.eigenvalues, [1.0])
        assert_allclose(decomposition.reconstruct(), np.eye(2), atol=1e-12)

    def test_thermal(self):
        assert_allclose(williamson(3 * np.eye(2)).eigenvalues, [3.0])

    def test_squeezed_thermal(self):
        decomposition = williamson(np.diag([4.0, 1.0]))
        assert_allclose(decomposition.eigenvalues, [2.0])
        S = decomposition.symplectic
        assert_allclose(S @ S.T, np.diag([2.0, 0.5]), atol=1e-12)
        assert_allclose(decomposition.reconstruct(), np.diag([4.0, 1.0]), atol=1e-12)

    def test_pure_squeezed_has_unit_eigenvalue(self):
        assert_allclose(symplectic_eigenvalues(np.diag([5.0, 0.2])), [1.0], atol=1e-12)

    def test_eigenvalues_sorted_descending(self):
        V = np.diag([1.0, 1.0, 5.0, 5.0, 3.0, 3.0])
        assert_allclose(williamson(V).eigenvalues, [5.0, 3.0, 1.0], atol=1e-12)

    def test_asymmetric_rejected(self):
        with self.assertRaises(InvalidInputError):
            williamson(np.array([[2.0, 1.0], [0.0, 2.0]]))

    def test_indefinite_rejected(self):
        with self.assertRaises(InvalidInputError):
            williamson(np.diag([1.0, -1.0]))

    def test_near_singular_rejected(self):
        with self.assertRaises(ConditioningError):
            williamson(np.diag([1e8, 1e-8]))

    def test_agrees_with_eigenvalue_shortcut(self):
        rng = np.random.default_rng(7)
        state = random_gaussian_state(3, 6.0, 'mixed', rng)
        assert_allclose(symplectic_eigenvalues(state.cov), williamson(state.cov).eigenvalues, atol=1e-10)

    @tag('slow')
    def test_random_states(self):
        rng = np.random.default_rng(2024)
        for _ in range(500):
            n = int(rng.integers(1, 5))
            state = random_gaussian_state(n, n * float(rng.uniform(0.5, 3.0)), 'mixed', rng)
            decomposition = williamson(state.cov)
            scale = max(1.0, operator_norm(state.cov))
            self.assertLessEqual(operator_norm(decomposition.reconstruct() - state.cov), 1e-9 * scale)
            self.assertTrue(is_symplectic(decomposition.symplectic, 1e-9 * scale))
            self.assertTrue(np.all(decomposition.eigenvalues >= 1 - 1e-9))
            self.assertTrue(symplectic_norm_bound_check(state.cov))

    @tag('slow')
    def test_eigenvalue_perturbation_inequality(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            n = int(rng.integers(1, 4))
            first = random_gaussian_state(n, 2.0 * n, 'mixed', rng).cov
            second = random_gaussian_state(n, 2.0 * n, 'mixed', rng).cov
            gap = np.max(np.abs(symplectic_eigenvalues(first) - symplectic_eigenvalues(second)))
            self.assertLessEqual(gap, perturbation_bound(first, second) + 1e-9)


class BlochMessiahTests(SimpleTestCase):
    def test_passive_matrix_is_returned_unchanged(self):
        decomposition = bloch_messiah(omega(1))
        assert_allclose(decomposition.squeezing, [1.0])
        assert_allclose(decomposition.reconstruct(), omega(1), atol=1e-12)

    def test_single_mode_squeezer(self):
        decomposition = bloch_messiah(np.diag([3.0, 1 / 3.0]))
        assert_allclose(decomposition.squeezing, [3.0], atol=1e-10)
        assert_allclose(decomposition.reconstruct(), np.diag([3.0, 1 / 3.0]), atol=1e-10)

    def test_random_symplectic(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3):
            S = random_symplectic(n, 2.5, rng)
            decomposition = bloch_messiah(S)
            assert_allclose(decomposition.reconstruct(), S, atol=1e-9)
            for O in (decomposition.left, decomposition.right):
                assert_allclose(O @ O.T, np.eye(2 * n), atol=1e-9)
                self.assertTrue(is_symplectic(O, 1e-9))
            self.assertTrue(np.all(decomposition.squeezing >= 1 - 1e-12))
            assert_allclose(np.max(decomposition.squeezing), operator_norm(S), rtol=1e-9)

    def test_non_symplectic_rejected(self):
        with self.assertRaises(InvalidInputError):
            bloch_messiah(np.diag([2.0, 2.0]))


class RandomSymplecticTests(SimpleTestCase):
    def test_seeded_draws_repeat(self):
        first = random_symplectic(2, 2.0, np.random.default_rng(5))
        second = random_symplectic(2, 2.0, np.random.default_rng(5))
        assert_allclose(first, second, rtol=0, atol=0)
        self.assertTrue(is_symplectic(first, 1e-10))
        self.assertLessEqual(operator_norm(first), 2.0 + 1e-10)

    def test_inverse_has_the_same_norm(self):
        rng = np.random.default_rng(31)
        for n in (1, 2, 3):
            for _ in range(5):
                S = random_symplectic(n, 3.0, rng)
                self.assertAlmostEqual(operator_norm(np.linalg.inv(S)), operator_norm(S), delta=1e-9 * operator_norm(S))

    def test_z_max_below_one_rejected(self):
        with self.assertRaises(InvalidInputError):
            random_symplectic(1, 0.5, np.random.default_rng(0))


class CovarianceInverseTests(SimpleTestCase):
    def test_pure_inverse_is_the_omega_conjugate(self):
        rng = np.random.default_rng(32)
        for n in (1, 2, 3):
            V = random_gaussian_state(n, 2.0 * n, 'pure', rng).cov
            Omega = omega(n)
            assert_allclose(np.linalg.inv(V), Omega @ V @ Omega.T, atol=1e-8 * operator_norm(V))

    def test_mixed_inverse_is_not(self):
        V = np.diag([3.0, 3.0])
        self.assertFalse(np.allclose(np.linalg.inv(V), omega(1) @ V @ omega(1).T))

    def test_inverse_norm_is_bounded_by_norm(self):
        rng = np.random.default_rng(33)
        for purity in ('mixed', 'pure'):
            for n in (1, 2, 3):
                V = random_gaussian_state(n, 3.0 * n, purity, rng).cov
                self.assertLessEqual(operator_norm(np.linalg.inv(V)), operator_norm(V) * (1 + 1e-9))

    @tag('slow')
    def test_random_sweep(self):
        rng = np.random.default_rng(34)
        for _ in range(300):
            n = int(rng.integers(1, 5))
            cap = n * float(rng.uniform(0.6, 4.0))
            pure = random_gaussian_state(n, cap, 'pure', rng).cov
            Omega = omega(n)
            assert_allclose(np.linalg.inv(pure), Omega @ pure @ Omega.T, atol=1e-8 * operator_norm(pure))
            S = random_symplectic(n, float(rng.uniform(1.0, 4.0)), rng)
            self.assertAlmostEqual(operator_norm(np.linalg.inv(S)), operator_norm(S), delta=1e-8 * operator_norm(S))
            for V in (pure, random_gaussian_state(n, cap, 'mixed', rng).cov):
                self.assertLessEqual(operator_norm(np.linalg.inv(V)), operator_norm(V) * (1 + 1e-9))
