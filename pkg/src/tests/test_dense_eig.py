import unittest

import numpy as np

from domain.exceptions.exceptions import DimensionMismatchException
from domain.services.dense_eig import eig_real, hermitian_smallest_eigvec, refined_s


class TestEigReal(unittest.TestCase):
    """Test the sorted dense eigensolver"""

    def test_rotation_lists_positive_imaginary_first(self):
        """Test [[0,1],[-1,0]] gives +i before -i"""
        pairs = eig_real(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        np.testing.assert_allclose(pairs.values, [1j, -1j], atol=1e-14)

    def test_diagonal(self):
        """Test diag(3,1) gives 3, 1 with unit coordinate vectors"""
        # Act
        pairs = eig_real(np.diag([1.0, 3.0]))

        # Assert
        np.testing.assert_allclose(pairs.values, [3.0, 1.0])
        np.testing.assert_allclose(np.abs(pairs.leading_vector), [0.0, 1.0], atol=1e-14)
        self.assertEqual(pairs.leading_value, 3.0)

    def test_sorted_by_real_part(self):
        """Test values are ordered by decreasing real part and satisfy M y = lambda y"""
        # Arrange
        rng = np.random.default_rng(11)
        M = rng.standard_normal((8, 8))

        # Act
        pairs = eig_real(M)

        # Assert
        self.assertTrue(np.all(np.diff(pairs.values.real) <= 0))
        for value, vector in zip(pairs.values, pairs.vectors.T):
            np.testing.assert_allclose(M @ vector, value * vector, atol=1e-12)

    def test_rejects_non_square(self):
        """Test a non-square matrix is rejected"""
        with self.assertRaises(DimensionMismatchException):
            eig_real(np.ones((2, 3)))


class TestHermitianSmallestEigvec(unittest.TestCase):
    """Test the smallest eigenpair of a Hermitian matrix"""

    def test_diagonal(self):
        """Test diag(2, 0.5) gives (0.5, e2)"""
        value, vector = hermitian_smallest_eigvec(np.diag([2.0, 0.5]))
        self.assertAlmostEqual(value, 0.5)
        np.testing.assert_allclose(np.abs(vector), [0.0, 1.0], atol=1e-14)

    def test_identity(self):
        """Test I gives eigenvalue 1"""
        value, _ = hermitian_smallest_eigvec(np.eye(4))
        self.assertAlmostEqual(value, 1.0)

    def test_non_hermitian_input(self):
        """Test an asymmetric matrix fails the internal assertion"""
        with self.assertRaises(AssertionError):
            hermitian_smallest_eigvec(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestRefinedS(unittest.TestCase):
    """Test the refined combination vector"""

    def setUp(self):
        A = np.diag([5.0, 1.0, 0.0])
        self.V = np.eye(3)[:, :2]
        self.W = A @ self.V
        self.H = self.V.T @ self.W

    def test_exact_eigenvector_in_span(self):
        """Test theta = 5 gives s = +-e1 with sigma_min = 0"""
        s, sigma = refined_s(self.V, self.W, self.H, 5.0)
        np.testing.assert_allclose(np.abs(s), [1.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(sigma, 0.0, places=7)

    def test_shifted_theta(self):
        """Test theta = 4 gives s = +-e1 with sigma_min = 1"""
        s, sigma = refined_s(self.V, self.W, self.H, 4.0)
        np.testing.assert_allclose(np.abs(s), [1.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(sigma, 1.0, places=12)

    def test_incremental_cross_product(self):
        """Test a supplied W^T W gives the same vector"""
        s_direct, _ = refined_s(self.V, self.W, self.H, 4.0)
        s_supplied, _ = refined_s(self.V, self.W, self.H, 4.0, WtW=self.W.T @ self.W)
        np.testing.assert_allclose(np.abs(s_direct), np.abs(s_supplied))

    def test_supplied_w_transpose_v_is_used(self):
        """Test a supplied W^T V replaces the product W^T V"""
        # Arrange
        WtV = self.W.T @ self.V
        swapped = WtV[::-1, ::-1].copy()

        # Act
        s_supplied, sigma_supplied = refined_s(self.V, self.W, self.H, 4.0, WtV=WtV)
        s_swapped, _ = refined_s(self.V, self.W, self.H, 4.0, WtV=swapped)

        # Assert
        np.testing.assert_allclose(np.abs(s_supplied), [1.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(sigma_supplied, 1.0, places=12)
        self.assertGreater(abs(s_swapped[1]), 0.5)

    def test_complex_theta_returns_real_unit_vector(self):
        """Test a complex shift gives a real unit vector"""
        s, _ = refined_s(self.V, self.W, self.H, 4.0 + 0.5j)
        self.assertFalse(np.iscomplexobj(s))
        self.assertAlmostEqual(np.linalg.norm(s), 1.0)

    def test_empty_basis(self):
        """Test k = 0 is rejected"""
        with self.assertRaises(DimensionMismatchException):
            refined_s(np.zeros((3, 0)), np.zeros((3, 0)), np.zeros((0, 0)), 1.0)


if __name__ == '__main__':
    unittest.main()
