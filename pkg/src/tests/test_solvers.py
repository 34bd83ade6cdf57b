import unittest

import numpy as np

from domain.entities.linalg import CsrMatrix, MatvecCounter
from domain.entities.problem import PdeCase, PdeKind
from domain.entities.solver import FilterPolicy, Method, SolverConfig, SStrategy
from domain.exceptions.exceptions import NotConvergedException
from domain.services.dense_eig import eig_real
from domain.services.problems import assemble_pde
from domain.services.solvers import ac_solve, cd_solve, fks_solve, rfks_solve, solve


def ones(n: int) -> np.ndarray:
    return np.ones(n) / np.sqrt(n)


class TestSmallDiagonal(unittest.TestCase):
    """Test every method on diag(3, 2, 1)"""

    def setUp(self):
        self.A = CsrMatrix.from_dense(np.diag([3.0, 2.0, 1.0]))

    def test_rfks(self):
        """Test RFKS converges to 3 within a few steps"""
        # Arrange
        config = SolverConfig(method=Method.RFKS, m=2, n_r=10, tol=1e-12)

        # Act
        eigenvalue, eigenvector, history = rfks_solve(self.A, config, ones(3))

        # Assert
        self.assertLessEqual(abs(eigenvalue - 3), 1e-10)
        np.testing.assert_allclose(np.abs(eigenvector), [1.0, 0.0, 0.0], atol=1e-8)
        self.assertLessEqual(history[-1].step, 5)

    def test_all_methods(self):
        """Test FKS, CD and AC converge to 3"""
        for method in (Method.FKS, Method.CD, Method.AC):
            with self.subTest(method=method):
                config = SolverConfig(method=method, m=2, n_r=3 if method is Method.AC else 10, tol=1e-12)
                result = solve(self.A, config, ones(3))
                self.assertTrue(result.converged)
                self.assertLessEqual(abs(result.eigenvalue - 3), 1e-10)

    def test_ac_first_cycle_is_exact(self):
        """Test AC with n_r = n converges after one cycle of n + m products"""
        config = SolverConfig(method=Method.AC, m=4, n_r=3)
        result = ac_solve(self.A, config, ones(3))
        self.assertEqual(result.iterations, 1)
        self.assertEqual(result.mv_total, 3 + 4)

    def test_first_records_coincide(self):
        """Test RFKS, FKS and CD share the start, and RFKS and CD the identity k = 1 step"""
        # Arrange
        config = SolverConfig(method=Method.RFKS, m=2, n_r=10, tol=1e-12)

        # Act
        relaxed, fixed, davidson = (solver(self.A, config, ones(3)) for solver in (rfks_solve, fks_solve, cd_solve))

        # Assert
        for result in (fixed, davidson):
            self.assertEqual(result.history[0].trajectory(), relaxed.history[0].trajectory())
        self.assertEqual(davidson.history[1].trajectory(), relaxed.history[1].trajectory())
        self.assertIsNone(relaxed.history[1].filter_used)

    def test_fks_filters_its_first_extension(self):
        """Test FKS spends the warmup and one filter on its k = 1 step"""
        config = SolverConfig(method=Method.FKS, m=2, n_r=10, tol=1e-12)
        result = fks_solve(self.A, config, ones(3))
        first = result.history[1]
        self.assertIsNotNone(first.filter_used)
        self.assertEqual(first.mv_total, 1 + 3 + 2 + 1)

    def test_separated_spectrum(self):
        """Test all methods on a diagonal matrix with a gap of 0.5"""
        rng = np.random.default_rng(6)
        values = np.concatenate([[5.0], rng.uniform(-5.0, 4.5, 59)])
        A = CsrMatrix.from_dense(np.diag(values))
        for method in Method:
            with self.subTest(method=method):
                config = SolverConfig(method=method, m=10, n_r=15, max_outer=500)
                result = solve(A, config, ones(60))
                self.assertLessEqual(abs(result.eigenvalue - 5.0), 1e-8)

    def test_separated_spectra_over_seeds(self):
        """Test every method converges on twenty random separated diagonal spectra"""
        for seed in range(20):
            # Arrange
            rng = np.random.default_rng([20, seed])
            n = int(rng.integers(20, 101))
            values = np.concatenate([[5.0], rng.uniform(-5.0, 4.5, n - 1)])
            A = CsrMatrix.from_dense(np.diag(rng.permutation(values)))
            for method in Method:
                with self.subTest(seed=seed, n=n, method=method.value):
                    config = SolverConfig(method=method, m=10, n_r=15, max_outer=500)

                    # Act
                    result = solve(A, config, ones(n))

                    # Assert
                    self.assertTrue(result.converged)
                    self.assertLessEqual(abs(result.eigenvalue - 5.0), 1e-8)

    def test_ac_breakdown_cycle_is_short(self):
        """Test an Arnoldi breakdown ends AC after fewer than n_r + m products"""
        # Arrange
        A = CsrMatrix.from_dense(np.diag([3.0, 2.0] + [1.0] * 8))
        config = SolverConfig(method=Method.AC, m=4, n_r=8)

        # Act
        result = ac_solve(A, config, ones(10))

        # Assert
        self.assertTrue(result.converged)
        self.assertEqual(result.iterations, 1)
        self.assertEqual(result.mv_total, 3 + 4)
        self.assertAlmostEqual(result.eigenvalue, 3.0)
        self.assertEqual(result.history[-1].res_norm, 0.0)


class TestConvectionDiffusion(unittest.TestCase):
    """Test the methods on the N = 20 convection-diffusion matrices"""

    @classmethod
    def setUpClass(cls):
        cls.matrices = {kind: assemble_pde(PdeCase(kind, 20)) for kind in PdeKind}
        cls.oracles = {kind: eig_real(A.to_dense()).leading_value for kind, A in cls.matrices.items()}

    def test_dense_oracle(self):
        """Test every method finds the rightmost eigenvalue"""
        for kind, A in self.matrices.items():
            for method in Method:
                with self.subTest(case=kind.value, method=method.value):
                    # Arrange
                    config = SolverConfig(method=method, m=20, n_r=40)

                    # Act
                    result = solve(A, config, ones(A.n))

                    # Assert
                    self.assertTrue(result.converged)
                    self.assertLessEqual(abs(result.eigenvalue - self.oracles[kind]),
                                         1e-8 * A.frobenius_norm())

    def test_step_invariants(self):
        """Test product bookkeeping, orthonormality and residuals at every RFKS step"""
        # Arrange
        A = self.matrices[PdeKind.CASE_I]
        dense = A.to_dense()
        config = SolverConfig(method=Method.RFKS, m=20, n_r=40)
        shadow = MatvecCounter()
        seen = []

        def observe(state, record):
            x = state.V.data @ state.y_cur
            residual = np.linalg.norm(dense @ x - state.theta_cur * x)
            seen.append((record, state.V.orthonormality_error(), state.res_norm, residual))

        # Act
        result = rfks_solve(A, config, ones(A.n), counter=shadow, on_step=observe)

        # Assert
        self.assertEqual(shadow.count, result.mv_total)
        self.assertEqual(seen[0][0].mv_total, 1)
        for (previous, *_), (record, orthonormality, res_norm, residual) in zip(seen, seen[1:]):
            expected = 1 if record.filter_used is None else record.filter_used.m + 1
            self.assertEqual(record.mv_total - previous.mv_total, expected)
            self.assertLessEqual(orthonormality, 1e-12)
            self.assertAlmostEqual(res_norm, residual, delta=1e-10 * residual + 1e-13 * A.frobenius_norm())

    def test_frozen_filter_collapses_to_fks(self):
        """Test RFKS with the last vector and a frozen filter is FKS"""
        # Arrange
        A = self.matrices[PdeKind.CASE_I]
        rfks_config = SolverConfig(method=Method.RFKS, m=20, n_r=40, s_strategy=SStrategy.last_vector(),
                                   filter_policy=FilterPolicy.WARMUP_FROZEN)
        fks_config = SolverConfig(method=Method.FKS, m=20, n_r=40)

        # Act
        relaxed = rfks_solve(A, rfks_config, ones(A.n))
        fixed = fks_solve(A, fks_config, ones(A.n))

        # Assert
        self.assertEqual([r.trajectory() for r in relaxed.history], [r.trajectory() for r in fixed.history])

    def test_fks_filter_constant_per_cycle(self):
        """Test the FKS filter changes only at restarts"""
        A = self.matrices[PdeKind.CASE_II]
        result = fks_solve(A, SolverConfig(method=Method.FKS, m=20, n_r=40), ones(A.n))
        current = None
        for record in result.history:
            if record.restarted:
                current = None
            elif record.filter_used is not None:
                current = current or record.filter_used
                self.assertEqual(record.filter_used, current)

    def test_ac_products_per_cycle(self):
        """Test AC uses exactly n_r + m products per cycle"""
        A = self.matrices[PdeKind.CASE_I]
        result = ac_solve(A, SolverConfig(method=Method.AC, m=20, n_r=20), ones(A.n))
        self.assertEqual(result.mv_total, result.iterations * (20 + 20))

    def test_not_converged_carries_result(self):
        """Test max_outer exhaustion raises with the partial result"""
        A = self.matrices[PdeKind.CASE_I]
        config = SolverConfig(method=Method.RFKS, m=5, n_r=40, max_outer=2)
        with self.assertRaises(NotConvergedException) as context:
            rfks_solve(A, config, ones(A.n))
        result = context.exception.result
        self.assertFalse(result.converged)
        self.assertEqual(len(result.history), 3)
        self.assertTrue(np.all(np.diff([r.mv_total for r in result.history]) > 0))


class TestMethodOrdering(unittest.TestCase):
    """Test the product counts order the methods as in the experiments"""

    def test_case_one_n60(self):
        """Test MV(RFKS) <= MV(FKS) and MV(RFKS) <= MV(AC) on Case I, N = 60"""
        A = assemble_pde(PdeCase(PdeKind.CASE_I, 60))
        v0 = ones(A.n)
        mv = {
            method: solve(A, SolverConfig(method=method, m=60, n_r=20 if method is Method.AC else 40), v0).mv_total
            for method in (Method.RFKS, Method.FKS, Method.AC)
        }
        self.assertLessEqual(mv[Method.RFKS], mv[Method.FKS])
        self.assertLessEqual(mv[Method.RFKS], mv[Method.AC])


if __name__ == '__main__':
    unittest.main()
