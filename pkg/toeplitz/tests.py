import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hyp_settings, strategies as st

from coeffs.services import make_constant_family
from polycore.services import eval_P, recurrence_matrix
from .models import ToeplitzSpec
from .services import (
    charpoly_identity_check, eigenvalues, extended_matrix, factor_matrix, laplace_det,
    qn_at_zero, qn_closed_form_check, scaling_equivariance_check, tn_nonsingular_check,
    toeplitz_limit_check, toeplitz_matrix, total_nonnegativity_sampled,
    total_nonnegativity_smalln,
)


class ToeplitzSpecTests(SimpleTestCase):

    def test_band(self):
        spec = ToeplitzSpec(27 / 4, 5)
        self.assertAlmostEqual(spec.beta, 1.0, places=15)
        np.testing.assert_allclose(spec.band, (3.0, 3.0, 1.0), rtol=1e-15)

    def test_rejects_nonpositive_alpha(self):
        with self.assertRaises(ValueError):
            ToeplitzSpec(0.0, 3)
        with self.assertRaises(ValueError):
            ToeplitzSpec(1.0, 0)


class MatrixTests(SimpleTestCase):

    def test_toeplitz_matrix_layout(self):
        T = toeplitz_matrix(27 / 4, 4)
        expected = np.array([
            [3, 1, 0, 0],
            [3, 3, 1, 0],
            [1, 3, 3, 1],
            [0, 1, 3, 3],
        ], dtype=float)
        np.testing.assert_allclose(T, expected, atol=1e-14)

    def test_one_by_one(self):
        T = toeplitz_matrix(1.0, 1)
        self.assertEqual(T.shape, (1, 1))
        self.assertAlmostEqual(T[0, 0], 4 / 9, places=15)

    def test_matches_recurrence_matrix(self):
        np.testing.assert_allclose(toeplitz_matrix(2.0, 6),
                                   recurrence_matrix(make_constant_family(2.0), 6, 6), atol=1e-15)

    def test_extended_is_cube_of_factor(self):
        beta = 4 / 27
        T3 = extended_matrix(1.0, 3)
        self.assertEqual(T3.shape, (4, 4))
        np.testing.assert_allclose(T3[:, 0], [1, 3 * beta, 3 * beta ** 2, beta ** 3], rtol=1e-14)
        np.testing.assert_allclose(T3, np.linalg.matrix_power(factor_matrix(1.0, 3), 3))

    def test_toeplitz_is_block_of_extended(self):
        n = 5
        np.testing.assert_allclose(extended_matrix(2.0, n)[1:, :n], toeplitz_matrix(2.0, n), atol=1e-14)


class QnAtZeroTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(qn_at_zero(1.0, 0), 1.0)
        self.assertAlmostEqual(qn_at_zero(27 / 4, 2), 6.0, places=13)
        self.assertAlmostEqual(qn_at_zero(27 / 4, 1), -(1 + 1.5 + 0.5), places=13)

    def test_matches_recurrence(self):
        for alpha in (1.0, 2.0, 27 / 4):
            family = make_constant_family(alpha)
            for n in (1, 7, 30, 50):
                recurrence = eval_P(family, n, n, 0.0).to_float()
                self.assertAlmostEqual(recurrence / qn_at_zero(alpha, n), 1.0, delta=1e-12)

    def test_closed_form_check(self):
        report = qn_closed_form_check()
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 3 * 51)

    def test_negative_degree(self):
        with self.assertRaises(ValueError):
            qn_at_zero(1.0, -1)

    def test_nonsingular(self):
        self.assertEqual([tn_nonsingular_check(1.0, n) for n in (1, 2, 3)], [True, True, True])
        self.assertTrue(tn_nonsingular_check(27 / 4, 10))

    def test_determinant_sign(self):
        for n in (1, 2, 3, 6):
            det = np.linalg.det(toeplitz_matrix(27 / 4, n))
            self.assertAlmostEqual(det, (-1) ** n * qn_at_zero(27 / 4, n), delta=1e-10 * abs(det))


class CharpolyTests(SimpleTestCase):

    def test_laplace_matches_numpy(self):
        rng = np.random.default_rng(1)
        M = rng.normal(size=(6, 6))
        self.assertAlmostEqual(laplace_det(M), np.linalg.det(M), delta=1e-10)

    def test_identity(self):
        for alpha in (1.0, 27 / 4):
            report = charpoly_identity_check(alpha)
            self.assertTrue(report.passed, report.achieved)


class TotalNonnegativityTests(SimpleTestCase):

    def test_factor_minors_at_unit_beta(self):
        report = total_nonnegativity_smalln(27 / 4, 2)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.table.loc[0, 'min_minor'], 0.0, places=14)

    def test_extended_four(self):
        report = total_nonnegativity_smalln(1.0, 4)
        self.assertTrue(report.passed, report.achieved)
        # sum over k of C(5, k)**2
        self.assertEqual(int(report.table.loc[1, 'minors']), 251)

    def test_exhaustive_limit(self):
        with self.assertRaises(ValueError):
            total_nonnegativity_smalln(1.0, 7)

    def test_sampled(self):
        report = total_nonnegativity_sampled(1.0, 20, samples=500, seed=4)
        self.assertTrue(report.passed, report.achieved)
        self.assertTrue(report.details['sampled'])


class EigenvalueTests(SimpleTestCase):

    def test_single_eigenvalue(self):
        self.assertAlmostEqual(eigenvalues(1.0, 1).zeros[0], 4 / 9, places=14)

    def test_positive_and_below_alpha_bound(self):
        zs = eigenvalues(2.0, 30)
        self.assertTrue(np.all(zs.zeros > 0))
        self.assertTrue(np.all(zs.zeros < 2.0 * (1 + 4 / 27) ** 3))

    def test_match_numpy_eigenvalues(self):
        zs = eigenvalues(1.0, 8).zeros
        reference = np.sort(np.linalg.eigvals(toeplitz_matrix(1.0, 8)).real)
        np.testing.assert_allclose(zs, reference, atol=1e-7)

    @hyp_settings(max_examples=10, deadline=None)
    @given(st.floats(0.1, 10.0), st.integers(2, 25))
    def test_scaling_equivariance(self, alpha, n):
        report = scaling_equivariance_check(alpha, n)
        self.assertTrue(report.passed, report.achieved)

    def test_limit_check(self):
        report = toeplitz_limit_check(1.0, (40, 80), overrides={'ks_constant': 0.25})
        self.assertTrue(report.passed, report.details)
        self.assertEqual(list(report.table.columns)[-1], 'min_eigenvalue')
        self.assertTrue(report.details['positive'])
