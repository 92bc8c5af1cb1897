import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hyp_settings, strategies as st

from coeffs.services import make_constant_family, make_laguerre1_family, make_zero_family
from fourterm.exceptions import NearPoleError
from .models import ScaledValue
from .services import (
    eval_P, eval_P_and_dP, eval_P_many, eval_ratio_seq, log_derivative_ratio,
    log_derivative_step, recurrence_matrix,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


class ScaledValueTests(SimpleTestCase):

    def test_zero_representation(self):
        self.assertTrue(ScaledValue.from_float(0.0).is_zero)
        with self.assertRaises(ValueError):
            ScaledValue(0, 1.0)
        with self.assertRaises(ValueError):
            ScaledValue(1, -math.inf)

    @given(finite, finite)
    @hyp_settings(max_examples=200, deadline=None)
    def test_product_matches_float(self, a, b):
        product = ScaledValue.from_float(a) * ScaledValue.from_float(b)
        self.assertAlmostEqual(product.to_float(), a * b, delta=1e-12 * abs(a * b) + 1e-300)

    @given(finite, finite)
    @hyp_settings(max_examples=200, deadline=None)
    def test_sum_matches_float(self, a, b):
        total = ScaledValue.from_float(a) + ScaledValue.from_float(b)
        self.assertAlmostEqual(total.to_float(), a + b, delta=1e-12 * max(abs(a), abs(b)) + 1e-300)

    def test_no_overflow_for_huge_magnitudes(self):
        big = ScaledValue(1, 5000.0)
        product = big * big
        self.assertEqual(product.log_mag, 10000.0)
        self.assertEqual(product.to_float(), math.inf)
        self.assertEqual((big - big).sign, 0)


class EvalPTests(SimpleTestCase):

    def setUp(self):
        self.unit_beta = make_constant_family(27 / 4)

    def test_degree_zero_is_one(self):
        self.assertEqual(eval_P(self.unit_beta, 0, 1, 17.5), ScaledValue(1, 0.0))

    def test_linear_vanishes_at_b0(self):
        self.assertEqual(eval_P(self.unit_beta, 1, 1, 3.0).sign, 0)

    def test_cubic_at_origin(self):
        value = eval_P(self.unit_beta, 3, 1, 0.0)
        self.assertEqual(value.sign, -1)
        self.assertAlmostEqual(value.log_mag, math.log(10.0), places=13)

    def test_expanded_cubic(self):
        for x in (-1.0, 0.5, 2.0, 7.25):
            self.assertAlmostEqual(
                eval_P(self.unit_beta, 3, 1, x).to_float(),
                x ** 3 - 9 * x ** 2 + 21 * x - 10,
                places=10,
            )

    def test_monic_leading_behaviour(self):
        family = make_constant_family(1)
        x = 1e6
        for n in (1, 10, 50):
            value = eval_P(family, n, n, x)
            self.assertAlmostEqual(value.log_mag - n * math.log(x), 0.0, delta=1e-4)

    def test_no_overflow_at_large_degree(self):
        family = make_constant_family(1)
        sign, log_mag = eval_P_many(family, 2000, 2000, [10.0, -10.0, 1e6])
        self.assertTrue(np.all(np.isfinite(log_mag)))
        self.assertEqual(list(sign), [1, 1, 1])

    def test_vector_matches_scalar(self):
        family = make_laguerre1_family()
        xs = np.linspace(-1.0, 5.0, 7)
        sign, log_mag = eval_P_many(family, 25, 20, xs)
        for x, s, lm in zip(xs, sign, log_mag):
            value = eval_P(family, 25, 20, x)
            self.assertEqual(value.sign, s)
            self.assertAlmostEqual(value.log_mag, lm, places=12)


class DerivativeTests(SimpleTestCase):

    def test_linear_derivative_is_one(self):
        family = make_constant_family(1)
        for x in (-3.0, 0.0, 0.7, 100.0):
            _, dP = eval_P_and_dP(family, 1, 1, x)
            self.assertEqual(dP.to_float(), 1.0)

    def test_quadratic_derivative(self):
        family = make_constant_family(27 / 4)
        for x in (-2.0, 1.0, 4.5):
            _, dP = eval_P_and_dP(family, 2, 1, x)
            self.assertAlmostEqual(dP.to_float(), 2 * x - 6.0, places=12)

    def test_matches_central_difference(self):
        family = make_laguerre1_family()
        n, N = 12, 10
        for x in (-0.8, 0.37, 2.2, 6.0):
            h = 1e-6 * max(1.0, abs(x))
            forward = eval_P(family, n, N, x + h).to_float()
            backward = eval_P(family, n, N, x - h).to_float()
            _, dP = eval_P_and_dP(family, n, N, x)
            fd = (forward - backward) / (2 * h)
            self.assertAlmostEqual(dP.to_float(), fd, delta=1e-6 * max(1.0, abs(fd)))


class RatioTests(SimpleTestCase):

    def test_first_ratio(self):
        family = make_constant_family(1)
        z = 2.0 + 0.5j
        state = eval_ratio_seq(family, 0, 1, z)
        self.assertAlmostEqual(state.r, z - 4 / 9, places=15)
        self.assertEqual(state.k, 1)

    def test_far_field_ratio(self):
        family = make_constant_family(1)
        for z in (1e6, -1e6, 1e6j, 7.0e5 + 7.0e5j):
            state = eval_ratio_seq(family, 300, 300, z)
            self.assertLessEqual(abs(state.inverse - 1 / z), 1e-9)

    def test_log_value_matches_scaled_evaluation(self):
        family = make_constant_family(1)
        for n in (5, 40, 100):
            for x in (2.0, -0.5, 11.0):
                state = eval_ratio_seq(family, n - 1, n, x)
                value = eval_P(family, n, n, x)
                self.assertAlmostEqual(state.log_magnitude, value.log_mag,
                                       delta=1e-9 * max(1.0, abs(value.log_mag)))

    def test_lower_bound_outside_zero_bound(self):
        family = make_constant_family(1)
        R = (1 + 4 / 27) ** 3
        for theta in np.linspace(0, 2 * np.pi, 17):
            z = 2 * R * np.exp(1j * theta)
            for n in (10, 100):
                state = eval_ratio_seq(family, n, n, z)
                self.assertGreaterEqual(abs(state.inverse), 1 / (2 * abs(z)))

    def test_near_pole_detected(self):
        family = make_constant_family(27 / 4)
        with self.assertRaises(NearPoleError):
            eval_ratio_seq(family, 3, 1, 3.0)

    def test_zero_family_ratio_is_exact(self):
        family = make_zero_family()
        z = 1.5 + 1.5j
        state = eval_ratio_seq(family, 50, 50, z)
        self.assertEqual(state.inverse, 1 / z)


class LogDerivativeTests(SimpleTestCase):

    def test_degree_one(self):
        family = make_constant_family(1)
        z = -0.3 + 0.2j
        self.assertAlmostEqual(log_derivative_ratio(family, 1, 1, z), 1 / (z - 4 / 9), places=14)

    def test_zero_sum_matches_recurrence(self):
        family = make_constant_family(27 / 4)
        roots = np.sort(np.roots([1, -9, 21, -10]).real)
        z = 1.0 + 2.0j
        from_zeros = log_derivative_ratio(family, 3, 1, z, zeros=roots)
        from_recurrence = log_derivative_ratio(family, 3, 1, z)
        self.assertAlmostEqual(from_zeros, from_recurrence, delta=1e-12)

    def test_step_is_difference_of_log_derivatives(self):
        family = make_constant_family(1)
        z = 3.0
        step = log_derivative_step(family, 10, 10, z)
        expected = 10 * log_derivative_ratio(family, 10, 10, z) - 11 * log_derivative_ratio(family, 11, 10, z)
        self.assertAlmostEqual(step, expected, delta=1e-12)


class RecurrenceMatrixTests(SimpleTestCase):

    def test_characteristic_polynomial(self):
        family = make_laguerre1_family()
        for n in range(1, 9):
            L = recurrence_matrix(family, n, 5)
            for x in (-1.0, 0.4, 3.0):
                det = np.linalg.det(x * np.eye(n) - L)
                expected = eval_P(family, n, 5, x).to_float()
                self.assertAlmostEqual(det, expected, delta=1e-10 * max(1.0, abs(expected)))

    def test_band_structure(self):
        L = recurrence_matrix(make_constant_family(27 / 4), 5, 1)
        self.assertTrue(np.allclose(np.diag(L), 3.0))
        self.assertTrue(np.allclose(np.diag(L, 1), 1.0))
        self.assertTrue(np.allclose(np.diag(L, -1), 3.0))
        self.assertTrue(np.allclose(np.diag(L, -2), 1.0))
        self.assertTrue(np.allclose(np.triu(L, 2), 0.0))
