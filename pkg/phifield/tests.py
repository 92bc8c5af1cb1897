import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import assume, given, settings as hyp_settings, strategies as st

from coeffs.services import make_constant_family, make_custom_family, make_zero_family
from fourterm.exceptions import InterlacingViolation, OnCutError
from measures.services import upsilon_unit_density
from .models import BRANCH_RULES
from .services import (
    analyticity_check, branch_point_growth_check, identity_check, jump_check, jump_limit,
    jump_m, laurent_coefficients, oracle_agreement_check, phi, phi_cubic_oracle,
    phi_prime_over_phi, random_off_cut_points, ratio_asymptotics_check, scaled_log_derivative,
    scaled_phi, stieltjes_identity_check, tail_check,
)
from .utils import cbrt_branch, distance_to_cut, sqrt_branch, stieltjes_moments


class BranchRuleTests(SimpleTestCase):

    def test_sqrt_of_negative_real_is_upper(self):
        self.assertAlmostEqual(sqrt_branch(-4.0), 2j, places=14)

    def test_sqrt_just_below_positive_axis_is_negative(self):
        # theta close to 2 pi gives a root close to -sqrt(rho)
        root = sqrt_branch(complex(4.0, -1e-12))
        self.assertAlmostEqual(root.real, -2.0, places=10)

    def test_cbrt_of_negative_real(self):
        self.assertAlmostEqual(cbrt_branch(-8.0), 2 * complex(0.5, math.sqrt(3) / 2), places=14)
        self.assertAlmostEqual(cbrt_branch(complex(-8.0, -0.0)), cbrt_branch(-8.0), places=14)

    def test_describe(self):
        self.assertEqual(BRANCH_RULES.describe()['sqrt'], 'theta in [0, 2pi)')


class PhiTests(SimpleTestCase):

    def test_real_far_field(self):
        value = phi(1e6).phi
        self.assertLess(abs(value.imag), 1e-15)
        self.assertAlmostEqual(value.real * 1e6, 1.0, delta=1e-5)

    def test_negative_real_axis_is_real(self):
        for x in (-0.5, -1.0, -10.0):
            value = phi(x).phi
            self.assertEqual(value.imag, 0.0)
            self.assertLess(value.real, 0.0)

    def test_matches_oracle_at_minus_one(self):
        self.assertAlmostEqual(phi(-1.0).phi, phi_cubic_oracle(-1.0), delta=1e-10)

    def test_phi_three_is_the_cubic_root_near_one_third(self):
        roots = np.roots([(4 / 27) ** 3, 3 * (4 / 27) ** 2, 4 / 9 - 3, 1])
        nearest = roots[np.argmin(np.abs(roots - 1 / 3))]
        self.assertAlmostEqual(phi(3.0).phi, complex(nearest), delta=1e-12)

    def test_log_derivative_matches_difference_quotient(self):
        z, h = complex(2.0, 1.0), 1e-6
        numeric = (phi(z + h).phi - phi(z - h).phi) / (2 * h) / phi(z).phi
        self.assertAlmostEqual(phi_prime_over_phi(z), numeric, delta=1e-8)

    def test_on_cut(self):
        for z in (0.5, 0.0, 1.0, complex(0.3, 1e-15)):
            with self.assertRaises(OnCutError):
                phi(z)
            with self.assertRaises(OnCutError):
                phi_cubic_oracle(z)

    def test_conjugate_symmetry(self):
        z = complex(0.4, 0.7)
        self.assertAlmostEqual(phi(z.conjugate()).phi, phi(z).phi.conjugate(), delta=1e-13)

    @hyp_settings(max_examples=200, deadline=None)
    @given(st.floats(-100, 100), st.floats(-100, 100))
    def test_algebraic_identity(self, x, y):
        z = complex(x, y)
        assume(distance_to_cut(z) >= 0.01)
        self.assertLessEqual(phi(z).identity_residual, 1e-12)

    def test_scaled_forms(self):
        z = complex(3.0, 1.0)
        self.assertEqual(scaled_phi(z, 0), 1 / z)
        self.assertEqual(scaled_log_derivative(z, 0), -1 / z)
        self.assertAlmostEqual(scaled_phi(z, 2.0), phi(z / 2).phi / 2, places=15)
        self.assertAlmostEqual(scaled_log_derivative(z, 2.0), phi_prime_over_phi(z / 2) / 2, places=15)


class CubicOracleTests(SimpleTestCase):

    def test_large_radius(self):
        z = 1e8
        self.assertLessEqual(abs(z * phi_cubic_oracle(z) - 1.0), 1e-8)

    def test_agrees_with_direct_formula(self):
        for z in random_off_cut_points(count=60, seed=7, lo=0.1):
            self.assertAlmostEqual(phi(z).phi, phi_cubic_oracle(z), delta=1e-10)


class LaurentTests(SimpleTestCase):

    def test_leading_coefficients(self):
        np.testing.assert_allclose(laurent_coefficients(3), [0.0, 1.0, 4 / 9, 64 / 243], rtol=1e-14)

    def test_moments(self):
        expected = [1.0, 4 / 9, 80 / 243, 5376 / 19683, 126720 / 531441]
        np.testing.assert_allclose(stieltjes_moments(4), expected, rtol=1e-14)

    def test_rejects_empty_order(self):
        with self.assertRaises(ValueError):
            laurent_coefficients(0)


class JumpTests(SimpleTestCase):

    def test_closed_form_is_imaginary(self):
        for x in np.linspace(0.05, 0.95, 19):
            m = jump_m(x)
            self.assertEqual(m.real, 0.0)
            self.assertGreater(m.imag, 0.0)

    def test_matches_density(self):
        self.assertAlmostEqual((jump_m(0.3) / (2j * math.pi)).real, upsilon_unit_density(0.3),
                               delta=1e-12 * upsilon_unit_density(0.3))

    def test_extrapolated_limit(self):
        for x in (0.1, 0.5, 0.9):
            self.assertLessEqual(abs(jump_limit(x) - jump_m(x)) / abs(jump_m(x)), 1e-4)

    def test_outside_interval(self):
        with self.assertRaises(ValueError):
            jump_m(1.0)


class CheckTests(SimpleTestCase):

    def test_identity_check(self):
        report = identity_check(random_off_cut_points(count=200, seed=3))
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 200)

    def test_oracle_agreement_check(self):
        report = oracle_agreement_check(random_off_cut_points(count=40, seed=11, lo=0.1))
        self.assertTrue(report.passed, report.achieved)

    def test_tail_check(self):
        report = tail_check()
        self.assertTrue(report.passed, report.details)
        self.assertAlmostEqual(report.details['a2_direct'], 4 / 9, delta=1e-6)
        self.assertAlmostEqual(report.details['a2_oracle'], 4 / 9, delta=1e-6)
        self.assertEqual(len(report.table), 16)

    def test_analyticity_check(self):
        self.assertTrue(analyticity_check().passed)

    def test_jump_check(self):
        report = jump_check()
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 19)

    def test_growth_check(self):
        report = branch_point_growth_check()
        self.assertTrue(report.passed, report.details)
        self.assertAlmostEqual(report.details['slope_zero'], -2 / 3, delta=0.05)
        self.assertAlmostEqual(report.details['slope_one'], -0.5, delta=0.05)
        self.assertAlmostEqual(report.details['slope_infinity'], -1.0, delta=0.01)

    def test_stieltjes_identity_examples(self):
        report = stieltjes_identity_check([2.0, 1j, 1e6])
        self.assertLessEqual(report.achieved, 1e-8)
        self.assertLessEqual(report.details['reflection_err'], 1e-13)
        self.assertAlmostEqual(phi_prime_over_phi(1e6) * 1e6, -1.0, delta=1e-5)

    def test_stieltjes_identity_grid(self):
        report = stieltjes_identity_check()
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 50)

    def test_stieltjes_grid_too_close(self):
        with self.assertRaises(ValueError):
            stieltjes_identity_check([complex(0.5, 0.01)])

    def test_off_cut_points_distance_range(self):
        zs = random_off_cut_points(count=500, seed=5)
        distances = np.array([distance_to_cut(z) for z in zs])
        self.assertTrue(np.all(distances >= 0.01 * (1 - 1e-12)))
        self.assertTrue(np.all(distances <= 100 * (1 + 1e-12)))
        np.testing.assert_array_equal(zs, random_off_cut_points(count=500, seed=5))


class RatioAsymptoticsTests(SimpleTestCase):

    def test_constant_family(self):
        report = ratio_asymptotics_check(make_constant_family(1), points=(3.0, -1.0),
                                         validate=False)
        self.assertTrue(report.passed, report.details)
        self.assertEqual(len(report.table), 8)
        self.assertLessEqual(report.details['derivative_top'], 1e-3)

    def test_validated_small_schedule(self):
        report = ratio_asymptotics_check(make_constant_family(2), points=(5.0,), n_schedule=(5, 10),
                                         overrides={'ratio': 1.0})
        self.assertTrue(report.passed)

    def test_point_too_close_to_zeros(self):
        with self.assertRaises(ValueError):
            ratio_asymptotics_check(make_constant_family(1), points=(0.5 + 0.01j,), n_schedule=(5, 10))

    def test_zero_family_is_exact(self):
        report = ratio_asymptotics_check(make_zero_family(), points=(3.0, -1.0, 1.5 + 1.5j))
        self.assertEqual(report.name, 'ratio_zero_family')
        self.assertTrue(report.passed)
        self.assertEqual(report.achieved, 0.0)

    def test_interlacing_violation_propagates(self):
        family = make_custom_family({
            'name': 'complex-pair',
            'alpha': 1,
            'coefficients': {'N': 2, 'b': [0, 0, 0], 'c': [0, -1, 0], 'd': [0, 0, 0]},
        })
        with self.assertRaises(InterlacingViolation):
            ratio_asymptotics_check(family, points=(3.0,), n_schedule=(1,), N=2)
