import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hyp_settings, strategies as st

from coeffs.services import (
    make_constant_family, make_custom_family, make_laguerre1_family, make_macdonald_family,
    make_zero_family,
)
from fourterm.exceptions import InterlacingViolation
from polycore.services import eval_P, eval_P_and_dP, eval_ratio_seq
from .services import (
    count_sign_changes, empirical_measure, find_zeros, isolate_zeros_on_grid, scan_zeros,
    spectral_bound, validate_hypotheses, zero_cascade, zero_table, zeros_oracle_check,
)


def complex_pair_family():
    # P_2 = x**2 + 1
    return make_custom_family({
        'name': 'complex-pair',
        'alpha': 1,
        'coefficients': {'N': 2, 'b': [0, 0, 0], 'c': [0, -1, 0], 'd': [0, 0, 0]},
    })


class SpectralBoundTests(SimpleTestCase):

    def test_unit_beta(self):
        self.assertAlmostEqual(spectral_bound(make_constant_family(27 / 4), 10, 10), 8.0, places=14)

    def test_alpha_one_is_cube(self):
        self.assertAlmostEqual(spectral_bound(make_constant_family(1), 10, 10), (1 + 4 / 27) ** 3, places=14)

    def test_zero_family(self):
        self.assertEqual(spectral_bound(make_zero_family(), 10, 10), 1.0)


class ZeroCascadeTests(SimpleTestCase):

    def test_degree_one(self):
        family = make_constant_family(2.0)
        zs = zero_cascade(family, 1, 1)
        self.assertAlmostEqual(zs.zeros[0], family.working_b(0, 1), places=13)

    def test_unit_beta_cubic(self):
        zs = zero_cascade(make_constant_family(27 / 4), 3, 3)
        expected = np.sort(np.roots([1, -9, 21, -10]).real)
        np.testing.assert_allclose(zs.zeros, expected, atol=1e-12)
        self.assertAlmostEqual(zs.zeros[0], 0.6385, places=3)

    def test_constant_families_have_n_positive_zeros(self):
        for alpha in (1.0, 2.0, 27 / 4):
            zs = zero_cascade(make_constant_family(alpha), 40, 40)
            self.assertEqual(len(zs), 40)
            self.assertTrue(np.all(zs.zeros > 0))
            self.assertTrue(np.all(zs.zeros < zs.bound_R))
            self.assertTrue(np.all(np.diff(zs.zeros) > 0))
            self.assertTrue(zs.real_simple)

    def test_matches_grid_oracle(self):
        cases = [(make_constant_family(1), 12), (make_constant_family(27 / 4), 11),
                 (make_constant_family(2.0), 12)]
        for family, n in cases:
            cascade = zero_cascade(family, n, n).zeros
            oracle = isolate_zeros_on_grid(family, n, n)
            self.assertEqual(len(oracle), n)
            np.testing.assert_allclose(cascade, oracle, atol=1e-10)

    def test_sign_flips_across_each_zero(self):
        family = make_constant_family(1)
        zs = zero_cascade(family, 30, 30)
        for x in zs.zeros:
            eps = 1e-9 * max(1.0, abs(x))
            left = eval_P(family, 30, 30, x - eps).sign
            right = eval_P(family, 30, 30, x + eps).sign
            self.assertEqual(left * right, -1)
            _, dP = eval_P_and_dP(family, 30, 30, x)
            self.assertNotEqual(dP.sign, 0)

    def test_zero_product_matches_recurrence(self):
        family = make_constant_family(1)
        zs = zero_cascade(family, 100, 100)
        for x in (2.0, -0.5, 1.7):
            from_zeros = float(np.sum(np.log(np.abs(x - zs.zeros))))
            value = eval_P(family, 100, 100, x)
            state = eval_ratio_seq(family, 99, 100, x)
            self.assertAlmostEqual(from_zeros, value.log_mag, delta=1e-9 * abs(value.log_mag))
            self.assertAlmostEqual(state.log_magnitude, value.log_mag, delta=1e-9 * abs(value.log_mag))

    def test_ratio_bounded_by_distance_to_zeros(self):
        family = make_constant_family(1)
        n = 40
        top = zero_cascade(family, n + 1, n).zeros
        m, M = top[0], top[-1]
        rng = np.random.default_rng(7)
        for _ in range(50):
            z = complex(rng.uniform(-1, 2), rng.uniform(-1, 1))
            if m <= z.real <= M:
                dist = abs(z.imag)
            else:
                dist = min(abs(z - m), abs(z - M))
            if dist < 1e-3:
                continue
            state = eval_ratio_seq(family, n, n, z)
            self.assertLessEqual(abs(state.inverse), 1 / dist * (1 + 1e-12))

    def test_keeps_levels(self):
        zs = zero_cascade(make_constant_family(2.0), 6, 10, keep_levels=True)
        self.assertEqual([len(level) for level in zs.levels], [1, 2, 3, 4, 5, 6])

    def test_laguerre_first_level_sits_at_origin(self):
        # b_0 = 0, so P_1 = x and P_2 has a small negative zero
        zs = zero_cascade(make_laguerre1_family(), 2, 100, keep_levels=True)
        self.assertEqual(zs.levels[0][0], 0.0)
        self.assertLess(zs.zeros[0], 0.0)
        self.assertGreater(zs.zeros[0], -0.01)

    def test_zero_family_short_circuit(self):
        zs = zero_cascade(make_zero_family(), 5, 5)
        self.assertTrue(np.all(zs.zeros == 0))
        self.assertFalse(zs.real_simple)

    def test_complex_zeros_raise(self):
        with self.assertRaises(InterlacingViolation) as ctx:
            zero_cascade(complex_pair_family(), 2, 2)
        self.assertEqual(ctx.exception.level, 2)
        self.assertEqual(ctx.exception.bracket, (-2.0, 0.0))

    def test_model_families_break_interlacing(self):
        # the working recurrences only depend on x * N**p, so the level does not move with N
        for family, level in ((make_laguerre1_family(), 4), (make_macdonald_family(), 3)):
            for N in (40, 300):
                with self.assertRaises(InterlacingViolation) as ctx:
                    zero_cascade(family, 10, N)
                self.assertEqual(ctx.exception.level, level)


class ScanZerosTests(SimpleTestCase):

    def test_agrees_with_cascade(self):
        family = make_constant_family(1)
        cascade = zero_cascade(family, 40, 40)
        scanned = scan_zeros(family, 40, 40)
        self.assertEqual(len(scanned), 40)
        self.assertTrue(scanned.real_simple)
        self.assertFalse(scanned.interlaced_with_prev)
        self.assertIsNone(scanned.levels)
        np.testing.assert_allclose(scanned.zeros, cascade.zeros, rtol=1e-11)

    def test_laguerre_real_zeros(self):
        family = make_laguerre1_family()
        zs = scan_zeros(family, 60, 60)
        self.assertGreater(len(zs), 0)
        self.assertLessEqual(len(zs), 60)
        self.assertEqual(zs.missing, 60 - len(zs))
        self.assertEqual(zs.real_simple, zs.missing == 0)
        self.assertTrue(np.all(np.diff(zs.zeros) > 0))
        self.assertTrue(np.all(np.abs(zs.zeros) < zs.bound_R))
        for x in zs.zeros:
            eps = 1e-9 * max(1.0, abs(x))
            left = eval_P(family, 60, 60, x - eps).sign
            right = eval_P(family, 60, 60, x + eps).sign
            self.assertEqual(left * right, -1)

    def test_find_zeros_prefers_cascade(self):
        zs = find_zeros(make_constant_family(2.0), 20, 20, keep_levels=True)
        self.assertTrue(zs.interlaced_with_prev)
        self.assertEqual(len(zs.levels), 20)

    def test_find_zeros_falls_back_to_scan(self):
        zs = find_zeros(make_macdonald_family(), 50, 50, keep_levels=True)
        self.assertFalse(zs.interlaced_with_prev)
        self.assertIsNone(zs.levels)
        self.assertGreater(len(zs), 0)

    def test_find_zeros_without_real_zeros_raises(self):
        with self.assertRaises(InterlacingViolation) as ctx:
            find_zeros(complex_pair_family(), 2, 2)
        self.assertEqual(ctx.exception.level, 2)


class ScalingEquivarianceTests(SimpleTestCase):

    def test_small_zeros_keep_relative_accuracy(self):
        base = zero_cascade(make_constant_family(1.0), 60, 60).zeros
        scaled = zero_cascade(make_constant_family(2.0), 60, 60).zeros
        self.assertLess(base[0], 1e-3)
        np.testing.assert_allclose(scaled, 2.0 * base, rtol=1e-11)


    @given(st.floats(min_value=0.2, max_value=20.0))
    @hyp_settings(max_examples=10, deadline=None)
    def test_zeros_scale_with_alpha(self, alpha):
        base = zero_cascade(make_constant_family(1.0), 25, 25).zeros
        scaled = zero_cascade(make_constant_family(alpha), 25, 25).zeros
        np.testing.assert_allclose(scaled, alpha * base, rtol=1e-10)


class ValidateHypothesesTests(SimpleTestCase):

    def test_constant_family_passes(self):
        report = validate_hypotheses(make_constant_family(1), 60, 60)
        self.assertTrue(report.passed)
        self.assertGreater(report.min_interlacing_margin, 0)
        self.assertGreater(report.min_gap, 0)
        self.assertEqual(report.zero_count, 60)
        self.assertLessEqual(report.grid_sign_changes, 60)

    def test_macdonald_reported(self):
        report = validate_hypotheses(make_macdonald_family(), 40, 40)
        self.assertEqual(report.n_max, 40)
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_level, 3)
        self.assertIn('InterlacingViolation', report.message)

    def test_laguerre_reported(self):
        report = validate_hypotheses(make_laguerre1_family(), 60, 100)
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_level, 4)
        self.assertGreater(report.grid_sign_changes, 0)

    @override_settings(FOURTERM_BISECTION_MAX_STEPS=1)
    def test_unresolved_bracket_is_reported(self):
        report = validate_hypotheses(make_constant_family(1), 5, 5)
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_level, 1)
        self.assertIsNone(report.failed_bracket)
        self.assertIn('ToleranceFailure', report.message)

    def test_zero_family_is_degenerate_not_an_error(self):
        report = validate_hypotheses(make_zero_family(), 10, 10)
        self.assertFalse(report.passed)
        self.assertFalse(report.real_simple)
        self.assertIn('degenerate', report.message)

    def test_violation_is_reported(self):
        report = validate_hypotheses(complex_pair_family(), 2, 2)
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_level, 2)


class EmpiricalMeasureTests(SimpleTestCase):

    def test_single_atom(self):
        family = make_constant_family(1)
        measure = empirical_measure(zero_cascade(family, 1, 1), family)
        self.assertEqual(measure.n, 1)
        self.assertEqual(measure.total_mass, 1.0)

    def test_laguerre_rescaling(self):
        family = make_laguerre1_family()
        zs = find_zeros(family, 20, 100)
        table = zero_table(zs, family)
        np.testing.assert_allclose(table['rescaled_zero'], table['zero'] / 100, rtol=1e-15)
        measure = empirical_measure(zs, family)
        np.testing.assert_allclose(measure.points, table['zero'] / 100, rtol=1e-15)

    def test_macdonald_rescaling(self):
        family = make_macdonald_family()
        zs = find_zeros(family, 10, 20)
        table = zero_table(zs, family)
        np.testing.assert_allclose(table['rescaled_zero'], table['zero'] / 400, rtol=1e-15)

    def test_mass_and_cdf(self):
        family = make_constant_family(1)
        measure = empirical_measure(zero_cascade(family, 50, 50), family)
        self.assertAlmostEqual(measure.total_mass, 1.0, places=14)
        self.assertEqual(measure.cdf(-1.0), 0.0)
        self.assertEqual(measure.cdf(10.0), 1.0)

    def test_table_lists_every_level(self):
        family = make_constant_family(1)
        table = zero_table(zero_cascade(family, 3, 3, keep_levels=True), family)
        self.assertEqual(list(table.columns), ['k_level', 'j_index', 'zero', 'rescaled_zero'])
        self.assertEqual(len(table), 6)
        self.assertEqual(list(table['k_level']), [1, 2, 2, 3, 3, 3])


class SignCountTests(SimpleTestCase):

    def test_small_degree_count(self):
        family = make_constant_family(27 / 4)
        self.assertEqual(count_sign_changes(family, 5, 5, 10_000), 5)
        self.assertTrue(math.isfinite(spectral_bound(family, 5, 5)))


class OracleCheckTests(SimpleTestCase):

    def test_default_cases_pass(self):
        report = zeros_oracle_check()
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 12 + 11 + 12)

    def test_override_gate(self):
        report = zeros_oracle_check([(make_constant_family(1), 3)], overrides={'zeros_oracle': 0.0})
        self.assertEqual(report.required, 0.0)
        self.assertEqual(list(report.table['found']), [1, 2, 3])
