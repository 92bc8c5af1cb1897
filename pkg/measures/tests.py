import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hyp_settings, strategies as st

from coeffs.services import (
    make_constant_family, make_custom_family, make_laguerre1_family, make_macdonald_family,
    make_zero_family,
)
from zeros.models import EmpiricalMeasure
from .services import (
    cdf, cdf_many, density_table, derivation_check, dirac_measure, ks_check, ks_series,
    ks_statistic, limit_measure_for, moment, moments_check, moments_upsilon, normalization,
    normalization_check, nu_L_density, nu_L_measure, nu_M_density, nu_M_measure,
    nu_profile_measure, quantile, stieltjes_transform, upsilon_alpha_density, upsilon_measure,
    upsilon_unit_density,
)

SQRT3 = math.sqrt(3.0)


class DensityTests(SimpleTestCase):

    def test_unit_density_at_one_half(self):
        r = math.sqrt(0.5)
        expected = SQRT3 / (4 * math.pi) * ((1 + r) ** (1 / 3) + (1 - r) ** (1 / 3)) / (0.5 ** (2 / 3) * r)
        self.assertAlmostEqual(upsilon_unit_density(0.5), expected, delta=1e-13)

    def test_endpoints_and_outside(self):
        self.assertEqual(upsilon_unit_density(0.0), math.inf)
        self.assertEqual(upsilon_unit_density(1.0), math.inf)
        self.assertEqual(upsilon_unit_density(-0.1), 0.0)
        self.assertEqual(upsilon_unit_density(1.1), 0.0)

    def test_endpoint_exponents(self):
        eps = 1e-10
        self.assertAlmostEqual(upsilon_unit_density(1 - eps) * math.sqrt(eps), SQRT3 / (2 * math.pi),
                               delta=1e-4)
        eps = 1e-12
        self.assertAlmostEqual(upsilon_unit_density(eps) * eps ** (2 / 3),
                               SQRT3 * 2 ** (1 / 3) / (4 * math.pi), delta=1e-3)

    def test_alpha_scaling(self):
        for alpha, x in ((2.0, 0.6), (27 / 4, 3.0), (0.5, 0.1)):
            self.assertAlmostEqual(upsilon_alpha_density(alpha, x),
                                   upsilon_unit_density(x / alpha) / alpha, places=13)

    def test_alpha_must_be_positive(self):
        with self.assertRaises(ValueError):
            upsilon_alpha_density(0.0, 0.5)

    def test_laguerre_and_macdonald_vanish_at_right_end(self):
        self.assertEqual(nu_L_density(1.0, 27 / 8), 0.0)
        self.assertEqual(nu_M_density(1.0, 27 / 4), 0.0)
        self.assertEqual(nu_L_density(1.0, 0.0), math.inf)
        self.assertGreater(nu_M_density(1.0, 1.0), 0.0)

    def test_supports(self):
        t = 8 / 27
        self.assertAlmostEqual(nu_L_measure(t).hi, 1.0, places=15)
        t = 2 / (3 * SQRT3)
        self.assertAlmostEqual(nu_M_measure(t).hi, 1.0, places=14)

    def test_array_density(self):
        xs = np.array([0.2, 0.4, 0.6])
        values = upsilon_measure(1.0).density(xs)
        self.assertEqual(values.shape, (3,))
        self.assertAlmostEqual(values[1], upsilon_unit_density(0.4), places=15)

    def test_dirac_has_no_density(self):
        with self.assertRaises(ValueError):
            dirac_measure().density(0.5)


class LimitMeasureTests(SimpleTestCase):

    def test_dispatch(self):
        self.assertEqual(limit_measure_for(make_constant_family(1)).kind, 'upsilon_unit')
        self.assertEqual(limit_measure_for(make_constant_family(2)).kind, 'upsilon_alpha')
        self.assertEqual(limit_measure_for(make_zero_family()).kind, 'dirac0')
        self.assertEqual(limit_measure_for(make_laguerre1_family(), 0.5).kind, 'nu_L')
        self.assertEqual(limit_measure_for(make_macdonald_family(), 0.5).kind, 'nu_M')
        custom = make_custom_family({'name': 'ramp', 'alpha': {'form': 'power', 'coefficient': 2.0, 'power': 1}})
        self.assertEqual(limit_measure_for(custom, 1.0).kind, 'nu_profile')

    def test_upsilon_alpha_zero_is_dirac(self):
        self.assertTrue(upsilon_measure(0).is_dirac)

    def test_profile_average_matches_laguerre(self):
        numeric = nu_profile_measure(make_laguerre1_family().profile, 1.0)
        for x in (0.3, 1.5, 3.0):
            self.assertAlmostEqual(numeric.density(x), nu_L_density(1.0, x), delta=1e-6)

    def test_constant_profile_average_is_upsilon(self):
        numeric = nu_profile_measure(make_constant_family(2).profile, 1.0)
        for x in (0.2, 1.0, 1.8):
            self.assertAlmostEqual(numeric.density(x), upsilon_alpha_density(2.0, x), delta=1e-8)

    def test_t_must_be_positive(self):
        with self.assertRaises(ValueError):
            nu_L_measure(0.0)


class CdfTests(SimpleTestCase):

    def test_normalization(self):
        for measure in (upsilon_measure(1.0), upsilon_measure(3.0), nu_L_measure(1.0), nu_M_measure(1.0)):
            self.assertAlmostEqual(normalization(measure), 1.0, delta=1e-8)

    def test_cdf_outside_support(self):
        measure = upsilon_measure(1.0)
        self.assertEqual(cdf(measure, -1.0), 0.0)
        self.assertAlmostEqual(cdf(measure, 2.0), 1.0, delta=1e-8)
        self.assertEqual(cdf(dirac_measure(), 0.0), 1.0)
        self.assertEqual(cdf(dirac_measure(), -1e-300), 0.0)

    def test_cdf_many_is_monotone_and_matches_cdf(self):
        measure = nu_L_measure(1.0)
        xs = np.linspace(-0.5, 4.0, 60)
        values = cdf_many(measure, xs)
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertAlmostEqual(values[20], cdf(measure, xs[20]), delta=1e-10)

    def test_quantile_round_trip(self):
        measure = upsilon_measure(1.0)
        for p in (0.01, 0.25, 0.5, 0.9):
            self.assertAlmostEqual(cdf(measure, quantile(measure, p)), p, delta=1e-10)
        self.assertEqual(quantile(measure, 0.0), 0.0)
        self.assertEqual(quantile(measure, 1.0), 1.0)
        with self.assertRaises(ValueError):
            quantile(measure, 1.5)

    def test_density_table(self):
        measure = upsilon_measure(1.0)
        xs = np.linspace(0.001, 0.999, 1000)
        table = density_table(measure, xs)
        self.assertEqual(list(table.columns), ['x', 'density', 'cdf'])
        self.assertEqual(len(table), 1000)
        self.assertTrue(np.all(np.diff(table['cdf']) >= 0))

    def test_stieltjes_transform(self):
        self.assertEqual(stieltjes_transform(dirac_measure(), 2.0), 0.5)
        far = stieltjes_transform(upsilon_measure(1.0), 1e6)
        self.assertAlmostEqual(far * 1e6, 1.0, delta=1e-4)


class MomentTests(SimpleTestCase):

    def test_known_values(self):
        for route in ('quadrature', 'laurent', 'closed_form'):
            self.assertAlmostEqual(moments_upsilon(1, route), 4 / 9, delta=1e-9)
            self.assertAlmostEqual(moments_upsilon(2, route), 80 / 243, delta=1e-9)
        self.assertEqual(moments_upsilon(0, 'quadrature'), 1.0)

    def test_scaled_moment(self):
        self.assertAlmostEqual(moment(upsilon_measure(2.0), 1), 8 / 9, delta=1e-9)

    def test_bad_route(self):
        with self.assertRaises(ValueError):
            moments_upsilon(1, 'series')
        with self.assertRaises(ValueError):
            moments_upsilon(-1)


class CheckTests(SimpleTestCase):

    def test_normalization_check(self):
        report = normalization_check()
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(list(report.table['measure']), ['upsilon_unit', 'nu_L', 'nu_M'])

    def test_derivation_check(self):
        report = derivation_check(count=20)
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(len(report.table), 40)

    def test_moments_check(self):
        report = moments_check()
        self.assertTrue(report.passed, report.achieved)

    def test_override(self):
        report = moments_check(k_max=2, overrides={'moments': 0.0})
        self.assertEqual(report.required, 0.0)


class KSTests(SimpleTestCase):

    def test_quantile_atoms(self):
        measure = upsilon_measure(1.0)
        n = 10
        atoms = np.array([quantile(measure, (i - 0.5) / n) for i in range(1, n + 1)])
        report = ks_statistic(EmpiricalMeasure(points=atoms), measure)
        self.assertAlmostEqual(report.statistic, 1 / (2 * n), delta=1e-8)
        self.assertEqual(report.n, n)

    def test_single_atom(self):
        measure = upsilon_measure(1.0)
        F = cdf(measure, 0.3)
        report = ks_statistic(EmpiricalMeasure(points=np.array([0.3])), measure)
        self.assertAlmostEqual(report.statistic, max(F, 1 - F), places=12)

    def test_dirac_limit(self):
        exact = ks_statistic(EmpiricalMeasure(points=np.zeros(5)), dirac_measure())
        self.assertEqual(exact.statistic, 0.0)
        shifted = ks_statistic(EmpiricalMeasure(points=np.array([0.5])), dirac_measure())
        self.assertEqual(shifted.statistic, 1.0)

    def test_empty(self):
        with self.assertRaises(ValueError):
            ks_statistic(EmpiricalMeasure(points=np.array([])), upsilon_measure(1.0))

    @hyp_settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
    def test_statistic_bounds(self, values):
        points = np.sort(np.array(values))
        report = ks_statistic(EmpiricalMeasure(points=points), upsilon_measure(1.0))
        self.assertGreaterEqual(report.statistic, 1 / (2 * len(points)) - 1e-9)
        self.assertLessEqual(report.statistic, 1.0)

    def test_constant_family_series(self):
        table = ks_series(make_constant_family(1), (50, 100))
        self.assertEqual(list(table['n']), [50, 100])
        self.assertLessEqual(table['statistic'].iloc[1], table['statistic'].iloc[0] * 1.2)
        self.assertLess(table['statistic'].iloc[1], 0.25)

    def test_laguerre_check(self):
        report = ks_check(make_laguerre1_family(), (40,), 'ks_laguerre', overrides={'ks_laguerre': 0.3})
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(report.table['limit'].iloc[0], 'nu_L')
        found = int(report.table['found'].iloc[0])
        self.assertGreater(found, 0)
        self.assertEqual(report.details['missing'], 40 - found)

    def test_macdonald_check(self):
        report = ks_check(make_macdonald_family(), (40,), 'ks_macdonald', overrides={'ks_macdonald': 0.3})
        self.assertTrue(report.passed, report.achieved)
        self.assertEqual(report.table['limit'].iloc[0], 'nu_M')
        self.assertLessEqual(report.table['found'].iloc[0], 40)

    def test_model_family_gates(self):
        for family, key in ((make_laguerre1_family(), 'ks_laguerre'), (make_macdonald_family(), 'ks_macdonald')):
            report = ks_check(family, (300,), key)
            self.assertEqual(report.required, 0.07)
            self.assertTrue(report.passed, f"{key}: {report.achieved}")
            self.assertEqual(list(report.table['n']), [300])

    def test_constant_family_counts_every_zero(self):
        table = ks_series(make_constant_family(1), (50,))
        self.assertEqual(list(table['found']), [50])

    def test_zero_family(self):
        report = ks_check(make_zero_family(), (5, 10), 'ks_constant')
        self.assertEqual(report.achieved, 0.0)
        self.assertTrue(report.passed)
