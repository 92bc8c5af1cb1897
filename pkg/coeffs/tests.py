import json
import math
import os
import tempfile

from django.test import SimpleTestCase
from hypothesis import given, settings as hyp_settings, strategies as st
from rest_framework import serializers

from fourterm.exceptions import HorizonError, ProfileError
from .models import LimitProfile, PowerProfile, TabulatedProfile
from .serializers import FamilyDescriptorSerializer, FamilySerializer, LimitDeviationSerializer
from .services import (
    coefficient_arrays, limit_deviation, load_family, make_constant_family,
    make_custom_family, make_jacobi_pineiro_family, make_laguerre1_family,
    make_macdonald_family, make_zero_family,
)


class ConstantFamilyTests(SimpleTestCase):

    def test_alpha_27_over_4_gives_unit_beta(self):
        family = make_constant_family(27 / 4)
        self.assertAlmostEqual(family.b(0, 1), 3.0, places=14)
        self.assertAlmostEqual(family.c(0, 1), 3.0, places=14)
        self.assertAlmostEqual(family.d(0, 1), 1.0, places=14)

    def test_alpha_one(self):
        family = make_constant_family(1)
        self.assertAlmostEqual(family.b(0, 1), 12 / 27, places=15)
        self.assertAlmostEqual(family.c(0, 1), 48 / 729, places=15)
        self.assertAlmostEqual(family.d(0, 1), 64 / 19683, places=15)
        self.assertEqual(family.scale_exponent, 0)

    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=10_000))
    @hyp_settings(max_examples=50, deadline=None)
    def test_coefficients_do_not_depend_on_n_or_N(self, n, N):
        family = make_constant_family(1)
        self.assertEqual(family.b(n, N), family.b(0, 1))
        self.assertEqual(family.d(n, N), family.d(0, 1))

    def test_nonpositive_alpha_rejected(self):
        for alpha in (0, -1.5):
            with self.assertRaises(ValueError):
                make_constant_family(alpha)


class NamedFamilyTests(SimpleTestCase):

    def test_jacobi_pineiro_limits(self):
        family = make_jacobi_pineiro_family()
        self.assertAlmostEqual(family.b(5, 10), 4 / 9, places=15)
        self.assertAlmostEqual(family.c(5, 10), 48 / 729, places=15)
        self.assertAlmostEqual(family.d(5, 10), (4 / 27) ** 3, places=15)

    def test_laguerre1(self):
        family = make_laguerre1_family()
        self.assertAlmostEqual(family.working_b(10, 10), 1.5, places=14)
        self.assertAlmostEqual(family.alpha(1.0), 27 / 8, places=14)
        self.assertAlmostEqual(family.working_d(20, 10), 1.0, places=14)
        self.assertEqual(family.scale_exponent, 1)
        # original coordinates carry N**p
        self.assertAlmostEqual(family.b(10, 10), 15.0, places=12)

    def test_macdonald(self):
        family = make_macdonald_family()
        self.assertAlmostEqual(family.working_b(10, 10), 3.0, places=14)
        self.assertAlmostEqual(family.alpha(1.0), 27 / 4, places=14)
        self.assertAlmostEqual(family.working_d(5, 10), 1 / 64, places=15)
        self.assertEqual(family.scale_exponent, 2)

    def test_shipped_families_sit_on_limiting_curve(self):
        families = [make_constant_family(2.0), make_jacobi_pineiro_family(),
                    make_laguerre1_family(), make_macdonald_family()]
        N = 40
        for family in families:
            b, c, d = coefficient_arrays(family, 3 * N, N)
            for k in range(3 * N + 1):
                self.assertAlmostEqual(c[k], b[k] ** 2 / 3, delta=1e-14 * max(1.0, c[k]))
                self.assertAlmostEqual(d[k], (b[k] / 3) ** 3, delta=1e-14 * max(1.0, d[k]))

    def test_beta_relation(self):
        family = make_macdonald_family()
        for t in (0.1, 0.5, 1.3):
            self.assertAlmostEqual(family.beta(t), 4 * family.alpha(t) / 27, places=15)


class CustomFamilyTests(SimpleTestCase):

    def test_square_table(self):
        grid = [[t / 10, (t / 10) ** 2] for t in range(41)]
        family = make_custom_family({'name': 'square', 'alpha': {'grid': grid, 'interp': 'linear'}})
        for n in (0, 10, 20, 30):
            t = n / 10
            self.assertAlmostEqual(family.working_b(n, 10), 3 * 4 * t ** 2 / 27, places=14)

    def test_zero_profile(self):
        family = make_zero_family()
        b, c, d = coefficient_arrays(family, 5, 5)
        self.assertFalse(b.any() or c.any() or d.any())
        self.assertTrue(family.is_zero)

    def test_negative_table_entry_rejected(self):
        with self.assertRaises(ProfileError):
            make_custom_family({'alpha': {'grid': [[0, 1], [1, -0.5]]}})

    def test_jump_rejected(self):
        with self.assertRaises(ProfileError):
            TabulatedProfile(((0.0, 1.0), (1.0, 1.0), (1.0, 2.0)))

    def test_exact_coefficients_override_profile(self):
        family = make_custom_family({
            'alpha': 1,
            'coefficients': {'N': 4, 'b': [0.5, 0.25], 'c': [0.0, 0.1], 'd': [0.0, 0.0]},
        })
        b, c, _ = coefficient_arrays(family, 3, 4)
        self.assertEqual(b[0], 0.5)
        self.assertEqual(c[1], 0.1)
        self.assertAlmostEqual(b[2], 4 / 9, places=15)
        # other N uses the profile throughout
        b, _, _ = coefficient_arrays(family, 3, 5)
        self.assertAlmostEqual(b[0], 4 / 9, places=15)


class CoefficientArrayTests(SimpleTestCase):

    def test_matches_pointwise_accessors(self):
        family = make_laguerre1_family()
        b, c, d = coefficient_arrays(family, 30, 20)
        for k in (0, 7, 30):
            self.assertAlmostEqual(b[k], family.working_b(k, 20), places=14)
            self.assertAlmostEqual(c[k], family.working_c(k, 20), places=14)
            self.assertAlmostEqual(d[k], family.working_d(k, 20), places=14)

    def test_horizon_enforced_for_varying_profiles(self):
        with self.assertRaises(HorizonError):
            coefficient_arrays(make_laguerre1_family(), 50, 10)
        coefficient_arrays(make_constant_family(1), 50, 10)

    def test_limit_deviation_shrinks(self):
        rows = limit_deviation(make_laguerre1_family(), 1 / 3, [10, 100, 1000])
        self.assertGreater(rows[0].worst, rows[-1].worst)
        self.assertLess(rows[-1].worst, 1e-3)


class LimitProfileTests(SimpleTestCase):

    def test_laguerre_interval_is_inverse_to_infinity(self):
        profile = LimitProfile(PowerProfile(27 / 8, 1.0))
        lo, hi = profile.interval(2.0)
        self.assertAlmostEqual(lo, 2.0 * 8 / 27, places=12)
        self.assertEqual(hi, math.inf)

    def test_macdonald_interval(self):
        profile = LimitProfile(PowerProfile(27 / 4, 2.0))
        lo, hi = profile.interval(1.0)
        self.assertAlmostEqual(lo, math.sqrt(4 / 27), places=12)
        self.assertEqual(hi, math.inf)

    def test_bump_has_finite_upper_end(self):
        profile = LimitProfile(TabulatedProfile(((0.0, 0.0), (1.0, 2.0), (2.0, 0.0))))
        lo, hi = profile.interval(1.0)
        self.assertAlmostEqual(lo, 0.5, places=12)
        self.assertAlmostEqual(hi, 1.5, places=12)
        for s in (0.6, 1.0, 1.4):
            self.assertGreaterEqual(profile.alpha(s), 1.0)

    def test_interval_end_is_a_root_of_the_profile(self):
        profile = LimitProfile(PowerProfile(27 / 8, 1.0))
        for x in (1e-6, 0.3, 3.0):
            lo, _ = profile.interval(x)
            self.assertAlmostEqual(float(profile.alpha(lo)), x, delta=1e-13 * max(1.0, x))

    def test_above_profile_is_empty(self):
        profile = LimitProfile(TabulatedProfile(((0.0, 1.0), (4.0, 1.0))))
        self.assertEqual(profile.interval(2.0), (math.inf, math.inf))

    def test_two_humps_rejected(self):
        grid = ((0.0, 0.0), (1.0, 2.0), (2.0, 0.0), (3.0, 2.0), (4.0, 0.0))
        with self.assertRaises(ProfileError):
            LimitProfile(TabulatedProfile(grid)).interval(1.0)

    def test_horizon_check(self):
        profile = LimitProfile(PowerProfile(1.0, 1.0), horizon=4.0)
        with self.assertRaises(HorizonError):
            profile.check_horizon(4.5)


class FamilyDescriptorTests(SimpleTestCase):

    def _write(self, payload):
        fd, path = tempfile.mkstemp(suffix='.json')
        with os.fdopen(fd, 'w') as fh:
            json.dump(payload, fh)
        self.addCleanup(os.remove, path)
        return path

    def test_load_custom_descriptor(self):
        path = self._write({
            'name': 'ramp', 'kind': 'custom',
            'alpha': {'grid': [[0, 0], [4, 2]], 'interp': 'linear'},
            'scale_exponent': 0,
        })
        family = load_family(path)
        self.assertEqual(family.name, 'ramp')
        self.assertAlmostEqual(family.alpha(2.0), 1.0, places=14)

    def test_load_named_descriptor(self):
        family = load_family(self._write({'name': 'lag', 'kind': 'laguerre1'}))
        self.assertEqual(family.scale_exponent, 1)

    def test_unknown_field_rejected(self):
        serializer = FamilyDescriptorSerializer(data={'name': 'x', 'kind': 'constant', 'alpha': 1, 'beta': 2})
        self.assertFalse(serializer.is_valid())
        self.assertIn('beta', serializer.errors)

    def test_negative_table_rejected(self):
        path = self._write({'name': 'bad', 'kind': 'custom', 'alpha': {'grid': [[0, 1], [1, -1]]}})
        with self.assertRaises(serializers.ValidationError):
            load_family(path)

    def test_custom_without_alpha_rejected(self):
        serializer = FamilyDescriptorSerializer(data={'name': 'x', 'kind': 'custom'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('alpha', serializer.errors)


class FamilyRenderingTests(SimpleTestCase):

    def test_family_serializer(self):
        data = FamilySerializer(make_laguerre1_family()).data
        self.assertEqual(data['name'], 'laguerre1')
        self.assertEqual(data['kind'], 'laguerre1')
        self.assertEqual(data['scale_exponent'], 1.0)
        self.assertEqual(data['alpha'], make_laguerre1_family().profile.describe())
        json.dumps(data)

    def test_limit_deviation_serializer(self):
        rows = limit_deviation(make_constant_family(1), 0.5, [10, 20])
        data = LimitDeviationSerializer(rows, many=True).data
        self.assertEqual([row['N'] for row in data], [10, 20])
        self.assertEqual([row['n'] for row in data], [5, 10])
        for row in data:
            self.assertEqual(row['worst'], 0.0)
