import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from fourterm.exceptions import ConfigError, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION
from measures.services import cdf_many, upsilon_measure
from .serializers import RunConfigSerializer
from .services import build_run_config, file_stem, merge_config, parse_tol
from .utils import split_complex, to_plain

COMPLEX_PAIR = {
    'name': 'complex-pair',
    'kind': 'custom',
    'alpha': 1,
    'coefficients': {'N': 2, 'b': [0, 0, 0], 'c': [0, -1, 0], 'd': [0, 0, 0]},
}


class RunConfigTests(SimpleTestCase):

    def validate(self, **data):
        serializer = RunConfigSerializer(data=data)
        return serializer.is_valid(), serializer

    def test_unknown_field_rejected(self):
        valid, serializer = self.validate(command='zeros', alpha=1, n=5, colour='blue')
        self.assertFalse(valid)
        self.assertIn('colour', serializer.errors)

    def test_unknown_tolerance_rejected(self):
        valid, serializer = self.validate(command='verify', tol={'stieltjes': 1e-5, 'speed': 1})
        self.assertFalse(valid)
        self.assertIn('tol', serializer.errors)

    def test_constant_family_needs_alpha(self):
        valid, serializer = self.validate(command='zeros', n=5)
        self.assertFalse(valid)
        self.assertIn('alpha', serializer.errors)

    def test_spec_implies_custom(self):
        valid, serializer = self.validate(command='zeros', spec='family.json', n=5)
        self.assertTrue(valid, serializer.errors)
        self.assertEqual(serializer.validated_data['family'], 'custom')

    def test_preset_fills_measure(self):
        valid, serializer = self.validate(command='density', preset='macdonald_figure')
        self.assertTrue(valid, serializer.errors)
        self.assertEqual(serializer.validated_data['measure'], 'nu_M')
        self.assertAlmostEqual(serializer.validated_data['t'], 2 / (3 * 3 ** 0.5), places=15)

    def test_t_beyond_horizon(self):
        valid, serializer = self.validate(command='density', measure='nu_L', t=100.0)
        self.assertFalse(valid)
        self.assertIn('t', serializer.errors)

    def test_complex_points(self):
        valid, serializer = self.validate(command='ratio', alpha=1, points=['1.5+1.5j', 3, '-1'])
        self.assertTrue(valid, serializer.errors)
        self.assertEqual(serializer.validated_data['points'], [1.5 + 1.5j, 3 + 0j, -1 + 0j])

    def test_bad_complex_point(self):
        valid, serializer = self.validate(command='ratio', alpha=1, points=['north'])
        self.assertFalse(valid)


class ConfigMergeTests(SimpleTestCase):

    def test_flags_win(self):
        merged = merge_config({'alpha': 2.0, 'n': 5, 'tol': {'ratio': 1.0}},
                              {'n': 7, 'alpha': None, 'tol': {'ks_constant': 0.2}})
        self.assertEqual(merged, {'alpha': 2.0, 'n': 7, 'tol': {'ratio': 1.0, 'ks_constant': 0.2}})

    def test_parse_tol(self):
        self.assertEqual(parse_tol(['stieltjes=1e-5', 'ratio = 0.5']), {'stieltjes': 1e-5, 'ratio': 0.5})
        self.assertEqual(parse_tol(None), {})
        with self.assertRaises(ConfigError):
            parse_tol(['stieltjes'])
        with self.assertRaises(ConfigError):
            parse_tol(['stieltjes=tight'])

    def test_invalid_config_is_config_error(self):
        with self.assertRaises(ConfigError) as ctx:
            build_run_config('zeros', {'alpha': -1.0, 'n': 5})
        self.assertEqual(ctx.exception.code, EXIT_CONFIG)

    def test_missing_config_file(self):
        with self.assertRaises(ConfigError):
            build_run_config('zeros', {'alpha': 1.0}, '/nonexistent/run.json')


class OutputHelperTests(SimpleTestCase):

    def test_split_complex(self):
        table = pd.DataFrame({'n': [1, 2], 'lhs': [1 + 2j, 3 - 1j], 'abs_err': [0.1, 0.2]})
        flat = split_complex(table)
        self.assertEqual(list(flat.columns), ['n', 'lhs_re', 'lhs_im', 'abs_err'])
        self.assertEqual(list(flat['lhs_im']), [2.0, -1.0])

    def test_to_plain(self):
        plain = to_plain({'a': np.float64(0.5), 'b': (1, np.int64(2)), 'z': 1j, 'ok': np.bool_(True)})
        self.assertEqual(plain, {'a': 0.5, 'b': [1, 2], 'z': '1j', 'ok': True})
        json.dumps(plain)

    def test_file_stem(self):
        self.assertEqual(file_stem('zeros', 'constant(alpha=1)', 'n5'), 'zeros_constant-alpha-1_n5')


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, name, **options):
        stdout = StringIO()
        call_command(name, out=str(self.out), stdout=stdout, **options)
        return stdout.getvalue()

    def assertExitCode(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception

    def read_csv(self, pattern):
        paths = sorted(self.out.glob(pattern))
        self.assertEqual(len(paths), 1, paths)
        return pd.read_csv(paths[0])

    def read_json(self, name):
        with open(self.out / name) as fh:
            return json.load(fh)


class ZerosCommandTests(CommandTestCase):

    def test_constant_family(self):
        self.run_command('zeros', family='constant', alpha=1.0, n=100)
        table = self.read_csv('zeros_*.csv')
        self.assertEqual(len(table), 100)
        self.assertEqual(list(table.columns), ['k_level', 'j_index', 'zero', 'rescaled_zero'])
        self.assertTrue(np.all(np.diff(table['zero']) > 0))

        meta = self.read_json('zeros_constant-alpha-1_n100_N100.csv.meta.json')
        self.assertEqual(meta['command'], 'zeros')
        self.assertIn('numpy', meta['versions'])
        self.assertEqual(meta['tolerances']['identity'], 1e-12)
        self.assertEqual(meta['family']['kind'], 'constant')
        self.assertEqual(meta['found'], 100)
        self.assertEqual(meta['limit_deviation'][0]['worst'], 0.0)
        validation = self.read_json('zeros_constant-alpha-1_n100_N100.validation.json')
        self.assertTrue(validation['hypotheses']['passed'])

    def test_laguerre_rescaling(self):
        self.run_command('zeros', family='laguerre1', n=100, N=100)
        table = self.read_csv('zeros_laguerre1_*.csv')
        self.assertGreater(len(table), 0)
        self.assertLessEqual(len(table), 100)
        self.assertTrue(np.all(table['k_level'] == 100))
        np.testing.assert_allclose(table['rescaled_zero'], table['zero'] / 100, rtol=1e-14)

        meta = self.read_json('zeros_laguerre1_n100_N100.csv.meta.json')
        self.assertEqual(meta['found'], len(table))
        self.assertEqual(meta['missing'], 100 - len(table))
        self.assertEqual(meta['family']['scale_exponent'], 1.0)
        validation = self.read_json('zeros_laguerre1_n100_N100.validation.json')
        self.assertFalse(validation['hypotheses']['passed'])
        self.assertEqual(validation['hypotheses']['failed_level'], 4)

    def test_all_levels(self):
        self.run_command('zeros', family='constant', alpha=2.0, n=4, levels=True, skip_validation=True)
        table = self.read_csv('zeros_*.csv')
        self.assertEqual(len(table), 1 + 2 + 3 + 4)
        self.assertFalse(list(self.out.glob('*.validation.json')))

    def test_bad_descriptor(self):
        spec = self.out / 'bad.json'
        spec.write_text(json.dumps({'name': 'bad', 'kind': 'custom'}))
        self.assertExitCode(EXIT_VALIDATION, 'zeros', spec=str(spec), n=5)

    def test_interlacing_violation(self):
        spec = self.out / 'pair.json'
        spec.write_text(json.dumps(COMPLEX_PAIR))
        error = self.assertExitCode(EXIT_VALIDATION, 'zeros', spec=str(spec), n=2, N=2)
        self.assertIn('InterlacingViolation', str(error))
        validation = self.read_json('zeros_complex-pair_n2_N2.validation.json')
        self.assertEqual(validation['hypotheses']['failed_level'], 2)

    def test_config_file_with_flag_override(self):
        config = self.out / 'run.json'
        config.write_text(json.dumps({'family': 'constant', 'alpha': 2.0, 'n': 5, 'skip_validation': True}))
        self.run_command('zeros', config=str(config), n=7)
        self.assertEqual(len(self.read_csv('zeros_*.csv')), 7)

    def test_unknown_tolerance_key(self):
        self.assertExitCode(EXIT_CONFIG, 'zeros', family='constant', alpha=1.0, n=5, tol=['speed=1'])

    def test_bad_config_file(self):
        config = self.out / 'run.json'
        config.write_text('{not json')
        self.assertExitCode(EXIT_CONFIG, 'zeros', config=str(config))


class DensityCommandTests(CommandTestCase):

    def test_unit_interval(self):
        self.run_command('density', measure='upsilon_unit')
        table = self.read_csv('density_*.csv')
        self.assertEqual(list(table.columns), ['x', 'density', 'cdf'])
        self.assertEqual(len(table), 1000)
        self.assertTrue(np.all(np.diff(table['cdf']) >= 0))

    def test_laguerre_preset(self):
        self.run_command('density', preset='laguerre_figure', count=50)
        table = self.read_csv('density_nu_L_*.csv')
        self.assertGreater(table['x'].min(), 0.0)
        self.assertLess(table['x'].max(), 1.0)
        meta = self.read_json(sorted(self.out.glob('*.meta.json'))[0].name)
        np.testing.assert_allclose(meta['measure']['support'], [0.0, 1.0], atol=1e-15)

    def test_family_limit(self):
        self.run_command('density', family='constant', alpha=2.0, count=20)
        table = self.read_csv('density_upsilon_alpha*.csv')
        self.assertLess(table['x'].max(), 2.0)

    def test_dirac_has_no_table(self):
        self.assertExitCode(EXIT_CONFIG, 'density', measure='dirac0')

    def test_json_format(self):
        self.run_command('density', measure='upsilon_unit', count=10, format='json')
        records = self.read_json('density_upsilon_unit.json')
        self.assertEqual(len(records), 10)
        self.assertEqual(sorted(records[0]), ['cdf', 'density', 'x'])

    def test_reruns_are_identical(self):
        self.run_command('density', measure='nu_M', t=1.0, count=40)
        first = {path.name: path.read_bytes() for path in self.out.iterdir()}
        self.run_command('density', measure='nu_M', t=1.0, count=40)
        second = {path.name: path.read_bytes() for path in self.out.iterdir()}
        self.assertEqual(first, second)

    def test_seventeen_digits(self):
        self.run_command('density', measure='upsilon_unit', count=3)
        path = sorted(self.out.glob('density_*.csv'))[0]
        table = pd.read_csv(path, float_precision='round_trip')
        self.assertEqual(table['x'].iloc[1], 0.5)
        xs = np.array([0.25, 0.5, 0.75])
        np.testing.assert_array_equal(table['density'], upsilon_measure(1.0).density(xs))
        np.testing.assert_array_equal(table['cdf'], cdf_many(upsilon_measure(1.0), xs))


class KSCommandTests(CommandTestCase):

    def test_constant_schedule(self):
        self.run_command('ks', family='constant', alpha=1.0, n_schedule=[50, 100],
                         tol=['ks_constant=0.25'])
        table = self.read_csv('ks_*.csv')
        self.assertEqual(list(table['n']), [50, 100])
        self.assertEqual(table['limit'].iloc[0], 'upsilon_unit')
        self.assertEqual(list(table['found']), [50, 100])

    def test_laguerre_counts_real_zeros(self):
        self.run_command('ks', family='laguerre1', n_schedule=[60], tol=['ks_laguerre=0.3'])
        table = self.read_csv('ks_laguerre1.csv')
        self.assertEqual(table['limit'].iloc[0], 'nu_L')
        self.assertLessEqual(table['found'].iloc[0], 60)
        meta = self.read_json('ks_laguerre1.csv.meta.json')
        self.assertEqual(meta['check'], 'ks_laguerre')


class RatioCommandTests(CommandTestCase):

    def test_complex_columns_are_split(self):
        self.run_command('ratio', family='constant', alpha=1.0, n_schedule=[5, 10],
                         points=['3', '1.5+1.5j'], tol=['ratio=1'])
        table = self.read_csv('ratio_*.csv')
        self.assertIn('lhs_re', table.columns)
        self.assertIn('lhs_im', table.columns)
        self.assertEqual(len(table), 4)

    def test_point_too_close(self):
        self.assertExitCode(EXIT_CONFIG, 'ratio', family='constant', alpha=1.0, n_schedule=[5, 10],
                            points=['0.5+0.01j'])


class PhiCheckCommandTests(CommandTestCase):

    def test_selected_checks(self):
        output = self.run_command('phi_check', checks=['identity', 'tail'], count=50, seed=3)
        self.assertIn('all checks passed', output)
        summary = self.read_json('phi_check.json')
        self.assertTrue(summary['passed'])
        self.assertEqual([check['name'] for check in summary['checks']], ['identity', 'tail'])
        self.assertEqual(len(self.read_csv('phi_check_01_identity.csv')), 50)

    def test_tolerance_override_is_honoured(self):
        self.run_command('phi_check', checks=['stieltjes'], tol=['stieltjes=1e-5'])
        summary = self.read_json('phi_check.json')
        self.assertEqual(summary['checks'][0]['required'], 1e-5)

    def test_failed_gate_exits_with_numeric_code(self):
        error = self.assertExitCode(EXIT_NUMERIC, 'phi_check', checks=['jump'], tol=['jump=0'])
        self.assertIn('jump achieved', str(error))


class ToeplitzCommandTests(CommandTestCase):

    def test_small_run(self):
        self.run_command('toeplitz', alpha=1.0, n=6, checks=['closed_form', 'charpoly', 'equivariance'])
        table = self.read_csv('toeplitz_alpha1_n6.csv')
        self.assertEqual(len(table), 6)
        self.assertTrue(np.all(table['eigenvalue'] > 0))
        summary = self.read_json('toeplitz_checks_alpha1.json')
        self.assertEqual(len(summary['checks']), 3)

    def test_nonpositive_alpha(self):
        self.assertExitCode(EXIT_CONFIG, 'toeplitz', alpha=0.0, n=4, checks=['closed_form'])


class VerifyCommandTests(CommandTestCase):

    def test_measures_group(self):
        self.run_command('verify', only=['measures'])
        summary = self.read_json('verify.json')
        self.assertTrue(summary['passed'])
        self.assertEqual([check['name'] for check in summary['checks']],
                         ['normalization', 'derivation', 'moments'])
        self.assertEqual(summary['checks'][0]['details']['group'], 'measures')

    def test_zeros_group(self):
        self.run_command('verify', only=['zeros'])
        summary = self.read_json('verify.json')
        self.assertTrue(summary['passed'], summary['checks'])
        self.assertEqual([check['name'] for check in summary['checks']], ['zeros_oracle', 'equivariance'])

    def test_ks_group(self):
        self.run_command('verify', only=['ks'])
        summary = self.read_json('verify.json')
        self.assertTrue(summary['passed'], summary['checks'])
        self.assertEqual([check['name'] for check in summary['checks']],
                         ['ks_constant', 'ks_laguerre', 'ks_macdonald'])

    def test_failures_listed(self):
        error = self.assertExitCode(EXIT_NUMERIC, 'verify', only=['measures'], tol=['derivation=0'])
        self.assertIn('derivation', str(error))
        self.assertFalse(self.read_json('verify.json')['passed'])
