import json
import logging
import re
from dataclasses import asdict
from pathlib import Path

import django
import numpy as np
import pandas as pd
import scipy
from django.conf import settings
from rest_framework import serializers

from coeffs.serializers import FamilySerializer, LimitDeviationSerializer
from coeffs.services import (
    get_family, limit_deviation, load_family, make_constant_family, make_laguerre1_family,
    make_macdonald_family, make_zero_family,
)
from fourterm.exceptions import ConfigError, ProfileError
from measures.services import (
    density_table, derivation_check, interior_grid, ks_check, limit_measure_for, moments_check,
    normalization_check, nu_L_measure, nu_M_measure, nu_profile_measure, upsilon_measure,
)
from phifield.services import (
    analyticity_check, branch_point_growth_check, identity_check, jump_check,
    oracle_agreement_check, random_off_cut_points, ratio_asymptotics_check,
    stieltjes_identity_check, tail_check,
)
from toeplitz.services import (
    charpoly_identity_check, eigenvalues, qn_closed_form_check, scaling_equivariance_check,
    toeplitz_limit_check, total_nonnegativity_sampled, total_nonnegativity_smalln,
    EXHAUSTIVE_MAX_N,
)
from zeros.services import find_zeros, validate_hypotheses, zero_table, zeros_oracle_check
from .models import RunResult
from .serializers import (
    PHI_CHECKS, TOEPLITZ_CHECKS, VERIFY_GROUPS, CheckReportSerializer, RunConfigSerializer,
)
from .utils import split_complex, to_plain

logger = logging.getLogger(__name__)

DEFAULT_N_SCHEDULE = (100, 200, 400)
RATIO_N_SCHEDULE = (50, 100, 200, 400)
KS_KEYS = {'laguerre1': 'ks_laguerre', 'macdonald': 'ks_macdonald'}


# ============================================================================
# CONFIGURATION
# ============================================================================

def load_config_file(path):
    """Read a JSON run configuration; an absent path gives an empty config."""
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Config file {path} does not exist")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return data


def parse_tol(items):
    """['stieltjes=1e-5', ...] -> {'stieltjes': 1e-5}"""
    overrides = {}
    for item in items or []:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise ConfigError(f"--tol expects KEY=VAL, got {item!r}")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {key}: {value!r} is not a number")
    return overrides


def merge_config(file_config, flags):
    """Flags win over the file; tolerance overrides merge key by key."""
    merged = dict(file_config)
    for key, value in flags.items():
        if value is None:
            continue
        if key == 'tol':
            merged['tol'] = {**merged.get('tol', {}), **value}
        else:
            merged[key] = value
    return merged


def build_run_config(command, flags, config_path=None):
    """Validated RunConfig for ``command`` from an optional file plus flags."""
    data = merge_config(load_config_file(config_path), flags)
    data['command'] = command
    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(f"Invalid run configuration: {json.dumps(serializer.errors, sort_keys=True)}")
    return dict(serializer.validated_data)


def effective_tolerances(config):
    return {**settings.FOURTERM_CHECK_TOLERANCES, **config.get('tol', {})}


def resolve_family(config):
    """Family from a descriptor file or from --family/--alpha."""
    spec = config.get('spec')
    if spec:
        try:
            return load_family(spec)
        except FileNotFoundError:
            raise ConfigError(f"Family descriptor {spec} does not exist")
        except serializers.ValidationError as e:
            logger.error(f"Family descriptor {spec} rejected: {e.detail}")
            raise ProfileError(f"Invalid family descriptor {spec}: {json.dumps(e.detail, sort_keys=True)}")
    try:
        return get_family(config.get('family', 'constant'), alpha=config.get('alpha'))
    except ValueError as e:
        raise ConfigError(str(e))


def resolve_measure(config):
    """LimitMeasure named by --measure, or the limit of the selected family at t."""
    kind = config.get('measure')
    t = config.get('t', 1.0)
    if kind is None:
        return limit_measure_for(resolve_family(config), t)
    if kind == 'upsilon_unit':
        return upsilon_measure(1.0)
    if kind == 'upsilon_alpha':
        if 'alpha' not in config:
            raise ConfigError("upsilon_alpha needs --alpha")
        return upsilon_measure(config['alpha'])
    if kind == 'nu_L':
        return nu_L_measure(t)
    if kind == 'nu_M':
        return nu_M_measure(t)
    if kind == 'nu_profile':
        return nu_profile_measure(resolve_family(config).profile, t)
    raise ConfigError(f"{kind} has no density to tabulate")


# ============================================================================
# OUTPUT
# ============================================================================

def package_versions():
    return {
        'django': django.get_version(),
        'numpy': np.__version__,
        'pandas': pd.__version__,
        'scipy': scipy.__version__,
    }


def output_dir(config):
    return Path(config.get('out') or settings.FOURTERM_OUTPUT_DIR)


def file_stem(*parts):
    """Filesystem-safe stem, e.g. ('zeros', 'constant(alpha=1)') -> zeros_constant-alpha-1."""
    cleaned = [re.sub(r'[^A-Za-z0-9._]+', '-', str(part)).strip('-') for part in parts]
    return '_'.join(part for part in cleaned if part)


def metadata(config, extra=None):
    """Sidecar contents; no timestamps so reruns are byte-identical."""
    payload = {
        'command': config['command'],
        'config': config,
        'tolerances': effective_tolerances(config),
        'versions': package_versions(),
    }
    payload.update(extra or {})
    return payload


def write_json(payload, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as fh:
        json.dump(to_plain(payload), fh, indent=2, sort_keys=True)
        fh.write('\n')
    return path


def write_table(table, stem, config, extra=None):
    """Write ``table`` as CSV (17 significant digits) or JSON records, plus a .meta.json sidecar."""
    directory = output_dir(config)
    directory.mkdir(parents=True, exist_ok=True)
    flat = split_complex(table)

    if config.get('format') == 'json':
        path = directory / f'{stem}.json'
        write_json(flat.to_dict(orient='records'), path)
    else:
        path = directory / f'{stem}.csv'
        flat.to_csv(path, index=False, float_format='%.17g')

    write_json(metadata(config, extra), path.with_name(path.name + '.meta.json'))
    logger.info(f"Wrote {len(flat)} rows to {path}")
    return path


def write_reports(reports, stem, config):
    """Summary JSON of gated checks with their per-point tables alongside."""
    directory = output_dir(config)
    files = []
    for index, report in enumerate(reports, start=1):
        if report.table is not None:
            files.append(write_table(report.table, file_stem(stem, f'{index:02d}', report.name), config,
                                     extra={'check': report.name}))
    payload = {
        'passed': all(report.passed for report in reports),
        'checks': CheckReportSerializer(reports, many=True).data,
        'versions': package_versions(),
    }
    files.append(write_json(payload, directory / f'{stem}.json'))
    return files


# ============================================================================
# COMMANDS
# ============================================================================

def run_zeros(config):
    """Zeros of P_{n,N} with a hypothesis report.

    Once the cascade breaks only the real zeros of P_n are written and
    the sidecar counts them; a P_n without any real zero raises the
    InterlacingViolation after the report is written.
    """
    family = resolve_family(config)
    n = config.get('n', 100)
    N = config.get('N') or n
    stem = file_stem('zeros', family.name, f'n{n}', f'N{N}')
    result = RunResult(command='zeros')
    described = FamilySerializer(family).data

    if not config.get('skip_validation'):
        hypothesis = validate_hypotheses(family, n, N)
        result.files.append(write_json(
            {'family': described, 'hypotheses': asdict(hypothesis), 'versions': package_versions()},
            output_dir(config) / f'{stem}.validation.json',
        ))

    zs = find_zeros(family, n, N, keep_levels=config.get('levels', False))
    if config.get('levels') and zs.levels is None:
        logger.warning(f"{family.name}: lower levels are unavailable once interlacing breaks")
    deviation = LimitDeviationSerializer(limit_deviation(family, n / N, [N]), many=True).data
    result.files.insert(0, write_table(zero_table(zs, family), stem, config, extra={
        'family': described, 'found': len(zs), 'missing': zs.missing, 'limit_deviation': deviation,
    }))
    return result


def run_density(config):
    """Density and cdf of a limit measure on interior points of its support."""
    measure = resolve_measure(config)
    count = config.get('count', 1000)
    try:
        table = density_table(measure, interior_grid(measure, count))
    except ValueError as e:
        raise ConfigError(str(e))
    stem = file_stem('density', measure.kind, f"t{measure.t:.6g}" if measure.t is not None else '')
    path = write_table(table, stem, config, extra={'measure': measure.describe()})
    return RunResult(command='density', files=[path])


def run_ks(config):
    family = resolve_family(config)
    schedule = tuple(config.get('n_schedule') or DEFAULT_N_SCHEDULE)
    key = KS_KEYS.get(family.kind, 'ks_constant')
    report = ks_check(family, schedule, key, N=config.get('N'), overrides=config.get('tol'))
    path = write_table(report.table, file_stem('ks', family.name), config,
                       extra={'family': FamilySerializer(family).data, 'check': key})
    return RunResult(command='ks', files=[path], reports=[report])


def run_ratio(config):
    family = resolve_family(config)
    kwargs = {'n_schedule': tuple(config.get('n_schedule') or RATIO_N_SCHEDULE),
              'N': config.get('N'), 'validate': not config.get('skip_validation'),
              'overrides': config.get('tol')}
    if config.get('points'):
        kwargs['points'] = config['points']
    try:
        report = ratio_asymptotics_check(family, **kwargs)
    except ValueError as e:
        raise ConfigError(str(e))
    path = write_table(report.table, file_stem('ratio', family.name), config,
                       extra={'family': FamilySerializer(family).data, 'check': report.name})
    return RunResult(command='ratio', files=[path], reports=[report])


def phi_reports(checks, overrides=None, seed=None, count=1000, points=None):
    """Run the named phi checks; ``points`` replaces the random grids."""
    runners = {
        'identity': lambda: identity_check(
            points if points is not None else random_off_cut_points(count=count, seed=seed), overrides),
        'oracle': lambda: oracle_agreement_check(
            points if points is not None else random_off_cut_points(count=count, seed=seed, lo=0.1),
            overrides),
        'tail': lambda: tail_check(overrides=overrides),
        'analyticity': lambda: analyticity_check(overrides=overrides),
        'jump': lambda: jump_check(overrides=overrides),
        'growth': lambda: branch_point_growth_check(overrides=overrides),
        'stieltjes': lambda: stieltjes_identity_check(points, overrides),
    }
    return [runners[name]() for name in checks]


def run_phi_check(config):
    checks = [name for name in config.get('checks') or PHI_CHECKS if name in PHI_CHECKS]
    if not checks:
        raise ConfigError(f"phi_check runs {', '.join(PHI_CHECKS)}")
    try:
        reports = phi_reports(checks, overrides=config.get('tol'), seed=config.get('seed'),
                              count=config.get('count', 1000), points=config.get('points'))
    except ValueError as e:
        raise ConfigError(str(e))
    return RunResult(command='phi_check', files=write_reports(reports, 'phi_check', config),
                     reports=reports)


def toeplitz_reports(checks, alpha, n, overrides=None, seed=None, n_schedule=DEFAULT_N_SCHEDULE,
                     zero_sets=None):
    reports = []
    for name in checks:
        if name == 'closed_form':
            reports.append(qn_closed_form_check(alphas=(alpha,), overrides=overrides))
        elif name == 'charpoly':
            reports.append(charpoly_identity_check(alpha, overrides=overrides))
        elif name == 'total_nonnegativity':
            reports.append(total_nonnegativity_smalln(alpha, min(n, EXHAUSTIVE_MAX_N), overrides=overrides))
            if n > EXHAUSTIVE_MAX_N:
                reports.append(total_nonnegativity_sampled(alpha, n, seed=seed, overrides=overrides))
        elif name == 'equivariance':
            reports.append(scaling_equivariance_check(alpha, n, overrides=overrides))
        elif name == 'limit':
            reports.append(toeplitz_limit_check(alpha, n_schedule, zero_sets=zero_sets, overrides=overrides))
    return reports


def run_toeplitz(config):
    """Toeplitz checks at one alpha and the eigenvalues of T_n."""
    alpha = config.get('alpha', 1.0)
    n = config.get('n', 40)
    checks = [name for name in config.get('checks') or TOEPLITZ_CHECKS if name in TOEPLITZ_CHECKS]
    if not checks:
        raise ConfigError(f"toeplitz runs {', '.join(TOEPLITZ_CHECKS)}")
    try:
        spectrum = eigenvalues(alpha, n)
        reports = toeplitz_reports(checks, alpha, n, overrides=config.get('tol'), seed=config.get('seed'),
                                   n_schedule=tuple(config.get('n_schedule') or DEFAULT_N_SCHEDULE))
    except ValueError as e:
        raise ConfigError(str(e))

    table = pd.DataFrame({'j': np.arange(1, n + 1), 'eigenvalue': spectrum.zeros})
    files = [write_table(table, file_stem('toeplitz', f'alpha{alpha:g}', f'n{n}'), config,
                         extra={'alpha': alpha, 'n': n})]
    files += write_reports(reports, file_stem('toeplitz_checks', f'alpha{alpha:g}'), config)
    return RunResult(command='toeplitz', files=files, reports=reports)


# ============================================================================
# ACCEPTANCE SUITE
# ============================================================================

class CascadeCache:
    """Zero sets shared between the checks of one verify run."""

    def __init__(self):
        self._sets = {}

    def get(self, family, n, N=None):
        key = (family.name, n, N or n)
        if key not in self._sets:
            self._sets[key] = find_zeros(family, n, N or n)
        return self._sets[key]

    def schedule(self, family, n_schedule):
        return {n: self.get(family, n) for n in n_schedule}

    def __len__(self):
        return len(self._sets)


def verify_group(group, overrides=None, seed=None, cache=None):
    """Gated checks of one group at acceptance sizes."""
    cache = cache or CascadeCache()
    unit = make_constant_family(1.0)

    if group == 'phi':
        return phi_reports(PHI_CHECKS, overrides=overrides, seed=seed)
    if group == 'measures':
        return [normalization_check(overrides=overrides), derivation_check(overrides=overrides),
                moments_check(overrides=overrides)]
    if group == 'zeros':
        return [zeros_oracle_check(overrides=overrides),
                scaling_equivariance_check(2.0, 60, overrides=overrides)]
    if group == 'ratio':
        top = max(RATIO_N_SCHEDULE)
        return [
            ratio_asymptotics_check(unit, n_schedule=RATIO_N_SCHEDULE, zero_set=cache.get(unit, top + 1),
                                    overrides=overrides),
            ratio_asymptotics_check(make_zero_family(), n_schedule=RATIO_N_SCHEDULE, overrides=overrides),
        ]
    if group == 'ks':
        return [
            ks_check(unit, DEFAULT_N_SCHEDULE, 'ks_constant',
                     zero_sets=cache.schedule(unit, DEFAULT_N_SCHEDULE), overrides=overrides),
            ks_check(make_laguerre1_family(), (300,), 'ks_laguerre', overrides=overrides),
            ks_check(make_macdonald_family(), (300,), 'ks_macdonald', overrides=overrides),
        ]
    if group == 'toeplitz':
        reports = [qn_closed_form_check(overrides=overrides)]
        reports += [charpoly_identity_check(alpha, overrides=overrides) for alpha in (1.0, 27 / 4)]
        reports += toeplitz_reports(['total_nonnegativity', 'limit'], 27 / 4, EXHAUSTIVE_MAX_N,
                                    overrides=overrides, seed=seed)
        reports.append(total_nonnegativity_sampled(27 / 4, 40, seed=seed, overrides=overrides))
        return reports
    raise ConfigError(f"Unknown check group {group}; choose from {', '.join(VERIFY_GROUPS)}")


def run_verify(config):
    """Full acceptance suite, or the groups named by --only."""
    groups = config.get('only') or VERIFY_GROUPS
    overrides = config.get('tol')
    cache = CascadeCache()
    reports = []
    for group in groups:
        logger.info(f"verify: running {group} checks")
        group_reports = verify_group(group, overrides=overrides, seed=config.get('seed'), cache=cache)
        for report in group_reports:
            report.details.setdefault('group', group)
            level = logging.INFO if report.passed else logging.WARNING
            logger.log(level, f"{group}/{report.name}: achieved {report.achieved:.3g}, "
                              f"required {report.required:.3g}")
        reports += group_reports
    logger.info(f"verify: {len(cache)} zero sets computed")
    return RunResult(command='verify', files=write_reports(reports, 'verify', config), reports=reports)


COMMAND_RUNNERS = {
    'zeros': run_zeros,
    'density': run_density,
    'ks': run_ks,
    'ratio': run_ratio,
    'phi_check': run_phi_check,
    'toeplitz': run_toeplitz,
    'verify': run_verify,
}
