import logging

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import comb

from coeffs.models import ConstantProfile, LimitProfile
from coeffs.services import make_laguerre1_family, make_macdonald_family
from fourterm.checks import CheckReport, tolerance
from phifield.utils import stieltjes_moments
from zeros.services import empirical_measure, find_zeros
from .models import KSReport, LimitMeasure
from .utils import endpoint_integral, complex_endpoint_integral

logger = logging.getLogger(__name__)


# ============================================================================
# MEASURE CONSTRUCTION
# ============================================================================

def dirac_measure():
    return LimitMeasure(kind='dirac0', lo=0.0, hi=0.0, alpha=0.0)


def upsilon_measure(alpha=1.0):
    """The limit law on [0, alpha]; alpha = 0 is the point mass at 0."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0:
        return dirac_measure()
    if alpha == 1:
        return LimitMeasure(kind='upsilon_unit', lo=0.0, hi=1.0)
    return LimitMeasure(kind='upsilon_alpha', lo=0.0, hi=float(alpha), alpha=float(alpha))


def nu_L_measure(t):
    _check_t(t)
    return LimitMeasure(kind='nu_L', lo=0.0, hi=27 * t / 8, t=float(t))


def nu_M_measure(t):
    _check_t(t)
    return LimitMeasure(kind='nu_M', lo=0.0, hi=27 * t ** 2 / 4, t=float(t))


def nu_profile_measure(profile, t):
    """Profile average (1/t) * integral_0^t of the [0, alpha(s)] laws."""
    _check_t(t)
    if not isinstance(profile, LimitProfile):
        profile = LimitProfile(profile)
    profile.check_horizon(t)
    values = profile.check_profile()
    top = float(np.max(np.asarray(profile.alpha(np.linspace(0.0, t, 2001)), dtype=float)))
    if top <= 0 or not np.any(values > 0):
        return dirac_measure()
    return LimitMeasure(kind='nu_profile', lo=0.0, hi=top, t=float(t), profile=profile)


def limit_measure_for(family, t=1.0):
    """The measure the zeros of ``family`` approach as n/N -> t."""
    if family.is_zero:
        return dirac_measure()
    if isinstance(family.profile, ConstantProfile) and family.table is None:
        return upsilon_measure(family.profile.value)
    if family.kind == 'laguerre1':
        return nu_L_measure(t)
    if family.kind == 'macdonald':
        return nu_M_measure(t)
    return nu_profile_measure(family.profile, t)


def _check_t(t):
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")


# ============================================================================
# DENSITIES
# ============================================================================

def upsilon_unit_density(x):
    return upsilon_measure(1.0).density(x)


def upsilon_alpha_density(alpha, x):
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return upsilon_measure(alpha).density(x)


def nu_profile_density(profile, t, x):
    return nu_profile_measure(profile, t).density(x)


def nu_L_density(t, x):
    return nu_L_measure(t).density(x)


def nu_M_density(t, x):
    return nu_M_measure(t).density(x)


# ============================================================================
# CDF, QUANTILES, TRANSFORMS
# ============================================================================

def _scalar_density(measure):
    return lambda x: measure.density(x)


def cdf(measure, x):
    """Limit CDF at x by endpoint-substituted adaptive quadrature."""
    if measure.is_dirac:
        return 1.0 if x >= 0 else 0.0
    if x <= measure.lo:
        return 0.0
    if x >= measure.hi:
        x = measure.hi
    value = endpoint_integral(_scalar_density(measure), measure.lo, measure.hi,
                              measure.lo, x, what=f"{measure.kind} cdf")
    if x == measure.hi:
        # total mass, left unclipped
        return value
    return min(max(value, 0.0), 1.0)


def cdf_many(measure, xs):
    """CDF at every point of xs, accumulated segment by segment so it is monotone."""
    xs = np.asarray(xs, dtype=float)
    if measure.is_dirac:
        return (xs >= 0).astype(float)
    order = np.argsort(xs)
    clipped = np.clip(xs[order], measure.lo, measure.hi)
    values = np.empty_like(clipped)
    density = _scalar_density(measure)
    total, previous = 0.0, measure.lo
    for i, x in enumerate(clipped):
        if x > previous:
            total += endpoint_integral(density, measure.lo, measure.hi, previous, x,
                                       what=f'{measure.kind} cdf')
            previous = x
        values[i] = total
    out = np.empty_like(values)
    out[order] = values
    return out


def normalization(measure):
    """Total mass of a non-Dirac measure."""
    return cdf(measure, measure.hi)


def quantile(measure, p):
    """x with cdf(x) = p, by brentq on the support."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if measure.is_dirac:
        return 0.0
    if p == 0:
        return measure.lo
    if p == 1:
        return measure.hi
    return brentq(lambda x: cdf(measure, x) - p, measure.lo, measure.hi, xtol=1e-14)


def stieltjes_transform(measure, z):
    """Integral of 1/(z - x) against the measure, z off the support."""
    z = complex(z)
    if measure.is_dirac:
        return 1.0 / z
    density = _scalar_density(measure)
    return complex_endpoint_integral(lambda x: density(x) / (z - x), measure.lo, measure.hi,
                                     what=f'{measure.kind} Stieltjes transform')


def moment(measure, k):
    if measure.is_dirac:
        return 1.0 if k == 0 else 0.0
    density = _scalar_density(measure)
    return endpoint_integral(lambda x: x ** k * density(x), measure.lo, measure.hi,
                             measure.lo, measure.hi, what=f'{measure.kind} moment {k}')


MOMENT_ROUTES = ('quadrature', 'laurent', 'closed_form')


def moments_upsilon(k, route='quadrature'):
    """k-th moment of the limit law on [0, 1].

    ``laurent`` reads it off the expansion of -phi'/phi at infinity,
    ``closed_form`` is C(3k, k) (4/27)**k.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if route == 'quadrature':
        return 1.0 if k == 0 else moment(upsilon_measure(1.0), k)
    if route == 'laurent':
        return float(stieltjes_moments(k)[k])
    if route == 'closed_form':
        return float(comb(3 * k, k, exact=True)) * (4 / 27) ** k
    raise ValueError(f"Unknown moment route: {route}")


# ============================================================================
# KOLMOGOROV-SMIRNOV
# ============================================================================

def ks_statistic(emp, limit):
    """Exact sup |F_emp - F| for an atomic emp against a limit measure.

    Between atoms F_emp is flat and F monotone, so the sup is attained at
    an atom, comparing F there with the empirical CDF just before and
    just after it.
    """
    points = np.asarray(emp.points, dtype=float)
    if points.size == 0:
        raise ValueError("Empirical measure is empty")
    n = points.size
    atoms, counts = np.unique(points, return_counts=True)
    right = np.cumsum(counts) / n
    left = right - counts / n

    F = cdf_many(limit, atoms)
    if limit.is_dirac:
        F_before = (atoms > 0).astype(float)
    else:
        F_before = F
    gaps = np.maximum(np.abs(F - right), np.abs(F_before - left))
    i = int(np.argmax(gaps))
    statistic = float(min(max(gaps[i], 0.0), 1.0))
    return KSReport(n=n, statistic=statistic, location=float(atoms[i]), limit=limit.kind)


# ============================================================================
# TABLES AND CHECKS
# ============================================================================

def density_table(measure, points):
    """DataFrame with columns (x, density, cdf)."""
    xs = np.asarray(points, dtype=float)
    if measure.is_dirac:
        raise ValueError("dirac0 has no density table")
    return pd.DataFrame({'x': xs, 'density': measure.density(xs), 'cdf': cdf_many(measure, xs)})


def interior_grid(measure, count):
    """count points strictly inside the support."""
    return measure.lo + (measure.hi - measure.lo) * (np.arange(1, count + 1) / (count + 1))


def normalization_check(t=1.0, overrides=None):
    """Total mass of the [0, 1] law and of the Laguerre and Macdonald laws at t."""
    required = tolerance('normalization', overrides)
    rows = []
    for measure in (upsilon_measure(1.0), nu_L_measure(t), nu_M_measure(t)):
        mass = normalization(measure)
        rows.append({'measure': measure.kind, 'mass': mass, 'abs_err': abs(mass - 1.0)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('normalization', table['abs_err'].max(), required, table=table)


def derivation_check(t=1.0, count=100, overrides=None):
    """Numeric profile average against the closed Laguerre and Macdonald densities."""
    required = tolerance('derivation', overrides)
    rows = []
    pairs = [
        (nu_profile_measure(make_laguerre1_family().profile, t), nu_L_measure(t)),
        (nu_profile_measure(make_macdonald_family().profile, t), nu_M_measure(t)),
    ]
    for numeric, closed in pairs:
        xs = interior_grid(closed, count)
        lhs = numeric.density(xs)
        rhs = closed.density(xs)
        for x, a, b in zip(xs, lhs, rhs):
            rows.append({'measure': closed.kind, 'x': x, 'lhs': a, 'rhs': b, 'abs_err': abs(a - b)})
    table = pd.DataFrame(rows)
    logger.info(f"Derivation check at t={t}: worst error {table['abs_err'].max():.3g}")
    return CheckReport.gate('derivation', table['abs_err'].max(), required, table=table)


def moments_check(k_max=4, overrides=None):
    """Quadrature moments of the [0, 1] law against the Laurent route and the closed form."""
    required = tolerance('moments', overrides)
    rows = []
    for k in range(1, k_max + 1):
        quadrature = moments_upsilon(k, 'quadrature')
        laurent = moments_upsilon(k, 'laurent')
        closed = moments_upsilon(k, 'closed_form')
        rows.append({
            'k': k, 'quadrature': quadrature, 'laurent': laurent, 'closed_form': closed,
            'abs_err': max(abs(quadrature - laurent), abs(laurent - closed)),
        })
    table = pd.DataFrame(rows)
    return CheckReport.gate('moments', table['abs_err'].max(), required, table=table)


# ============================================================================
# CONVERGENCE OF ZERO DISTRIBUTIONS
# ============================================================================

def ks_series(family, n_schedule, N=None, zero_sets=None):
    """KS distance of the zeros of P_{n,N} to the limit at t = n/N, one row per n.

    N = None runs the diagonal N = n; ``zero_sets`` maps n to an already
    computed ZeroSet. Where interlacing breaks the statistic is taken
    over the real zeros found, counted in ``found``.
    """
    zero_sets = zero_sets or {}
    rows = []
    for n in n_schedule:
        N_n = N or n
        zs = zero_sets.get(n)
        if zs is None:
            zs = find_zeros(family, n, N_n)
        limit = limit_measure_for(family, n / N_n)
        report = ks_statistic(empirical_measure(zs, family), limit)
        rows.append({'n': n, 'N': N_n, 't': n / N_n, 'found': len(zs), 'limit': report.limit,
                     'statistic': report.statistic, 'location': report.location})
        logger.info(f"KS {family.name} n={n} N={N_n}: D={report.statistic:.4g} vs {report.limit}")
    return pd.DataFrame(rows)


def ks_check(family, n_schedule, key, N=None, zero_sets=None, overrides=None):
    """Gate the last KS distance and require the series to fall within the slack."""
    required = tolerance(key, overrides)
    slack = tolerance('ks_slack', overrides)
    table = ks_series(family, n_schedule, N=N, zero_sets=zero_sets)
    stats = table['statistic'].to_numpy()
    rises = [int(table['n'].iloc[i]) for i in range(1, len(stats))
             if stats[i] > stats[i - 1] * (1 + slack)]
    achieved = float(stats[-1])
    return CheckReport(
        name=key, achieved=achieved, required=required,
        passed=bool(achieved <= required and not rises),
        details={'family': family.name, 'rises': rises, 'slack': slack,
                 'missing': int((table['n'] - table['found']).sum())},
        table=table,
    )
