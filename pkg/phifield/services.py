import logging
import math

import numpy as np
import pandas as pd
from django.conf import settings

from fourterm.checks import CheckReport, tolerance
from fourterm.exceptions import OnCutError
from measures.services import stieltjes_transform, upsilon_measure
from polycore.services import eval_ratio_many
from zeros.services import find_zeros
from .models import PhiEval
from .utils import (
    distance_to_cut, laurent_series, phi_formula, polish_root, track_root,
)

logger = logging.getLogger(__name__)

CUT_DISTANCE = 1e-14


# ============================================================================
# EVALUATION
# ============================================================================

def _off_cut(z):
    z = complex(z)
    if distance_to_cut(z) <= CUT_DISTANCE:
        raise OnCutError(f"z={z} lies on the cut [0, 1]", z=z)
    return z


def log_derivative_from_phi(z, value):
    """phi'/phi = 1/(2z) + (3/(2z)) / (8 phi/27 - 1)."""
    return 1.0 / (2 * z) + 3.0 / (2 * z) / (8.0 * value / 27.0 - 1.0)


def phi(z):
    """phi(z) and phi'/phi(z) from the branch formula, Newton-polished on the cubic."""
    z = _off_cut(z)
    value = polish_root(z, phi_formula(z), steps=3)
    return PhiEval(z=z, phi=value, phi_log_deriv=log_derivative_from_phi(z, value))


def phi_cubic_oracle(z):
    """phi(z) as the root of the cubic continued from w ~ 1/z at the homotopy anchor."""
    z = _off_cut(z)
    return track_root(z, settings.FOURTERM_HOMOTOPY_ANCHOR)


def phi_prime_over_phi(z):
    return phi(z).phi_log_deriv


def scaled_phi(z, alpha):
    """(1/alpha) phi(z/alpha), the limit of P_n/P_{n+1} when the profile sits at alpha."""
    z = complex(z)
    if alpha == 0:
        return 1.0 / z
    return phi(z / alpha).phi / alpha


def scaled_log_derivative(z, alpha):
    """(1/alpha) (phi'/phi)(z/alpha); -1/z when alpha = 0."""
    z = complex(z)
    if alpha == 0:
        return -1.0 / z
    return phi_prime_over_phi(z / alpha) / alpha


def jump_m(x):
    """Closed-form jump of phi'/phi across (0, 1); purely imaginary."""
    if not 0 < x < 1:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    s = math.sqrt(1.0 - x)
    v_plus = (1.0 + s) ** (1.0 / 3.0)
    v_minus = (x / (1.0 + s)) ** (1.0 / 3.0)
    return 1j * math.sqrt(3.0) / (2.0 * x ** (2.0 / 3.0)) * (v_plus + v_minus) / s


def jump_limit(x, eps=(1e-3, 1e-4, 1e-5)):
    """Richardson-extrapolated (phi'/phi)(x + i eps) - (phi'/phi)(x - i eps) for eps -> 0.

    eps must be geometric; the one-sided difference has a full power
    series in eps, so each pass removes one order.
    """
    if len(eps) != 3:
        raise ValueError("Richardson extrapolation needs three eps values")
    q = eps[0] / eps[1]
    jumps = [phi_prime_over_phi(complex(x, e)) - phi_prime_over_phi(complex(x, -e)) for e in eps]
    first = [(q * jumps[i + 1] - jumps[i]) / (q - 1) for i in range(2)]
    return (q * q * first[1] - first[0]) / (q * q - 1)


def laurent_coefficients(k_max):
    """a_0..a_k_max with phi(z) = sum a_j z**(-j)."""
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    return laurent_series(k_max)


# ============================================================================
# POINT GRIDS
# ============================================================================

def random_off_cut_points(count=1000, seed=None, lo=0.01, hi=100.0):
    """Seeded points whose distance to [0, 1] is log-uniform in [lo, hi].

    The nearest point of the segment is either interior (vertical offset)
    or one of the endpoints (offset in the outward half plane).
    """
    rng = np.random.default_rng(settings.FOURTERM_DEFAULT_SEED if seed is None else seed)
    distance = np.exp(rng.uniform(math.log(lo), math.log(hi), count))
    case = rng.integers(0, 3, count)
    anchor = rng.uniform(0.0, 1.0, count)
    side = np.where(rng.uniform(size=count) < 0.5, -1.0, 1.0)
    theta = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, count)

    points = np.empty(count, dtype=complex)
    interior = case == 0
    points[interior] = anchor[interior] + 1j * side[interior] * distance[interior]
    left = case == 1
    points[left] = -distance[left] * np.exp(1j * theta[left])
    right = case == 2
    points[right] = 1.0 + distance[right] * np.exp(1j * theta[right])
    return points


def stieltjes_grid():
    """50 points on five circles about 1/2, the innermost at distance 0.05 from [0, 1]."""
    theta = (np.arange(10) + 0.5) * 2 * math.pi / 10
    return np.concatenate([0.5 + r * np.exp(1j * theta) for r in (0.55, 0.75, 1.5, 5.0, 50.0)])


def _point_rows(zs):
    return [{'z_re': z.real, 'z_im': z.imag} for z in zs]


# ============================================================================
# CHECKS
# ============================================================================

def identity_check(points=None, overrides=None):
    """Relative residual of z phi = (1 + 4 phi/27)**3 on a point set."""
    required = tolerance('identity', overrides)
    zs = random_off_cut_points() if points is None else np.asarray(points, dtype=complex)
    rows = _point_rows(zs)
    for row, z in zip(rows, zs):
        ev = phi(z)
        row.update({'lhs': ev.z * ev.phi, 'rhs': (1.0 + 4.0 * ev.phi / 27.0) ** 3,
                    'abs_err': ev.identity_residual})
    table = pd.DataFrame(rows)
    return CheckReport.gate('identity', table['abs_err'].max(), required, table=table)


def oracle_agreement_check(points=None, overrides=None):
    """|phi - phi_cubic_oracle| on points at distance at least 0.1 from the cut."""
    required = tolerance('oracle', overrides)
    zs = random_off_cut_points(lo=0.1) if points is None else np.asarray(points, dtype=complex)
    logger.info(f"Oracle agreement check on {len(zs)} points")
    rows = _point_rows(zs)
    for row, z in zip(rows, zs):
        direct = phi(z).phi
        oracle = phi_cubic_oracle(z)
        row.update({'lhs': direct, 'rhs': oracle, 'abs_err': abs(direct - oracle)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('oracle', table['abs_err'].max(), required, table=table)


def contour_coefficient(evaluate, radius=100.0, points=64):
    """Coefficient of z**-2 in phi, as the mean of z**2 phi(z) over a circle."""
    zs = radius * np.exp(2j * math.pi * np.arange(points) / points)
    return complex(np.mean([z * z * evaluate(z) for z in zs]))


def tail_check(radius=1e6, rays=8, overrides=None):
    """z phi(z) -> 1 along rays for both evaluation routes, plus the z**-2 coefficient."""
    required = tolerance('tail', overrides)
    laurent_required = tolerance('laurent', overrides)
    rows = []
    for j in range(rays):
        z = radius * complex(math.cos(2 * math.pi * j / rays), math.sin(2 * math.pi * j / rays))
        for route, value in (('direct', phi(z).phi), ('oracle', phi_cubic_oracle(z))):
            rows.append({'z_re': z.real, 'z_im': z.imag, 'route': route,
                         'lhs': z * value, 'rhs': 1.0, 'abs_err': abs(z * value - 1.0)})
    table = pd.DataFrame(rows)

    expected = float(laurent_series(2)[2])
    direct = contour_coefficient(lambda z: phi(z).phi)
    oracle = contour_coefficient(phi_cubic_oracle)
    laurent_err = max(abs(direct - oracle), abs(direct - expected))

    achieved = float(table['abs_err'].max())
    return CheckReport(
        name='tail', achieved=achieved, required=required,
        passed=bool(achieved <= required and laurent_err <= laurent_required),
        details={'a2_series': expected, 'a2_direct': direct.real, 'a2_oracle': oracle.real,
                 'laurent_err': laurent_err, 'laurent_required': laurent_required},
        table=table,
    )


def analyticity_check(xs=None, eps=1e-8, overrides=None):
    """phi has no jump across (-inf, 0)."""
    required = tolerance('analyticity', overrides)
    xs = np.linspace(-10.0, -0.1, 50) if xs is None else np.asarray(xs, dtype=float)
    rows = []
    for x in xs:
        above = phi(complex(x, eps)).phi
        below = phi(complex(x, -eps)).phi
        rows.append({'x': x, 'lhs': above, 'rhs': below, 'abs_err': abs(above - below)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('analyticity', table['abs_err'].max(), required, table=table)


def jump_check(xs=None, eps=(1e-3, 1e-4, 1e-5), overrides=None):
    """Extrapolated one-sided difference of phi'/phi against the closed-form jump."""
    required = tolerance('jump', overrides)
    xs = np.linspace(0.05, 0.95, 19) if xs is None else np.asarray(xs, dtype=float)
    rows = []
    for x in xs:
        numeric = jump_limit(x, eps)
        closed = jump_m(x)
        rows.append({'x': x, 'lhs': numeric, 'rhs': closed, 'abs_err': abs(numeric - closed),
                     'rel_err': abs(numeric - closed) / abs(closed)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('jump', table['rel_err'].max(), required, table=table)


def _loglog_slope(eps, values):
    return float(np.polyfit(np.log(eps), np.log(np.abs(values)), 1)[0])


def branch_point_growth_check(exponents=range(4, 9), overrides=None):
    """Log-log slope of |phi'/phi| approaching 0 and 1 along the vertical ray."""
    required = tolerance('growth', overrides)
    eps = np.array([10.0 ** (-k) for k in exponents])
    rows = []
    slopes = {}
    for label, base, expected in (('zero', 0.0, -2.0 / 3.0), ('one', 1.0, -0.5)):
        values = np.array([phi_prime_over_phi(complex(base, e)) for e in eps])
        slopes[label] = _loglog_slope(eps, values)
        rows += [{'point': label, 'eps': e, 'abs_value': abs(v), 'expected_slope': expected}
                 for e, v in zip(eps, values)]
    far = np.array([10.0 ** k for k in range(3, 7)])
    far_slope = _loglog_slope(far, [phi_prime_over_phi(1j * r) for r in far])

    achieved = max(abs(slopes['zero'] + 2.0 / 3.0), abs(slopes['one'] + 0.5))
    logger.info(f"Branch-point slopes: 0 -> {slopes['zero']:.4f}, 1 -> {slopes['one']:.4f}")
    return CheckReport.gate('growth', achieved, required, table=pd.DataFrame(rows),
                            slope_zero=slopes['zero'], slope_one=slopes['one'],
                            slope_infinity=far_slope)


def stieltjes_identity_check(points=None, overrides=None):
    """phi'/phi(z) against minus the Stieltjes transform of the [0, 1] law."""
    required = tolerance('stieltjes', overrides)
    zs = stieltjes_grid() if points is None else np.asarray(points, dtype=complex)
    too_close = [z for z in zs if distance_to_cut(z) < 0.05]
    if too_close:
        raise ValueError(f"Stieltjes grid needs distance >= 0.05 from [0, 1], got {too_close[0]}")
    measure = upsilon_measure(1.0)
    rows = _point_rows(zs)
    worst_reflection = 0.0
    for row, z in zip(rows, zs):
        lhs = phi_prime_over_phi(z)
        rhs = -stieltjes_transform(measure, z)
        reflected = phi_prime_over_phi(z.conjugate())
        worst_reflection = max(worst_reflection, abs(reflected - lhs.conjugate()))
        row.update({'lhs': lhs, 'rhs': rhs, 'abs_err': abs(lhs - rhs)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('stieltjes', table['abs_err'].max(), required, table=table,
                            reflection_err=worst_reflection)


# ============================================================================
# RATIO ASYMPTOTICS
# ============================================================================

def _segment_distance(z, lo, hi):
    return abs(z - min(max(z.real, lo), hi))


def ratio_asymptotics_check(family, points=(3.0, -1.0, 1.5 + 1.5j), n_schedule=(50, 100, 200, 400),
                            N=None, zero_set=None, validate=True, margin=0.05, overrides=None):
    """P_n/P_{n+1}(z) against (1/alpha(t)) phi(z/alpha(t)) along an n-schedule.

    N = None runs the diagonal N = n. Errors must fall strictly while
    above the rounding floor and end below the gate; the difference of
    consecutive log-derivatives is tabulated against its limit too.
    """
    zs = np.asarray(points, dtype=complex)
    schedule = sorted(int(n) for n in n_schedule)
    top = schedule[-1]
    N_top = N or top
    key = 'ratio_zero_family' if family.is_zero else 'ratio'
    required = tolerance(key, overrides)

    if validate and not family.is_zero:
        if zero_set is None:
            zero_set = find_zeros(family, top + 1, N_top)
        lo, hi = float(zero_set.zeros[0]), float(zero_set.zeros[-1])
        close = [z for z in zs if _segment_distance(z, lo, hi) < margin]
        if close:
            raise ValueError(f"z={close[0]} is within {margin} of the zeros in [{lo:.6g}, {hi:.6g}]")

    logger.info(f"Ratio asymptotics for {family.name}: n in {schedule}, N={N or 'n'}")
    rows = []
    for n in schedule:
        N_n = N or n
        t = n / N_n
        alpha = float(family.alpha(t))
        r_next, _, _, log_next = eval_ratio_many(family, n, N_n, zs)
        _, _, _, log_n = eval_ratio_many(family, n - 1, N_n, zs)
        for z, r, d_n, d_next in zip(zs, r_next, log_n, log_next):
            ratio = 1.0 / r
            limit = scaled_phi(z, alpha)
            step = d_n - d_next
            step_limit = scaled_log_derivative(z, alpha)
            rows.append({
                'n': n, 'N': N_n, 't': t, 'alpha': alpha, 'z_re': z.real, 'z_im': z.imag,
                'lhs': ratio, 'rhs': limit, 'abs_err': abs(ratio - limit),
                'log_derivative_step': step, 'log_derivative_limit': step_limit,
                'derivative_err': abs(step - step_limit),
            })
    table = pd.DataFrame(rows)

    floor = 1e-13
    violations = []
    for (z_re, z_im), group in table.groupby(['z_re', 'z_im'], sort=False):
        errs = group['abs_err'].to_numpy()
        for i in range(1, len(errs)):
            if errs[i - 1] > floor and not errs[i] < errs[i - 1]:
                violations.append({'z': complex(z_re, z_im), 'n': int(group['n'].iloc[i])})

    if family.is_zero:
        achieved = float(table['abs_err'].max())
    else:
        achieved = float(table.loc[table['n'] == top, 'abs_err'].max())
    if violations:
        logger.warning(f"Ratio errors for {family.name} not decreasing at {violations}")
    return CheckReport(
        name=key, achieved=achieved, required=required,
        passed=bool(achieved <= required and not violations),
        details={'family': family.name, 'violations': violations,
                 'derivative_top': float(table.loc[table['n'] == top, 'derivative_err'].max())},
        table=table,
    )
