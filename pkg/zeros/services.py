import logging
import time

import numpy as np
import pandas as pd
from django.conf import settings
from scipy.optimize import brentq

from coeffs.services import coefficient_arrays, make_constant_family
from fourterm.checks import CheckReport, tolerance
from fourterm.exceptions import InterlacingViolation, ToleranceFailure
from polycore.utils import scaled_recurrence
from .models import EmpiricalMeasure, HypothesisReport, ZeroSet
from .utils import signs_at, solve_brackets

logger = logging.getLogger(__name__)


def spectral_bound(family, n, N):
    """R = sup_{k <= n} (1 + |b_k| + |c_k| + |d_k|) on the working coefficients."""
    b, c, d = coefficient_arrays(family, n, N)
    return float(np.max(1.0 + np.abs(b) + np.abs(c) + np.abs(d)))


# ============================================================================
# INTERLACING CASCADE
# ============================================================================

def zero_cascade(family, n, N, keep_levels=False):
    """Zeros of P_{k,N} for k = 1..n, each level bracketed by the previous one.

    The zeros of P_{k-1} together with -R and R split the line into k
    brackets, one per zero of P_k when the zeros interlace.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    R = spectral_bound(family, n, N)

    if family.is_zero:
        # P_k = x**k
        levels = [np.zeros(k) for k in range(1, n + 1)] if keep_levels else None
        return ZeroSet(n=n, N=N, zeros=np.zeros(n), bound_R=R,
                       real_simple=False, interlaced_with_prev=False, levels=levels)

    b, c, d = coefficient_arrays(family, n, N)
    xtol = settings.FOURTERM_CASCADE_XTOL
    polish = settings.FOURTERM_NEWTON_POLISH_STEPS
    max_steps = settings.FOURTERM_BISECTION_MAX_STEPS
    floor = settings.FOURTERM_CASCADE_ABS_FLOOR

    logger.info(f"Zero cascade for {family.name}: n={n}, N={N}, R={R:.6g}")
    started = time.perf_counter()

    previous = np.empty(0)
    levels = [] if keep_levels else None
    for k in range(1, n + 1):
        edges = np.concatenate(([-R], previous, [R]))
        edge_signs = signs_at(b, c, d, k, edges)
        lo_signs, hi_signs = edge_signs[:-1], edge_signs[1:]
        bad = np.flatnonzero(lo_signs * hi_signs >= 0)
        if bad.size:
            j = int(bad[0])
            bracket = (float(edges[j]), float(edges[j + 1]))
            logger.error(f"{family.name}: no sign change of P_{k} on {bracket} (N={N})")
            raise InterlacingViolation(
                f"P_{k} has no sign change on bracket {bracket}", level=k, bracket=bracket,
            )
        current = solve_brackets(
            b, c, d, k, edges[:-1], edges[1:], lo_signs, xtol, polish, max_steps, floor,
        )
        if keep_levels:
            levels.append(current)
        previous = current

    logger.info(f"Zero cascade for {family.name} finished in {time.perf_counter() - started:.2f}s")
    simple = bool(np.all(np.diff(previous) > 0))
    return ZeroSet(n=n, N=N, zeros=previous, bound_R=R,
                   real_simple=simple, interlaced_with_prev=True, levels=levels)


# ============================================================================
# DIRECT SCAN
# ============================================================================

def scan_grid(R, count):
    """Uniform points over [-R, R] merged with geometric points towards 0 from both sides."""
    geometric = np.geomspace(R * 1e-12, R, count)
    return np.unique(np.concatenate((np.linspace(-R, R, count), geometric, -geometric, [0.0])))


def scan_zeros(family, n, N, points_per_zero=None):
    """Real zeros of P_{n,N} found without the lower levels.

    Sign changes of P_n between neighbouring grid points are refined
    with the cascade's bracket solver. Zeros off the real line, or two
    zeros in one grid cell, are not found, so the ZeroSet may hold
    fewer than n points.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    points_per_zero = points_per_zero or settings.FOURTERM_SCAN_POINTS_PER_ZERO
    R = spectral_bound(family, n, N)
    b, c, d = coefficient_arrays(family, n, N)
    grid = scan_grid(R, points_per_zero * n)
    signs = signs_at(b, c, d, n, grid)

    exact = grid[signs == 0]
    cells = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    refined = solve_brackets(
        b, c, d, n, grid[cells], grid[cells + 1], signs[cells],
        settings.FOURTERM_CASCADE_XTOL, settings.FOURTERM_NEWTON_POLISH_STEPS,
        settings.FOURTERM_BISECTION_MAX_STEPS, settings.FOURTERM_CASCADE_ABS_FLOOR,
    )
    zeros = np.sort(np.concatenate((exact, refined)))
    logger.info(f"Scan of P_{n} for {family.name} (N={N}): {len(zeros)} of {n} zeros real")
    return ZeroSet(n=n, N=N, zeros=zeros, bound_R=R,
                   real_simple=len(zeros) == n, interlaced_with_prev=False)


def find_zeros(family, n, N, keep_levels=False):
    """Cascade zeros, or the scanned real zeros of P_n once interlacing breaks.

    Raises the cascade's InterlacingViolation when the scan finds no
    real zero either.
    """
    try:
        return zero_cascade(family, n, N, keep_levels=keep_levels)
    except InterlacingViolation as e:
        violation = e
    logger.warning(f"{family.name}: interlacing breaks at level {violation.level}, scanning P_{n} directly")
    zs = scan_zeros(family, n, N)
    if len(zs) == 0:
        raise violation
    if len(zs) < n:
        logger.warning(f"{family.name}: only {len(zs)} of {n} zeros of P_{n} found on the real line")
    return zs


def isolate_zeros_on_grid(family, n, N, points=10_000):
    """Independent zero finder: sign changes on a uniform grid over [-R, R], then brentq.

    Only meant for small n, where P_n fits in a float.
    """
    R = spectral_bound(family, n, N)
    b, c, d = coefficient_arrays(family, n, N)
    grid = np.linspace(-R, R, points)
    signs = signs_at(b, c, d, n, grid)

    def value(x):
        p, _, log_scale = scaled_recurrence(b, c, d, np.array([x]), n)
        return float(p[0] * np.exp(log_scale[0]))

    found = list(grid[signs == 0])
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        found.append(brentq(value, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return np.sort(np.array(found))


def count_sign_changes(family, n, N, points):
    R = spectral_bound(family, n, N)
    b, c, d = coefficient_arrays(family, n, N)
    signs = signs_at(b, c, d, n, np.linspace(-R, R, points))
    signs = signs[signs != 0]
    return int(np.sum(signs[:-1] != signs[1:]))


# ============================================================================
# HYPOTHESIS VALIDATION
# ============================================================================

def validate_hypotheses(family, n_max, N):
    """Report whether P_1..P_{n_max} have real simple interlacing zeros.

    Failures are reported rather than raised.
    """
    if family.is_zero:
        return HypothesisReport(
            family=family.name, n_max=n_max, N=N, passed=False,
            real_simple=False, interlacing=False, alternation=False,
            min_gap=0.0, min_interlacing_margin=0.0, zero_count=n_max,
            grid_sign_changes=0, message="degenerate: P_n = x**n, every zero sits at 0",
        )

    try:
        zs = zero_cascade(family, n_max, N, keep_levels=True)
    except (InterlacingViolation, ToleranceFailure) as e:
        logger.warning(f"Cascade fails for {family.name} at level {e.level}: {e.message}")
        return HypothesisReport(
            family=family.name, n_max=n_max, N=N, passed=False,
            real_simple=False, interlacing=False, alternation=False,
            min_gap=float('nan'), min_interlacing_margin=float('nan'),
            zero_count=0, grid_sign_changes=count_sign_changes(family, n_max, N, 10 * n_max),
            failed_level=e.level, failed_bracket=getattr(e, 'bracket', None),
            message=f"{type(e).__name__}: {e.message}",
        )

    gaps = [np.min(np.diff(level)) for level in zs.levels if level.size > 1]
    min_gap = float(min(gaps)) if gaps else float('inf')

    margins = []
    for upper, lower in zip(zs.levels[1:], zs.levels[:-1]):
        # x_j^{k+1} < x_j^k < x_{j+1}^{k+1}
        margins.append(np.min(lower - upper[:-1]))
        margins.append(np.min(upper[1:] - lower))
    min_margin = float(min(margins)) if margins else float('inf')

    b, c, d = coefficient_arrays(family, n_max, N)
    midpoints = 0.5 * (zs.zeros[:-1] + zs.zeros[1:])
    mid_signs = signs_at(b, c, d, n_max, midpoints)
    alternation = bool(np.all(mid_signs[:-1] * mid_signs[1:] < 0)) if midpoints.size > 1 else True

    real_simple = zs.real_simple and min_gap > 0 and len(zs) == n_max
    interlacing = min_margin > 0
    passed = real_simple and interlacing and alternation
    report = HypothesisReport(
        family=family.name, n_max=n_max, N=N, passed=passed,
        real_simple=real_simple, interlacing=interlacing, alternation=alternation,
        min_gap=min_gap, min_interlacing_margin=min_margin, zero_count=len(zs),
        grid_sign_changes=count_sign_changes(family, n_max, N, 10 * n_max),
        message='' if passed else 'zeros found but margins or alternation fail',
    )
    if not passed:
        logger.warning(f"Hypothesis check for {family.name} (n_max={n_max}, N={N}) failed")
    return report


# ============================================================================
# MEASURES AND EXPORT
# ============================================================================

def empirical_measure(zs, family):
    """Atoms at x_j / N**p with weight 1/n each.

    The cascade runs on the working recurrence, so its zeros already are
    the original zeros divided by N**p.
    """
    return EmpiricalMeasure(points=np.asarray(zs.zeros, dtype=float), scale=family.scale(zs.N))


def zero_table(zs, family):
    """One row per zero: (k_level, j_index, zero, rescaled_zero).

    Every level is listed when the ZeroSet kept them, otherwise just level n.
    """
    scale = family.scale(zs.N)
    levels = zs.levels if zs.levels is not None else [zs.zeros]
    first = 1 if zs.levels is not None else zs.n
    frames = []
    for k, level in enumerate(levels, start=first):
        frames.append(pd.DataFrame({
            'k_level': k,
            'j_index': np.arange(1, len(level) + 1),
            'zero': level * scale,
            'rescaled_zero': level,
        }))
    return pd.concat(frames, ignore_index=True)


def zeros_oracle_check(cases=None, overrides=None):
    """Cascade zeros against the grid-isolation zeros for every degree up to n_max.

    ``cases`` is a list of (family, n_max); the defaults stay where a
    10**4-point grid still separates the smallest zeros.
    """
    required = tolerance('zeros_oracle', overrides)
    if cases is None:
        cases = [(make_constant_family(1.0), 12), (make_constant_family(27 / 4), 11),
                 (make_constant_family(2.0), 12)]
    rows = []
    for family, n_max in cases:
        for n in range(1, n_max + 1):
            cascade = zero_cascade(family, n, n).zeros
            oracle = isolate_zeros_on_grid(family, n, n)
            if len(oracle) != n:
                logger.warning(f"Grid isolation found {len(oracle)} of {n} zeros for {family.name}")
                err = float('inf')
            else:
                err = float(np.max(np.abs(cascade - oracle)))
            rows.append({'family': family.name, 'n': n, 'found': len(oracle), 'abs_err': err})
    table = pd.DataFrame(rows)
    return CheckReport.gate('zeros_oracle', table['abs_err'].max(), required, table=table)
