import logging
from functools import lru_cache
from itertools import combinations

import numpy as np
import pandas as pd
from django.conf import settings

from coeffs.services import make_constant_family
from fourterm.checks import CheckReport, tolerance
from measures.services import ks_check
from polycore.services import eval_P
from zeros.services import zero_cascade
from .models import ToeplitzSpec

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 6


# ============================================================================
# MATRICES
# ============================================================================

def toeplitz_matrix(alpha, n):
    """T_n: lower Hessenberg with band (3b, 3b**2, b**3) and 1 above the diagonal."""
    spec = ToeplitzSpec(alpha, n)
    diagonal, first, second = spec.band
    return (diagonal * np.eye(n) + first * np.eye(n, k=-1)
            + second * np.eye(n, k=-2) + np.eye(n, k=1))


def factor_matrix(alpha, n):
    """(n+1) x (n+1) lower bidiagonal: 1 on the diagonal, beta below."""
    spec = ToeplitzSpec(alpha, n)
    return np.eye(n + 1) + spec.beta * np.eye(n + 1, k=-1)


def extended_matrix(alpha, n):
    """The cube of factor_matrix; T_n sits in rows 1..n and columns 0..n-1."""
    return np.linalg.matrix_power(factor_matrix(alpha, n), 3)


# ============================================================================
# Q_n AT ZERO
# ============================================================================

def qn_at_zero(alpha, n):
    """Q_n(0) = (-beta)**n (1 + 3n/2 + n**2/2)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    beta = 4.0 * alpha / 27.0
    return (-beta) ** n * (1 + 1.5 * n + 0.5 * n * n)


def tn_nonsingular_check(alpha, n):
    """det T_n = (-1)**n Q_n(0), which never vanishes for beta > 0."""
    ToeplitzSpec(alpha, n)
    return qn_at_zero(alpha, n) != 0


def qn_closed_form_check(alphas=(1.0, 2.0, 27 / 4), n_max=50, overrides=None):
    """Closed-form Q_n(0) against the recurrence, relative error."""
    required = tolerance('toeplitz', overrides)
    rows = []
    for alpha in alphas:
        family = make_constant_family(alpha)
        for n in range(n_max + 1):
            closed = qn_at_zero(alpha, n)
            recurrence = eval_P(family, n, max(n, 1), 0.0).to_float()
            rows.append({'alpha': alpha, 'n': n, 'lhs': closed, 'rhs': recurrence,
                         'rel_err': abs(closed - recurrence) / abs(closed)})
    table = pd.DataFrame(rows)
    return CheckReport.gate('toeplitz', table['rel_err'].max(), required, table=table)


# ============================================================================
# CHARACTERISTIC POLYNOMIAL
# ============================================================================

def laplace_det(matrix):
    """Determinant by cofactor expansion along successive rows.

    Sub-determinants are cached on the set of columns still in play,
    which keeps n = 8 at a few thousand products.
    """
    M = np.asarray(matrix, dtype=float)
    n = M.shape[0]

    @lru_cache(maxsize=None)
    def minor(row, columns):
        if row == n:
            return 1.0
        total = 0.0
        sign = 1.0
        for position, col in enumerate(columns):
            entry = M[row, col]
            if entry != 0.0:
                rest = columns[:position] + columns[position + 1:]
                total += sign * entry * minor(row + 1, rest)
            sign = -sign
        return total

    return minor(0, tuple(range(n)))


def charpoly_identity_check(alpha, n_max=8, points=None, overrides=None):
    """det(x I - T_n) by cofactor expansion against Q_n(x) from the recurrence."""
    required = tolerance('charpoly', overrides)
    family = make_constant_family(alpha)
    xs = np.linspace(-0.5, 1.5, 9) * alpha if points is None else np.asarray(points, dtype=float)
    rows = []
    for n in range(1, n_max + 1):
        T = toeplitz_matrix(alpha, n)
        for x in xs:
            det = laplace_det(x * np.eye(n) - T)
            value = eval_P(family, n, n, x).to_float()
            rows.append({'n': n, 'x': x, 'lhs': det, 'rhs': value,
                         'rel_err': abs(det - value) / max(1.0, abs(value))})
    table = pd.DataFrame(rows)
    return CheckReport.gate('charpoly', table['rel_err'].max(), required, table=table)


# ============================================================================
# TOTAL NONNEGATIVITY
# ============================================================================

def _minor(M, rows, cols):
    return float(np.linalg.det(M[np.ix_(rows, cols)]))


def _all_minors(M):
    size = M.shape[0]
    for k in range(1, size + 1):
        for rows in combinations(range(size), k):
            for cols in combinations(range(size), k):
                yield rows, cols, _minor(M, rows, cols)


def total_nonnegativity_smalln(alpha, n, overrides=None):
    """Every minor of the bidiagonal factor and of its cube is >= 0 (up to rounding)."""
    if n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"Exhaustive minors need n <= {EXHAUSTIVE_MAX_N}, got {n}")
    required = tolerance('total_nonnegativity', overrides)
    rows = []
    for name, M in (('factor', factor_matrix(alpha, n)), ('extended', extended_matrix(alpha, n))):
        values = np.array([value for _, _, value in _all_minors(M)])
        rows.append({'matrix': name, 'minors': values.size, 'min_minor': float(values.min())})
    table = pd.DataFrame(rows)
    achieved = max(0.0, -float(table['min_minor'].min()))
    return CheckReport.gate('total_nonnegativity', achieved, required, table=table,
                            alpha=alpha, n=n, sampled=False)


def total_nonnegativity_sampled(alpha, n, samples=10_000, seed=None, overrides=None):
    """Random square minors of the cube of the factor, for n beyond exhaustive reach.

    A minor counts as negative when it falls below -tol times its
    Hadamard bound.
    """
    required = tolerance('total_nonnegativity', overrides)
    rng = np.random.default_rng(settings.FOURTERM_DEFAULT_SEED if seed is None else seed)
    M = extended_matrix(alpha, n)
    size = M.shape[0]
    worst = 0.0
    for _ in range(samples):
        k = int(rng.integers(1, size + 1))
        rows = np.sort(rng.choice(size, k, replace=False))
        cols = np.sort(rng.choice(size, k, replace=False))
        block = M[np.ix_(rows, cols)]
        bound = float(np.prod(np.maximum(np.linalg.norm(block, axis=1), 1e-300)))
        value = float(np.linalg.det(block))
        if value < 0:
            worst = max(worst, -value / bound)
    logger.info(f"Sampled {samples} minors of the extended matrix (alpha={alpha}, n={n}): worst {worst:.3g}")
    return CheckReport.gate('total_nonnegativity', worst, required, alpha=alpha, n=n,
                            sampled=True, samples=samples)


# ============================================================================
# EIGENVALUES
# ============================================================================

def eigenvalues(alpha, n):
    """Eigenvalues of T_n as the zeros of Q_n."""
    ToeplitzSpec(alpha, n)
    return zero_cascade(make_constant_family(alpha), n, n)


def scaling_equivariance_check(alpha, n, overrides=None):
    """zeros(alpha, n) = alpha * zeros(1, n), relative."""
    required = tolerance('equivariance', overrides)
    scaled = eigenvalues(alpha, n).zeros
    unit = eigenvalues(1.0, n).zeros
    errors = np.abs(scaled - alpha * unit) / np.abs(alpha * unit)
    table = pd.DataFrame({'j': np.arange(1, n + 1), 'lhs': scaled, 'rhs': alpha * unit,
                          'rel_err': errors})
    return CheckReport.gate('equivariance', float(errors.max()), required, table=table)


def toeplitz_limit_check(alpha, n_schedule=(100, 200, 400), zero_sets=None, overrides=None):
    """KS distance of the eigenvalues of T_n to the limit law on [0, alpha]."""
    zero_sets = dict(zero_sets or {})
    for n in n_schedule:
        if n not in zero_sets:
            zero_sets[n] = eigenvalues(alpha, n)
    positive = all(bool(np.all(zero_sets[n].zeros > 0)) for n in n_schedule)
    if not positive:
        logger.warning(f"Non-positive eigenvalue of T_n for alpha={alpha}")
    report = ks_check(make_constant_family(alpha), n_schedule, 'ks_constant',
                      zero_sets=zero_sets, overrides=overrides)
    report.table['min_eigenvalue'] = [float(zero_sets[n].zeros[0]) for n in n_schedule]
    report.details.update(alpha=alpha, positive=positive)
    report.passed = report.passed and positive
    return report
