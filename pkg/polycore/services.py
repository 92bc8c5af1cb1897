import logging

import numpy as np
from django.conf import settings

from coeffs.services import coefficient_arrays
from .models import RatioState, ScaledValue
from .utils import ratio_recurrence, scaled_recurrence, to_sign_log

logger = logging.getLogger(__name__)


def _check_degree(n, N):
    if n < 0 or N < 1:
        raise ValueError(f"Need n >= 0 and N >= 1, got n={n}, N={N}")


# ============================================================================
# REAL EVALUATION
# ============================================================================

def eval_P_many(family, n, N, xs, with_derivative=False):
    """Scaled P_n (and optionally P_n') on an array of real points.

    Returns ``(sign, log_mag)`` arrays, extended with
    ``(dsign, dlog_mag)`` when ``with_derivative`` is set.
    """
    _check_degree(n, N)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    b, c, d = coefficient_arrays(family, n, N)
    p, dp, log_scale = scaled_recurrence(b, c, d, xs, n, with_derivative)
    sign, log_mag = to_sign_log(p, log_scale)
    if not with_derivative:
        return sign, log_mag
    dsign, dlog_mag = to_sign_log(dp, log_scale)
    return sign, log_mag, dsign, dlog_mag


def eval_P(family, n, N, x):
    """P_{n,N}(x) as a ScaledValue."""
    sign, log_mag = eval_P_many(family, n, N, [x])
    return ScaledValue(int(sign[0]), float(log_mag[0]))


def eval_P_and_dP(family, n, N, x):
    """(P_{n,N}(x), P_{n,N}'(x)) from the differentiated recurrence."""
    sign, log_mag, dsign, dlog_mag = eval_P_many(family, n, N, [x], with_derivative=True)
    return (
        ScaledValue(int(sign[0]), float(log_mag[0])),
        ScaledValue(int(dsign[0]), float(dlog_mag[0])),
    )


# ============================================================================
# COMPLEX RATIO EVALUATION
# ============================================================================

def eval_ratio_many(family, n, N, zs):
    """Ratio recurrence on an array of complex points.

    Returns arrays (r_{n+1}, r_n, log P_{n+1}, P_{n+1}'/P_{n+1}).
    """
    _check_degree(n, N)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    b, c, d = coefficient_arrays(family, n, N)
    return ratio_recurrence(b, c, d, zs, n, settings.FOURTERM_NEAR_POLE_FLOOR)


def eval_ratio_seq(family, n, N, z):
    """RatioState holding r_{n+1} = P_{n+1}(z)/P_n(z).

    P_n/P_{n+1} is ``state.inverse``.
    """
    try:
        r, r_prev, log_value, log_derivative = eval_ratio_many(family, n, N, [z])
    except Exception as e:
        logger.warning(f"Ratio recurrence for {family.name} (n={n}, N={N}) failed at z={z}: {e}")
        raise
    return RatioState(
        z=complex(z),
        k=n + 1,
        r=complex(r[0]),
        r_prev=complex(r_prev[0]),
        log_value=complex(log_value[0]),
        log_derivative=complex(log_derivative[0]),
    )


def log_derivative_ratio(family, n, N, z, zeros=None):
    """(1/n) P_n'(z)/P_n(z).

    With the zeros of P_n at hand this is the mean of 1/(z - x_j);
    otherwise the log-derivative is carried through the ratio recurrence.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if zeros is not None:
        zeros = np.asarray(zeros, dtype=float)
        if zeros.size != n:
            raise ValueError(f"Expected {n} zeros, got {zeros.size}")
        return complex(np.mean(1.0 / (complex(z) - zeros)))
    state = eval_ratio_seq(family, n - 1, N, z)
    return state.log_derivative / n


def log_derivative_step(family, n, N, z):
    """P_n'/P_n - P_{n+1}'/P_{n+1} at z, the derivative of log(P_n/P_{n+1})."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    state_n = eval_ratio_seq(family, n - 1, N, z)
    state_next = eval_ratio_seq(family, n, N, z)
    return state_n.log_derivative - state_next.log_derivative


# ============================================================================
# HESSENBERG MATRIX
# ============================================================================

def recurrence_matrix(family, n, N):
    """The n x n matrix L with det(zI - L) = P_n(z).

    Row k holds d_k, c_k, b_k on and left of the diagonal and 1 on the
    superdiagonal, i.e. z P_k = P_{k+1} + b_k P_k + c_k P_{k-1} + d_k P_{k-2}.
    """
    _check_degree(n, N)
    b, c, d = coefficient_arrays(family, n, N)
    L = np.zeros((n, n))
    for k in range(n):
        L[k, k] = b[k]
        if k + 1 < n:
            L[k, k + 1] = 1.0
        if k >= 1:
            L[k, k - 1] = c[k]
        if k >= 2:
            L[k, k - 2] = d[k]
    return L
