import numpy as np

from fourterm.exceptions import NearPoleError

# Rescale the running window once its largest entry leaves [TINY, HUGE].
HUGE = 1e100
TINY = 1e-100


def scaled_recurrence(b, c, d, x, n, with_derivative=False):
    """Run P_{k+1} = (x - b_k) P_k - c_k P_{k-1} - d_k P_{k-2} up to k = n.

    ``x`` is a 1-D float array. Returns ``(p, dp, log_scale)`` with
    P_n(x) = p * exp(log_scale) and P_n'(x) = dp * exp(log_scale);
    ``dp`` is None unless ``with_derivative``. The window (P_k, P_{k-1},
    P_{k-2}) and its derivative share one scale per point, which keeps
    both linear recurrences exact under rescaling.
    """
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    p1 = np.zeros_like(x)
    p2 = np.zeros_like(x)
    dp0 = np.zeros_like(x)
    dp1 = np.zeros_like(x)
    dp2 = np.zeros_like(x)
    log_scale = np.zeros_like(x)

    for k in range(n):
        shift = x - b[k]
        p_next = shift * p0 - c[k] * p1 - d[k] * p2
        if with_derivative:
            dp_next = p0 + shift * dp0 - c[k] * dp1 - d[k] * dp2
            dp0, dp1, dp2 = dp_next, dp0, dp1
        p0, p1, p2 = p_next, p0, p1

        size = np.maximum(np.maximum(np.abs(p0), np.abs(p1)), np.abs(p2))
        if with_derivative:
            size = np.maximum(size, np.maximum(np.abs(dp0), np.maximum(np.abs(dp1), np.abs(dp2))))
        out = (size > HUGE) | ((size < TINY) & (size > 0))
        if out.any():
            s = size[out]
            p0[out] /= s
            p1[out] /= s
            p2[out] /= s
            if with_derivative:
                dp0[out] /= s
                dp1[out] /= s
                dp2[out] /= s
            log_scale[out] += np.log(s)

    return p0, (dp0 if with_derivative else None), log_scale


def to_sign_log(mantissa, log_scale):
    """Split scaled values into (sign, log|value|) arrays; zeros get -inf."""
    sign = np.sign(mantissa).astype(int)
    with np.errstate(divide='ignore'):
        log_mag = np.where(mantissa != 0, np.log(np.abs(mantissa)) + log_scale, -np.inf)
    return sign, log_mag


def ratio_recurrence(b, c, d, z, n, floor):
    """Ratio form of the recurrence at complex points ``z`` (1-D array).

    Tracks q_k = P_{k-1}/P_k with q_0 = 0, so the missing P_{-1}, P_{-2}
    terms drop out on their own:
        r_{k+1} = z - b_k - c_k q_k - d_k q_k q_{k-1}
        l_{k+1} = q_{k+1} (1 + (z - b_k) l_k - c_k q_k l_{k-1} - d_k q_k q_{k-1} l_{k-2})
    where l_k = P_k'/P_k. Returns r_{n+1}, r_n, sum of log r and l_{n+1}.
    Raises NearPoleError when some |r_k| drops below ``floor``.
    """
    z = np.asarray(z, dtype=complex)
    q0 = np.zeros_like(z)     # q_k
    q1 = np.zeros_like(z)     # q_{k-1}
    l0 = np.zeros_like(z)     # l_k
    l1 = np.zeros_like(z)
    l2 = np.zeros_like(z)
    r = np.full_like(z, np.nan)
    r_prev = np.full_like(z, np.nan)
    log_value = np.zeros_like(z)

    for k in range(n + 1):
        shift = z - b[k]
        r_next = shift - c[k] * q0 - d[k] * q0 * q1
        small = np.abs(r_next) < floor
        if small.any():
            raise NearPoleError(
                f"|P_{k + 1}/P_{k}| fell below {floor:g}",
                step=k + 1, points=z[small].tolist(),
            )
        q_next = 1.0 / r_next
        l_next = q_next * (1.0 + shift * l0 - c[k] * q0 * l1 - d[k] * q0 * q1 * l2)
        log_value = log_value + np.log(r_next)

        r_prev, r = r, r_next
        q0, q1 = q_next, q0
        l0, l1, l2 = l_next, l0, l1

    return r, r_prev, log_value, l0
