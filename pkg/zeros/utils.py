import numpy as np

from fourterm.exceptions import ToleranceFailure
from polycore.utils import scaled_recurrence


def signs_at(b, c, d, k, x):
    """Sign of P_k at the points x."""
    p, _, _ = scaled_recurrence(b, c, d, np.asarray(x, dtype=float), k)
    return np.sign(p)


def newton_steps_at(b, c, d, k, x):
    """(sign of P_k, P_k/P_k') at x; the step is inf where P_k' vanishes."""
    p, dp, _ = scaled_recurrence(b, c, d, x, k, with_derivative=True)
    with np.errstate(divide='ignore', invalid='ignore'):
        step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), np.inf)
    return np.sign(p), step


def solve_brackets(b, c, d, k, lo, hi, sign_lo, xtol, polish_steps, max_steps, abs_floor=1e-30):
    """Zero of P_k inside each bracket (lo[i], hi[i]).

    Every bracket must hold a sign change, sign_lo being the sign of P_k
    at lo. Bisection runs until the Newton candidate lands inside the
    bracket with |P/P'| under a quarter of its width; at most
    ``polish_steps`` Newton steps follow, the bracket still shrinking on
    every evaluation. A point is done once its step or its bracket drops
    below xtol * max(|x|, abs_floor).
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    sign_lo = np.asarray(sign_lo, dtype=float)
    x = 0.5 * (lo + hi)
    newton_used = np.zeros(x.size, dtype=int)
    active = np.arange(x.size)

    for _ in range(max_steps):
        if active.size == 0:
            return x
        xa = x[active]
        s, step = newton_steps_at(b, c, d, k, xa)

        left = s == sign_lo[active]
        lo[active] = np.where(left, xa, lo[active])
        hi[active] = np.where(left, hi[active], xa)

        scale = xtol * np.maximum(np.abs(xa), abs_floor)
        width = hi[active] - lo[active]
        candidate = xa - step
        in_bracket = (candidate > lo[active]) & (candidate < hi[active])
        newton_ok = (
            in_bracket
            & (np.abs(step) < 0.25 * width)
            & (newton_used[active] < polish_steps)
        )
        converged = (s == 0) | (newton_ok & (np.abs(step) <= scale)) | (width <= scale)

        x_next = np.where(newton_ok, candidate, 0.5 * (lo[active] + hi[active]))
        x_next = np.where(s == 0, xa, x_next)
        newton_used[active] += newton_ok

        x[active] = x_next
        active = active[~converged]

    raise ToleranceFailure(
        f"{active.size} zero(s) of P_{k} not resolved after {max_steps} steps",
        achieved=float(np.max(hi[active] - lo[active])),
        required=xtol,
        level=k,
    )
