# coeffs/models.py
"""Value types for recurrence coefficient families.

Nothing here is a database model; the apps keep their domain types in
models.py and all of them are immutable.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple
import math

import numpy as np
from django.conf import settings
from scipy.optimize import brentq

from fourterm.exceptions import ProfileError, HorizonError

FAMILY_KINDS = ['constant', 'jacobi_pineiro', 'laguerre1', 'macdonald', 'custom']


# ============================================================================
# LIMIT PROFILES alpha(t)
# ============================================================================

@dataclass(frozen=True)
class ConstantProfile:
    value: float

    def __call__(self, t):
        if np.ndim(t):
            return np.full(np.shape(t), float(self.value))
        return float(self.value)

    def describe(self):
        return self.value


@dataclass(frozen=True)
class PowerProfile:
    """alpha(t) = coefficient * t**power"""
    coefficient: float
    power: float

    def __call__(self, t):
        if np.ndim(t):
            return self.coefficient * np.power(np.asarray(t, dtype=float), self.power)
        return self.coefficient * float(t) ** self.power

    def describe(self):
        return {'form': 'power', 'coefficient': self.coefficient, 'power': self.power}


@dataclass(frozen=True)
class TabulatedProfile:
    """Piecewise-linear alpha through (t, alpha) nodes, constant beyond the ends."""
    grid: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.grid]
        values = [a for _, a in self.grid]
        if not self.grid:
            raise ProfileError("Profile table is empty")
        if any(t < 0 for t in ts):
            raise ProfileError("Profile table has negative t", grid=self.grid)
        if any(not math.isfinite(a) or a < 0 for a in values):
            raise ProfileError("Profile table has a negative or non-finite alpha", grid=self.grid)
        if any(b <= a for a, b in zip(ts, ts[1:])):
            # repeated t with two alpha values is a jump
            raise ProfileError("Profile table must have strictly increasing t (no jumps)", grid=self.grid)

    def __call__(self, t):
        ts = np.array([p[0] for p in self.grid])
        values = np.array([p[1] for p in self.grid])
        out = np.interp(t, ts, values)
        return out if np.ndim(t) else float(out)

    def describe(self):
        return {'grid': [list(p) for p in self.grid], 'interp': 'linear'}


# ============================================================================
# COEFFICIENT FAMILY
# ============================================================================

@dataclass(frozen=True)
class CoefficientTable:
    """Exact working coefficients supplied for one N (index = n)."""
    N: int
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    d: Tuple[float, ...]

    def __len__(self):
        return min(len(self.b), len(self.c), len(self.d))


@dataclass(frozen=True)
class CoefficientFamily:
    """Supplier of b_{n,N}, c_{n,N}, d_{n,N} with limit profile alpha(t).

    b, c, d are in original coordinates; ``working_*`` are the values
    after dividing P by N**(p*n) and the variable by N**p, which is the
    recurrence the numeric pipeline runs on.
    """
    name: str
    kind: str
    profile: object
    scale_exponent: float = 0.0
    table: Optional[CoefficientTable] = field(default=None, compare=False)

    def alpha(self, t):
        return self.profile(t)

    def beta(self, t):
        return 4.0 * self.alpha(t) / 27.0

    def _tabulated(self, n, N):
        if self.table is not None and N == self.table.N and n < len(self.table):
            return self.table.b[n], self.table.c[n], self.table.d[n]
        return None

    def working(self, n, N):
        exact = self._tabulated(n, N)
        if exact is not None:
            return exact
        beta = self.beta(n / N)
        return 3.0 * beta, 3.0 * beta ** 2, beta ** 3

    def working_b(self, n, N):
        return self.working(n, N)[0]

    def working_c(self, n, N):
        return self.working(n, N)[1]

    def working_d(self, n, N):
        return self.working(n, N)[2]

    def scale(self, N):
        """N**p, the factor between working and original zeros."""
        return float(N) ** self.scale_exponent

    def b(self, n, N):
        return self.scale(N) * self.working_b(n, N)

    def c(self, n, N):
        return self.scale(N) ** 2 * self.working_c(n, N)

    def d(self, n, N):
        return self.scale(N) ** 3 * self.working_d(n, N)

    @property
    def is_zero(self):
        return isinstance(self.profile, ConstantProfile) and self.profile.value == 0 and self.table is None


@dataclass(frozen=True)
class LimitDeviation:
    N: int
    n: int
    t: float
    b_error: float
    c_error: float
    d_error: float

    @property
    def worst(self):
        return max(self.b_error, self.c_error, self.d_error)


# ============================================================================
# LIMIT PROFILE INTERVALS
# ============================================================================

@dataclass(frozen=True)
class LimitProfile:
    """alpha together with the level-set intervals [t_-(x), t_+(x)].

    The set {s >= 0 : x <= alpha(s)} is located by a grid scan of
    [0, t*] and its ends refined with brentq; an end at the horizon is
    reported as +inf.
    """
    alpha: object
    horizon: float = None
    samples: int = 4001

    def __post_init__(self):
        if self.horizon is None:
            object.__setattr__(self, 'horizon', settings.FOURTERM_T_HORIZON)

    def grid(self):
        return np.linspace(0.0, self.horizon, self.samples)

    def check_horizon(self, t):
        if t <= 0 or t > self.horizon:
            raise HorizonError(f"t={t} outside the working horizon (0, {self.horizon}]", t=t)

    def check_profile(self):
        """alpha finite and nonnegative on the sampling grid."""
        values = np.asarray(self.alpha(self.grid()), dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ProfileError("alpha must be finite and nonnegative on [0, t*]")
        return values

    def interval(self, x):
        s = self.grid()
        values = np.asarray(self.alpha(s), dtype=float)
        inside = np.flatnonzero(values >= x)
        if inside.size == 0:
            return math.inf, math.inf
        if np.any(np.diff(inside) != 1):
            raise ProfileError(f"{{s : x <= alpha(s)}} is not an interval at x={x}", x=x)

        def gap(u):
            return float(self.alpha(u)) - x

        first, last = inside[0], inside[-1]
        if first == 0:
            lo = 0.0
        else:
            lo = brentq(gap, s[first - 1], s[first], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if last == s.size - 1:
            hi = math.inf
        else:
            hi = brentq(gap, s[last], s[last + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return lo, hi

    def t_minus(self, x):
        return self.interval(x)[0]

    def t_plus(self, x):
        return self.interval(x)[1]
