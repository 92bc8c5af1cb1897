# measures/models.py
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .utils import g_profile, h_profile, profile_average_density, upsilon_unit

MEASURE_KINDS = ['upsilon_unit', 'upsilon_alpha', 'nu_profile', 'nu_L', 'nu_M', 'dirac0']


@dataclass(frozen=True)
class LimitMeasure:
    """A limit zero distribution with support [lo, hi].

    Parameters are filled according to ``kind``: ``alpha`` for
    upsilon_alpha, ``t`` for nu_L / nu_M / nu_profile and ``profile``
    (a LimitProfile) for nu_profile.
    """
    kind: str
    lo: float
    hi: float
    alpha: Optional[float] = None
    t: Optional[float] = None
    profile: Optional[object] = None

    @property
    def is_dirac(self):
        return self.kind == 'dirac0'

    def density(self, x):
        """Density at x (array or scalar); not defined for dirac0."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))

        if self.kind == 'upsilon_unit':
            out = upsilon_unit(x)
        elif self.kind == 'upsilon_alpha':
            out = upsilon_unit(x / self.alpha) / self.alpha
        elif self.kind == 'nu_L':
            scale = 27 * self.t / 8
            out = g_profile(x / scale) / scale
        elif self.kind == 'nu_M':
            scale = 27 * self.t ** 2 / 4
            out = h_profile(x / scale) / scale
        elif self.kind == 'nu_profile':
            out = np.array([profile_average_density(self.profile, self.t, xi) for xi in x])
        else:
            raise ValueError("dirac0 has no density")

        return float(out[0]) if scalar else out

    def describe(self):
        params = {'kind': self.kind, 'support': [self.lo, self.hi]}
        if self.alpha is not None:
            params['alpha'] = self.alpha
        if self.t is not None:
            params['t'] = self.t
        return params


@dataclass(frozen=True)
class KSReport:
    """sup |F_emp - F_limit| over the line, and where it is reached."""
    n: int
    statistic: float
    location: float
    limit: str = ''
