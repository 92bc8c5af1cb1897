# zeros/models.py
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Sorted zeros x_1 < ... < x_n of one P_{n,N}.

    ``levels[k-1]`` holds the zeros of P_k when the cascade was asked to
    keep every level. A set from the direct scan has no levels and may
    hold fewer than n zeros.
    """
    n: int
    N: int
    zeros: np.ndarray
    bound_R: float
    real_simple: bool = True
    interlaced_with_prev: bool = True
    levels: Optional[List[np.ndarray]] = field(default=None, repr=False)

    def __len__(self):
        return len(self.zeros)

    @property
    def missing(self):
        return self.n - len(self.zeros)

    @property
    def validated(self):
        return {
            'real_simple': self.real_simple,
            'interlaced_with_prev': self.interlaced_with_prev,
        }


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Normalized zero counting measure, weight 1/n on each (rescaled) zero."""
    points: np.ndarray
    scale: float = 1.0

    @property
    def n(self):
        return len(self.points)

    @property
    def weights(self):
        return np.full(self.n, 1.0 / self.n)

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def cdf(self, x):
        return np.searchsorted(self.points, x, side='right') / self.n


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of checking real simple interlacing zeros up to n_max."""
    family: str
    n_max: int
    N: int
    passed: bool
    real_simple: bool
    interlacing: bool
    alternation: bool
    min_gap: float
    min_interlacing_margin: float
    zero_count: int
    grid_sign_changes: int
    failed_level: Optional[int] = None
    failed_bracket: Optional[Tuple[float, float]] = None
    message: str = ''
