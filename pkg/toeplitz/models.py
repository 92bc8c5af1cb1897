# toeplitz/models.py
from dataclasses import dataclass


@dataclass(frozen=True)
class ToeplitzSpec:
    """Dimension and symbol of T_n: 3 beta on the diagonal, 3 beta**2 and
    beta**3 on the two sub-diagonals, 1 on the superdiagonal."""
    alpha: float
    n: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")

    @property
    def beta(self):
        return 4.0 * self.alpha / 27.0

    @property
    def band(self):
        beta = self.beta
        return 3 * beta, 3 * beta ** 2, beta ** 3

    def describe(self):
        return {'alpha': self.alpha, 'n': self.n, 'beta': self.beta}
