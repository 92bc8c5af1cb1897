# phifield/models.py
from dataclasses import dataclass

from .utils import K, cbrt_branch, sqrt_branch


@dataclass(frozen=True)
class BranchRules:
    """Argument ranges used for the square and cube roots inside phi."""
    sqrt_range: str = 'theta in [0, 2pi)'
    cbrt_range: str = 'theta in (-pi, pi]'

    def sqrt(self, w):
        return sqrt_branch(w)

    def cbrt(self, w):
        return cbrt_branch(w)

    def describe(self):
        return {'sqrt': self.sqrt_range, 'cbrt': self.cbrt_range}


BRANCH_RULES = BranchRules()


@dataclass(frozen=True)
class PhiEval:
    """phi and phi'/phi at one point off [0, 1]."""
    z: complex
    phi: complex
    phi_log_deriv: complex

    @property
    def identity_residual(self):
        """Relative residual of z phi = (1 + 4 phi/27)**3."""
        lhs = self.z * self.phi
        rhs = (1.0 + K * self.phi) ** 3
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs))
