# polycore/models.py
from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class ScaledValue:
    """A real number stored as sign and natural log of its magnitude.

    sign is 0 exactly when log_mag is -inf.
    """
    sign: int
    log_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.log_mag == -math.inf):
            raise ValueError("sign 0 and log_mag -inf must go together")

    @classmethod
    def zero(cls):
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, value):
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_mantissa(cls, mantissa, log_scale):
        """mantissa * exp(log_scale)"""
        if mantissa == 0:
            return cls.zero()
        return cls(1 if mantissa > 0 else -1, math.log(abs(mantissa)) + log_scale)

    @property
    def is_zero(self):
        return self.sign == 0

    def to_float(self):
        """Plain float; overflows to +-inf or underflows to 0."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_mag)
        except OverflowError:
            return self.sign * math.inf

    def __neg__(self):
        return ScaledValue(-self.sign, self.log_mag)

    def __mul__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if self.sign == 0 or other.sign == 0:
            return ScaledValue.zero()
        return ScaledValue(self.sign * other.sign, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero ScaledValue")
        if self.sign == 0:
            return ScaledValue.zero()
        return ScaledValue(self.sign * other.sign, self.log_mag - other.log_mag)

    def __add__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        ratio = math.exp(small.log_mag - big.log_mag)
        mantissa = 1.0 + big.sign * small.sign * ratio
        if mantissa == 0:
            return ScaledValue.zero()
        return ScaledValue(big.sign, big.log_mag + math.log(mantissa))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ScaledValue):
            other = ScaledValue.from_float(other)
        return self + (-other)


@dataclass(frozen=True)
class RatioState:
    """Complex ratio recurrence at z after k steps.

    r = P_k(z)/P_{k-1}(z), r_prev = P_{k-1}/P_{k-2} (nan for k = 1),
    log_value = sum of log r_j, whose real part is log|P_k(z)|,
    log_derivative = P_k'(z)/P_k(z).
    """
    z: complex
    k: int
    r: complex
    r_prev: complex
    log_value: complex
    log_derivative: complex

    @property
    def inverse(self):
        """P_{k-1}(z)/P_k(z)"""
        return 1.0 / self.r

    @property
    def log_magnitude(self):
        return float(np.real(self.log_value))
