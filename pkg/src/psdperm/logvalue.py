"""Sign-plus-logarithm numbers.

Permanents and the bounds on them scale like ``e^{cn}``, so everything the
library reports is carried as ``sign * exp(i*phase) * exp(log_magnitude)``.
The phase is kept in ``(-pi/2, pi/2]``; a residual phase outside that range is
folded into the sign, so real numbers always have ``phase == 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

NEG_INF = -math.inf


def _fold(sign: int, phase: float) -> tuple[int, float]:
    phase = math.remainder(phase, 2 * math.pi)  # now in [-pi, pi]
    if phase > math.pi / 2:
        return -sign, phase - math.pi
    if phase <= -math.pi / 2:
        return -sign, phase + math.pi
    return sign, phase


@dataclass(frozen=True)
class LogValue:
    sign: int
    log_magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", NEG_INF)
            object.__setattr__(self, "phase", 0.0)
        elif self.log_magnitude == NEG_INF:
            object.__setattr__(self, "sign", 0)
            object.__setattr__(self, "phase", 0.0)
        elif math.isnan(self.log_magnitude):
            raise ValueError("log_magnitude is NaN")

    @classmethod
    def zero(cls) -> LogValue:
        return cls(0, NEG_INF)

    @classmethod
    def one(cls) -> LogValue:
        return cls(1, 0.0)

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> LogValue:
        return cls(sign, float(log_magnitude))

    @classmethod
    def from_value(cls, z) -> LogValue:
        z = complex(z)
        if z == 0:
            return cls.zero()
        if z.imag == 0:
            return cls(1 if z.real > 0 else -1, math.log(abs(z.real)))
        sign, phase = _fold(1, cmath.phase(z))
        return cls(sign, math.log(abs(z)), phase)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def value(self):
        """Ordinary number; overflows to inf when ``log_magnitude`` is huge."""
        if self.sign == 0:
            return 0.0
        mag = math.exp(self.log_magnitude) if self.log_magnitude < 709.7 else math.inf
        if self.phase == 0.0:
            return self.sign * mag
        return self.sign * mag * cmath.exp(1j * self.phase)

    def __float__(self) -> float:
        return float(np.real(self.value))

    def __mul__(self, other) -> LogValue:
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        sign, phase = _fold(self.sign * other.sign, self.phase + other.phase)
        return LogValue(sign, self.log_magnitude + other.log_magnitude, phase)

    __rmul__ = __mul__

    def __truediv__(self, other) -> LogValue:
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogValue")
        return self * LogValue(other.sign, -other.log_magnitude, -other.phase)

    def __neg__(self) -> LogValue:
        return LogValue(-self.sign, self.log_magnitude, self.phase)

    def __add__(self, other) -> LogValue:
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        shift = max(self.log_magnitude, other.log_magnitude)
        total = self._unit(shift) + other._unit(shift)
        if total == 0:
            return LogValue.zero()
        out = LogValue.from_value(total)
        return LogValue(out.sign, out.log_magnitude + shift, out.phase)

    __radd__ = __add__

    def __sub__(self, other) -> LogValue:
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        return self + (-other)

    def _unit(self, shift: float) -> complex:
        return self.sign * cmath.exp(self.log_magnitude - shift + 1j * self.phase)

    def pow(self, k: float) -> LogValue:
        if self.sign == 0:
            return LogValue.zero() if k > 0 else LogValue.one()
        if self.sign < 0 or self.phase != 0.0:
            raise ValueError("pow is defined only for positive LogValues")
        return LogValue(1, k * self.log_magnitude)

    def log10(self) -> float:
        return self.log_magnitude / math.log(10.0)

    def isclose(self, other: LogValue, rel: float = 1e-12) -> bool:
        if self.sign == 0 or other.sign == 0:
            return self.sign == other.sign
        diff = (self - other)
        return diff.sign == 0 or diff.log_magnitude <= max(self.log_magnitude, other.log_magnitude) + math.log(rel)

    def to_dict(self) -> dict:
        return {"sign": self.sign, "log_value": self.log_magnitude, "phase": self.phase}


def log_sum(logs) -> LogValue:
    """Sum of positive numbers given by their logarithms."""
    logs = np.asarray(logs, dtype=float)
    finite = logs[np.isfinite(logs)]
    if finite.size == 0:
        return LogValue.zero()
    m = finite.max()
    return LogValue(1, float(m + math.log(math.fsum(np.exp(finite - m)))))
