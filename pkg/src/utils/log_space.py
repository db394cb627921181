"""
Log-space numerics for counting formulas.

Counts in the asymptotic formulas overflow floats long before the instances get
interesting, so every formula value is carried as a natural logarithm. Prefactors
built from factorials are evaluated exactly with Python integers while that is
cheap and through log-gamma otherwise.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from scipy.special import gammaln

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class LogValue:
    """A nonnegative real stored as its natural logarithm, with an explicit zero flag."""

    log_value: float
    is_zero: bool = False

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(log_value=float("-inf"), is_zero=True)

    @classmethod
    def one(cls) -> "LogValue":
        return cls(log_value=0.0)

    @classmethod
    def from_log(cls, log_value: float) -> "LogValue":
        return cls(log_value=float(log_value))

    @classmethod
    def from_number(cls, value: Union[int, Fraction, float]) -> "LogValue":
        """Exact log of a nonnegative int or Fraction; float input goes through math.log."""
        if value < 0:
            raise ValueError(f"LogValue cannot hold a negative number: {value}")
        if value == 0:
            return cls.zero()
        if isinstance(value, (int, Fraction)):
            return cls(log_value=log_of_fraction(Fraction(value)))
        return cls(log_value=math.log(value))

    @property
    def value(self) -> float:
        """Plain float value; inf when the exponent overflows."""
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return float("inf")

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.is_zero or other.is_zero:
            return LogValue.zero()
        return LogValue(log_value=self.log_value + other.log_value)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.is_zero:
            return LogValue.zero()
        return LogValue(log_value=self.log_value - other.log_value)


def log_of_fraction(q: Fraction) -> float:
    """Natural log of a positive rational; math.log handles integers of any size."""
    if q <= 0:
        raise ValueError(f"log of nonpositive rational {q}")
    return math.log(q.numerator) - math.log(q.denominator)


def log_factorial(n: int) -> float:
    return float(gammaln(n + 1))


def exact_prefactor(
    num_factorials: Iterable[int],
    den_factorials: Iterable[int],
    pow2: int = 0,
    num_extra: int = 1,
    den_extra: int = 1,
) -> Fraction:
    """
    Evaluate num_extra * prod(a!) * 2**pow2 / (den_extra * prod(b!)) exactly.

    Args:
        num_factorials: Arguments whose factorials multiply the numerator
        den_factorials: Arguments whose factorials multiply the denominator
        pow2: Power of two (may be negative)
        num_extra: Extra integer factor in the numerator
        den_extra: Extra integer factor in the denominator

    Returns:
        The exact rational value
    """
    numerator = num_extra
    for a in num_factorials:
        numerator *= math.factorial(a)
    denominator = den_extra
    for b in den_factorials:
        denominator *= math.factorial(b)
    if pow2 >= 0:
        numerator <<= pow2
    else:
        denominator <<= -pow2
    return Fraction(numerator, denominator)


def log_prefactor(
    num_factorials: Iterable[int],
    den_factorials: Iterable[int],
    pow2: int = 0,
    num_extra: int = 1,
    den_extra: int = 1,
    exact: bool = True,
) -> float:
    """
    Log of the same quantity as exact_prefactor, by exact integers or by log-gamma.

    Returns:
        Natural log of the prefactor (-inf when num_extra is 0)
    """
    num_factorials = list(num_factorials)
    den_factorials = list(den_factorials)
    if num_extra == 0:
        return float("-inf")
    if exact:
        return log_of_fraction(
            exact_prefactor(num_factorials, den_factorials, pow2, num_extra, den_extra)
        )
    total = sum(log_factorial(a) for a in num_factorials)
    total -= sum(log_factorial(b) for b in den_factorials)
    return total + pow2 * LOG2 + math.log(num_extra) - math.log(den_extra)
