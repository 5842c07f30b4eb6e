"""Exact dyadic rationals numerator / 2**exponent."""

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
import re
from typing import Final, Self

_DYADIC_RE: Final[re.Pattern[str]] = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


@total_ordering
@dataclass(frozen=True, slots=True)
class Dyadic:
    """Dyadic rational in canonical form (numerator odd or exponent zero)."""

    numerator: int
    exponent: int = 0

    def __post_init__(self) -> None:
        """Normalize to canonical form."""
        if self.exponent < 0:
            object.__setattr__(self, "numerator", self.numerator << -self.exponent)
            object.__setattr__(self, "exponent", 0)
        if self.numerator == 0:
            object.__setattr__(self, "exponent", 0)
            return
        shift: int = min((self.numerator & -self.numerator).bit_length() - 1, self.exponent)
        if shift:
            object.__setattr__(self, "numerator", self.numerator >> shift)
            object.__setattr__(self, "exponent", self.exponent - shift)

    @classmethod
    def coerce(cls, value: "Dyadic | int") -> "Dyadic":
        """Return value as a Dyadic."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value)
        raise TypeError(f"cannot interpret {value!r} as a dyadic rational")

    @classmethod
    def from_fraction(cls, value: Fraction) -> Self:
        """Convert a Fraction whose denominator is a power of two."""
        den: int = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not a dyadic rational")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> Self:
        """Parse 'a' or 'a/b' with b a power of two."""
        if not (match := _DYADIC_RE.match(text)):
            raise ValueError(f"malformed dyadic rational {text!r}")
        num, den = int(match.group(1)), int(match.group(2) or 1)
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return cls.from_fraction(Fraction(num, den))

    def as_fraction(self) -> Fraction:
        """Return the exact value as a Fraction."""
        return Fraction(self.numerator, 1 << self.exponent)

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        exp: int = max(self.exponent, other.exponent)
        return (
            self.numerator << (exp - self.exponent),
            other.numerator << (exp - other.exponent),
            exp,
        )

    def __add__(self, other: "Dyadic | int") -> "Dyadic":
        """Add exactly."""
        try:
            a, b, exp = self._align(Dyadic.coerce(other))
        except TypeError:
            return NotImplemented
        return Dyadic(a + b, exp)

    __radd__ = __add__

    def __sub__(self, other: "Dyadic | int") -> "Dyadic":
        """Subtract exactly."""
        try:
            a, b, exp = self._align(Dyadic.coerce(other))
        except TypeError:
            return NotImplemented
        return Dyadic(a - b, exp)

    def __rsub__(self, other: "Dyadic | int") -> "Dyadic":
        """Subtract from other exactly."""
        try:
            return Dyadic.coerce(other) - self
        except TypeError:
            return NotImplemented

    def __mul__(self, other: "Dyadic | int") -> "Dyadic":
        """Multiply exactly."""
        try:
            rhs: Dyadic = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        return Dyadic(self.numerator * rhs.numerator, self.exponent + rhs.exponent)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        """Negate."""
        return Dyadic(-self.numerator, self.exponent)

    def __abs__(self) -> "Dyadic":
        """Absolute value."""
        return Dyadic(abs(self.numerator), self.exponent)

    def __eq__(self, other: object) -> bool:
        """Compare exactly, also against integers."""
        if isinstance(other, Dyadic):
            return (self.numerator, self.exponent) == (other.numerator, other.exponent)
        if isinstance(other, int) and not isinstance(other, bool):
            return self.exponent == 0 and self.numerator == other
        return NotImplemented

    def __hash__(self) -> int:
        """Hash consistent with integers of equal value."""
        return hash(self.numerator) if self.exponent == 0 else hash((self.numerator, self.exponent))

    def __lt__(self, other: "Dyadic | int") -> bool:
        """Order exactly."""
        try:
            a, b, _ = self._align(Dyadic.coerce(other))
        except TypeError:
            return NotImplemented
        return a < b

    def ceil_scaled(self, n: int) -> int:
        """Return ceil(self * 2**n) for n >= 0."""
        if n >= self.exponent:
            return self.numerator << (n - self.exponent)
        return -((-self.numerator) >> (self.exponent - n))

    def __str__(self) -> str:
        """Return 'a' or 'a/2^e' in lowest terms."""
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.exponent}"


ZERO: Final[Dyadic] = Dyadic(0)
ONE: Final[Dyadic] = Dyadic(1)


def pow2neg(n: int) -> Dyadic:
    """Return 2**-n exactly (n may be negative)."""
    return Dyadic(1, n)
