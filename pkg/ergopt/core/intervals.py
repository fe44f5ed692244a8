"""Exact/approximate scalar values and certified intervals."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Union

Number = Union[int, float, Fraction]


def is_rational(value: Any) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def all_rational(values: Iterable[Any]) -> bool:
    return all(is_rational(v) for v in values)


def parse_number(value: Any) -> Number:
    """Parse ints, "p/q" strings and decimal strings to exact rationals.

    Floats are kept as floats; callers that need exactness should pass strings.
    """
    if isinstance(value, bool):
        raise ValueError(f"boolean is not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as a number")


def format_number(value: Number) -> Union[str, float]:
    """Rationals print as "p/q" strings, floats as JSON numbers."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return float(value)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; a point when lo == hi."""

    lo: Number
    hi: Number

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: Number) -> "Interval":
        return cls(value, value)

    @classmethod
    def around(cls, value: Number, radius: Number) -> "Interval":
        return cls(value - radius, value + radius)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Number:
        """Midpoint (the value itself for point intervals)."""
        if self.is_point:
            return self.lo
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Number:
        return self.hi - self.lo

    def widen(self, radius: Number) -> "Interval":
        if radius == 0:
            return self
        return Interval(self.lo - radius, self.hi + radius)

    def scale(self, factor: Number) -> "Interval":
        a, b = self.lo * factor, self.hi * factor
        return Interval(min(a, b), max(a, b))

    def contains(self, value: Number, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol
