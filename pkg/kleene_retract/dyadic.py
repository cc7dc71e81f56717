"""
Exact arithmetic on dyadic rationals j * 2^-e.

Every numeric value in kleene-retract is a DyadicRational: grid values,
norms, distances and the thresholds 2^-k. Python integers give arbitrary
precision, so deep adversary runs with denominators 2^K stay exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .base import FrozenStruct
from .enums import Order
from .utils import Natural, parse_dyadic_parts


class DyadicRational(FrozenStruct, frozen=True):
    """
    The exact number ``numerator / 2**exponent``.

    Canonical form: the exponent is 0 or the numerator is odd, and zero is
    stored as ``(0, 0)``. Construct values through :func:`dy_make` unless
    the fields are already canonical; the constructor rejects anything
    else, which keeps structural equality equal to value equality.
    """

    numerator: int
    exponent: Natural = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError(f"negative exponent {self.exponent}")
        if self.numerator == 0 and self.exponent != 0:
            raise ValueError("zero must be stored as 0/2^0")
        if self.exponent > 0 and self.numerator % 2 == 0:
            raise ValueError(
                f"{self.numerator}/2^{self.exponent} is not in canonical form"
            )

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: DyadicLike) -> DyadicRational:
        other = as_dyadic(other)
        e = max(self.exponent, other.exponent)
        return dy_make(_lift(self, e) + _lift(other, e), e)

    __radd__ = __add__

    def __sub__(self, other: DyadicLike) -> DyadicRational:
        return self + (-as_dyadic(other))

    def __rsub__(self, other: DyadicLike) -> DyadicRational:
        return as_dyadic(other) - self

    def __neg__(self) -> DyadicRational:
        return DyadicRational(-self.numerator, self.exponent)

    def __abs__(self) -> DyadicRational:
        return self if self.numerator >= 0 else -self

    def __mul__(self, other: DyadicLike) -> DyadicRational:
        other = as_dyadic(other)
        return dy_make(
            self.numerator * other.numerator, self.exponent + other.exponent
        )

    __rmul__ = __mul__

    def scaled(self, k: int) -> DyadicRational:
        """Return ``self * 2**-k`` for natural ``k``."""
        return dy_make(self.numerator, self.exponent + k)

    # order ---------------------------------------------------------------

    def __lt__(self, other: DyadicLike) -> bool:
        return dy_cmp(self, as_dyadic(other)) is Order.LESS

    def __le__(self, other: DyadicLike) -> bool:
        return dy_cmp(self, as_dyadic(other)) is not Order.GREATER

    def __gt__(self, other: DyadicLike) -> bool:
        return dy_cmp(self, as_dyadic(other)) is Order.GREATER

    def __ge__(self, other: DyadicLike) -> bool:
        return dy_cmp(self, as_dyadic(other)) is not Order.LESS

    # conversions ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.numerator == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __str__(self) -> str:
        return dy_format(self)


DyadicLike = Union[DyadicRational, int]

ZERO = DyadicRational(0, 0)
ONE = DyadicRational(1, 0)


def _lift(value: DyadicRational, exponent: int) -> int:
    """Numerator of ``value`` over the common denominator ``2**exponent``."""
    return value.numerator << (exponent - value.exponent)


def dy_make(j: int, e: int) -> DyadicRational:
    """
    Build the canonical representation of ``j / 2**e``.

    Args:
        j: Any integer numerator.
        e: Natural exponent of the denominator.

    Returns:
        The canonical DyadicRational with the same value.
    """
    if e < 0:
        raise ValueError(f"negative exponent {e}")
    if j == 0:
        return ZERO
    # strip common factors of two, never below exponent 0
    twos = (j & -j).bit_length() - 1
    shift = min(twos, e)
    return DyadicRational(j >> shift, e - shift)


def as_dyadic(value: DyadicLike) -> DyadicRational:
    """Accept a DyadicRational or an int."""
    if isinstance(value, DyadicRational):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return dy_make(value, 0)
    raise TypeError(f"cannot use {type(value).__name__} as a dyadic rational")


def dy_pow2(k: int) -> DyadicRational:
    """The number ``2**-k``."""
    return DyadicRational(1, k) if k > 0 else ONE


def dy_sum(xs: Iterable[DyadicLike]) -> DyadicRational:
    """
    Exact sum of a finite sequence; the empty sum is 0.

    All terms are lifted to the largest exponent present and added as
    integers, so the result does not depend on the order of the terms.
    """
    terms = [as_dyadic(x) for x in xs]
    if not terms:
        return ZERO
    e = max(t.exponent for t in terms)
    return dy_make(sum(_lift(t, e) for t in terms), e)


def dy_cmp(a: DyadicRational, b: DyadicRational) -> Order:
    """Total order on dyadic rationals, consistent with their values."""
    e = max(a.exponent, b.exponent)
    left, right = _lift(a, e), _lift(b, e)
    if left < right:
        return Order.LESS
    if left > right:
        return Order.GREATER
    return Order.EQUAL


def dy_parse(text: str) -> DyadicRational:
    """Parse ``"j/2^e"`` or integer shorthand ``"j"`` into canonical form."""
    j, e = parse_dyadic_parts(text)
    return dy_make(j, e)


def dy_format(value: DyadicRational) -> str:
    """Canonical text ``"j/2^e"``; integers are written with exponent 0."""
    return f"{value.numerator}/2^{value.exponent}"


def dy_from_fraction(value: Fraction) -> DyadicRational:
    """
    Convert a Fraction whose denominator is a power of two.

    Raises:
        ValueError: If the denominator is not a power of two.
    """
    denominator = value.denominator
    if denominator & (denominator - 1):
        raise ValueError(f"{value} is not a dyadic rational")
    return dy_make(value.numerator, denominator.bit_length() - 1)
