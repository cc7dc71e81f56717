#!/usr/bin/env python3
"""
Tests for exact dyadic arithmetic.
"""

import random
import unittest
from fractions import Fraction

import msgspec
import pytest

from kleene_retract.dyadic import (
    ONE,
    ZERO,
    DyadicRational,
    dy_cmp,
    dy_format,
    dy_from_fraction,
    dy_make,
    dy_parse,
    dy_pow2,
    dy_sum,
)
from kleene_retract.enums import Order


@pytest.mark.parametrize(
    "j,e,numerator,exponent",
    [
        (4, 2, 1, 0),
        (0, 7, 0, 0),
        (3, 3, 3, 3),
        (2, 0, 2, 0),
        (-6, 2, -3, 1),
    ],
)
def test_dy_make_canonical(j, e, numerator, exponent):
    """dy_make strips factors of two down to exponent 0."""
    value = dy_make(j, e)
    assert (value.numerator, value.exponent) == (numerator, exponent)


class TestDyadicArithmetic(unittest.TestCase):
    """Arithmetic, order and text forms."""

    def test_constructor_rejects_non_canonical(self):
        """Direct construction only accepts canonical fields."""
        with self.assertRaises(ValueError):
            DyadicRational(2, 1)
        with self.assertRaises(ValueError):
            DyadicRational(0, 3)
        with self.assertRaises(msgspec.ValidationError):
            msgspec.convert({"numerator": 4, "exponent": 2}, DyadicRational)

    def test_sum(self):
        """Exact sums, including cancellation and the empty sum."""
        self.assertEqual(dy_sum([dy_make(1, 1), dy_make(1, 2), dy_make(1, 3)]), dy_make(7, 3))
        self.assertEqual(dy_sum([]), ZERO)
        self.assertEqual(dy_sum([ONE, dy_make(-1, 1), dy_make(1, 1)]), ONE)

    def test_operators(self):
        """Operators agree with Fraction arithmetic."""
        half, quarter = dy_make(1, 1), dy_make(1, 2)
        self.assertEqual(half + quarter, dy_make(3, 2))
        self.assertEqual(half - quarter, quarter)
        self.assertEqual(quarter - half, dy_make(-1, 2))
        self.assertEqual(half * quarter, dy_make(1, 3))
        self.assertEqual(abs(dy_make(-5, 3)), dy_make(5, 3))
        self.assertEqual(dy_make(3, 1).scaled(2), dy_make(3, 3))
        self.assertEqual(1 - half, half)
        self.assertEqual((half + 1).to_fraction(), Fraction(3, 2))

    def test_compare(self):
        """dy_cmp and the rich comparisons agree."""
        self.assertIs(dy_cmp(dy_make(7, 3), dy_make(1, 1)), Order.GREATER)
        self.assertIs(dy_cmp(dy_make(1, 1), dy_make(4, 3)), Order.EQUAL)
        self.assertIs(dy_cmp(ZERO, dy_pow2(10)), Order.LESS)
        self.assertTrue(dy_make(1, 1) < ONE <= ONE)
        self.assertTrue(dy_make(3, 1) > 1)
        self.assertEqual(dy_make(1, 1), dy_make(4, 3))

    def test_pow2(self):
        self.assertEqual(dy_pow2(0), ONE)
        self.assertEqual(dy_pow2(10), DyadicRational(1, 10))

    def test_text_forms(self):
        """Output is always j/2^e; input also takes integers."""
        self.assertEqual(dy_format(ONE), "1/2^0")
        self.assertEqual(dy_format(ZERO), "0/2^0")
        self.assertEqual(str(dy_make(3, 3)), "3/2^3")
        self.assertEqual(dy_parse("3/2^3"), dy_make(3, 3))
        self.assertEqual(dy_parse(" 4 "), dy_make(4, 0))
        self.assertEqual(dy_parse("2/2^2"), dy_make(1, 1))
        self.assertEqual(dy_parse(dy_format(dy_make(-5, 7))), dy_make(-5, 7))
        with self.assertRaises(ValueError):
            dy_parse("1/3")

    def test_from_fraction(self):
        self.assertEqual(dy_from_fraction(Fraction(3, 8)), dy_make(3, 3))
        self.assertEqual(dy_from_fraction(Fraction(6, 1)), dy_make(6, 0))
        with self.assertRaises(ValueError):
            dy_from_fraction(Fraction(1, 3))

    def test_hashable(self):
        """Equal values hash equally."""
        self.assertEqual(len({dy_make(2, 2), dy_make(1, 1), dy_parse("1/2^1")}), 1)


def random_dyadic(rng: random.Random) -> DyadicRational:
    return dy_make(rng.randint(-1000, 1000), rng.randint(0, 12))


def is_canonical(value: DyadicRational) -> bool:
    return value.exponent == 0 or value.numerator % 2 == 1


class TestDyadicProperties(unittest.TestCase):
    """Seeded random checks of canonical forms, sums and the order."""

    def test_outputs_are_canonical(self):
        """Every result is canonical and canonicalizing it again changes nothing."""
        rng = random.Random(20)
        for _ in range(300):
            a, b = random_dyadic(rng), random_dyadic(rng)
            for value in (a, a + b, a - b, a * b, abs(a), dy_sum([a, b, a])):
                self.assertTrue(is_canonical(value))
                again = dy_make(value.numerator, value.exponent)
                self.assertEqual((again.numerator, again.exponent), (value.numerator, value.exponent))

    def test_sum_ignores_order(self):
        rng = random.Random(21)
        for _ in range(100):
            xs = [random_dyadic(rng) for _ in range(rng.randint(0, 12))]
            shuffled = list(xs)
            rng.shuffle(shuffled)
            self.assertEqual(dy_sum(shuffled), dy_sum(xs))
            self.assertEqual(dy_sum(xs).to_fraction(), sum((x.to_fraction() for x in xs), Fraction(0)))

    def test_sum_of_concatenation(self):
        """Summing a concatenation equals summing the partial sums."""
        rng = random.Random(22)
        for _ in range(100):
            xs = [random_dyadic(rng) for _ in range(rng.randint(0, 8))]
            ys = [random_dyadic(rng) for _ in range(rng.randint(0, 8))]
            self.assertEqual(dy_sum(xs + ys), dy_sum([dy_sum(xs), dy_sum(ys)]))

    def test_order_is_antisymmetric_and_transitive(self):
        flipped = {Order.LESS: Order.GREATER, Order.EQUAL: Order.EQUAL, Order.GREATER: Order.LESS}
        rng = random.Random(23)
        for _ in range(300):
            a, b, c = (random_dyadic(rng) for _ in range(3))
            if rng.random() < 0.2:
                # equal values with different spellings
                b = dy_make(a.numerator << 3, a.exponent + 3)
            self.assertIs(dy_cmp(b, a), flipped[dy_cmp(a, b)])
            self.assertEqual(dy_cmp(a, b) is Order.EQUAL, a == b)
            if dy_cmp(a, b) is not Order.GREATER and dy_cmp(b, c) is not Order.GREATER:
                self.assertIsNot(dy_cmp(a, c), Order.GREATER)
            if dy_cmp(a, b) is Order.LESS and dy_cmp(b, c) is Order.LESS:
                self.assertIs(dy_cmp(a, c), Order.LESS)


if __name__ == "__main__":
    unittest.main()
