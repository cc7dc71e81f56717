#!/usr/bin/env python3
"""
Tests for points, metrics and convergence certificates.
"""

import unittest

import msgspec
import pytest

from kleene_retract.dyadic import ONE, ZERO, dy_make, dy_pow2
from kleene_retract.enums import Condition
from kleene_retract.errors import MalformedCertificate
from kleene_retract.spaces import (
    INFINITY,
    BairePoint,
    ConvergenceCertificate,
    FanFinite,
    FanPoint,
    MPoint,
    MStream,
    ZERO_POINT,
    all_fan_points,
    conv_check_l1,
    conv_check_M,
    dist_M,
    fan_conv_check,
    fan_dist,
    fan_format,
    fan_parse,
    finite,
    geometric_stream,
    grid_check,
    materialize,
    mpoint_format,
    mpoint_parse,
    norm_enclose,
    norm_full,
    norm_prefix,
    pointwise_check,
    stream_certify,
    window_sum,
)


def point(mapping):
    return MPoint.from_mapping(mapping)


def bump_sequence(length):
    return [point({0: ONE, n + 1: dy_pow2(n + 1)}) for n in range(length)]


def travelling_half(length):
    return [point({n + 1: dy_make(1, 1)}) for n in range(length)]


@pytest.mark.parametrize(
    "i,q,expected",
    [
        (3, dy_make(5, 3), True),
        (2, dy_make(5, 3), False),
        (0, ONE, True),
        (0, ZERO, True),
        (1, dy_make(3, 1), False),
        (4, dy_make(-1, 4), False),
    ],
)
def test_grid_check(i, q, expected):
    """Grid membership of j * 2^-i."""
    assert grid_check(i, q) is expected


class TestPoints(unittest.TestCase):
    """Finite-support points, streams and their text form."""

    def test_mpoint_invariants(self):
        """Support must be increasing, nonzero and on the grids."""
        with self.assertRaises(ValueError):
            MPoint(((1, ONE), (0, ONE)))
        with self.assertRaises(ValueError):
            MPoint(((0, ZERO),))
        with self.assertRaises(ValueError):
            MPoint(((1, dy_make(1, 2)),))
        with self.assertRaises(msgspec.ValidationError):
            msgspec.convert({"support": [[2, {"numerator": 3, "exponent": 1}]]}, MPoint)

    def test_coordinates(self):
        x = point({1: dy_make(1, 1), 4: dy_make(3, 4)})
        self.assertEqual(x.coord(1), dy_make(1, 1))
        self.assertEqual(x.coord(2), ZERO)
        self.assertEqual(x.coord(40), ZERO)
        self.assertEqual(x.support_end, 5)
        self.assertEqual(ZERO_POINT.support_end, 0)
        self.assertEqual(MPoint.from_coords([ZERO, dy_make(1, 1)]), point({1: dy_make(1, 1)}))

    def test_text_form(self):
        """Points print as [i:j/2^e, ...] and parse back."""
        x = mpoint_parse("[0:1, 2:1/2^2]")
        self.assertEqual(x, point({0: ONE, 2: dy_make(1, 2)}))
        self.assertEqual(mpoint_format(x), "[0:1/2^0, 2:1/2^2]")
        self.assertEqual(mpoint_parse("[]"), ZERO_POINT)
        with self.assertRaises(ValueError):
            mpoint_parse("[1:1/2^1, 1:1/2^1]")
        with self.assertRaises(ValueError):
            mpoint_parse("0:1")

    def test_materialize(self):
        """A prefix of a stream as a finite-support point."""
        self.assertEqual(
            materialize(geometric_stream(), 3),
            point({0: ONE, 1: dy_make(1, 1), 2: dy_make(1, 2)}),
        )
        x = point({0: ONE, 5: dy_make(1, 5)})
        self.assertEqual(materialize(x, 5), point({0: ONE}))


class TestNorms(unittest.TestCase):
    """Exact norms, enclosures and distances."""

    def test_norm_prefix(self):
        x = point({0: ONE, 1: dy_make(1, 1)})
        self.assertEqual(norm_prefix(x, 2), dy_make(3, 1))
        self.assertEqual(norm_prefix(x, 0), ZERO)
        geometric = point({i: dy_pow2(i) for i in range(11)})
        self.assertEqual(norm_prefix(geometric, 11), dy_make(2047, 10))

    def test_norm_full(self):
        self.assertEqual(norm_full(point({0: ONE, 1: dy_make(1, 1)})), dy_make(3, 1))
        self.assertEqual(norm_full(ZERO_POINT), ZERO)

    def test_norm_enclose(self):
        """The geometric stream at k = 3 is enclosed by [15/8, 2], of width 2^-3."""
        interval = norm_enclose(geometric_stream(), 3)
        self.assertEqual(interval.lo, dy_make(15, 3))
        self.assertEqual(interval.hi, dy_make(2, 0))
        self.assertTrue(interval.contains(dy_make(2, 0)))
        self.assertEqual(interval.width, dy_pow2(3))

    def test_window_sum(self):
        self.assertEqual(window_sum(geometric_stream(), 1, 2), dy_make(7, 3))
        self.assertEqual(window_sum(point({3: dy_make(1, 3)}), 0, 2), ZERO)

    def test_dist(self):
        self.assertEqual(dist_M(ZERO_POINT, point({0: ONE})), ONE)
        x = point({1: dy_make(1, 1), 5: dy_make(1, 5)})
        self.assertEqual(dist_M(x, x), ZERO)
        self.assertEqual(dist_M(point({1: dy_make(1, 1)}), x), dy_make(1, 5))


class TestFan(unittest.TestCase):
    """The countable fan and its metric."""

    def test_fan_dist(self):
        self.assertEqual(fan_dist(finite(3, 5), INFINITY), dy_make(1, 3))
        self.assertEqual(fan_dist(finite(2, 7), finite(4, 1)), dy_make(1, 2))
        self.assertEqual(fan_dist(INFINITY, INFINITY), ZERO)
        self.assertEqual(fan_dist(finite(2, 7), finite(2, 8)), dy_make(1, 2))

    def test_text_form(self):
        self.assertEqual(fan_parse("(3, 5)"), finite(3, 5))
        self.assertEqual(fan_parse("(inf,inf)"), INFINITY)
        self.assertEqual(fan_format(finite(0, 2)), "(0,2)")
        with self.assertRaises(ValueError):
            fan_parse("(inf,3)")

    def test_tagged_union(self):
        """Fan points decode through their kind tag."""
        points = msgspec.json.decode(
            b'[{"kind": "finite", "a": 1, "b": 2}, {"kind": "infinity"}]', type=list[FanPoint]
        )
        self.assertEqual(points, [FanFinite(a=1, b=2), INFINITY])

    def test_all_fan_points(self):
        points = list(all_fan_points(3))
        self.assertEqual(len(points), 10)
        self.assertEqual(points[-1], INFINITY)

    def test_fan_convergence(self):
        """a_n -> inf converges to the limit point; a fixed a does not."""
        escaping = [finite(n, 7) for n in range(30)]
        self.assertTrue(fan_conv_check(escaping, INFINITY, lambda k: k, 20))
        stuck = [finite(0, n) for n in range(30)]
        verdict = fan_conv_check(stuck, INFINITY, lambda k: k, 20)
        self.assertFalse(verdict)
        self.assertEqual(verdict.witness, (1, 1))


class TestBaire(unittest.TestCase):
    def test_prefix_and_tail(self):
        p = BairePoint(head=(3, 0, 5))
        self.assertEqual(p.prefix(5), (3, 0, 5, 0, 0))
        q = p.with_tail_from(2, lambda i: i)
        self.assertEqual(q.prefix(5), (3, 0, 2, 3, 4))


class TestConvergence(unittest.TestCase):
    """Convergence in M, in l1 and in the product of the grids."""

    def test_bump_converges_in_M(self):
        cert = ConvergenceCertificate(
            claimed_limit=point({0: ONE}),
            pointwise_modulus=lambda i: i,
            norm_modulus=lambda k: k,
        )
        verdict = conv_check_M(bump_sequence(40), cert, 20)
        self.assertTrue(verdict)
        self.assertEqual(verdict.flags, ())

    def test_travelling_half_is_strict(self):
        """Converges coordinatewise but fails the norm condition in M."""
        xs = travelling_half(30)
        cert = ConvergenceCertificate(
            claimed_limit=ZERO_POINT, pointwise_modulus=lambda i: i, norm_modulus=lambda k: k
        )
        verdict = conv_check_M(xs, cert, 5)
        self.assertFalse(verdict)
        self.assertIs(verdict.condition, Condition.NORM)
        self.assertEqual((verdict.index, verdict.position), (2, 2))
        self.assertTrue(pointwise_check(xs, ZERO_POINT, lambda i: i, 20))

    def test_constant_sequence(self):
        x = point({2: dy_make(3, 2), 7: dy_make(1, 7)})
        cert = ConvergenceCertificate(
            claimed_limit=x, pointwise_modulus=lambda i: 0, norm_modulus=lambda k: 0
        )
        self.assertTrue(conv_check_M([x] * 5, cert, 10))
        self.assertTrue(conv_check_l1([x] * 5, cert, 10))

    def test_l1_oscillation(self):
        """An oscillating coordinate fails condition (a)."""
        xs = [point({0: ONE if n % 2 == 0 else ZERO}) for n in range(10)]
        cert = ConvergenceCertificate(
            claimed_limit=ZERO_POINT, norm_modulus=lambda k: 0, closeness_modulus=lambda i, k: 0
        )
        verdict = conv_check_l1(xs, cert, 5)
        self.assertFalse(verdict)
        self.assertIs(verdict.condition, Condition.POINTWISE)
        self.assertEqual(verdict.index, 0)

    def test_l1_bump(self):
        cert = ConvergenceCertificate(
            claimed_limit=point({0: ONE}),
            norm_modulus=lambda k: k,
            closeness_modulus=lambda i, k: i,
        )
        self.assertTrue(conv_check_l1(bump_sequence(30), cert, 15))

    def test_stream_limit(self):
        """Prefixes of the geometric stream converge to it."""
        xs = [materialize(geometric_stream(), n + 1) for n in range(30)]
        cert = ConvergenceCertificate(
            claimed_limit=geometric_stream(),
            pointwise_modulus=lambda i: i,
            norm_modulus=lambda k: k,
        )
        self.assertTrue(conv_check_M(xs, cert, 15))

    def test_malformed_certificates(self):
        """Missing or negative moduli raise instead of failing."""
        xs = bump_sequence(5)
        no_pointwise = ConvergenceCertificate(claimed_limit=ZERO_POINT, norm_modulus=lambda k: k)
        with self.assertRaises(MalformedCertificate):
            conv_check_M(xs, no_pointwise, 5)
        negative = ConvergenceCertificate(
            claimed_limit=ZERO_POINT, pointwise_modulus=lambda i: -1, norm_modulus=lambda k: 0
        )
        with self.assertRaises(MalformedCertificate):
            conv_check_M(xs, negative, 5)

    def test_non_monotone_modulus_is_flagged(self):
        x = point({0: ONE})
        cert = ConvergenceCertificate(
            claimed_limit=x, pointwise_modulus=lambda i: 0, norm_modulus=lambda k: 5 - k
        )
        verdict = conv_check_M([x] * 3, cert, 5)
        self.assertTrue(verdict)
        self.assertIn("norm modulus not monotone", verdict.flags)


class TestStreams(unittest.TestCase):
    def test_geometric_stream_certifies(self):
        self.assertTrue(stream_certify(geometric_stream(), 8, 16))

    def test_short_tail_bound_fails(self):
        """A tail bound one index too early is caught."""
        stream = MStream(coord=dy_pow2, tail_bound=lambda k: k)
        verdict = stream_certify(stream, 5, 4)
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, "tail bound")

    def test_off_grid_stream_fails(self):
        stream = MStream(coord=lambda i: dy_make(1, i + 1), tail_bound=lambda k: k + 1)
        verdict = stream_certify(stream, 2, 2)
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, "grid")


if __name__ == "__main__":
    unittest.main()
