#!/usr/bin/env python3
"""
Tests for certified maps on N x F and on Baire space.
"""

import random
import unittest

import msgspec

from kleene_retract.dyadic import ONE
from kleene_retract.funcspace import (
    BigFun,
    TwoFun,
    TwoFunTable,
    constant_bigfun,
    constant_twofun,
    cont_conv_check,
    lookahead_check,
    opaque,
    twofun_agree,
    twofun_certify,
    twofun_eval,
    twofun_override,
    twofun_table,
)
from kleene_retract.generators import random_baire_point, random_twofun
from kleene_retract.retract_core import g_apply
from kleene_retract.spaces import INFINITY, MPoint, finite


def step_twofun(modulus=lambda k: k):
    """1 below a = k, 0 from there on."""
    return TwoFun(
        at_finite=lambda k, a, b: 1 if a < k else 0,
        at_limit=lambda k: 0,
        constancy_modulus=modulus,
        label="step",
    )


def staircase(n):
    return TwoFun(
        at_finite=lambda k, a, b: 1 if a < min(n, k) else 0,
        at_limit=lambda k: 0,
        constancy_modulus=lambda k: k,
    )


class TestTwoFun(unittest.TestCase):
    """Evaluation and certification of maps N x F -> 2."""

    def test_eval(self):
        h = step_twofun()
        self.assertEqual(twofun_eval(h, 2, finite(1, 9)), 1)
        self.assertEqual(twofun_eval(h, 2, finite(2, 9)), 0)
        self.assertEqual(twofun_eval(h, 2, INFINITY), 0)
        self.assertEqual(twofun_eval(constant_twofun(0), 5, finite(3, 3)), 0)

    def test_certify(self):
        """A modulus that is too small is falsified on a real failure."""
        self.assertTrue(twofun_certify(step_twofun(), 5, 8))
        self.assertTrue(twofun_certify(constant_twofun(1), 5, 8))
        wrong = step_twofun(modulus=lambda k: 0)
        verdict = twofun_certify(wrong, 5, 8)
        self.assertFalse(verdict)
        k, a, b = verdict.witness
        self.assertNotEqual(wrong.at_finite(k, a, b), wrong.at_limit(k))

    def test_random_twofuns_are_certified(self):
        for seed in range(20):
            self.assertTrue(twofun_certify(random_twofun(seed), 8, 8))

    def test_override(self):
        """Overrides replace single probes and drop provenance."""
        g = g_apply(MPoint.from_mapping({0: ONE}))
        self.assertIsNotNone(g.provenance)
        flipped = twofun_override(g, finite={(1, 0, 0): 0}, limit={3: 1})
        self.assertEqual(g.at_finite(1, 0, 0), 1)
        self.assertEqual(flipped.at_finite(1, 0, 0), 0)
        self.assertEqual(flipped.at_finite(1, 1, 0), g.at_finite(1, 1, 0))
        self.assertEqual(flipped.at_limit(3), 1)
        self.assertIsNone(flipped.provenance)
        self.assertIsNone(opaque(g).provenance)
        self.assertTrue(twofun_agree(opaque(g), g, 4, 4, 4))

    def test_agree(self):
        verdict = twofun_agree(step_twofun(), constant_twofun(0), 3, 3, 3)
        self.assertFalse(verdict)
        self.assertEqual(verdict.witness, (1, 0, 0))

    def test_table(self):
        """Finite restriction for serialization."""
        table = twofun_table(step_twofun(), 2)
        self.assertEqual(table.finite[2][1][0], 1)
        self.assertEqual(table.finite[1][1][2], 0)
        self.assertEqual(table.limits, (0, 0, 0))
        self.assertEqual(table.moduli, (0, 1, 2))
        decoded = msgspec.json.decode(msgspec.json.encode(table), type=TwoFunTable)
        self.assertEqual(decoded, table)


class TestContinuousConvergence(unittest.TestCase):
    def test_staircase_converges(self):
        hs = [staircase(n) for n in range(20)]
        self.assertTrue(cont_conv_check(hs, step_twofun(), lambda k: k, 6, 8))

    def test_constant_mismatch(self):
        verdict = cont_conv_check(
            [constant_twofun(1)] * 4, constant_twofun(0), lambda k: 0, 3, 3
        )
        self.assertFalse(verdict)
        self.assertEqual(verdict.witness, (0, 0, 0, 0))
        self.assertEqual(verdict.reason, "sequence")

    def test_all_zero(self):
        self.assertTrue(
            cont_conv_check([constant_twofun(0)] * 4, constant_twofun(0), lambda k: 0, 3, 3)
        )

    def test_limit_function_is_checked(self):
        """The limit map itself must be constant beyond the modulus."""
        verdict = cont_conv_check([], step_twofun(), lambda k: 0, 3, 3)
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, "limit function")
        self.assertEqual(verdict.witness[0], 0)


class TestLookahead(unittest.TestCase):
    def test_honest_lookahead(self):
        rng = random.Random(3)
        points = [random_baire_point(rng, 6, 4) for _ in range(5)]
        self.assertTrue(lookahead_check(constant_bigfun(4), points, 50, seed=1))
        reads_first_two = BigFun(eval=lambda p: p.at(0) + p.at(1), lookahead=lambda n: 2)
        self.assertTrue(lookahead_check(reads_first_two, points, 50, seed=2))

    def test_dishonest_lookahead(self):
        """A map reading past its declared prefix is caught."""
        liar = BigFun(eval=lambda p: p.at(5), lookahead=lambda n: 1, label="liar")
        points = [random_baire_point(random.Random(0), 8, 0)]
        verdict = lookahead_check(liar, points, 200, seed=9)
        self.assertFalse(verdict)
        self.assertEqual(verdict.reason, "lookahead")


if __name__ == "__main__":
    unittest.main()
