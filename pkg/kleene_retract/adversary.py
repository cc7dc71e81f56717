"""
Witnesses that a neighbourhood of the origin in M is not clopen.

Given an oracle V with 0^w in V contained in the open unit ball, the
adversary builds grid values a_0, a_1, ... one coordinate at a time so
that x_k = (a_0 .. a_k, 0^w) lies in V and y_k = x_k + 2^-k e_k does not.
The pairs are 2^-k apart and both sides converge to the same limit, which
is the finite evidence that V has no clopen margin.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, Optional

from .base import FrozenStruct
from .dyadic import ONE, ZERO, DyadicRational, dy_pow2
from .enums import RefutationVerdict, WitnessFailure
from .errors import OracleClaimViolation
from .funcspace import TwoFun
from .retract_chain import SectionRetractionPair
from .retract_core import XHPoint
from .spaces import (
    ZERO_POINT,
    MPoint,
    dist_M,
    grid_check,
    grid_value,
    norm_full,
    norm_prefix,
)
from .utils import Natural

logger = logging.getLogger(__name__)

Membership = Callable[[Any], bool]


class OpenSetOracle(FrozenStruct, frozen=True):
    """
    A candidate neighbourhood V of the origin in M.

    Attributes:
        member: Pure membership test on finite-support points.
        name: Label used in reports.
        claims_origin: V contains 0^w.
        claims_ball: V lies inside the open unit ball.
    """

    member: Callable[[MPoint], bool]
    name: str = "V"
    claims_origin: bool = True
    claims_ball: bool = True


def make_oracle(member: Callable[[MPoint], bool], name: str = "V") -> OpenSetOracle:
    """
    Wrap a membership test, checking the origin claim.

    Raises:
        OracleClaimViolation: If 0^w is not a member.
    """
    oracle = OpenSetOracle(member=member, name=name)
    if not member(ZERO_POINT):
        raise OracleClaimViolation("0^w is not in V", ZERO_POINT)
    return oracle


def probe(V: OpenSetOracle, z: MPoint) -> bool:
    """
    Ask V about z, enforcing the ball claim.

    Raises:
        OracleClaimViolation: If z has norm at least 1 and V contains it.
    """
    result = bool(V.member(z))
    if result and V.claims_ball and norm_full(z) >= ONE:
        raise OracleClaimViolation("V contains a point outside the unit ball", z)
    return result


def ball_oracle() -> OpenSetOracle:
    """The open unit ball itself."""
    return make_oracle(lambda z: norm_full(z) < ONE, name="ball")


class WitnessStep(FrozenStruct, frozen=True):
    """One resolution level of a witness chain."""

    k: Natural
    a_k: DyadicRational
    x_k: MPoint
    y_k: MPoint
    member_x: bool
    member_y: bool
    distance: DyadicRational


class WitnessChain(FrozenStruct, frozen=True):
    """
    In/out pairs at every resolution ``k <= K``.

    ``probes`` counts the oracle calls the adversary made.
    """

    K: Natural
    a: tuple[DyadicRational, ...]
    steps: tuple[WitnessStep, ...]
    probes: Natural = 0
    oracle: str = "V"

    def truncate(self, K: int) -> WitnessChain:
        """The chain of depth ``K``, which is a prefix of this one."""
        if K > self.K:
            raise ValueError(f"cannot extend a chain of depth {self.K} to {K}")
        return WitnessChain(
            K=K, a=self.a[: K + 1], steps=self.steps[: K + 1],
            probes=self.probes, oracle=self.oracle,
        )


def _extended(prefix: tuple[DyadicRational, ...], value: DyadicRational) -> MPoint:
    return MPoint.from_coords(prefix + (value,))


def adversary_run(V: OpenSetOracle, K: int) -> WitnessChain:
    """
    Build the witness chain of depth K by bisection.

    At step k the bracket starts at 0 (the previous x, inside V) and 1
    (norm at least 1, outside V) on the grid M_k, and halves until the
    two grid values are adjacent. Each step makes k + 2 probes.

    Raises:
        OracleClaimViolation: If V breaks the ball claim on a probe or an
            endpoint of the bracket lands on the wrong side.
    """
    probes = 0

    def ask(z: MPoint) -> bool:
        nonlocal probes
        probes += 1
        return probe(V, z)

    prefix: tuple[DyadicRational, ...] = ()
    steps = []
    for k in range(K + 1):
        low_point = _extended(prefix, ZERO)
        if not ask(low_point):
            raise OracleClaimViolation("lower bracket endpoint is not in V", low_point)
        high_point = _extended(prefix, ONE)
        if ask(high_point):
            raise OracleClaimViolation("upper bracket endpoint is in V", high_point)

        low, high = 0, 1 << k
        while high - low > 1:
            mid = (low + high) // 2
            if ask(_extended(prefix, grid_value(k, mid))):
                low = mid
            else:
                high = mid

        a_k = grid_value(k, low)
        x_k = _extended(prefix, a_k)
        y_k = _extended(prefix, grid_value(k, high))
        steps.append(
            WitnessStep(
                k=k, a_k=a_k, x_k=x_k, y_k=y_k, member_x=True, member_y=False,
                distance=dist_M(x_k, y_k),
            )
        )
        prefix += (a_k,)
        logger.debug("step %d: a_k=%s after %d probes", k, a_k, probes)

    return WitnessChain(K=K, a=prefix, steps=tuple(steps), probes=probes, oracle=V.name)


class WitnessReport(FrozenStruct, frozen=True, omit_defaults=True):
    """Outcome of re-checking a witness chain against its oracle."""

    passed: bool
    K: Natural
    failing_k: Optional[int] = None
    reason: Optional[WitnessFailure] = None
    summary: str = ""

    def __bool__(self) -> bool:
        return self.passed


def witness_verify(chain: WitnessChain, V: OpenSetOracle) -> WitnessReport:
    """
    Re-check every step of a chain with exact arithmetic and fresh probes.

    Per level: grid membership of a_k, the stored and the recomputed
    distance 2^-k, the level and shape of x_k and y_k, prefix coherence, the ball
    claim on x_k and both membership verdicts.
    """

    def fail(k: int, reason: WitnessFailure) -> WitnessReport:
        logger.debug("witness check fails at k=%d: %s", k, reason.value)
        return WitnessReport(passed=False, K=chain.K, failing_k=k, reason=reason)

    if len(chain.a) != chain.K + 1 or len(chain.steps) != chain.K + 1:
        return fail(0, WitnessFailure.SHAPE)

    for k, step in enumerate(chain.steps):
        if step.k != k:
            return fail(k, WitnessFailure.SHAPE)
        gap = dy_pow2(k)
        if not grid_check(k, chain.a[k]) or step.a_k != chain.a[k]:
            return fail(k, WitnessFailure.GRID)
        if step.distance != gap or dist_M(step.x_k, step.y_k) != gap:
            return fail(k, WitnessFailure.DISTANCE)
        prefix = chain.a[: k + 1]
        if prefix[-1] + gap > ONE:
            return fail(k, WitnessFailure.SHAPE)
        if step.x_k != MPoint.from_coords(prefix) or step.y_k != MPoint.from_coords(
            prefix[:-1] + (prefix[-1] + gap,)
        ):
            return fail(k, WitnessFailure.SHAPE)
        if k > 0 and any(
            step.x_k.coord(i) != chain.steps[k - 1].x_k.coord(i) for i in range(k)
        ):
            return fail(k, WitnessFailure.PREFIX)
        if norm_full(step.x_k) >= ONE:
            return fail(k, WitnessFailure.NORM)
        if not step.member_x or not V.member(step.x_k):
            return fail(k, WitnessFailure.MEMBER_X)
        if step.member_y or V.member(step.y_k):
            return fail(k, WitnessFailure.MEMBER_Y)

    return WitnessReport(
        passed=True,
        K=chain.K,
        summary=f"V has no clopen margin at resolution 2^{{-{chain.K}}}",
    )


# ---------------------------------------------------------------------------
# transport along section-retraction pairs


def pullback_oracle(C: Membership, s: SectionRetractionPair) -> Callable[[MPoint], bool]:
    """Membership ``x -> C(s.section(x))`` on the domain of ``s``."""
    return lambda x: bool(C(s.section(x)))


class TransportedPair(FrozenStruct, frozen=True):
    """
    A witness pair moved through a section.

    ``in_x`` and ``in_y`` are the candidate's verdicts on the images of
    x_k and y_k; a refutation has ``in_x`` False and ``in_y`` True.
    """

    k: Natural
    image_x: Any
    image_y: Any
    in_x: bool
    in_y: bool


class Refutation(FrozenStruct, frozen=True):
    """
    Result of :func:`normann_refute`.

    Either a witness chain with its transported pairs, or the probe on
    which the candidate stopped being a separator.
    """

    verdict: RefutationVerdict
    chain: Optional[WitnessChain] = None
    transported: tuple[TransportedPair, ...] = ()
    probe: Optional[MPoint] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verdict is RefutationVerdict.REFUTED


def normann_refute(
    C_big: Membership, s: SectionRetractionPair, K: int, name: str = "C"
) -> Refutation:
    """
    Refute a clopen candidate separating the image of the ball complement.

    The complement of ``C_big`` is pulled back along ``s`` and handed to
    the adversary. A pulled-back set that misses the origin or leaves the
    ball means ``C_big`` does not separate, and the offending probe is
    returned. Otherwise every witness pair is mapped through the section.
    """
    inside = pullback_oracle(C_big, s)
    try:
        V = make_oracle(lambda x: not inside(x), name=f"not {name}")
        chain = adversary_run(V, K)
    except OracleClaimViolation as violation:
        logger.info("%s is not a separator: %s", name, violation.reason)
        return Refutation(
            verdict=RefutationVerdict.NOT_A_SEPARATOR,
            probe=violation.probe,
            reason=violation.reason,
        )

    transported = []
    for step in chain.steps:
        image_x, image_y = s.section(step.x_k), s.section(step.y_k)
        transported.append(
            TransportedPair(
                k=step.k, image_x=image_x, image_y=image_y,
                in_x=bool(C_big(image_x)), in_y=bool(C_big(image_y)),
            )
        )
    return Refutation(
        verdict=RefutationVerdict.REFUTED, chain=chain, transported=tuple(transported)
    )


def ball_complement(x: MPoint) -> bool:
    """The functionally closed set M minus the open unit ball."""
    return norm_full(x) >= ONE


def ball_complement_candidate(point: XHPoint) -> bool:
    """
    Candidate on (x, h) pairs: the partial norm of x up to the level-0
    modulus of h is at least 1. On the image of e_M this is the ball
    complement.
    """
    return norm_prefix(point.x, point.h.constancy_modulus(0)) >= ONE


def limit_zero_candidate(point: XHPoint) -> bool:
    """Pairs whose map vanishes at ``(0, inf, inf)``."""
    h: TwoFun = point.h
    return h.at_limit(0) == 0
