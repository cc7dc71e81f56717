"""
Property suites behind ``--command checks``.

Each suite samples with ``random.Random(seed)`` and reports one
CheckRecord per property. Sample sizes follow ``count`` and ``depth`` so
that the full-size runs are a command-line flag away.
"""

from __future__ import annotations

import logging
import random
from typing import Callable

from .adversary import (
    adversary_run,
    ball_complement,
    ball_complement_candidate,
    ball_oracle,
    limit_zero_candidate,
    normann_refute,
    pullback_oracle,
    witness_verify,
)
from .dyadic import ONE, ZERO, dy_make, dy_pow2
from .enums import Condition, Lemma61Status, RefutationVerdict, Suite
from .funcspace import (
    TwoFun,
    constant_twofun,
    cont_conv_check,
    lookahead_check,
    opaque,
    twofun_agree,
    twofun_certify,
    twofun_override,
    constant_bigfun,
)
from .generators import (
    coords_point,
    perturbed_g,
    random_baire_point,
    random_fan_point,
    random_grid_coords,
    random_mpoint,
    random_stream,
    random_twofun,
)
from .oracles import ProbeRule, rules_candidate
from .records import CheckRecord
from .retract_chain import (
    Inl,
    Inr,
    absorb_pair,
    baire_pair,
    baire_section,
    code_build,
    codeword,
    full_pair,
    identity_pair,
    lift_h,
    m_pair,
    mprod_decode,
    mprod_encode,
    pair_check,
    restrict_H,
)
from .retract_core import (
    c_m_member,
    cm_descriptor,
    e_M,
    f_eval,
    first_failing_level,
    g_apply,
    g_continuity_check,
    image_agreement_check,
    lemma61_check,
    r_M,
    r_M_point,
    rM_sequence_certificate,
)
from .spaces import (
    INFINITY,
    ConvergenceCertificate,
    MPoint,
    NxFanPoint,
    ZERO_POINT,
    conv_check_l1,
    conv_check_M,
    dist_M,
    fan_conv_check,
    fan_dist,
    finite,
    geometric_stream,
    norm_enclose,
    norm_prefix,
    pointwise_check,
    stream_certify,
)

logger = logging.getLogger(__name__)


class SuiteRun:
    """Collects the records of one suite run."""

    def __init__(self, suite: Suite, seed: int, depth: int, count: int):
        self.suite = suite
        self.seed = seed
        self.depth = depth
        self.count = count
        self.rng = random.Random(seed)
        self.records: list[CheckRecord] = []

    def check(self, name: str, passed: bool, samples: int = 0, detail: str = ""):
        self.records.append(
            CheckRecord(
                suite=self.suite.value, name=name, passed=bool(passed),
                samples=samples, detail=detail,
            )
        )

    def points(self, n: int = 0, **kwargs) -> list[MPoint]:
        return [random_mpoint(self.rng, **kwargs) for _ in range(n or self.count)]


# ---------------------------------------------------------------------------
# sample sequences


def shrinking_bump(length: int) -> list[MPoint]:
    """``{0: 1, n+1: 2^-(n+1)}``, converging in M to ``{0: 1}``."""
    return [MPoint.from_mapping({0: ONE, n + 1: dy_pow2(n + 1)}) for n in range(length)]


def travelling_half(length: int) -> list[MPoint]:
    """``0^(n+1) 1/2 0^w``, converging in prod M_i but not in M."""
    return [MPoint.from_mapping({n + 1: dy_make(1, 1)}) for n in range(length)]


def oscillating(length: int) -> list[MPoint]:
    return [MPoint.from_mapping({0: ONE if n % 2 == 0 else ZERO}) for n in range(length)]


BUMP_LIMIT = MPoint.from_mapping({0: ONE})


def staircase_twofun(n: int) -> TwoFun:
    """``(k, a, b) -> 1 if a < min(n, k)``, limit 0, modulus k."""
    return TwoFun(
        at_finite=lambda k, a, b: 1 if a < min(n, k) else 0,
        at_limit=lambda k: 0,
        constancy_modulus=lambda k: k,
        label=f"staircase-{n}",
    )


STEP_TWOFUN = TwoFun(
    at_finite=lambda k, a, b: 1 if a < k else 0,
    at_limit=lambda k: 0,
    constancy_modulus=lambda k: k,
    label="step",
)


# ---------------------------------------------------------------------------
# suites


def suite_lemma1(run: SuiteRun):
    depth = min(max(run.depth, 4), 20)
    xs = shrinking_bump(run.count)
    cert = ConvergenceCertificate(
        claimed_limit=BUMP_LIMIT,
        norm_modulus=lambda k: k,
        closeness_modulus=lambda i, k: i,
    )
    run.check("shrinking bump converges in l1", conv_check_l1(xs, cert, depth), len(xs))

    verdict = conv_check_l1(
        oscillating(run.count),
        ConvergenceCertificate(
            claimed_limit=ZERO_POINT, norm_modulus=lambda k: 0,
            closeness_modulus=lambda i, k: 0,
        ),
        depth,
    )
    run.check(
        "oscillation fails condition (a)",
        not verdict and verdict.condition is Condition.POINTWISE,
        run.count,
        detail=f"index={verdict.index}",
    )

    failures = 0
    for x in run.points():
        constant = ConvergenceCertificate(
            claimed_limit=x, norm_modulus=lambda k: 0, pointwise_modulus=lambda i: 0
        )
        failures += not conv_check_l1([x] * 5, constant, depth)
    run.check("constant sequences converge in l1", failures == 0, run.count)


def suite_lemma4(run: SuiteRun):
    depth = min(max(run.depth, 4), 20)
    xs = shrinking_bump(run.count)
    cert = ConvergenceCertificate(
        claimed_limit=BUMP_LIMIT, pointwise_modulus=lambda i: i, norm_modulus=lambda k: k
    )
    run.check("shrinking bump converges in M", conv_check_M(xs, cert, depth), len(xs))

    halves = travelling_half(max(run.count, depth + 2))
    strict = conv_check_M(
        halves,
        ConvergenceCertificate(
            claimed_limit=ZERO_POINT, pointwise_modulus=lambda i: i, norm_modulus=lambda k: k
        ),
        depth,
    )
    run.check(
        "travelling half fails condition (b) in M",
        not strict and strict.condition is Condition.NORM,
        len(halves),
        detail=f"index={strict.index} k={strict.position}",
    )
    run.check(
        "travelling half converges in prod M_i",
        pointwise_check(halves, ZERO_POINT, lambda i: i, depth),
        len(halves),
    )

    failures = 0
    for x in run.points():
        constant = ConvergenceCertificate(
            claimed_limit=x, pointwise_modulus=lambda i: 0, norm_modulus=lambda k: 0
        )
        failures += not conv_check_M([x] * 5, constant, depth)
    run.check("constant sequences converge in M", failures == 0, run.count)


def suite_lemma5(run: SuiteRun):
    sample_k, window = min(run.depth, 8), 8
    failures = 0
    for x in run.points():
        failures += not twofun_certify(e_M(x).h, sample_k, window)
    run.check("g(x) carries a valid constancy modulus", failures == 0, run.count)

    streams = [geometric_stream()] + [random_stream(run.seed + n) for n in range(5)]
    failures = sum(not twofun_certify(g_apply(y), sample_k, window) for y in streams)
    run.check("g of a stream carries a valid constancy modulus", failures == 0, len(streams))

    xs = shrinking_bump(max(run.count, 3 * sample_k))
    cert = ConvergenceCertificate(
        claimed_limit=BUMP_LIMIT, pointwise_modulus=lambda i: i, norm_modulus=lambda k: k
    )
    run.check(
        "g(x_n) converges continuously to g(x)",
        g_continuity_check(xs, cert, sample_k, window),
        len(xs),
    )

    spot = MPoint.from_mapping({0: ONE, 3: dy_make(1, 3)})
    g = g_apply(spot)
    run.check(
        "g modulus is the support end",
        g.constancy_modulus(2) == 4 and all(g.at_finite(2, 4, b) == 0 for b in range(20)),
    )


def suite_lemma6(run: SuiteRun):
    window = 30
    theorem_failures = hypothesis_failures = 0
    for x in run.points():
        k = run.rng.randint(0, min(run.depth, 10))
        a = k + run.rng.randint(0, 10)
        report = lemma61_check(x, g_apply(x), k, a, window)
        theorem_failures += report.status is Lemma61Status.FAIL
        hypothesis_failures += report.status is Lemma61Status.HYPOTHESIS_FAIL
    run.check(
        "tail of r_M(e_M(x)) beyond a >= k is at most 2^-k",
        theorem_failures == 0,
        run.count,
        detail=f"hypothesis_fail={hypothesis_failures}",
    )

    spot = MPoint.from_mapping({0: ONE, 5: dy_make(1, 5)})
    report = lemma61_check(spot, g_apply(spot), 3, 6, window)
    run.check("tail beyond the support sums to 0", report.status is Lemma61Status.PASS
              and report.total == ZERO)

    failures = 0
    for n, x in enumerate(run.points()):
        h = g_apply(x) if n % 2 == 0 else perturbed_g(x, run.seed + n, level=6)
        failures += not stream_certify(r_M(x, h), sample_k=6, window=8)
    run.check("r_M output lies on the grids with a valid tail bound", failures == 0, run.count)

    failures = 0
    for n, x in enumerate(run.points()):
        m = run.rng.randint(0, min(run.depth, 6))
        h = g_apply(x) if n % 2 == 0 else perturbed_g(x, run.seed + n, level=6)
        descriptor = cm_descriptor(m)
        i = 2 * m + 1 + run.rng.randint(0, 5)
        bumped = x.as_dict()
        bumped[i] = dy_make(run.rng.randint(0, 1 << i), i)
        moved = coords_point([bumped.get(j, ZERO) for j in range(i + 1)])
        k, a, b = (m + 1 + run.rng.randint(0, 3), run.rng.randint(0, m), run.rng.randint(0, m))
        untouched = not descriptor.reads_finite(k, a, b) and not descriptor.reads_x(i)
        mutated = twofun_override(
            h,
            finite={(k, a, b): 1 - h.at_finite(k, a, b)},
            limit={m + 1: 1 - h.at_limit(m + 1)},
        )
        failures += not untouched or c_m_member(x, h, m) != c_m_member(moved, mutated, m)
    run.check("C_m reads only its declared probes", failures == 0, run.count)

    failures = 0
    for n, x in enumerate(run.points()):
        h = g_apply(x) if n % 2 == 0 else perturbed_g(x, run.seed + n, level=5)
        failures += not image_agreement_check(x, h, min(run.depth, 5))
    run.check("pairs in C_m agree with the image of e_M", failures == 0, run.count)

    depth = 50
    failures = sum(
        any(r_M(x, g_apply(x)).coord(i) != x.coord(i) for i in range(depth + 1))
        for x in run.points()
    )
    run.check("r_M(e_M(x)) = x", failures == 0, run.count, detail=f"depth={depth}")


def suite_lemma7(run: SuiteRun):
    sample_k, window = min(run.depth, 8), 8
    hs = [staircase_twofun(n) for n in range(run.count)]
    run.check(
        "staircase converges continuously",
        cont_conv_check(hs, STEP_TWOFUN, lambda k: k, sample_k, window),
        len(hs),
    )
    constant = cont_conv_check(
        [constant_twofun(1)] * 5, constant_twofun(0), lambda k: 0, sample_k, window
    )
    run.check("constant 1 does not converge to constant 0", not constant, 5)

    failures = 0
    for n in range(run.count):
        h = random_twofun(run.seed * 1000 + n)
        if twofun_certify(h, sample_k, window) and not twofun_certify(h, sample_k // 2, window):
            failures += 1
    run.check("certification is monotone in depth", failures == 0, run.count)

    # images of a converging sequence under r_M, in and out of the image of e_M
    length = max(run.count, 40)
    xs = shrinking_bump(length)
    search = 12
    inside = rM_sequence_certificate(
        BUMP_LIMIT,
        g_apply(BUMP_LIMIT),
        x_modulus=lambda i: i,
        h_probe_modulus=lambda m: 2 * m + 1,
        h_uniform_modulus=lambda k: k + 2,
        search_bound=search,
    )
    zs = [r_M_point(x, g_apply(x)) for x in xs]
    run.check(
        "r_M images converge inside the image of e_M",
        inside.limit_failure is None and conv_check_M(zs, inside.certificate, sample_k),
        length,
    )
    outside = rM_sequence_certificate(
        BUMP_LIMIT,
        constant_twofun(1),
        x_modulus=lambda i: i,
        h_probe_modulus=lambda m: 0,
        h_uniform_modulus=lambda k: 0,
        search_bound=search,
    )
    zs = [r_M_point(x, constant_twofun(1)) for x in xs]
    run.check(
        "r_M images converge outside the image of e_M",
        outside.limit_failure == 0 and conv_check_M(zs, outside.certificate, sample_k),
        length,
    )


def suite_cantor(run: SuiteRun):
    levels = min(run.depth, 12)
    bad = []
    for i in range(levels + 1):
        code = code_build(i)
        if (
            len(code.codewords) != (1 << i) + 1
            or not code.is_prefix_free()
            or code.kraft_sum() != ONE
            or any(codeword(i, j) != word for j, word in enumerate(code.codewords))
        ):
            bad.append(i)
    run.check(
        "codes are complete and prefix-free", not bad, levels + 1, detail=f"bad={bad}"
    )

    depth = max(run.depth, 1)
    failures = monotone = 0
    for _ in range(run.count):
        coords = random_grid_coords(run.rng, depth)
        point = coords_point(coords)
        bits = mprod_encode(point, depth)
        decoded = mprod_decode(bits)
        failures += not decoded.complete or decoded.coords != coords
        monotone += not mprod_encode(point, depth + 1).startswith(bits)
    run.check("grid streams round trip through Cantor space", failures == 0, run.count)
    run.check("encoding is prefix monotone", monotone == 0, run.count)

    empty = mprod_decode("")
    run.check("empty bits decode incomplete", not empty.complete and empty.coords == ())


def suite_baire(run: SuiteRun):
    bound = 20
    fan_points = [finite(a, b) for a in range(bound) for b in range(bound)] + [INFINITY]
    points = [NxFanPoint(n=n, p=p) for n in range(3) for p in fan_points]
    run.check(
        "gap encoding round trips", pair_check(baire_pair(bound + 1), points), len(points)
    )
    encodings = {baire_section(q).head for q in points}
    run.check("gap encoding is injective", len(encodings) == len(points), len(points))

    bound = 50
    sum_points = [Inl(k=k) for k in range(bound)] + [
        Inr(q=NxFanPoint(n=n, p=p))
        for n in range(2)
        for p in [finite(a, b) for a in range(bound) for b in range(bound)] + [INFINITY]
    ]
    run.check("absorption is a bijection", pair_check(absorb_pair(), sum_points), len(sum_points))

    samples = max(1, min(run.count, 50))
    failures = lookahead_failures = 0
    mutations = max(1, 1000 // samples)
    for n in range(samples):
        h = random_twofun(run.seed * 7919 + n)
        widest = max(h.constancy_modulus(k) for k in range(11))
        failures += not twofun_agree(restrict_H(lift_h(h)), h, 10, 10 + widest, 10)
        inputs = [random_baire_point(run.rng, 12, 3)]
        lookahead_failures += not lookahead_check(lift_h(h), inputs, mutations, run.seed + n)
    run.check("restrict_H(lift_h(h)) = h", failures == 0, samples)
    run.check("lift_h respects its lookahead", lookahead_failures == 0, samples * mutations)

    clamped = restrict_H(constant_bigfun(7))
    run.check(
        "restriction clamps to bits",
        twofun_agree(clamped, constant_twofun(1), 5, 5, 5),
    )


def suite_metric(run: SuiteRun):
    failures = 0
    for _ in range(run.count):
        x, y, z = run.points(3, max_support=6, max_index=10)
        failures += not (
            dist_M(x, y) == dist_M(y, x)
            and (dist_M(x, y) == ZERO) == (x == y)
            and dist_M(x, z) <= dist_M(x, y) + dist_M(y, z)
        )
    run.check("dist_M is a metric", failures == 0, run.count)

    failures = 0
    for _ in range(run.count):
        p, q, r = (random_fan_point(run.rng, 8) for _ in range(3))
        failures += not (
            fan_dist(p, q) == fan_dist(q, p)
            and (fan_dist(p, q) == ZERO) == (p == q)
            and fan_dist(p, r) <= fan_dist(p, q) + fan_dist(q, r)
        )
    run.check("fan_dist is a metric", failures == 0, run.count)

    escaping = [finite(n, run.rng.randint(0, 100)) for n in range(run.count)]
    run.check(
        "fan points with a_n = n converge to the limit point",
        fan_conv_check(escaping, INFINITY, lambda k: k, min(run.depth, 30)),
        run.count,
    )

    failures = 0
    for x in run.points():
        sums = [norm_prefix(x, n) for n in range(32)]
        failures += any(later < earlier for earlier, later in zip(sums, sums[1:]))
    run.check("norm_prefix is monotone", failures == 0, run.count)

    streams = [geometric_stream()] + [random_stream(run.seed + n) for n in range(10)]
    failures = 0
    for stream in streams:
        intervals = [norm_enclose(stream, k) for k in range(min(run.depth, 16))]
        failures += any(
            inner.lo < outer.lo or inner.hi > outer.hi
            for outer, inner in zip(intervals, intervals[1:])
        )
        failures += not stream_certify(stream, sample_k=10, window=20)
    run.check("stream enclosures are nested and certified", failures == 0, len(streams))


def suite_filtration(run: SuiteRun):
    failures = disagreements = 0
    bound = min(run.depth, 15)
    for n, x in enumerate(run.points()):
        h = g_apply(x) if n % 2 == 0 else perturbed_g(x, run.seed + n, level=bound)
        members = [c_m_member(x, h, m) for m in range(bound + 1)]
        failures += any(later and not earlier for earlier, later in zip(members, members[1:]))

        # the threshold shortcut for g(y) against plain probing
        other = random_mpoint(run.rng, max_support=4, max_index=8)
        source = g_apply(other)
        shortcut = first_failing_level(x, source, 8)
        disagreements += shortcut != first_failing_level(x, opaque(source), 8)
    run.check("C_{m+1} is contained in C_m", failures == 0, run.count)
    run.check("threshold scan agrees with probing", disagreements == 0, run.count)


def suite_lemma10(run: SuiteRun):
    K = min(run.depth, 30)
    chain = adversary_run(ball_oracle(), K)
    closed_form = all(
        sum((step.x_k.coord(i) for i in range(step.k + 1)), ZERO) == ONE - dy_pow2(step.k)
        for step in chain.steps
    )
    run.check(
        "ball adversary meets the closed form",
        witness_verify(chain, ball_oracle()) and closed_form
        and chain.probes <= sum(k + 2 for k in range(K + 1)),
        K + 1,
        detail=f"probes={chain.probes}",
    )

    identity = normann_refute(ball_complement, identity_pair(), K)
    run.check(
        "identity transport reproduces the ball chain",
        identity.chain is not None
        and identity.chain.a == chain.a
        and identity.chain.steps == chain.steps,
        K + 1,
    )

    depth = min(max(run.depth, 1), 20)
    transported = normann_refute(ball_complement_candidate, m_pair(depth), depth)
    run.check(
        "pairs transported through e_M land on opposite sides",
        bool(transported)
        and all(not pair.in_x and pair.in_y for pair in transported.transported),
        depth + 1,
    )

    member = pullback_oracle(limit_zero_candidate, m_pair(depth))
    run.check(
        "pullback of a limit condition is all of M",
        all(member(x) for x in run.points()),
        run.count,
    )

    whole = normann_refute(lambda point: True, m_pair(depth), depth)
    run.check(
        "the whole space is not a separator",
        whole.verdict is RefutationVerdict.NOT_A_SEPARATOR,
    )

    rules = [ProbeRule(n=0, a=1, b=6, value=1)]
    member = pullback_oracle(rules_candidate(rules), full_pair(depth))
    spots = run.points(20, max_support=4, max_index=6)
    run.check(
        "full-chain pullback matches f on the h column of the lift",
        all(member(x) == (f_eval(x, 0, 0, 6) == 1) for x in spots),
        len(spots),
    )


SUITES: dict[Suite, Callable[[SuiteRun], None]] = {
    Suite.LEMMA1: suite_lemma1,
    Suite.LEMMA4: suite_lemma4,
    Suite.LEMMA5: suite_lemma5,
    Suite.LEMMA6: suite_lemma6,
    Suite.LEMMA7: suite_lemma7,
    Suite.CANTOR: suite_cantor,
    Suite.BAIRE: suite_baire,
    Suite.METRIC: suite_metric,
    Suite.FILTRATION: suite_filtration,
    Suite.LEMMA10: suite_lemma10,
}


def run_suite(suite: Suite, seed: int, depth: int, count: int) -> list[CheckRecord]:
    """Run one suite and return its records in a fixed order."""
    run = SuiteRun(suite, seed, depth, count)
    SUITES[suite](run)
    failed = sum(not record.passed for record in run.records)
    logger.info("suite %s: %d checks, %d failed", suite.value, len(run.records), failed)
    return run.records
