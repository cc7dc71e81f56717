"""
Points, metrics and convergence certificates.

The spaces here are the dyadic-grid subspace M of l1, the product of the
finite grids M_i, the countable fan F, the product N x F and the Baire
space. Infinite objects are functions plus certificates; every check is a
finite, exact computation over samples.
"""

from __future__ import annotations

import logging
import re
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .base import PASS, FrozenStruct, Verdict
from .dyadic import (
    ONE,
    ZERO,
    DyadicRational,
    dy_format,
    dy_make,
    dy_parse,
    dy_pow2,
    dy_sum,
)
from .enums import Condition
from .errors import MalformedCertificate
from .utils import FAN_PATTERN, Natural, split_point_entries

logger = logging.getLogger(__name__)


def grid_check(i: int, q: DyadicRational) -> bool:
    """True iff ``q`` lies in M_i = {j * 2^-i : 0 <= j <= 2^i}."""
    return q.exponent <= i and ZERO <= q <= ONE


def grid_symbol(i: int, q: DyadicRational) -> int:
    """The index ``j`` with ``q = j * 2^-i``; ``q`` must lie in M_i."""
    return q.numerator << (i - q.exponent)


def grid_value(i: int, j: int) -> DyadicRational:
    """The grid value ``j * 2^-i``."""
    return dy_make(j, i)


# ---------------------------------------------------------------------------
# points of M and of the product of the M_i


class MPoint(FrozenStruct, frozen=True):
    """
    A finitely supported point of M.

    ``support`` lists ``(i, x(i))`` for the nonzero coordinates in
    increasing index order; every value lies on its grid M_i.
    """

    support: tuple[tuple[Natural, DyadicRational], ...] = ()

    def __post_init__(self):
        previous = -1
        for i, q in self.support:
            if i <= previous:
                raise ValueError("support indices must be strictly increasing")
            if q.is_zero():
                raise ValueError(f"explicit zero at coordinate {i}")
            if not grid_check(i, q):
                raise ValueError(f"{dy_format(q)} is not in M_{i}")
            previous = i

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, DyadicRational]) -> MPoint:
        """Build a point from ``{i: value}``, dropping zeros."""
        return cls(tuple(sorted((i, q) for i, q in mapping.items() if not q.is_zero())))

    @classmethod
    def from_coords(cls, coords: Sequence[DyadicRational]) -> MPoint:
        """Build a point whose first coordinates are ``coords``."""
        return cls.from_mapping(dict(enumerate(coords)))

    def coord(self, i: int) -> DyadicRational:
        for index, value in self.support:
            if index == i:
                return value
            if index > i:
                break
        return ZERO

    @property
    def support_end(self) -> int:
        """One past the largest nonzero coordinate (0 for the zero point)."""
        return self.support[-1][0] + 1 if self.support else 0

    def as_dict(self) -> dict[int, DyadicRational]:
        return dict(self.support)

    def __str__(self) -> str:
        return mpoint_format(self)


ZERO_POINT = MPoint()


class MStream(FrozenStruct, frozen=True):
    """
    A point of M given by a coordinate function and a tail certificate.

    ``tail_bound(k)`` is an index N with sum_{i >= N} coord(i) <= 2^-k.
    The bound may be conservative. Both functions must be pure.
    """

    coord: Callable[[int], DyadicRational]
    tail_bound: Callable[[int], int]
    label: str = ""


class ProductPoint(FrozenStruct, frozen=True):
    """A point of the product of the grids M_i, with no norm certificate."""

    coord: Callable[[int], DyadicRational]
    label: str = ""


AnyPoint = Union[MPoint, MStream, ProductPoint]


def geometric_stream() -> MStream:
    """The point x(i) = 2^-i, with the exact tail bound k -> k + 1."""
    return MStream(coord=dy_pow2, tail_bound=lambda k: k + 1, label="geometric")


def materialize(x: AnyPoint, n: int) -> MPoint:
    """The finite-support point agreeing with ``x`` below ``n`` and zero after."""
    if isinstance(x, MPoint):
        return MPoint(tuple((i, q) for i, q in x.support if i < n))
    return MPoint.from_mapping({i: x.coord(i) for i in range(n)})


def points_agree(x: AnyPoint, y: AnyPoint, depth: int) -> bool:
    """True iff ``x`` and ``y`` agree on coordinates ``0..depth-1``."""
    return all(x.coord(i) == y.coord(i) for i in range(depth))


# ---------------------------------------------------------------------------
# norms and distances


class Interval(FrozenStruct, frozen=True):
    """Closed interval [lo, hi] of dyadic rationals."""

    lo: DyadicRational
    hi: DyadicRational

    def contains(self, value: DyadicRational) -> bool:
        return self.lo <= value <= self.hi

    @property
    def width(self) -> DyadicRational:
        return self.hi - self.lo


def window_sum(x: AnyPoint, a: int, b: int) -> DyadicRational:
    """Exact sum of ``x(a) + ... + x(a + b)``."""
    if isinstance(x, MPoint):
        return dy_sum(q for i, q in x.support if a <= i <= a + b)
    return dy_sum(x.coord(i) for i in range(a, a + b + 1))


def norm_prefix(x: AnyPoint, n: int) -> DyadicRational:
    """Exact partial norm ``x(0) + ... + x(n-1)``; coordinates are nonnegative."""
    if n <= 0:
        return ZERO
    return window_sum(x, 0, n - 1)


def norm_full(x: MPoint) -> DyadicRational:
    """Exact norm of a finite-support point."""
    return dy_sum(q for _, q in x.support)


def norm_enclose(x: MStream, k: int) -> Interval:
    """
    Enclosure of the norm of a stream with width 2^-k.

    The prefix up to ``tail_bound(k)`` is summed exactly and the certified
    tail adds at most 2^-k.
    """
    lo = norm_prefix(x, x.tail_bound(k))
    return Interval(lo=lo, hi=lo + dy_pow2(k))


def dist_M(x: MPoint, y: MPoint) -> DyadicRational:
    """Exact l1 distance between two finite-support points."""
    left, right = x.as_dict(), y.as_dict()
    return dy_sum(
        abs(left.get(i, ZERO) - right.get(i, ZERO)) for i in left.keys() | right.keys()
    )


# ---------------------------------------------------------------------------
# the fan and its product with N


class FanFinite(FrozenStruct, frozen=True, tag="finite", tag_field="kind"):
    """The isolated fan point (a, b)."""

    a: Natural
    b: Natural


class FanInfinity(FrozenStruct, frozen=True, tag="infinity", tag_field="kind"):
    """The limit point (inf, inf) of the fan."""


FanPoint = Union[FanFinite, FanInfinity]

INFINITY = FanInfinity()


def finite(a: int, b: int) -> FanFinite:
    return FanFinite(a=a, b=b)


class NxFanPoint(FrozenStruct, frozen=True):
    """A point ``(n, p)`` of N x F."""

    n: Natural
    p: FanPoint


def fan_dist(p: FanPoint, q: FanPoint) -> DyadicRational:
    """
    The fan metric.

    Zero on equal points, 2^-a between (a, b) and the limit point, and
    max(2^-a, 2^-a') between distinct finite points.
    """
    if p == q:
        return ZERO
    if isinstance(p, FanInfinity):
        return dy_pow2(q.a)
    if isinstance(q, FanInfinity):
        return dy_pow2(p.a)
    return dy_pow2(min(p.a, q.a))


def fan_format(p: FanPoint) -> str:
    if isinstance(p, FanInfinity):
        return "(inf,inf)"
    return f"({p.a},{p.b})"


def fan_parse(text: str) -> FanPoint:
    """Parse ``"(a,b)"`` or ``"(inf,inf)"``."""
    match = re.match(FAN_PATTERN, text)
    if not match:
        raise ValueError(f"not a fan point: {text!r}")
    a, b = match.groups()
    if a == "inf" and b == "inf":
        return INFINITY
    if "inf" in (a, b):
        raise ValueError(f"mixed finite/infinite fan point: {text!r}")
    return finite(int(a), int(b))


# ---------------------------------------------------------------------------
# Baire space


class BairePoint(FrozenStruct, frozen=True):
    """
    A point of the Baire space, inspected one prefix at a time.

    Positions below ``len(head)`` read ``head``; later positions read
    ``tail`` (zero when absent). Consumers only ever look at finite
    prefixes.
    """

    head: tuple[Natural, ...] = ()
    tail: Optional[Callable[[int], int]] = None

    def at(self, i: int) -> int:
        if i < len(self.head):
            return self.head[i]
        return self.tail(i) if self.tail is not None else 0

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.at(i) for i in range(n))

    def with_tail_from(self, start: int, tail: Callable[[int], int]) -> BairePoint:
        """Keep positions below ``start`` and read ``tail`` from there on."""
        return BairePoint(head=self.prefix(start), tail=tail)


# ---------------------------------------------------------------------------
# text forms


def mpoint_format(x: MPoint) -> str:
    return "[" + ", ".join(f"{i}:{dy_format(q)}" for i, q in x.support) + "]"


def mpoint_parse(text: str) -> MPoint:
    """Parse ``"[0:1, 2:1/2^2]"``; repeated indices are rejected."""
    mapping: dict[int, DyadicRational] = {}
    for i, value in split_point_entries(text):
        if i in mapping:
            raise ValueError(f"coordinate {i} given twice")
        mapping[i] = dy_parse(value)
    return MPoint.from_mapping(mapping)


# ---------------------------------------------------------------------------
# convergence certificates


class ConvergenceCertificate(FrozenStruct, frozen=True):
    """
    Claimed convergence of a sequence of points of M.

    Attributes:
        claimed_limit: The limit point.
        pointwise_modulus: i -> n_i with x_n(i) = limit(i) for n >= n_i.
        norm_modulus: k -> n with |norm(x_n) - norm(limit)| <= 2^-k beyond n.
        closeness_modulus: (i, k) -> n with |x_n(i) - limit(i)| <= 2^-k
            beyond n; derived from ``pointwise_modulus`` when absent.
    """

    claimed_limit: Union[MPoint, MStream]
    norm_modulus: Callable[[int], int]
    pointwise_modulus: Optional[Callable[[int], int]] = None
    closeness_modulus: Optional[Callable[[int, int], int]] = None


class ConvergenceVerdict(FrozenStruct, frozen=True):
    """
    Result of checking a convergence certificate at finite depth.

    ``index`` is the sequence position and ``position`` the coordinate
    (condition a) or precision level k (condition b) of the first failure.
    """

    passed: bool
    depth: int
    condition: Optional[Condition] = None
    index: Optional[int] = None
    position: Optional[int] = None
    flags: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def _modulus_value(modulus: Callable[..., int], *args: int) -> int:
    value = modulus(*args)
    if value < 0:
        raise MalformedCertificate(f"modulus returned {value} at {args}")
    return value


def _monotone_flags(name: str, modulus: Callable[[int], int], depth: int) -> list[str]:
    values = [_modulus_value(modulus, k) for k in range(depth)]
    if any(later < earlier for earlier, later in zip(values, values[1:])):
        return [f"{name} modulus not monotone"]
    return []


def pointwise_check(
    xs: Sequence[AnyPoint],
    limit: AnyPoint,
    modulus: Callable[[int], int],
    depth: int,
) -> ConvergenceVerdict:
    """
    Convergence in the product of the M_i: eventual equality per coordinate.

    For every ``i < depth`` and every sampled ``n >= modulus(i)`` the
    coordinate ``xs[n](i)`` must equal ``limit(i)``.
    """
    for i in range(depth):
        target = limit.coord(i)
        for n in range(_modulus_value(modulus, i), len(xs)):
            if xs[n].coord(i) != target:
                return ConvergenceVerdict(
                    passed=False, depth=depth, condition=Condition.POINTWISE,
                    index=n, position=i,
                )
    return ConvergenceVerdict(passed=True, depth=depth)


def _limit_norm_violated(
    norm: DyadicRational, limit: Union[MPoint, MStream], k: int
) -> bool:
    """Definite violation of |norm - norm(limit)| <= 2^-k."""
    bound = dy_pow2(k)
    if isinstance(limit, MPoint):
        return abs(norm - norm_full(limit)) > bound
    enclosure = norm_enclose(limit, k + 1)
    return norm < enclosure.lo - bound or norm > enclosure.hi + bound


def _norm_failure(
    xs: Sequence[MPoint], cert: ConvergenceCertificate, depth: int
) -> Optional[tuple[int, int]]:
    norms = [norm_full(x) for x in xs]
    for k in range(depth):
        for n in range(_modulus_value(cert.norm_modulus, k), len(xs)):
            if _limit_norm_violated(norms[n], cert.claimed_limit, k):
                return n, k
    return None


def conv_check_M(
    xs: Sequence[MPoint], cert: ConvergenceCertificate, depth: int
) -> ConvergenceVerdict:
    """
    Check convergence in M: eventual coordinate equality plus norm convergence.

    Moduli that point past the end of ``xs`` make the corresponding check
    vacuous at this sample size. A norm modulus that decreases is accepted
    and flagged. Limits given as streams are compared through norm
    enclosures, and only definite violations fail.

    Raises:
        MalformedCertificate: If the pointwise modulus is missing or a
            modulus returns a negative number.
    """
    if cert.pointwise_modulus is None:
        raise MalformedCertificate("convergence in M needs a pointwise modulus")
    flags = tuple(_monotone_flags("norm", cert.norm_modulus, depth))

    pointwise = pointwise_check(xs, cert.claimed_limit, cert.pointwise_modulus, depth)
    if not pointwise:
        return ConvergenceVerdict(
            passed=False, depth=depth, condition=Condition.POINTWISE,
            index=pointwise.index, position=pointwise.position, flags=flags,
        )

    failure = _norm_failure(xs, cert, depth)
    if failure is not None:
        n, k = failure
        logger.debug("norm condition fails at n=%d, k=%d", n, k)
        return ConvergenceVerdict(
            passed=False, depth=depth, condition=Condition.NORM,
            index=n, position=k, flags=flags,
        )
    return ConvergenceVerdict(passed=True, depth=depth, flags=flags)


def conv_check_l1(
    xs: Sequence[MPoint], cert: ConvergenceCertificate, depth: int
) -> ConvergenceVerdict:
    """
    Check convergence in l1: coordinates converge, norms converge.

    Condition (a) asks ``|xs[n](i) - limit(i)| <= 2^-k`` for ``i, k <
    depth`` and ``n >= closeness_modulus(i, k)``. Without a closeness
    modulus the pointwise modulus is used for every k.
    """
    closeness = cert.closeness_modulus
    if closeness is None:
        if cert.pointwise_modulus is None:
            raise MalformedCertificate("convergence in l1 needs a closeness modulus")
        pointwise = cert.pointwise_modulus
        closeness = lambda i, k: pointwise(i)  # noqa: E731

    flags = list(_monotone_flags("norm", cert.norm_modulus, depth))
    for i in range(depth):
        values = [_modulus_value(closeness, i, k) for k in range(depth)]
        if any(later < earlier for earlier, later in zip(values, values[1:])):
            flags.append(f"closeness modulus not monotone at coordinate {i}")

    limit = cert.claimed_limit
    for i in range(depth):
        target = limit.coord(i)
        for k in range(depth):
            bound = dy_pow2(k)
            for n in range(_modulus_value(closeness, i, k), len(xs)):
                if abs(xs[n].coord(i) - target) > bound:
                    return ConvergenceVerdict(
                        passed=False, depth=depth, condition=Condition.POINTWISE,
                        index=n, position=i, flags=tuple(flags),
                    )

    failure = _norm_failure(xs, cert, depth)
    if failure is not None:
        n, k = failure
        return ConvergenceVerdict(
            passed=False, depth=depth, condition=Condition.NORM,
            index=n, position=k, flags=tuple(flags),
        )
    return ConvergenceVerdict(passed=True, depth=depth, flags=tuple(flags))


def fan_conv_check(
    points: Sequence[FanPoint],
    limit: FanPoint,
    modulus: Callable[[int], int],
    depth: int,
) -> Verdict:
    """
    Check ``fan_dist(points[n], limit) <= 2^-k`` for ``k < depth`` and
    every sampled ``n >= modulus(k)``.
    """
    for k in range(depth):
        bound = dy_pow2(k)
        for n in range(_modulus_value(modulus, k), len(points)):
            if fan_dist(points[n], limit) > bound:
                return Verdict(passed=False, reason="fan distance", witness=(n, k))
    return PASS


def stream_certify(x: MStream, sample_k: int, window: int) -> Verdict:
    """
    Falsification test for a stream's grid membership and tail certificate.

    For each ``k < sample_k`` the coordinates up to ``tail_bound(k) +
    window`` must lie on their grids and the window sum of coordinates
    ``tail_bound(k) .. tail_bound(k) + window`` must not exceed 2^-k.
    """
    for k in range(sample_k):
        start = _modulus_value(x.tail_bound, k)
        for i in range(start + window + 1):
            if not grid_check(i, x.coord(i)):
                return Verdict(passed=False, reason="grid", witness=(i,))
        if window_sum(x, start, window) > dy_pow2(k):
            return Verdict(passed=False, reason="tail bound", witness=(k, start))
    return PASS


def all_fan_points(bound: int) -> Iterable[FanPoint]:
    """Every finite fan point with ``a, b < bound``, then the limit point."""
    for a in range(bound):
        for b in range(bound):
            yield finite(a, b)
    yield INFINITY
