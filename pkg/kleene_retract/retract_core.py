"""
The embedding of M into (prod M_i) x 2^(N x F) and its retraction.

``f`` compares window sums with 2^-k, ``g(y)`` packs those comparisons
into a continuous map on N x F, and ``e_M(x) = (x, g(x))``. The clopen
sets C_m collect the pairs (x, h) on which h agrees with f(x) up to level
m, and ``r_M`` keeps coordinate m of x exactly when (x, h) lies in C_m.
"""

from __future__ import annotations

import logging
import threading
from typing import Callable, Optional, Sequence, Union

from .base import FrozenStruct, Verdict
from .dyadic import ZERO, DyadicRational, dy_pow2
from .enums import HypothesisBasis, Lemma61Status
from .errors import MalformedCertificate
from .funcspace import TwoFun, cont_conv_check
from .spaces import (
    AnyPoint,
    ConvergenceCertificate,
    MPoint,
    MStream,
    ZERO_POINT,
    materialize,
    window_sum,
)
from .utils import Natural

logger = logging.getLogger(__name__)


def f_eval(x: AnyPoint, k: int, a: int, b: int) -> int:
    """0 if ``x(a) + ... + x(a + b) <= 2^-k``, else 1."""
    return 1 if window_sum(x, a, b) > dy_pow2(k) else 0


class XHPoint(FrozenStruct, frozen=True):
    """A point (x, h) of (prod M_i) x 2^(N x F)."""

    x: AnyPoint
    h: TwoFun


def g_apply(y: Union[MPoint, MStream]) -> TwoFun:
    """
    The continuous map g(y): N x F -> 2.

    Finite arguments evaluate ``f(y, k, a, b)`` from the window
    thresholds of y, the limit point evaluates to 0. The constancy modulus
    is the support end of a finite point or the stream's own tail bound.
    """
    windows = WindowTable(y)
    lock = threading.Lock()

    def at_finite(k: int, a: int, b: int) -> int:
        with lock:
            return windows.f(k, a, b)

    if isinstance(y, MPoint):
        end = y.support_end
        modulus = lambda k: end  # noqa: E731
        name = str(y)
    else:
        modulus = y.tail_bound
        name = y.label or "stream"
    return TwoFun(
        at_finite=at_finite,
        at_limit=lambda k: 0,
        constancy_modulus=modulus,
        provenance=y,
        label=f"g({name})",
    )


def e_M(x: Union[MPoint, MStream]) -> XHPoint:
    return XHPoint(x=x, h=g_apply(x))


# ---------------------------------------------------------------------------
# the filtration C_m


class CmDescriptor(FrozenStruct, frozen=True):
    """
    The probes that decide membership in C_m.

    Attributes:
        m: The level.
        x_coords: Coordinates of x that are read, ``0 .. 2m``.
        h_finite: Finite probes ``(k, a, b)`` of h with ``k, a, b <= m``.
        h_limits: Levels ``k <= m`` whose limit value is read.
    """

    m: Natural
    x_coords: tuple[Natural, ...]
    h_finite: tuple[tuple[Natural, Natural, Natural], ...]
    h_limits: tuple[Natural, ...]

    def reads_x(self, i: int) -> bool:
        return i <= 2 * self.m

    def reads_finite(self, k: int, a: int, b: int) -> bool:
        return max(k, a, b) <= self.m

    def reads_limit(self, k: int) -> bool:
        return k <= self.m

    def probes(self) -> list[str]:
        """Probe list for audit dumps."""
        return (
            [f"x({i})" for i in self.x_coords]
            + [f"h({k},{a},{b})" for k, a, b in self.h_finite]
            + [f"h({k},inf,inf)" for k in self.h_limits]
        )


def cm_descriptor(m: int) -> CmDescriptor:
    span = range(m + 1)
    return CmDescriptor(
        m=m,
        x_coords=tuple(range(2 * m + 1)),
        h_finite=tuple((k, a, b) for k in span for a in span for b in span),
        h_limits=tuple(span),
    )


def _threshold(n: int, e: int) -> Optional[int]:
    """Least k with ``n / 2^e > 2^-k``; None when ``n <= 0``."""
    if n <= 0:
        return None
    k = e - n.bit_length() + (1 if n & (n - 1) else 2)
    return max(k, 0)


class WindowTable:
    """
    Window sums of a point as integers over a common power of two.

    ``f(x, k, a, b)`` is 1 exactly when ``k`` reaches the threshold of the
    window ``a .. a+b``, so one threshold per window answers every level.
    """

    def __init__(self, x: AnyPoint):
        self.x = x
        self.exponent = 0
        self._prefix = [0]

    def _ensure(self, span: int):
        read = len(self._prefix) - 1
        if span <= read:
            return
        coords = [self.x.coord(i) for i in range(read, span)]
        exponent = max([self.exponent, span - 1] + [q.exponent for q in coords])
        shift = exponent - self.exponent
        if shift:
            self._prefix = [s << shift for s in self._prefix]
        self.exponent = exponent
        for q in coords:
            self._prefix.append(self._prefix[-1] + (q.numerator << (exponent - q.exponent)))

    def threshold(self, a: int, b: int) -> Optional[int]:
        self._ensure(a + b + 1)
        return _threshold(self._prefix[a + b + 1] - self._prefix[a], self.exponent)

    def f(self, k: int, a: int, b: int) -> int:
        t = self.threshold(a, b)
        return int(t is not None and k >= t)


def _level_probes(m: int):
    """Probes ``(k, a, b)`` with ``max(k, a, b) == m``."""
    for k in range(m + 1):
        for a in range(m + 1):
            if k == m or a == m:
                yield from ((k, a, b) for b in range(m + 1))
            else:
                yield k, a, m


class LevelScan:
    """
    Incremental search for the least m with (x, h) outside C_m.

    Levels are scanned once and the answer is cached; the cache only ever
    grows and always holds the same answer. When h is ``g(y)`` the scan
    compares window thresholds of x and y instead of probing h.
    """

    def __init__(self, x: AnyPoint, h: TwoFun):
        self.x = x
        self.h = h
        self._windows = WindowTable(x)
        self._source_windows = WindowTable(h.provenance) if h.provenance is not None else None
        # every level up to _checked is a member; _failed is the least failing level
        self._checked = -1
        self._failed: Optional[int] = None
        self._lock = threading.Lock()

    def first_failure(self, bound: int) -> Optional[int]:
        """Least level ``m <= bound`` with (x, h) outside C_m, or None."""
        with self._lock:
            if self._failed is None and bound > self._checked:
                if self.h.provenance is not None:
                    # each pass starts over, so look ahead
                    self._scan_provenance(max(bound, 2 * self._checked + 2))
                else:
                    self._scan_probes(bound)
            if self._failed is not None and self._failed <= bound:
                return self._failed
            return None

    def _scan_probes(self, bound: int):
        for m in range(self._checked + 1, bound + 1):
            if not self._level_agrees(m):
                logger.debug("pair leaves the filtration at level %d", m)
                self._failed = m
                return
            self._checked = m

    def _level_agrees(self, m: int) -> bool:
        h, windows = self.h, self._windows
        if h.at_limit(m) != 0:
            return False
        return all(h.at_finite(k, a, b) == windows.f(k, a, b) for k, a, b in _level_probes(m))

    def _scan_provenance(self, bound: int):
        other = self._source_windows
        best: Optional[int] = None
        for a in range(bound + 1):
            for b in range(bound + 1):
                mine, theirs = self._windows.threshold(a, b), other.threshold(a, b)
                if mine == theirs:
                    continue
                first = min(t for t in (mine, theirs) if t is not None)
                level = max(a, b, first)
                if level <= bound and (best is None or level < best):
                    best = level
        if best is None:
            self._checked = bound
        else:
            self._failed = best


def first_failing_level(x: AnyPoint, h: TwoFun, bound: int) -> Optional[int]:
    """Least ``m <= bound`` with (x, h) outside C_m, or None if there is none."""
    return LevelScan(x, h).first_failure(bound)


def c_m_member(x: AnyPoint, h: TwoFun, m: int) -> bool:
    """
    Membership of (x, h) in C_m.

    The limit values ``h(k, inf, inf)`` must be 0 and ``h(k, a, b)`` must
    equal ``f(x, k, a, b)`` for all ``k, a, b <= m``.
    """
    return first_failing_level(x, h, m) is None


def r_M_coord(x: AnyPoint, h: TwoFun, m: int) -> DyadicRational:
    """Coordinate m of r_M(x, h): x(m) inside C_m, 0 outside."""
    q = x.coord(m)
    if q.is_zero():
        return ZERO
    return q if c_m_member(x, h, m) else ZERO


def r_M(x: AnyPoint, h: TwoFun) -> MStream:
    """
    The retraction r_M(x, h) as a certified stream.

    The tail bound ``max(modulus(k), k)`` holds for every input: a limit
    value 0 at level k bounds the tail by the window argument, a limit
    value 1 removes every pair from C_m for m >= k.
    """
    scan = LevelScan(x, h)

    def coord(m: int) -> DyadicRational:
        q = x.coord(m)
        if q.is_zero() or scan.first_failure(m) is not None:
            return ZERO
        return q

    return MStream(
        coord=coord,
        tail_bound=lambda k: max(h.constancy_modulus(k), k),
        label=f"r_M({h.label})",
    )


def r_M_point(x: MPoint, h: TwoFun) -> MPoint:
    """r_M on a finite-support x, as a finite-support point."""
    end = x.support_end
    if end == 0:
        return ZERO_POINT
    failed = first_failing_level(x, h, end - 1)
    return materialize(x, end if failed is None else failed)


# ---------------------------------------------------------------------------
# properties of the retraction


class Lemma61Report(FrozenStruct, frozen=True, omit_defaults=True):
    """
    Outcome of the window tail check on r_M(x, h).

    ``total`` is the exact sum of r_M(x, h) over ``a .. a + window`` and
    ``probe`` the first probe ``(k, a, b)`` that broke the hypothesis.
    """

    status: Lemma61Status
    basis: HypothesisBasis
    total: DyadicRational = ZERO
    probe: Optional[tuple[int, int, int]] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status is not Lemma61Status.FAIL


def lemma61_check(x: AnyPoint, h: TwoFun, k: int, a: int, window: int) -> Lemma61Report:
    """
    Check that r_M(x, h) sums to at most 2^-k over ``a .. a + window``.

    The hypothesis asks ``a >= k`` and ``h(k, a', b) = 0`` for ``a' >= a``.
    For ``h = g(y)`` with ``a`` beyond the modulus it holds by construction;
    otherwise it is sampled on ``a' <= a + window, b <= window``.
    """
    if a < k:
        return Lemma61Report(
            status=Lemma61Status.HYPOTHESIS_FAIL, basis=HypothesisBasis.SAMPLED,
            reason="a < k",
        )
    if h.provenance is not None and a >= h.constancy_modulus(k):
        basis = HypothesisBasis.PROVED
    else:
        basis = HypothesisBasis.SAMPLED
        for probe_a in range(a, a + window + 1):
            for b in range(window + 1):
                if h.at_finite(k, probe_a, b) != 0:
                    return Lemma61Report(
                        status=Lemma61Status.HYPOTHESIS_FAIL, basis=basis,
                        probe=(k, probe_a, b), reason="h is not 0 on the window",
                    )

    total = window_sum(r_M(x, h), a, window)
    status = Lemma61Status.PASS if total <= dy_pow2(k) else Lemma61Status.FAIL
    return Lemma61Report(status=status, basis=basis, total=total)


def image_agreement_check(x: AnyPoint, h: TwoFun, depth: int) -> Verdict:
    """
    Pairs in C_depth agree with the image of e_M up to level ``depth``.

    Pairs outside C_depth pass vacuously and are flagged.
    """
    if first_failing_level(x, h, depth) is not None:
        return Verdict(passed=True, flags=(f"outside C_{depth}",))
    for k in range(depth + 1):
        if h.at_limit(k) != 0:
            return Verdict(passed=False, reason="limit", witness=(k,))
        for a in range(depth + 1):
            for b in range(depth + 1):
                if h.at_finite(k, a, b) != f_eval(x, k, a, b):
                    return Verdict(passed=False, reason="finite", witness=(k, a, b))
    return Verdict(passed=True)


def lemma5_uniform_modulus(cert: ConvergenceCertificate) -> Callable[[int], int]:
    """
    Uniform modulus for ``g(x_n) -> g(x_inf)`` from a convergence certificate.

    At level k take m with the tail of the limit beyond m below 2^{-k-1}
    and n0 past the pointwise moduli below m and the norm modulus at
    k + 2; every n >= max(m, n0) and a >= max(m, n0) then give 0.
    """
    if cert.pointwise_modulus is None:
        raise MalformedCertificate("a pointwise modulus is required")
    limit, pointwise = cert.claimed_limit, cert.pointwise_modulus

    def modulus(k: int) -> int:
        m = limit.support_end if isinstance(limit, MPoint) else limit.tail_bound(k + 2)
        n0 = max([cert.norm_modulus(k + 2)] + [pointwise(i) for i in range(m)])
        return max(m, n0)

    return modulus


def g_continuity_check(
    xs: Sequence[MPoint], cert: ConvergenceCertificate, sample_k: int, window: int
) -> Verdict:
    """Continuous convergence of ``g(x_n)`` to ``g(limit)`` under the derived modulus."""
    return cont_conv_check(
        [g_apply(x) for x in xs],
        g_apply(cert.claimed_limit),
        lemma5_uniform_modulus(cert),
        sample_k,
        window,
    )


class RetractionContinuity(FrozenStruct, frozen=True):
    """
    Convergence certificate for ``r_M(x_n, h_n) -> r_M(x_inf, h_inf)``.

    ``limit_failure`` is the level at which the limit pair leaves the
    filtration, or None when no such level was found within the search.
    """

    certificate: ConvergenceCertificate
    limit_failure: Optional[int] = None


def rM_sequence_certificate(
    x_inf: MPoint,
    h_inf: TwoFun,
    x_modulus: Callable[[int], int],
    h_probe_modulus: Callable[[int], int],
    h_uniform_modulus: Callable[[int], int],
    search_bound: int,
) -> RetractionContinuity:
    """
    Derive moduli for the images of a converging sequence under r_M.

    Args:
        x_inf: Limit of the first components.
        h_inf: Limit of the second components.
        x_modulus: ``i -> n`` with ``x_n(i) = x_inf(i)`` beyond n.
        h_probe_modulus: ``m -> n`` with h_n agreeing with h_inf on every
            probe of C_m beyond n.
        h_uniform_modulus: ``k -> m`` with ``h_n(k, a, b) = h_inf(k, inf,
            inf)`` for ``n >= m`` and ``a >= m``.
        search_bound: Highest level searched for a failure of the limit.

    Returns:
        The certificate. If the limit pair leaves C_m the sequence is
        eventually equal to its limit and the norm modulus is constant;
        otherwise the norm modulus at k waits for agreement below
        ``max(h_uniform_modulus(k), k)``.
    """

    def pointwise(i: int) -> int:
        return max(
            max(x_modulus(j) for j in range(2 * i + 1)),
            max(h_probe_modulus(level) for level in range(i + 1)),
        )

    z_inf = r_M_point(x_inf, h_inf)
    failure = first_failing_level(x_inf, h_inf, search_bound)
    if failure is not None:
        settled = pointwise(failure)
        norm_modulus = lambda k: settled  # noqa: E731
    else:

        def norm_modulus(k: int) -> int:
            m = h_uniform_modulus(k)
            c = max(m, k)
            return max([m] + [pointwise(i) for i in range(c)])

    return RetractionContinuity(
        certificate=ConvergenceCertificate(
            claimed_limit=z_inf,
            pointwise_modulus=pointwise,
            norm_modulus=norm_modulus,
        ),
        limit_failure=failure,
    )
