"""
The outer retract chain from prod M_i x 2^(N x F) up to N^(N^N).

Each link is a section-retraction pair:

- prod M_i is coded into Cantor space by complete prefix codes,
- 2^N x 2^(N x F) is absorbed into 2^(N x F) through a bijection of
  N + (N x F) with N x F,
- N x F is a retract of Baire space through a gap encoding, which lifts
  maps on N x F to maps on Baire space with bounded lookahead.

``section_full`` and ``retract_full`` compose these with e_M and r_M.
"""

from __future__ import annotations

import functools
import heapq
import logging
import operator
import threading
from typing import Any, Callable, Optional, Sequence, Union

from .base import PASS, FrozenStruct, Verdict
from .dyadic import DyadicRational, dy_pow2, dy_sum
from .errors import IncompleteDecode
from .funcspace import BigFun, TwoFun, twofun_eval
from .retract_core import e_M, r_M
from .spaces import (
    INFINITY,
    AnyPoint,
    BairePoint,
    FanFinite,
    FanPoint,
    MPoint,
    MStream,
    NxFanPoint,
    ProductPoint,
    finite,
    grid_check,
    grid_symbol,
    grid_value,
    points_agree,
)
from .utils import Bits, Natural, is_bit_string

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Cantor coding of prod M_i


class PrefixCode(FrozenStruct, frozen=True):
    """
    Complete prefix-free code for the 2^i + 1 symbols of M_i.

    ``codewords[j]`` codes the grid value ``j * 2^-i``.
    """

    level: Natural
    codewords: tuple[Bits, ...]

    def kraft_sum(self) -> DyadicRational:
        return dy_sum(dy_pow2(len(word)) for word in self.codewords)

    def is_prefix_free(self) -> bool:
        # in sorted order a word that prefixes another also prefixes its successor
        ordered = sorted(self.codewords)
        return all(not later.startswith(word) for word, later in zip(ordered, ordered[1:]))


def _slot_key(slot: str) -> tuple[int, int, str]:
    # shortest first, lexicographically last among equals
    return len(slot), -int(slot, 2), slot


@functools.lru_cache(maxsize=32)
def code_build(i: int) -> PrefixCode:
    """
    The canonical code for level ``i``.

    Starting from the slots ``0`` and ``1``, the lexicographically last slot
    of minimal length is split until there are 2^i + 1 slots.
    """
    heap = [_slot_key("0"), _slot_key("1")]
    heapq.heapify(heap)
    while len(heap) < (1 << i) + 1:
        _, _, slot = heapq.heappop(heap)
        heapq.heappush(heap, _slot_key(slot + "0"))
        heapq.heappush(heap, _slot_key(slot + "1"))
    return PrefixCode(level=i, codewords=tuple(sorted(slot for _, _, slot in heap)))


def codeword(i: int, j: int) -> str:
    """
    Codeword of symbol ``j`` at level ``i`` without building the table.

    Symbols below 2^i - 1 are their own i-bit binary numerals; the last
    two symbols are ``1^i 0`` and ``1^i 1``.
    """
    top = 1 << i
    if not 0 <= j <= top:
        raise ValueError(f"symbol {j} is not in M_{i}")
    if j < top - 1:
        return format(j, f"0{i}b")
    return "1" * i + ("0" if j == top - 1 else "1")


def mprod_encode(x: AnyPoint, depth: int) -> str:
    """Concatenated codewords of ``x(0) .. x(depth - 1)``."""
    words = []
    for i in range(depth):
        q = x.coord(i)
        if not grid_check(i, q):
            raise ValueError(f"coordinate {i} = {q} is not in M_{i}")
        words.append(codeword(i, grid_symbol(i, q)))
    return "".join(words)


class DecodeResult(FrozenStruct, frozen=True):
    """
    Decoded coordinate prefix.

    ``complete`` is False when the bits ended inside a codeword (or before
    the first one); ``consumed`` counts the bits of the decoded codewords.
    """

    coords: tuple[DyadicRational, ...]
    complete: bool
    consumed: Natural

    def point(self) -> MPoint:
        return MPoint.from_coords(self.coords)


def _read_symbol(bit_at: Callable[[int], Optional[int]], pos: int, i: int):
    """Symbol at level ``i`` starting at ``pos`` and the next position, or None."""
    value = 0
    for offset in range(i):
        bit = bit_at(pos + offset)
        if bit is None:
            return None
        value = (value << 1) | bit
    pos += i
    if value != (1 << i) - 1:
        return value, pos
    bit = bit_at(pos)
    if bit is None:
        return None
    return value + bit, pos + 1


def mprod_decode(bits: str, depth: Optional[int] = None) -> DecodeResult:
    """
    Greedy decoder.

    Reads ``depth`` coordinates, or as many as the bits hold when ``depth``
    is None. Running out of bits inside a codeword is not an error: the
    coordinates read so far come back marked incomplete.
    """
    if not is_bit_string(bits):
        raise ValueError("bits must be a string of 0 and 1")

    def bit_at(n: int) -> Optional[int]:
        return int(bits[n]) if n < len(bits) else None

    coords: list[DyadicRational] = []
    pos = 0
    while depth is None or len(coords) < depth:
        if depth is None and coords and pos == len(bits):
            break
        step = _read_symbol(bit_at, pos, len(coords))
        if step is None:
            return DecodeResult(coords=tuple(coords), complete=False, consumed=pos)
        j, pos = step
        coords.append(grid_value(len(coords), j))
    return DecodeResult(coords=tuple(coords), complete=True, consumed=pos)


def mprod_decode_strict(bits: str, depth: Optional[int] = None) -> tuple[DyadicRational, ...]:
    """
    Like :func:`mprod_decode` but rejects truncated input.

    Raises:
        IncompleteDecode: If the bits end inside a codeword.
    """
    result = mprod_decode(bits, depth)
    if not result.complete:
        raise IncompleteDecode(
            f"bits end inside the codeword of level {len(result.coords)}"
        )
    return result.coords


class CantorBits:
    """The infinite code of a point of prod M_i, produced on demand."""

    def __init__(self, x: AnyPoint):
        self.x = x
        self._bits: list[int] = []
        self._level = 0
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        with self._lock:
            while len(self._bits) <= n:
                i = self._level
                word = codeword(i, grid_symbol(i, self.x.coord(i)))
                self._bits.extend(int(bit) for bit in word)
                self._level += 1
            return self._bits[n]


class CantorDecoder:
    """Coordinates of the point coded by an infinite bit stream."""

    def __init__(self, bit_at: Callable[[int], int]):
        self.bit_at = bit_at
        self._coords: list[DyadicRational] = []
        self._pos = 0
        self._lock = threading.Lock()

    def __call__(self, i: int) -> DyadicRational:
        with self._lock:
            while len(self._coords) <= i:
                level = len(self._coords)
                j, self._pos = _read_symbol(self.bit_at, self._pos, level)
                self._coords.append(grid_value(level, j))
            return self._coords[i]


def bits_to_point(bit_at: Callable[[int], int], label: str = "") -> ProductPoint:
    return ProductPoint(coord=CantorDecoder(bit_at), label=label)


# ---------------------------------------------------------------------------
# absorbing 2^N into 2^(N x F)


class Inl(FrozenStruct, frozen=True, tag="inl", tag_field="side"):
    """A natural number on the left of N + (N x F)."""

    k: Natural


class Inr(FrozenStruct, frozen=True, tag="inr", tag_field="side"):
    """A point of N x F on the right of N + (N x F)."""

    q: NxFanPoint


SumPoint = Union[Inl, Inr]


def fan_absorb(p: SumPoint) -> NxFanPoint:
    """
    Bijection N + (N x F) -> N x F.

    ``Inl k`` goes to ``(0, (0, k))``, ``(0, (a, b))`` moves to
    ``(0, (a + 1, b))`` and everything else is fixed.
    """
    if isinstance(p, Inl):
        return NxFanPoint(n=0, p=finite(0, p.k))
    q = p.q
    if q.n == 0 and isinstance(q.p, FanFinite):
        return NxFanPoint(n=0, p=finite(q.p.a + 1, q.p.b))
    return q


def fan_absorb_inv(q: NxFanPoint) -> SumPoint:
    if q.n == 0 and isinstance(q.p, FanFinite):
        if q.p.a == 0:
            return Inl(k=q.p.b)
        return Inr(q=NxFanPoint(n=0, p=finite(q.p.a - 1, q.p.b)))
    return Inr(q=q)


def absorb_twofun(bits: Callable[[int], int], h: TwoFun) -> TwoFun:
    """
    The map on N x F that reads ``bits`` on the absorbed copy of N and ``h``
    elsewhere. The modulus at level 0 grows by one for the shifted column.
    """

    def value(k: int, p: FanPoint) -> int:
        side = fan_absorb_inv(NxFanPoint(n=k, p=p))
        if isinstance(side, Inl):
            return bits(side.k)
        return twofun_eval(h, side.q.n, side.q.p)

    return TwoFun(
        at_finite=lambda k, a, b: value(k, finite(a, b)),
        at_limit=lambda k: value(k, INFINITY),
        constancy_modulus=lambda k: h.constancy_modulus(k) + (1 if k == 0 else 0),
        label=f"absorb({h.label})",
    )


def split_twofun(H: TwoFun) -> tuple[Callable[[int], int], TwoFun]:
    """Inverse of :func:`absorb_twofun`: the bit stream and the map on N x F."""

    def value(side: SumPoint) -> int:
        q = fan_absorb(side)
        return twofun_eval(H, q.n, q.p)

    def bits(n: int) -> int:
        return value(Inl(k=n))

    h = TwoFun(
        at_finite=lambda k, a, b: value(Inr(q=NxFanPoint(n=k, p=finite(a, b)))),
        at_limit=lambda k: value(Inr(q=NxFanPoint(n=k, p=INFINITY))),
        constancy_modulus=lambda k: (
            max(H.constancy_modulus(0) - 1, 0) if k == 0 else H.constancy_modulus(k)
        ),
        label=f"split({H.label})",
    )
    return bits, h


# ---------------------------------------------------------------------------
# N x F as a retract of Baire space


def baire_section(q: NxFanPoint) -> BairePoint:
    """Gap encoding: ``(n, (a, b))`` is ``n 0^a (b+1) 0^w``, the limit is ``n 0^w``."""
    if isinstance(q.p, FanFinite):
        return BairePoint(head=(q.n,) + (0,) * q.p.a + (q.p.b + 1,))
    return BairePoint(head=(q.n,))


def baire_retract_prefix(p: BairePoint, horizon: int) -> NxFanPoint:
    """
    Decode a Baire point reading at most ``horizon + 1`` positions.

    The first nonzero value ``b + 1`` at position ``a + 1 <= horizon``
    gives ``(p(0), (a, b))``; without one the result is the limit point.
    """
    for position in range(1, horizon + 1):
        value = p.at(position)
        if value:
            return NxFanPoint(n=p.at(0), p=finite(position - 1, value - 1))
    return NxFanPoint(n=p.at(0), p=INFINITY)


def lift_h(h: TwoFun) -> BigFun:
    """
    Extend h to Baire space through the gap decoding.

    The decoding horizon at level k is the constancy modulus of h, beyond
    which h already equals its limit value.
    """

    def evaluate(p: BairePoint) -> int:
        k = p.at(0)
        q = baire_retract_prefix(p, h.constancy_modulus(k))
        return twofun_eval(h, q.n, q.p)

    return BigFun(
        eval=evaluate,
        lookahead=lambda n: h.constancy_modulus(n) + 1,
        source=h,
        label=f"lift({h.label})",
    )


def restrict_H(H: BigFun) -> TwoFun:
    """
    The map ``q -> min(H(baire_section(q)), 1)`` on N x F.

    On a lift of h the gap decoding of ``baire_section(k, (a, b))`` is
    ``(k, (a, b))`` for ``a`` below the modulus of h and the limit point
    otherwise, so the values are read from h without the Baire round trip.
    """
    source = H.source

    def value(k: int, p: FanPoint) -> int:
        if source is not None:
            if isinstance(p, FanFinite) and p.a < source.constancy_modulus(k):
                return min(source.at_finite(k, p.a, p.b), 1)
            return min(source.at_limit(k), 1)
        return min(H.eval(baire_section(NxFanPoint(n=k, p=p))), 1)

    return TwoFun(
        at_finite=lambda k, a, b: value(k, finite(a, b)),
        at_limit=lambda k: value(k, INFINITY),
        constancy_modulus=lambda k: max(H.lookahead(k) - 1, 0),
        label=f"restrict({H.label})",
    )


# ---------------------------------------------------------------------------
# the full chain


def section_full(x: Union[MPoint, MStream]) -> BigFun:
    """Embed a point of M into N^(N^N): e_M, Cantor coding, absorption, lift."""
    pair = e_M(x)
    return lift_h(absorb_twofun(CantorBits(pair.x), pair.h))


def retract_full(H: BigFun) -> MStream:
    """Restrict, split, decode and retract; total on every H with honest lookahead."""
    bits, h = split_twofun(restrict_H(H))
    return r_M(bits_to_point(bits, label=H.label), h)


class SectionRetractionPair(FrozenStruct, frozen=True):
    """
    A section e: A -> B with retraction r: B -> A.

    ``agree`` decides equality of A-points as far as a finite test can;
    for points of M it compares a fixed number of coordinates.
    """

    section: Callable[[Any], Any]
    retraction: Callable[[Any], Any]
    name: str
    agree: Callable[[Any, Any], bool] = operator.eq


def identity_pair() -> SectionRetractionPair:
    return SectionRetractionPair(
        section=lambda x: x, retraction=lambda x: x, name="identity"
    )


def baire_pair(horizon: int) -> SectionRetractionPair:
    """Gap encoding; exact on fan points ``(a, b)`` with ``a < horizon``."""
    return SectionRetractionPair(
        section=baire_section,
        retraction=lambda p: baire_retract_prefix(p, horizon),
        name="baire",
    )


def absorb_pair() -> SectionRetractionPair:
    return SectionRetractionPair(
        section=fan_absorb, retraction=fan_absorb_inv, name="absorb"
    )


def cantor_pair(depth: int) -> SectionRetractionPair:
    return SectionRetractionPair(
        section=lambda x: mprod_encode(x, depth),
        retraction=lambda bits: mprod_decode(bits, depth).point(),
        name="cantor",
        agree=lambda x, y: points_agree(x, y, depth),
    )


def m_pair(depth: int) -> SectionRetractionPair:
    """(e_M, r_M), compared on the first ``depth`` coordinates."""
    return SectionRetractionPair(
        section=e_M,
        retraction=lambda p: r_M(p.x, p.h),
        name="e_M/r_M",
        agree=lambda x, y: points_agree(x, y, depth),
    )


def full_pair(depth: int) -> SectionRetractionPair:
    return SectionRetractionPair(
        section=section_full,
        retraction=retract_full,
        name="full",
        agree=lambda x, y: points_agree(x, y, depth),
    )


def pair_check(pair: SectionRetractionPair, points: Sequence[Any]) -> Verdict:
    """``retraction(section(p))`` must agree with ``p`` for every sample."""
    for index, p in enumerate(points):
        if not pair.agree(pair.retraction(pair.section(p)), p):
            logger.debug("%s round trip fails on sample %d", pair.name, index)
            return Verdict(passed=False, reason=pair.name, witness=(index,))
    return PASS
