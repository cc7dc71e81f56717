"""
Certified continuous maps on N x F and on the Baire space.

A TwoFun is a map h: N x F -> {0, 1} given by its values and a constancy
modulus, the finite content of its continuity at the fan's limit point.
A BigFun is a map from Baire space to N given by a procedure plus a
declared lookahead bound.
"""

from __future__ import annotations

import logging
from typing import Callable, Mapping, Optional, Sequence, Union

from .base import PASS, FrozenStruct, Verdict
from .spaces import BairePoint, FanFinite, FanPoint, MPoint, MStream
from .utils import Bit, Natural, mix64

logger = logging.getLogger(__name__)


class TwoFun(FrozenStruct, frozen=True):
    """
    A continuous map h: N x F -> 2.

    Attributes:
        at_finite: ``(k, a, b) -> h(k, (a, b))``.
        at_limit: ``k -> h(k, (inf, inf))``.
        constancy_modulus: ``k -> m`` with ``at_finite(k, a, b) ==
            at_limit(k)`` for every ``a >= m`` and every ``b``.
        provenance: The point ``y`` when this is ``g(y)``, otherwise None.
        label: Name used in reports.
    """

    at_finite: Callable[[int, int, int], int]
    at_limit: Callable[[int], int]
    constancy_modulus: Callable[[int], int]
    provenance: Optional[Union[MPoint, MStream]] = None
    label: str = ""


def constant_twofun(bit: int) -> TwoFun:
    """The constant map with value ``bit`` and modulus 0."""
    return TwoFun(
        at_finite=lambda k, a, b: bit,
        at_limit=lambda k: bit,
        constancy_modulus=lambda k: 0,
        label=f"const-{bit}",
    )


def twofun_eval(h: TwoFun, k: int, p: FanPoint) -> int:
    if isinstance(p, FanFinite):
        return h.at_finite(k, p.a, p.b)
    return h.at_limit(k)


def twofun_override(
    h: TwoFun,
    finite: Optional[Mapping[tuple[int, int, int], int]] = None,
    limit: Optional[Mapping[int, int]] = None,
    modulus: Optional[Callable[[int], int]] = None,
    label: str = "",
) -> TwoFun:
    """
    Copy of ``h`` with some probe values replaced.

    The copy carries no provenance, so every consumer has to probe it.
    """
    finite, limit = dict(finite or {}), dict(limit or {})
    return TwoFun(
        at_finite=lambda k, a, b: finite.get((k, a, b), h.at_finite(k, a, b)),
        at_limit=lambda k: limit.get(k, h.at_limit(k)),
        constancy_modulus=modulus or h.constancy_modulus,
        label=label or f"{h.label}*",
    )


def opaque(h: TwoFun) -> TwoFun:
    """The same map with its provenance forgotten."""
    return TwoFun(
        at_finite=h.at_finite,
        at_limit=h.at_limit,
        constancy_modulus=h.constancy_modulus,
        label=h.label,
    )


def twofun_certify(h: TwoFun, sample_k: int, sample_window: int) -> Verdict:
    """
    Falsification test of the constancy modulus.

    Checks ``at_finite(k, a, b) == at_limit(k)`` for ``k < sample_k``,
    ``a`` in ``[m, m + sample_window]`` with ``m = constancy_modulus(k)``
    and ``b <= sample_window``. The witness of a failure is ``(k, a, b)``.
    """
    for k in range(sample_k):
        target = h.at_limit(k)
        start = h.constancy_modulus(k)
        for a in range(start, start + sample_window + 1):
            for b in range(sample_window + 1):
                if h.at_finite(k, a, b) != target:
                    return Verdict(passed=False, reason="constancy", witness=(k, a, b))
    return PASS


def cont_conv_check(
    hs: Sequence[TwoFun],
    h_inf: TwoFun,
    uniform_modulus: Callable[[int], int],
    sample_k: int,
    window: int,
) -> Verdict:
    """
    Sampled continuous convergence of ``hs`` to ``h_inf``.

    For each ``k < sample_k`` with ``m = uniform_modulus(k)``, every
    ``hs[n]`` with ``n >= m`` and ``h_inf`` itself must evaluate to
    ``h_inf.at_limit(k)`` on ``a`` in ``[m, m + window]``, ``b <= window``.
    A failure of the limit function is reported with index ``len(hs)``.
    """
    for k in range(sample_k):
        target = h_inf.at_limit(k)
        m = uniform_modulus(k)
        tail = [(n, hs[n]) for n in range(m, len(hs))] + [(len(hs), h_inf)]
        for n, h in tail:
            for a in range(m, m + window + 1):
                for b in range(window + 1):
                    if h.at_finite(k, a, b) != target:
                        return Verdict(
                            passed=False,
                            reason="limit function" if n == len(hs) else "sequence",
                            witness=(n, k, a, b),
                        )
    return PASS


def twofun_agree(h: TwoFun, other: TwoFun, k_max: int, a_max: int, b_max: int) -> Verdict:
    """Exhaustive comparison on ``k <= k_max, a <= a_max, b <= b_max`` and limits."""
    for k in range(k_max + 1):
        if h.at_limit(k) != other.at_limit(k):
            return Verdict(passed=False, reason="limit", witness=(k,))
        for a in range(a_max + 1):
            for b in range(b_max + 1):
                if h.at_finite(k, a, b) != other.at_finite(k, a, b):
                    return Verdict(passed=False, reason="finite", witness=(k, a, b))
    return PASS


class TwoFunTable(FrozenStruct, frozen=True, omit_defaults=True):
    """
    Finite restriction of a TwoFun, for serialization.

    ``finite[k][a][b]`` holds the value at ``(k, (a, b))`` for
    ``k, a, b <= depth``; ``limits[k]`` and ``moduli[k]`` hold the limit
    value and the constancy modulus.
    """

    depth: Natural
    finite: tuple[tuple[tuple[Bit, ...], ...], ...]
    limits: tuple[Bit, ...]
    moduli: tuple[Natural, ...]
    label: str = ""


def twofun_table(h: TwoFun, depth: int) -> TwoFunTable:
    span = range(depth + 1)
    return TwoFunTable(
        depth=depth,
        finite=tuple(
            tuple(tuple(h.at_finite(k, a, b) for b in span) for a in span) for k in span
        ),
        limits=tuple(h.at_limit(k) for k in span),
        moduli=tuple(h.constancy_modulus(k) for k in span),
        label=h.label,
    )


# ---------------------------------------------------------------------------
# maps on the Baire space


class BigFun(FrozenStruct, frozen=True):
    """
    A map H from Baire space to N with bounded lookahead.

    ``lookahead(n)`` is the length of the prefix that ``eval`` may read on
    inputs whose first value is ``n``. ``source`` is the map h on N x F
    when this is the gap-decoding lift of h, otherwise None.
    """

    eval: Callable[[BairePoint], int]
    lookahead: Callable[[int], int]
    source: Optional[TwoFun] = None
    label: str = ""


def constant_bigfun(value: int) -> BigFun:
    return BigFun(eval=lambda p: value, lookahead=lambda n: 1, label=f"const-{value}")


def lookahead_check(
    H: BigFun, points: Sequence[BairePoint], mutations: int, seed: int
) -> Verdict:
    """
    Tail mutation test of a lookahead declaration.

    Every point gets ``mutations`` variants that agree with it on the
    declared prefix and read pseudo-random values after it; ``H`` must
    return the same value on all of them.
    """
    for index, p in enumerate(points):
        bound = H.lookahead(p.at(0))
        expected = H.eval(p)
        for t in range(mutations):
            # mutated tails may be large, zero or one so every branch is hit
            salt = mix64(seed, index, t)
            tail = lambda i, salt=salt: mix64(salt, i) % (3 + salt % 17)  # noqa: E731
            mutated = p.with_tail_from(bound, tail)
            if H.eval(mutated) != expected:
                logger.debug("lookahead %d violated on point %d", bound, index)
                return Verdict(passed=False, reason="lookahead", witness=(index, t))
    return PASS
