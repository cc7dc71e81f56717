"""
Seeded generators for random points and maps.

Points are drawn from a ``random.Random`` instance. Functions are built
from a seed through :func:`kleene_retract.utils.mix64`, so that they are
pure: the same argument always gives the same value.
"""

from __future__ import annotations

import random
from typing import Sequence

from .dyadic import ZERO, DyadicRational
from .funcspace import TwoFun, twofun_override
from .retract_core import g_apply
from .spaces import (
    INFINITY,
    BairePoint,
    FanPoint,
    MPoint,
    MStream,
    ProductPoint,
    finite,
    grid_value,
)
from .utils import mix64


def random_mpoint(rng: random.Random, max_support: int = 20, max_index: int = 30) -> MPoint:
    """A finite-support point with at most ``max_support`` nonzero coordinates below ``max_index + 1``."""
    size = rng.randint(0, min(max_support, max_index + 1))
    indices = rng.sample(range(max_index + 1), size)
    return MPoint.from_mapping({i: grid_value(i, rng.randint(1, 1 << i)) for i in indices})


def random_grid_coords(rng: random.Random, depth: int) -> tuple[DyadicRational, ...]:
    """Coordinates ``x(0) .. x(depth - 1)`` drawn uniformly from their grids."""
    return tuple(grid_value(i, rng.randint(0, 1 << i)) for i in range(depth))


def coords_point(coords: Sequence[DyadicRational], label: str = "") -> ProductPoint:
    """The point of prod M_i with the given prefix and zeros after it."""
    coords = tuple(coords)
    return ProductPoint(
        coord=lambda i: coords[i] if i < len(coords) else ZERO, label=label
    )


def random_stream(seed: int) -> MStream:
    """
    A stream with coordinates 0 or 2^-i.

    The tail from k + 1 on sums to at most 2^-k.
    """
    return MStream(
        coord=lambda i: grid_value(i, mix64(seed, i) & 1),
        tail_bound=lambda k: k + 1,
        label=f"stream-{seed}",
    )


def random_twofun(seed: int, max_modulus: int = 6) -> TwoFun:
    """
    A certified map on N x F with pseudo-random values.

    Values at ``a >= modulus(k)`` equal the limit value, so the modulus is
    valid by construction.
    """

    def modulus(k: int) -> int:
        return mix64(seed, k, 0) % (max_modulus + 1)

    def at_limit(k: int) -> int:
        return mix64(seed, k, 1) & 1

    def at_finite(k: int, a: int, b: int) -> int:
        if a >= modulus(k):
            return at_limit(k)
        return mix64(seed, k, a, b, 2) & 1

    return TwoFun(
        at_finite=at_finite,
        at_limit=at_limit,
        constancy_modulus=modulus,
        label=f"random-{seed}",
    )


def perturbed_g(x: MPoint, seed: int, level: int) -> TwoFun:
    """
    ``g(x)`` with one probe of level at most ``level`` flipped.

    The modulus is raised past the flipped probe so the result stays
    certified.
    """
    g = g_apply(x)
    k, a, b = (mix64(seed, axis) % (level + 1) for axis in range(3))
    flipped = 1 - g.at_finite(k, a, b)
    return twofun_override(
        g,
        finite={(k, a, b): flipped},
        modulus=lambda j: max(g.constancy_modulus(j), a + 1) if j == k else g.constancy_modulus(j),
        label=f"{g.label} flipped at ({k},{a},{b})",
    )


def random_fan_point(rng: random.Random, bound: int) -> FanPoint:
    """A finite fan point below ``bound``, or the limit point one time in ten."""
    if rng.random() < 0.1:
        return INFINITY
    return finite(rng.randrange(bound), rng.randrange(bound))


def random_baire_point(rng: random.Random, length: int, max_value: int) -> BairePoint:
    """A point with a random head of ``length`` values and zeros after it."""
    return BairePoint(head=tuple(rng.randint(0, max_value) for _ in range(length)))
