"""
Utility functions and text formats for kleene-retract.
"""

from __future__ import annotations

import re
from typing import Annotated

from msgspec import Meta

# "j/2^e" with optional sign, or the integer shorthand "j"
DYADIC_PATTERN = r"^\s*(-?\d+)(?:\s*/\s*2\^(\d+))?\s*$"

# one entry "i:j/2^e" of the point text form
MPOINT_ENTRY_PATTERN = r"^\s*(\d+)\s*:\s*(-?\d+(?:\s*/\s*2\^\d+)?)\s*$"

# "(a,b)" or "(inf,inf)"
FAN_PATTERN = r"^\s*\(\s*(\d+|inf)\s*,\s*(\d+|inf)\s*\)\s*$"

BITS_PATTERN = r"^[01]*$"

# Text forms as Annotated str types, validated when decoded with msgspec
DyadicText = Annotated[str, Meta(pattern=DYADIC_PATTERN)]
FanText = Annotated[str, Meta(pattern=FAN_PATTERN)]
Bits = Annotated[str, Meta(pattern=BITS_PATTERN)]

Natural = Annotated[int, Meta(ge=0)]
Bit = Annotated[int, Meta(ge=0, le=1)]


def parse_dyadic_parts(text: str) -> tuple[int, int]:
    """
    Split dyadic text into numerator and exponent.

    Args:
        text: ``"j/2^e"`` or the integer shorthand ``"j"``.

    Returns:
        The pair ``(j, e)``; not canonicalized.

    Raises:
        ValueError: If the text is not in dyadic form.
    """
    match = re.match(DYADIC_PATTERN, text)
    if not match:
        raise ValueError(f"not a dyadic rational: {text!r}")
    exponent = match.group(2)
    return int(match.group(1)), int(exponent) if exponent is not None else 0


def split_point_entries(text: str) -> list[tuple[int, str]]:
    """
    Split the point text form ``[i:j/2^e, ...]`` into index/value pairs.

    Args:
        text: Point text, brackets included.

    Returns:
        List of ``(index, dyadic text)`` pairs in input order.

    Raises:
        ValueError: If brackets or an entry are malformed.
    """
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"point text must be bracketed: {text!r}")
    body = body[1:-1].strip()
    if not body:
        return []

    entries = []
    for chunk in body.split(","):
        match = re.match(MPOINT_ENTRY_PATTERN, chunk)
        if not match:
            raise ValueError(f"malformed point entry: {chunk!r}")
        entries.append((int(match.group(1)), match.group(2)))
    return entries


def is_bit_string(value: str) -> bool:
    """Check that a string consists of ASCII 0/1 only."""
    return isinstance(value, str) and re.match(BITS_PATTERN, value) is not None


def mix64(*values: int) -> int:
    """
    Deterministic 64-bit mixing of integers (splitmix64 finalizer).

    Used to derive pure pseudo-random tables from a seed, so that
    functions built from them return the same value on every call.
    """
    state = 0x9E3779B97F4A7C15
    for value in values:
        state = (state ^ (value & 0xFFFFFFFFFFFFFFFF)) * 0xBF58476D1CE4E5B9
        state &= 0xFFFFFFFFFFFFFFFF
        state ^= state >> 31
        state = (state * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        state ^= state >> 29
    return state
