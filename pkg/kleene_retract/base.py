"""
Base classes for the value types of kleene-retract.
"""

from __future__ import annotations

import msgspec


class FrozenStruct(msgspec.Struct, frozen=True):
    """
    Base class for every value type in the package.

    Values are immutable, so they can be shared between threads and used
    as dictionary keys whenever their fields are hashable. Subclasses that
    carry functions (streams, certificates, continuous maps) are still
    frozen, but only their finite data is meant to be serialized.
    """


class Verdict(FrozenStruct, frozen=True):
    """
    Outcome of a sampled check.

    Attributes:
        passed: True if no sample falsified the checked statement.
        reason: Short description of the first failure, empty on success.
        witness: Indices locating the first failure, e.g. ``(k, a, b)``.
        flags: Remarks that do not fail the check (e.g. non-monotone moduli).
    """

    passed: bool
    reason: str = ""
    witness: tuple[int, ...] = ()
    flags: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


PASS = Verdict(passed=True)


class Record(FrozenStruct, frozen=True, omit_defaults=True, tag_field="record"):
    """
    Base class for report records emitted by the command-line interface.

    Each subclass is tagged with its record name so that JSON lines can be
    decoded back into the right type. Field order is the emission order of
    the ``key=value`` format and must not be changed once published.
    """
