"""
Report records and their three renderings.

``structured`` writes one ``key=value`` line per record in field order,
``json`` writes one JSON object per line and ``text`` is meant for
people. Field names and order are part of the output format.
"""

from __future__ import annotations

from typing import Union

import msgspec

from .base import Record
from .enums import OutputFormat
from .funcspace import TwoFunTable


class CheckRecord(Record, frozen=True, tag="check"):
    """One property of a suite."""

    suite: str
    name: str
    passed: bool
    samples: int = 0
    detail: str = ""


class SuiteSummary(Record, frozen=True, tag="suite"):
    suite: str
    seed: int
    depth: int
    checks: int
    failed: int
    passed: bool


class RoundtripRecord(Record, frozen=True, tag="roundtrip"):
    """Round trip of one point through one section-retraction pair."""

    index: int
    pair: str
    passed: bool
    point: str = ""


class FailureTableRecord(Record, frozen=True, tag="failure-table"):
    """
    The map h of a failed round trip, up to the first level m with (x, h)
    outside C_m, and the probes that decide C_m.
    """

    index: int
    pair: str
    level: int
    probes: tuple[str, ...]
    table: TwoFunTable


class RoundtripSummary(Record, frozen=True, tag="roundtrip-summary"):
    seed: int
    count: int
    depth: int
    passed_m: int
    passed_full: int
    passed: bool


class WitnessRecord(Record, frozen=True, tag="witness"):
    """One level of a witness chain, numbers in dyadic text form."""

    k: int
    a_k: str
    x_k: str
    y_k: str
    member_x: bool
    member_y: bool
    distance: str


class AdversarySummary(Record, frozen=True, tag="adversary"):
    oracle: str
    K: int
    verdict: str
    probes: int = 0
    summary: str = ""


class ViolationRecord(Record, frozen=True, tag="violation"):
    """An oracle contradicted its claims on ``probe``."""

    oracle: str
    reason: str
    probe: str = ""


class CodeRecord(Record, frozen=True, tag="code"):
    """One codeword of a prefix-code table."""

    level: int
    symbol: int
    codeword: str


AnyRecord = Union[
    CheckRecord,
    SuiteSummary,
    RoundtripRecord,
    FailureTableRecord,
    RoundtripSummary,
    WitnessRecord,
    AdversarySummary,
    ViolationRecord,
    CodeRecord,
]


def _structured_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (msgspec.Struct, tuple)):
        text = msgspec.json.encode(value).decode()
    else:
        text = str(value)
    if not text or any(c.isspace() or c in '="' for c in text):
        return msgspec.json.encode(text).decode()
    return text


def render(record: Record, fmt: OutputFormat) -> str:
    """Render a record as a single line."""
    tag = type(record).__struct_config__.tag
    if fmt is OutputFormat.JSON:
        return msgspec.json.encode(record).decode()
    values = [(name, getattr(record, name)) for name in record.__struct_fields__]
    if fmt is OutputFormat.STRUCTURED:
        fields = " ".join(f"{name}={_structured_value(value)}" for name, value in values)
        return f"record={tag} {fields}"
    fields = ", ".join(f"{name} {value}" for name, value in values)
    return f"{tag}: {fields}"


def decode_records(lines: bytes) -> list[AnyRecord]:
    """Decode JSON-lines output back into records."""
    decoder = msgspec.json.Decoder(AnyRecord)
    return [decoder.decode(line) for line in lines.splitlines() if line.strip()]
