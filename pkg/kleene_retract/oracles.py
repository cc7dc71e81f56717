"""
Oracle specs for the adversary command.

A spec is a conjunction of terms joined by ``&``:

    ball              the open unit ball
    all               every point
    norm<q, norm<=q   norm bound, q in dyadic text form
    x[i]=q, x[i]!=q   coordinate constraints
    probes=@FILE      complement of a big-space candidate read from FILE,
                      pulled back along the full chain

FILE holds a JSON list of probe rules ``{"n": .., "a": .., "b": ..,
"value": ..}``; a map H on Baire space lies in the candidate when some
rule matches the value of H at the gap encoding of ``(n, (a, b))``. A
rule without ``a`` and ``b`` probes the limit point ``(n, (inf, inf))``.
"""

from __future__ import annotations

import logging
import operator
import re
from pathlib import Path
from typing import Callable, Optional, Sequence

import msgspec

from .base import FrozenStruct
from .dyadic import ONE, DyadicRational, dy_parse
from .errors import OracleSpecError
from .funcspace import BigFun
from .retract_chain import baire_section, section_full
from .spaces import INFINITY, MPoint, NxFanPoint, finite, norm_full
from .utils import Natural

logger = logging.getLogger(__name__)

Member = Callable[[MPoint], bool]

NORM_TERM_PATTERN = r"^norm\s*(<=|<)\s*(.+)$"
COORD_TERM_PATTERN = r"^x\[\s*(\d+)\s*\]\s*(!=|=)\s*(.+)$"
PROBES_TERM_PATTERN = r"^probes\s*=\s*@(.+)$"

# Terms without parameters
BUILTIN_TERMS: dict[str, Member] = {
    "ball": lambda z: norm_full(z) < ONE,
    "all": lambda z: True,
}

COMPARISONS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    "!=": operator.ne,
}


class ProbeRule(FrozenStruct, frozen=True, omit_defaults=True):
    """One probe of a big-space candidate."""

    n: Natural
    value: Natural
    a: Optional[Natural] = None
    b: Optional[Natural] = None

    def __post_init__(self):
        if (self.a is None) != (self.b is None):
            raise ValueError("a and b must be given together")

    def matches(self, H: BigFun) -> bool:
        p = INFINITY if self.a is None else finite(self.a, self.b)
        return H.eval(baire_section(NxFanPoint(n=self.n, p=p))) == self.value


def load_probe_rules(path: str | Path) -> tuple[ProbeRule, ...]:
    """
    Read probe rules from a JSON file.

    Raises:
        OracleSpecError: If the file is missing or does not hold rules.
    """
    try:
        data = Path(path).read_bytes()
        rules = msgspec.json.decode(data, type=list[ProbeRule])
    except OSError as e:
        raise OracleSpecError(f"cannot read probe rules from {path}: {e}") from e
    except msgspec.DecodeError as e:  # ValidationError is a subclass
        raise OracleSpecError(f"invalid probe rules in {path}: {e}") from e
    logger.debug("loaded %d probe rules from %s", len(rules), path)
    return tuple(rules)


def rules_candidate(rules: Sequence[ProbeRule]) -> Callable[[BigFun], bool]:
    """The candidate set of maps H matched by some rule."""
    return lambda H: any(rule.matches(H) for rule in rules)


def _dyadic(text: str, term: str) -> DyadicRational:
    try:
        return dy_parse(text)
    except ValueError as e:
        raise OracleSpecError(f"bad number in term {term!r}: {e}") from e


def parse_term(term: str, base_dir: Optional[Path] = None) -> Member:
    """
    Build the membership test of a single term.

    Raises:
        OracleSpecError: If the term is not recognized.
    """
    if term in BUILTIN_TERMS:
        return BUILTIN_TERMS[term]

    match = re.match(NORM_TERM_PATTERN, term)
    if match:
        compare, bound = COMPARISONS[match.group(1)], _dyadic(match.group(2), term)
        return lambda z: compare(norm_full(z), bound)

    match = re.match(COORD_TERM_PATTERN, term)
    if match:
        i = int(match.group(1))
        compare, value = COMPARISONS[match.group(2)], _dyadic(match.group(3), term)
        return lambda z: compare(z.coord(i), value)

    match = re.match(PROBES_TERM_PATTERN, term)
    if match:
        path = Path(match.group(1).strip())
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        candidate = rules_candidate(load_probe_rules(path))
        return lambda z: not candidate(section_full(z))

    raise OracleSpecError(f"unknown oracle term {term!r}")


def oracle_member(spec: str, base_dir: Optional[Path] = None) -> Member:
    """
    Membership test of a whole spec.

    Raises:
        OracleSpecError: If the spec is empty or holds an unknown term.
    """
    terms = [term.strip() for term in spec.split("&")]
    if not all(terms):
        raise OracleSpecError(f"empty term in oracle spec {spec!r}")
    tests = [parse_term(term, base_dir) for term in terms]
    return lambda z: all(test(z) for test in tests)
