"""
Exception hierarchy for kleene-retract.

Failures of a checked property are not exceptions; they are reported in
verdict structs. Exceptions are reserved for inputs that make a check
meaningless: an oracle contradicting its own claims, a malformed
certificate, an unparsable oracle spec.
"""

from __future__ import annotations

from typing import Any, Optional


class KleeneRetractError(Exception):
    """Base class for all errors raised by this package."""


class OracleClaimViolation(KleeneRetractError):
    """
    An oracle answered a probe in a way its declared claims rule out.

    Attributes:
        probe: The point that was probed.
        reason: Short description of the violated claim.
    """

    def __init__(self, reason: str, probe: Optional[Any] = None):
        self.reason = reason
        self.probe = probe
        detail = f" at probe {probe}" if probe is not None else ""
        super().__init__(f"{reason}{detail}")


class MalformedCertificate(KleeneRetractError):
    """A certificate is structurally unusable (e.g. a negative modulus)."""


class IncompleteDecode(KleeneRetractError):
    """A bit string ended inside a codeword during strict decoding."""


class OracleSpecError(KleeneRetractError):
    """An oracle spec string or probe-rule file could not be parsed."""
