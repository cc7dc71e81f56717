"""
Run configuration of the command-line interface.
"""

from __future__ import annotations

import argparse
from typing import Optional

import msgspec

from .base import FrozenStruct
from .enums import Command, OutputFormat, Suite
from .utils import Natural

DEFAULT_DEPTH = 20
DEFAULT_MAX_DEPTH = 64
DEFAULT_COUNT = 100


class RunConfig(FrozenStruct, frozen=True):
    """
    Everything a run depends on. Two runs with equal configs write equal
    bytes.

    Attributes:
        command: What to run.
        depth: Coordinate depth, or the adversary's K.
        seed: Seed of the random samples.
        count: Number of random samples.
        oracle: Oracle spec for the adversary.
        format: Report format.
        out: Report file; stdout when None.
        max_depth: Upper limit for ``depth``, bounding denominators 2^depth.
        suite: Property suite for the checks command.
        verbose: Logging verbosity, 0 to 2.
        fault_injection: Flip one C_m probe in the round trip, to exercise
            failure reporting.
    """

    command: Command
    depth: Natural = DEFAULT_DEPTH
    seed: Natural = 0
    count: Natural = DEFAULT_COUNT
    oracle: str = "ball"
    format: OutputFormat = OutputFormat.STRUCTURED
    out: Optional[str] = None
    max_depth: Natural = DEFAULT_MAX_DEPTH
    suite: Optional[Suite] = None
    verbose: Natural = 0
    fault_injection: bool = False

    def __post_init__(self):
        if self.depth > self.max_depth:
            raise ValueError(f"depth {self.depth} exceeds max depth {self.max_depth}")
        if self.command is Command.CHECKS and self.suite is None:
            raise ValueError("the checks command needs --suite")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Validate parsed arguments into a RunConfig.

    Raises:
        msgspec.ValidationError: On unknown enum values, negative numbers
            or a depth above the maximum.
    """
    return msgspec.convert(vars(args), RunConfig)
