"""
Command-line interface of kleene-retract.

Three commands:

    roundtrip   r_M(e_M(x)) = x and retract_full(section_full(x)) = x on
                random finite-support points
    adversary   witness chain for an oracle spec at resolution 2^-K
    checks      one property suite

Records go to stdout (or ``--out``) one per line; logging goes to stderr.
Exit status is 0 when everything passed, 1 on a failed check or an oracle
claim violation and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import msgspec

from .adversary import adversary_run, make_oracle, witness_verify
from .base import Record
from .checks import run_suite
from .config import DEFAULT_COUNT, DEFAULT_DEPTH, DEFAULT_MAX_DEPTH, RunConfig, config_from_args
from .dyadic import dy_format
from .enums import Command, OutputFormat, RefutationVerdict, Suite
from .errors import OracleClaimViolation, OracleSpecError
from .funcspace import TwoFun, twofun_override, twofun_table
from .generators import random_mpoint
from .oracles import oracle_member
from .records import (
    AdversarySummary,
    FailureTableRecord,
    RoundtripRecord,
    RoundtripSummary,
    SuiteSummary,
    ViolationRecord,
    WitnessRecord,
    render,
)
from .retract_chain import bits_to_point, restrict_H, retract_full, section_full, split_twofun
from .retract_core import cm_descriptor, first_failing_level, g_apply, r_M
from .spaces import AnyPoint, MPoint, mpoint_format, points_agree

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Outcome = tuple[list[Record], int]


def configure_logging(verbose: int):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def emit(records: Sequence[Record], cfg: RunConfig):
    """Write the report, one rendered record per line."""
    lines = "".join(render(record, cfg.format) + "\n" for record in records)
    if cfg.out is None:
        sys.stdout.write(lines)
        sys.stdout.flush()
    else:
        Path(cfg.out).write_text(lines, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# commands


def _faulty(h: TwoFun) -> TwoFun:
    """``h`` with the probe (0, 0, 0) flipped, which takes the pair out of C_0."""
    return twofun_override(
        h, finite={(0, 0, 0): 1 - h.at_finite(0, 0, 0)}, label=f"{h.label} faulty"
    )


def _failure_table(
    index: int, pair: str, x: AnyPoint, h: TwoFun, span: int
) -> Optional[FailureTableRecord]:
    """Table of h up to the first level where (x, h) leaves the filtration."""
    level = first_failing_level(x, h, span)
    if level is None:
        return None
    return FailureTableRecord(
        index=index, pair=pair, level=level,
        probes=tuple(cm_descriptor(level).probes()),
        table=twofun_table(h, level),
    )


def cmd_roundtrip(cfg: RunConfig) -> Outcome:
    """
    Round trip ``count`` random points through (e_M, r_M) and the full chain.

    Points are compared on coordinates up to ``depth`` and at least up to
    their support end.
    """
    rng = random.Random(cfg.seed)
    records: list[Record] = []
    passed_m = passed_full = 0
    injected = False

    for index in range(cfg.count):
        x = random_mpoint(rng)
        span = max(cfg.depth, x.support_end)

        h = g_apply(x)
        if cfg.fault_injection and not injected and x.support:
            h, injected = _faulty(h), True
        ok_m = points_agree(r_M(x, h), x, span)
        ok_full = points_agree(retract_full(section_full(x)), x, span)
        passed_m += ok_m
        passed_full += ok_full

        for pair, ok in (("e_M/r_M", ok_m), ("full", ok_full)):
            records.append(
                RoundtripRecord(
                    index=index, pair=pair, passed=ok,
                    point="" if ok else mpoint_format(x),
                )
            )
            if ok:
                continue
            logger.warning("%s round trip fails on %s", pair, x)
            if pair == "full":
                bits, h_full = split_twofun(restrict_H(section_full(x)))
                table = _failure_table(index, pair, bits_to_point(bits), h_full, span)
            else:
                table = _failure_table(index, pair, x, h, span)
            if table is not None:
                records.append(table)

    passed = passed_m == passed_full == cfg.count
    records.append(
        RoundtripSummary(
            seed=cfg.seed, count=cfg.count, depth=cfg.depth,
            passed_m=passed_m, passed_full=passed_full, passed=passed,
        )
    )
    return records, EXIT_OK if passed else EXIT_FAILED


def cmd_adversary(cfg: RunConfig) -> Outcome:
    """
    Run the adversary against an oracle spec and re-verify its chain.

    An oracle that contradicts its claims yields a violation record with
    the offending probe and the "not a separator" verdict.
    """
    member = oracle_member(cfg.oracle)
    K = cfg.depth
    try:
        V = make_oracle(member, name=cfg.oracle)
        chain = adversary_run(V, K)
    except OracleClaimViolation as violation:
        probe = violation.probe
        records: list[Record] = [
            ViolationRecord(
                oracle=cfg.oracle,
                reason=violation.reason,
                probe=mpoint_format(probe) if isinstance(probe, MPoint) else "",
            ),
            AdversarySummary(
                oracle=cfg.oracle, K=K, verdict=RefutationVerdict.NOT_A_SEPARATOR.value
            ),
        ]
        return records, EXIT_FAILED

    records = [
        WitnessRecord(
            k=step.k,
            a_k=dy_format(step.a_k),
            x_k=mpoint_format(step.x_k),
            y_k=mpoint_format(step.y_k),
            member_x=step.member_x,
            member_y=step.member_y,
            distance=dy_format(step.distance),
        )
        for step in chain.steps
    ]
    report = witness_verify(chain, V)
    if report:
        verdict, summary = RefutationVerdict.REFUTED.value, report.summary
    else:
        verdict = "witness check failed"
        summary = f"level {report.failing_k}: {report.reason.value}"
    records.append(
        AdversarySummary(
            oracle=cfg.oracle, K=K, verdict=verdict, probes=chain.probes, summary=summary
        )
    )
    return records, EXIT_OK if report else EXIT_FAILED


def cmd_checks(cfg: RunConfig) -> Outcome:
    records: list[Record] = list(run_suite(cfg.suite, cfg.seed, cfg.depth, cfg.count))
    failed = sum(not record.passed for record in records)
    records.append(
        SuiteSummary(
            suite=cfg.suite.value, seed=cfg.seed, depth=cfg.depth,
            checks=len(records), failed=failed, passed=failed == 0,
        )
    )
    return records, EXIT_OK if failed == 0 else EXIT_FAILED


COMMANDS: dict[Command, Callable[[RunConfig], Outcome]] = {
    Command.ROUNDTRIP: cmd_roundtrip,
    Command.ADVERSARY: cmd_adversary,
    Command.CHECKS: cmd_checks,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kleene-retract",
        description="Exact section-retraction identities and non-clopenness witnesses.",
    )
    parser.add_argument(
        "--command",
        required=True,
        choices=[command.value for command in Command],
        help="Command to run",
    )
    parser.add_argument(
        "--suite",
        choices=[suite.value for suite in Suite],
        help="Property suite for the checks command",
    )
    parser.add_argument(
        "--depth",
        "--K",
        dest="depth",
        type=int,
        default=DEFAULT_DEPTH,
        help=f"Coordinate depth, or K for the adversary (default: {DEFAULT_DEPTH})",
    )
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    parser.add_argument(
        "--count",
        type=int,
        default=DEFAULT_COUNT,
        help=f"Number of random samples (default: {DEFAULT_COUNT})",
    )
    parser.add_argument(
        "--oracle",
        default="ball",
        help="Oracle spec for the adversary, terms joined by '&' (default: ball)",
    )
    parser.add_argument(
        "--format",
        choices=[fmt.value for fmt in OutputFormat],
        default=OutputFormat.STRUCTURED.value,
        help="Report format (default: structured)",
    )
    parser.add_argument("--out", help="Write the report to this file instead of stdout")
    parser.add_argument(
        "--max-depth",
        type=int,
        default=DEFAULT_MAX_DEPTH,
        help=f"Upper limit for --depth (default: {DEFAULT_MAX_DEPTH})",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log more (-v info, -vv debug)"
    )
    parser.add_argument("--fault-injection", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except msgspec.ValidationError as e:
        parser.error(str(e))

    configure_logging(cfg.verbose)
    logger.info("running %s with seed %d, depth %d", cfg.command.value, cfg.seed, cfg.depth)

    try:
        records, status = COMMANDS[cfg.command](cfg)
    except OracleSpecError as e:
        print(f"kleene-retract: {e}", file=sys.stderr)
        return EXIT_USAGE

    emit(records, cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
