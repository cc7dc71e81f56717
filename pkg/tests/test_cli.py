#!/usr/bin/env python3
"""
Tests for the command-line interface, its configuration and its report
formats.
"""

import argparse
import contextlib
import io
import tempfile
import unittest
from pathlib import Path

import msgspec
import pytest

from kleene_retract.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from kleene_retract.config import DEFAULT_DEPTH, DEFAULT_MAX_DEPTH, RunConfig, config_from_args
from kleene_retract.enums import Command, OutputFormat, Suite
from kleene_retract.funcspace import TwoFunTable
from kleene_retract.records import (
    AdversarySummary,
    CheckRecord,
    FailureTableRecord,
    RoundtripRecord,
    RoundtripSummary,
    ViolationRecord,
    WitnessRecord,
    decode_records,
    render,
)


def run_cli(*argv):
    """Run main and return its exit status and stdout."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        status = main(list(argv))
    return status, out.getvalue()


class TestConfig(unittest.TestCase):
    """Validation of parsed arguments."""

    def parse(self, *argv):
        return config_from_args(build_parser().parse_args(list(argv)))

    def test_defaults(self):
        cfg = self.parse("--command", "roundtrip")
        self.assertIs(cfg.command, Command.ROUNDTRIP)
        self.assertEqual(cfg.depth, DEFAULT_DEPTH)
        self.assertEqual(cfg.max_depth, DEFAULT_MAX_DEPTH)
        self.assertEqual(cfg.oracle, "ball")
        self.assertIs(cfg.format, OutputFormat.STRUCTURED)
        self.assertIsNone(cfg.out)
        self.assertFalse(cfg.fault_injection)

    def test_enums_and_alias(self):
        cfg = self.parse("--command", "checks", "--suite", "cantor", "--K", "7", "-vv")
        self.assertIs(cfg.suite, Suite.CANTOR)
        self.assertEqual(cfg.depth, 7)
        self.assertEqual(cfg.verbose, 2)

    def test_invalid_configs(self):
        with self.assertRaises(msgspec.ValidationError):
            self.parse("--command", "roundtrip", "--depth", "80")
        with self.assertRaises(msgspec.ValidationError):
            self.parse("--command", "roundtrip", "--seed", "-1")
        with self.assertRaises(msgspec.ValidationError):
            self.parse("--command", "checks")
        with self.assertRaises(ValueError):
            RunConfig(command=Command.ROUNDTRIP, depth=10, max_depth=5)

    def test_namespace_conversion(self):
        args = argparse.Namespace(command="adversary", depth=3, oracle="ball & x[0]=0")
        cfg = config_from_args(args)
        self.assertIs(cfg.command, Command.ADVERSARY)
        self.assertEqual(cfg.oracle, "ball & x[0]=0")


@pytest.mark.parametrize(
    "argv",
    [
        ["--command", "checks", "--suite", "lemma99"],
        ["--command", "checks"],
        ["--command", "roundtrip", "--depth", "70"],
        ["--command", "roundtrip", "--depth", "9", "--max-depth", "8"],
        ["--command", "launch"],
        [],
    ],
)
def test_usage_errors(argv):
    """Bad arguments exit with status 2."""
    with pytest.raises(SystemExit) as raised:
        main(argv)
    assert raised.value.code == EXIT_USAGE


class TestRender(unittest.TestCase):
    """The three report formats."""

    def test_structured(self):
        record = CheckRecord(suite="cantor", name="prefix free", passed=True, samples=3)
        self.assertEqual(
            render(record, OutputFormat.STRUCTURED),
            'record=check suite=cantor name="prefix free" passed=true samples=3 detail=""',
        )

    def test_text(self):
        record = RoundtripRecord(index=2, pair="full", passed=False, point="[0:1/2^0]")
        self.assertEqual(
            render(record, OutputFormat.TEXT),
            "roundtrip: index 2, pair full, passed False, point [0:1/2^0]",
        )

    def test_structured_nested(self):
        """Nested values are written as compact JSON."""
        record = FailureTableRecord(
            index=1, pair="e_M/r_M", level=0, probes=("x(0)",),
            table=TwoFunTable(depth=0, finite=(((1,),),), limits=(0,), moduli=(2,)),
        )
        self.assertEqual(
            render(record, OutputFormat.STRUCTURED),
            'record=failure-table index=1 pair=e_M/r_M level=0 probes="[\\"x(0)\\"]" '
            'table="{\\"depth\\":0,\\"finite\\":[[[1]]],\\"limits\\":[0],\\"moduli\\":[2]}"',
        )

    def test_json(self):
        record = AdversarySummary(oracle="ball", K=3, verdict="no clopen margin", probes=14)
        line = render(record, OutputFormat.JSON)
        self.assertEqual(
            msgspec.json.decode(line),
            {"record": "adversary", "oracle": "ball", "K": 3, "verdict": "no clopen margin", "probes": 14},
        )
        self.assertEqual(decode_records(line.encode() + b"\n"), [record])


class TestCommands(unittest.TestCase):
    """End-to-end runs of the three commands."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.base = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_roundtrip_empty(self):
        status, out = run_cli("--command", "roundtrip", "--count", "0")
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(
            out,
            "record=roundtrip-summary seed=0 count=0 depth=20 passed_m=0 passed_full=0 passed=true\n",
        )

    def test_roundtrip(self):
        path = self.base / "roundtrip.jsonl"
        status = main(
            ["--command", "roundtrip", "--count", "3", "--depth", "8", "--seed", "4",
             "--format", "json", "--out", str(path)]
        )
        self.assertEqual(status, EXIT_OK)
        records = decode_records(path.read_bytes())
        self.assertEqual(len(records), 7)
        self.assertTrue(all(record.passed for record in records))
        self.assertIsInstance(records[-1], RoundtripSummary)
        self.assertEqual(records[-1].passed_m, 3)

    def test_fault_injection(self):
        """A flipped C_0 probe shows up as a failed record and exit 1."""
        path = self.base / "faulty.jsonl"
        status = main(
            ["--command", "roundtrip", "--count", "3", "--depth", "8", "--seed", "4",
             "--format", "json", "--out", str(path), "--fault-injection"]
        )
        self.assertEqual(status, EXIT_FAILED)
        records = decode_records(path.read_bytes())
        failed = [r for r in records if isinstance(r, RoundtripRecord) and not r.passed]
        self.assertEqual(len(failed), 1)
        self.assertEqual(failed[0].pair, "e_M/r_M")
        self.assertTrue(failed[0].point.startswith("["))
        self.assertFalse(records[-1].passed)

        # the failed record is followed by the table of the map at level 0
        table_record = records[records.index(failed[0]) + 1]
        self.assertIsInstance(table_record, FailureTableRecord)
        self.assertEqual((table_record.index, table_record.pair), (failed[0].index, "e_M/r_M"))
        self.assertEqual(table_record.level, 0)
        self.assertEqual(table_record.probes, ("x(0)", "h(0,0,0)", "h(0,inf,inf)"))
        self.assertEqual(table_record.table.finite, (((1,),),))
        self.assertEqual(table_record.table.limits, (0,))

    def test_adversary_ball(self):
        status, out = run_cli("--command", "adversary", "--K", "10", "--format", "json")
        self.assertEqual(status, EXIT_OK)
        records = decode_records(out.encode())
        witnesses = [r for r in records if isinstance(r, WitnessRecord)]
        self.assertEqual(len(witnesses), 11)
        self.assertEqual(witnesses[-1].a_k, "1/2^10")
        self.assertEqual(witnesses[-1].distance, "1/2^10")
        summary = records[-1]
        self.assertIsInstance(summary, AdversarySummary)
        self.assertEqual(summary.verdict, "no clopen margin")
        self.assertEqual(summary.probes, sum(k + 2 for k in range(11)))
        self.assertEqual(summary.summary, "V has no clopen margin at resolution 2^{-10}")

    def test_adversary_violation(self):
        """'all' leaves the unit ball on the first upper bracket."""
        status, out = run_cli("--command", "adversary", "--oracle", "all", "--format", "json")
        self.assertEqual(status, EXIT_FAILED)
        violation, summary = decode_records(out.encode())
        self.assertIsInstance(violation, ViolationRecord)
        self.assertEqual(violation.probe, "[0:1/2^0]")
        self.assertEqual(summary.verdict, "not a separator")

    def test_adversary_unknown_term(self):
        status, out = run_cli("--command", "adversary", "--oracle", "ball & sphere")
        self.assertEqual(status, EXIT_USAGE)
        self.assertEqual(out, "")

    def test_checks(self):
        status, out = run_cli("--command", "checks", "--suite", "cantor", "--depth", "6", "--count", "4")
        self.assertEqual(status, EXIT_OK)
        lines = out.splitlines()
        self.assertTrue(all(line.startswith("record=check suite=cantor") for line in lines[:-1]))
        self.assertTrue(lines[-1].startswith("record=suite suite=cantor seed=0 depth=6"))
        self.assertTrue(lines[-1].endswith("failed=0 passed=true"))

    def test_determinism(self):
        """Equal configurations write equal bytes."""
        for argv in (
            ["--command", "roundtrip", "--count", "3", "--depth", "6", "--seed", "11"],
            ["--command", "checks", "--suite", "metric", "--depth", "6", "--count", "4", "--seed", "2"],
            ["--command", "adversary", "--K", "6", "--format", "text"],
        ):
            first, second = self.base / "first.txt", self.base / "second.txt"
            main(argv + ["--out", str(first)])
            main(argv + ["--out", str(second)])
            self.assertEqual(first.read_bytes(), second.read_bytes())
            self.assertTrue(first.read_bytes().endswith(b"\n"))


if __name__ == "__main__":
    unittest.main()
