#!/usr/bin/env python3
"""
Helper script for common tasks.

Usage:
    python run.py test          - Run tests
    python run.py roundtrip     - Round trip random points through both chains
    python run.py adversary     - Witness chain for the unit ball at K = 30
    python run.py checks        - Run every property suite
    python run.py codes         - Dump the prefix-code tables
    python run.py all           - Tests, then every command
"""

import argparse
import subprocess
import sys
from pathlib import Path

PROJECT_DIR = Path(__file__).parent

sys.path.insert(0, str(PROJECT_DIR))
from kleene_retract.enums import Suite  # noqa: E402


def run_command(cmd, cwd=None):
    """Run a command and stream output."""
    print(f"Running: {' '.join(cmd)}")
    process = subprocess.Popen(
        cmd,
        cwd=cwd or PROJECT_DIR,
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
        bufsize=1,  # Line buffered
    )

    for line in process.stdout:
        print(line, end="")

    process.wait()

    if process.returncode != 0:
        print(f"Command failed with return code {process.returncode}")
        sys.exit(process.returncode)


def cli(*args):
    run_command([sys.executable, "-m", "kleene_retract", *args])


def run_tests():
    """Run unit tests."""
    run_command([sys.executable, "-m", "pytest", "tests/"])


def run_roundtrip():
    cli("--command", "roundtrip", "--count", "20", "--depth", "20", "--seed", "0")


def run_adversary():
    cli("--command", "adversary", "--K", "30", "--format", "text")


def run_checks():
    for suite in Suite:
        cli("--command", "checks", "--suite", suite.value, "--depth", "10", "--count", "20")


def dump_codes():
    """Write the prefix-code tables to build/codes.jsonl."""
    run_command([sys.executable, "scripts/dump_code_tables.py", "--levels", "8"])


def run_all():
    run_tests()
    run_roundtrip()
    run_adversary()
    run_checks()
    dump_codes()


def main():
    """Main function to parse arguments and execute commands."""
    parser = argparse.ArgumentParser(description="Run common tasks for kleene-retract.")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    subparsers.add_parser("test", help="Run unit tests")
    subparsers.add_parser("roundtrip", help="Round trip random points")
    subparsers.add_parser("adversary", help="Witness chain for the unit ball")
    subparsers.add_parser("checks", help="Run every property suite")
    subparsers.add_parser("codes", help="Dump the prefix-code tables")
    subparsers.add_parser("all", help="Run tests and every command")

    args = parser.parse_args()

    tasks = {
        "test": run_tests,
        "roundtrip": run_roundtrip,
        "adversary": run_adversary,
        "checks": run_checks,
        "codes": dump_codes,
        "all": run_all,
    }
    if args.command not in tasks:
        parser.print_help()
        sys.exit(1)
    tasks[args.command]()


if __name__ == "__main__":
    main()
