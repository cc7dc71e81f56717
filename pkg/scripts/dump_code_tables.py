#!/usr/bin/env python3
"""
Script to write the canonical prefix codes for the grids M_0 .. M_L as
code records, one JSON object per line.
"""

import argparse
import sys
from pathlib import Path

import msgspec

# Add parent directory to path to allow imports from kleene_retract
sys.path.insert(0, str(Path(__file__).parent.parent))
from kleene_retract.records import CodeRecord  # noqa: E402
from kleene_retract.retract_chain import code_build  # noqa: E402

DEFAULT_OUTPUT = Path(__file__).parent.parent / "build" / "codes.jsonl"


def ensure_dir_exists(directory: Path):
    """Ensure the specified directory exists."""
    if not directory.exists():
        directory.mkdir(parents=True)
        print(f"Created directory: {directory}")


def code_records(levels: int) -> list[CodeRecord]:
    """Records for every codeword of the codes at levels 0 .. levels."""
    records = []
    for level in range(levels + 1):
        code = code_build(level)
        if not code.is_prefix_free():
            raise RuntimeError(f"code at level {level} is not prefix free")
        records.extend(
            CodeRecord(level=level, symbol=j, codeword=word)
            for j, word in enumerate(code.codewords)
        )
    return records


def main():
    parser = argparse.ArgumentParser(description="Dump the prefix-code tables.")
    parser.add_argument(
        "--levels", type=int, default=8, help="Highest grid level to include (default: 8)"
    )
    parser.add_argument(
        "--output", type=Path, default=DEFAULT_OUTPUT, help=f"Output file (default: {DEFAULT_OUTPUT})"
    )
    args = parser.parse_args()

    if args.levels < 0:
        parser.error("--levels must be non-negative")

    ensure_dir_exists(args.output.parent)
    encoder = msgspec.json.Encoder()
    records = code_records(args.levels)
    with open(args.output, "wb") as f:
        for record in records:
            f.write(encoder.encode(record) + b"\n")
    print(f"Wrote {len(records)} codewords for levels 0..{args.levels} to {args.output}")


if __name__ == "__main__":
    main()
