"""plots: turn zerocell result CSVs into SVG/PNG figures.

Exit codes: 0 on success (including header-only inputs, which produce
axes-only figures), 3 on malformed input (bad header, malformed floats).
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, render
from .reader import CsvFormatError, read_rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("--input", action="append", required=True, help="result CSV (repeatable)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--kind", required=True, choices=KINDS, help="figure kind")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    rows = []
    for path in args.input:
        try:
            rows.extend(read_rows(path))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        except CsvFormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    outputs = render(args.kind, rows, args.out)
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
