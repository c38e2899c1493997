"""Strict reader for zerocell result CSVs.

The expected header is fixed; anything else is reported as a column diff.
Numeric fields must parse as floats ("nan" included); a malformed value is
a hard error so a half-written file never produces a silently wrong plot.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

EXPECTED_COLUMNS = [
    "experiment",
    "sweep_value",
    "estimate",
    "stderr",
    "reference",
    "z_score",
    "passed",
    "seed",
    "trials",
]

FLOAT_COLUMNS = ["sweep_value", "estimate", "stderr", "reference", "z_score"]


class CsvFormatError(Exception):
    """Input CSV does not match the results contract."""


@dataclass
class ResultRow:
    experiment: str
    sweep_value: float
    estimate: float
    stderr: float
    reference: float
    z_score: float
    passed: bool


def read_rows(path: str) -> list[ResultRow]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file (expected header {','.join(EXPECTED_COLUMNS)})")
        if header != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in header]
            extra = [c for c in header if c not in EXPECTED_COLUMNS]
            raise CsvFormatError(
                f"{path}: header mismatch; missing columns {missing or 'none'}, "
                f"unexpected columns {extra or 'none'}"
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(EXPECTED_COLUMNS):
                raise CsvFormatError(f"{path}:{lineno}: expected {len(EXPECTED_COLUMNS)} fields, got {len(rec)}")
            named = dict(zip(EXPECTED_COLUMNS, rec))
            values = {}
            for col in FLOAT_COLUMNS:
                try:
                    values[col] = float(named[col])
                except ValueError:
                    raise CsvFormatError(f"{path}:{lineno}: malformed float {named[col]!r} in column {col!r}")
            rows.append(
                ResultRow(
                    experiment=named["experiment"],
                    passed=named["passed"].strip().lower() == "true",
                    **values,
                )
            )
        return rows
