"""
Artifact writers. Output is deterministic: keys are sorted, floats are written
with ``repr`` and nothing time-dependent is recorded.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Any, Dict, Iterable, List, Sequence


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def write_json(path: str, payload: Any) -> None:
    with open(path, mode="w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path: str) -> Any:
    with open(path) as f:
        return json.load(f)


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, mode="w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_records(path: str, records: List[Dict[str, Any]]) -> None:
    """CSV of dict records; the header is the union of keys in first-seen order."""
    header: List[str] = []
    for rec in records:
        for key in rec:
            if key not in header:
                header.append(key)
    write_csv(path, header, ([rec.get(key) for key in header] for rec in records))
