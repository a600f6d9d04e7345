"""
Table generator for finished training runs.

Real-mode runs are laid out with one row per optimizer and report the minimum
(best) normalized error across seeds; complex-mode runs get one row per horizon
t and report the maximum (worst). Columns are target kinds. Cells without a
result are printed as the gap marker and make the report incomplete, as do
two runs that land in the same cell.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import io
from .config import logger

GAP = "--"
COLUMN_ORDER = ["copy", "random", "oscillatory", "alternating"]
METRIC = "norm_err_l1"


@dataclass
class Table:
    mode: str
    convention: str
    row_header: str
    cells: Dict[Tuple[str, str], float] = field(default_factory=dict)
    sources: Dict[Tuple[str, str], str] = field(default_factory=dict)

    def rows(self) -> List[str]:
        return sorted({r for r, _ in self.cells}, key=_row_key)

    def columns(self) -> List[str]:
        cols = {c for _, c in self.cells}
        known = [c for c in COLUMN_ORDER if c in cols]
        return known + sorted(cols - set(known))

    def gaps(self) -> List[Tuple[str, str]]:
        return [(r, c) for r in self.rows() for c in self.columns() if (r, c) not in self.cells]


def _row_key(label: str):
    return (0, int(label)) if label.isdigit() else (1, label)


def _find_summaries(results_dir: str) -> List[str]:
    found = []
    for root, _dirs, files in os.walk(results_dir):
        if "summary.json" in files:
            found.append(os.path.join(root, "summary.json"))
    return sorted(found)


def _cell_value(summary: dict) -> Optional[float]:
    for metric in summary["metrics"]:
        if metric["label"] == "final" and metric["metric"] == METRIC:
            return float(metric[summary["convention"]])
    return None


def build_tables(results_dir: str) -> Tuple[List[Table], List[str]]:
    """Collect train summaries below ``results_dir``; returns (tables, problems)."""
    tables: Dict[str, Table] = {}
    problems: List[str] = []
    for path in _find_summaries(results_dir):
        try:
            summary = io.read_json(path)
            if summary.get("job") != "train":
                continue
            meta = summary["meta"]
            mode, convention, target = meta["mode"], summary["convention"], meta["target"]
            row = meta["optimizer"] if mode == "real" else str(meta["horizon"])
            value = _cell_value(summary)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            logger.warning("corrupt result file %s: %s", path, exc)
            problems.append(f"corrupt: {path}")
            continue
        table = tables.setdefault(mode, Table(mode, convention, "optimizer" if mode == "real" else "t"))
        if value is None:
            problems.append(f"partial: {path}")
            continue
        first = table.sources.get((row, target))
        if first is not None:
            # same cell from another run (e.g. a second horizon or dim); first path wins
            logger.warning("%s duplicates table cell %s/%s already filled by %s", path, row, target, first)
            problems.append(f"duplicate: {path} overlaps {first}")
            continue
        table.cells[(row, target)] = value
        table.sources[(row, target)] = path

    for table in tables.values():
        for row, col in table.gaps():
            problems.append(f"missing: {table.mode} {table.row_header}={row} target={col}")
    return [tables[m] for m in sorted(tables)], problems


def _fmt(value: Optional[float]) -> str:
    return GAP if value is None else f"{value:.3e}"


def render(tables: List[Table], problems: List[str]) -> str:
    lines: List[str] = []
    for table in tables:
        label = "minimum (best) over seeds" if table.convention == "min" else "maximum (worst) over seeds"
        lines.append(f"{table.mode} SSM: normalized l1 error, {label}")
        cols = table.columns()
        header = [table.row_header] + [f"Approx. of {c}" for c in cols]
        widths = [max(len(h), 12) for h in header]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for row in table.rows():
            cells = [row] + [_fmt(table.cells.get((row, c))) for c in cols]
            lines.append("  ".join(v.ljust(w) for v, w in zip(cells, widths)))
        lines.append("")
    if not tables:
        lines.append("no training results found")
    for problem in problems:
        lines.append(f"{GAP} {problem}")
    return "\n".join(lines).rstrip() + "\n"


def report_table(results_dir: str) -> Tuple[str, str, bool]:
    """
    Write ``table.txt`` and ``table.csv`` under ``results_dir``.
    Returns (text, csv_path, complete).
    """
    if not os.path.isdir(results_dir):
        raise OSError(f"results directory {results_dir} does not exist")
    tables, problems = build_tables(results_dir)
    text = render(tables, problems)

    csv_rows = []
    for table in tables:
        for row in table.rows():
            for col in table.columns():
                value = table.cells.get((row, col))
                csv_rows.append([table.mode, table.convention, row, col, GAP if value is None else value])
    csv_path = os.path.join(results_dir, "table.csv")
    io.write_csv(csv_path, ["mode", "convention", "row", "target", METRIC], csv_rows)
    with open(os.path.join(results_dir, "table.txt"), mode="w") as f:
        f.write(text)

    complete = bool(tables) and not problems
    if not complete:
        logger.warning("report for %s has %s gap(s)", results_dir, len(problems) or 1)
    return text, csv_path, complete
