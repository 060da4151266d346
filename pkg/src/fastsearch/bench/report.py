"""Delimited report emission for benchmark results.

Column orders are fixed:

* throughput reports:
  ``algorithm,precision,lane_width,size,throughput_msps,queries,repetitions``
* setup-stats reports:
  ``size,samples,h_updates_mean,h_updates_min,h_updates_max,h_updates_stdev,``
  ``setup_ns_per_elem_mean,setup_ns_per_elem_min,setup_ns_per_elem_max,``
  ``setup_ns_per_elem_stdev``

Rows are emitted in deterministic order: throughput by (algorithm, size,
precision, lane width), setup stats by size.
"""

from __future__ import annotations

import csv
import io

THROUGHPUT_COLUMNS = (
    "algorithm",
    "precision",
    "lane_width",
    "size",
    "throughput_msps",
    "queries",
    "repetitions",
)

SETUP_COLUMNS = (
    "size",
    "samples",
    "h_updates_mean",
    "h_updates_min",
    "h_updates_max",
    "h_updates_stdev",
    "setup_ns_per_elem_mean",
    "setup_ns_per_elem_min",
    "setup_ns_per_elem_max",
    "setup_ns_per_elem_stdev",
)


def _throughput_cells(row):
    return (
        row.algorithm,
        row.precision,
        str(row.lane_width),
        str(row.size),
        f"{row.throughput_msps:.2f}",
        str(row.queries),
        str(row.repetitions),
    )


def _setup_cells(row):
    return (
        str(row.size),
        str(row.samples),
        f"{row.h_updates_mean:.4f}",
        f"{row.h_updates_min:.4f}",
        f"{row.h_updates_max:.4f}",
        f"{row.h_updates_stdev:.4f}",
        f"{row.setup_ns_per_elem_mean:.2f}",
        f"{row.setup_ns_per_elem_min:.2f}",
        f"{row.setup_ns_per_elem_max:.2f}",
        f"{row.setup_ns_per_elem_stdev:.2f}",
    )


def _normalize(rows, kind):
    rows = list(rows)
    if kind is None:
        if not rows:
            kind = "throughput"
        elif hasattr(rows[0], "algorithm"):
            kind = "throughput"
        else:
            kind = "setup"
    if kind == "throughput":
        rows.sort(key=lambda r: (r.algorithm, r.size, r.precision, r.lane_width))
        return THROUGHPUT_COLUMNS, [_throughput_cells(r) for r in rows]
    if kind == "setup":
        rows.sort(key=lambda r: r.size)
        return SETUP_COLUMNS, [_setup_cells(r) for r in rows]
    raise ValueError(f"unknown report kind {kind!r}")


def _escape_md(cell: str) -> str:
    return cell.replace("|", r"\|")


def emit_report(rows, fmt: str = "csv", kind: str | None = None) -> str:
    """Render rows as ``csv`` or ``md`` text; an empty set yields headers only."""
    header, body = _normalize(rows, kind)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    if fmt == "md":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        for cells in body:
            lines.append("| " + " | ".join(_escape_md(c) for c in cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use csv or md")
