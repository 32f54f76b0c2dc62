"""Sweep metrics and report emission (JSON and CSV variants).

A sweep report is the plot-ready summary of a protection-budget study:
one row per budget with the percentage of avoided worst-case lost load
relative to the unprotected baseline.  Both emitters carry identical
values; the CSV column set and order are a stable interface:

    x_max,avoided_lost_load_pct,excluded_cas_count,consecutive_excluded,remaining_worst_case_mw,runtime_s
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

from .enumeration import CasList
from .errors import DomainError
from .protect import ALL_EXCLUDED, ProtectionPlan

CSV_COLUMNS = (
    "x_max",
    "avoided_lost_load_pct",
    "excluded_cas_count",
    "consecutive_excluded",
    "remaining_worst_case_mw",
    "runtime_s",
)


@dataclass(frozen=True)
class SweepRow:
    x_max: int
    avoided_lost_load_pct: float
    excluded_cas_count: int
    consecutive_excluded: int
    remaining_worst_case_mw: float | str
    runtime_s: float
    #: Set when every scenario of an *incomplete* inventory was excluded:
    #: the 100% figure then refers to the listed scenarios only.
    annotation: str | None = None


@dataclass(frozen=True)
class SweepReport:
    grid: str
    configurations: tuple[str, ...]
    rows: tuple[SweepRow, ...]


def compute_metrics(
    baseline: CasList,
    plans: Sequence[ProtectionPlan],
    runtimes: Sequence[float] | None = None,
) -> SweepReport:
    """Turn per-budget plans into a sweep report.

    ``avoided_lost_load_pct`` is 100·(1 − remaining/baseline) where the
    baseline is the rank-1 (unprotected worst case) lost load; a plan
    that excludes every listed scenario counts as 100% avoided, with an
    annotation if the inventory was incomplete.
    """
    if not baseline.records:
        raise DomainError("baseline scenario list is empty; nothing to compare against")
    if runtimes is not None and len(runtimes) != len(plans):
        raise DomainError("runtimes and plans must have equal length")
    base_mw = baseline.records[0].lost_load_mw
    labels = sorted({part for rec in baseline.records for part in rec.configuration_label.split("+")})

    rows = []
    for i, plan in enumerate(plans):
        remaining = plan.remaining_worst_case_mw
        annotation = None
        if remaining == ALL_EXCLUDED:
            avoided = 100.0
            if not baseline.complete:
                annotation = "all-listed-scenarios-excluded-but-list-incomplete"
        elif base_mw == 0.0:
            avoided = 0.0  # nothing to avoid on a lossless baseline
        else:
            avoided = 100.0 * (base_mw - remaining) / base_mw
        rows.append(
            SweepRow(
                x_max=plan.budget,
                avoided_lost_load_pct=avoided,
                excluded_cas_count=plan.total_excluded,
                consecutive_excluded=plan.consecutive_excluded,
                remaining_worst_case_mw=remaining,
                runtime_s=0.0 if runtimes is None else float(runtimes[i]),
                annotation=annotation,
            )
        )
    return SweepReport(grid=baseline.source_grid, configurations=tuple(labels), rows=tuple(rows))


def _row_as_dict(row: SweepRow) -> dict:
    doc = {
        "x_max": row.x_max,
        "avoided_lost_load_pct": row.avoided_lost_load_pct,
        "excluded_cas_count": row.excluded_cas_count,
        "consecutive_excluded": row.consecutive_excluded,
        "remaining_worst_case_mw": row.remaining_worst_case_mw,
        "runtime_s": row.runtime_s,
    }
    if row.annotation is not None:
        doc["annotation"] = row.annotation
    return doc


def report_to_json(
    report: SweepReport,
    plans: Sequence[ProtectionPlan] = (),
    alternatives: Sequence[Sequence[ProtectionPlan]] = (),
) -> str:
    """JSON report; optionally embeds the per-budget plans (and their
    next-best alternatives) alongside the metric rows."""
    doc: dict = {
        "grid": report.grid,
        "configurations": list(report.configurations),
        "rows": [_row_as_dict(r) for r in report.rows],
    }
    if plans:
        plan_docs = []
        for i, plan in enumerate(plans):
            entry = plan.as_dict()
            if i < len(alternatives) and alternatives[i]:
                entry["alternatives"] = [p.as_dict() for p in alternatives[i]]
            plan_docs.append(entry)
        doc["plans"] = plan_docs
    return json.dumps(doc, indent=2) + "\n"


def report_to_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow(
            [
                row.x_max,
                row.avoided_lost_load_pct,
                row.excluded_cas_count,
                row.consecutive_excluded,
                row.remaining_worst_case_mw,
                row.runtime_s,
            ]
        )
    return buf.getvalue()
