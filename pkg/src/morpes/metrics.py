"""Session metrics: per-session means and the overall report.

A session groups page visits; each visit contributes its segment count, the
number of segments in shot 1, and the number of shots needed to drain the
buffer. Per-session metrics are the means of those three columns (MSC,
MSFS, MPSC), and the report averages them across sessions. A reference
dataset of 15 sessions ships with the package for the aggregation tests.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib.resources import files

from .errors import EmptyGroupError


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    segment_count: int
    first_shot_count: int
    shot_count: int

    def __post_init__(self):
        if self.first_shot_count > self.segment_count:
            raise ValueError("first_shot_count cannot exceed segment_count")
        if self.segment_count > 0 and self.shot_count < 1:
            raise ValueError("pages with segments need at least one shot")


@dataclass(frozen=True)
class SessionMetrics:
    session_id: str
    msc: float
    msfs: float
    mpsc: float


@dataclass(frozen=True)
class AggregateReport:
    mean_msc: float
    mean_msfs: float
    mean_mpsc: float
    table: str
    csv: str


def compute_session_metrics(records: list[SessionRecord]) -> SessionMetrics:
    """Means over one session's page visits."""
    if not records:
        raise EmptyGroupError("session has no page visits")
    session_id = records[0].session_id
    count = len(records)
    return SessionMetrics(
        session_id=session_id,
        msc=sum(r.segment_count for r in records) / count,
        msfs=sum(r.first_shot_count for r in records) / count,
        mpsc=sum(r.shot_count for r in records) / count,
    )


def aggregate_report(metrics: list[SessionMetrics]) -> AggregateReport:
    """Column means across sessions plus aligned-text and CSV renderings."""
    if not metrics:
        raise EmptyGroupError("no sessions to aggregate")
    count = len(metrics)
    mean_msc = sum(m.msc for m in metrics) / count
    mean_msfs = sum(m.msfs for m in metrics) / count
    mean_mpsc = sum(m.mpsc for m in metrics) / count

    header = f"{'Session ID':<12}{'MSC':>8}{'MSFS':>8}{'MPSC':>8}"
    lines = [header, "-" * len(header)]
    for m in metrics:
        lines.append(f"{m.session_id:<12}{m.msc:>8.2f}{m.msfs:>8.2f}{m.mpsc:>8.2f}")
    lines.append("-" * len(header))
    lines.append(f"{'mean':<12}{mean_msc:>8.2f}{mean_msfs:>8.2f}{mean_mpsc:>8.2f}")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["session_id", "msc", "msfs", "mpsc"])
    for m in metrics:
        writer.writerow([m.session_id, repr(m.msc), repr(m.msfs), repr(m.mpsc)])

    return AggregateReport(
        mean_msc=mean_msc,
        mean_msfs=mean_msfs,
        mean_mpsc=mean_mpsc,
        table="\n".join(lines),
        csv=buffer.getvalue(),
    )


def parse_metrics_csv(text: str) -> list[SessionMetrics]:
    """Parse rows of session_id,msc,msfs,mpsc (the aggregate_report CSV shape)."""
    reader = csv.DictReader(io.StringIO(text))
    return [
        SessionMetrics(
            session_id=row["session_id"],
            msc=float(row["msc"]),
            msfs=float(row["msfs"]),
            mpsc=float(row["mpsc"]),
        )
        for row in reader
    ]


def parse_records_csv(text: str) -> list[SessionRecord]:
    """Parse raw visit records: session_label,segment_count,first_shot_count,shot_count."""
    reader = csv.DictReader(io.StringIO(text))
    return [
        SessionRecord(
            session_id=row["session_label"],
            segment_count=int(row["segment_count"]),
            first_shot_count=int(row["first_shot_count"]),
            shot_count=int(row["shot_count"]),
        )
        for row in reader
    ]


def records_to_report(records: list[SessionRecord]) -> AggregateReport:
    """Group visits by session label, compute per-session means, aggregate."""
    if not records:
        raise EmptyGroupError("no records")
    groups: dict[str, list[SessionRecord]] = {}
    for record in records:
        groups.setdefault(record.session_id, []).append(record)
    metrics = [compute_session_metrics(group) for group in groups.values()]
    return aggregate_report(metrics)


def reference_sessions() -> list[SessionMetrics]:
    """The bundled 15-session reference dataset."""
    text = files("morpes").joinpath("data/table1.csv").read_text(encoding="utf-8")
    return parse_metrics_csv(text)
