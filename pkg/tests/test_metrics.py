"""Session metric arithmetic, the reference dataset, and the CLI."""

from __future__ import annotations

import random

import pytest
from click.testing import CliRunner

from morpes.cli import main
from morpes.errors import EmptyGroupError
from morpes.metrics import (
    SessionMetrics,
    SessionRecord,
    aggregate_report,
    compute_session_metrics,
    parse_metrics_csv,
    parse_records_csv,
    records_to_report,
    reference_sessions,
)


def test_single_visit_metrics():
    metrics = compute_session_metrics([SessionRecord("s1", 10, 3, 4)])
    assert (metrics.msc, metrics.msfs, metrics.mpsc) == (10, 3, 4)


def test_two_visit_means():
    metrics = compute_session_metrics([
        SessionRecord("s1", 10, 3, 4),
        SessionRecord("s1", 20, 5, 6),
    ])
    assert (metrics.msc, metrics.msfs, metrics.mpsc) == (15, 4, 5)


def test_empty_group_raises():
    with pytest.raises(EmptyGroupError):
        compute_session_metrics([])
    with pytest.raises(EmptyGroupError):
        aggregate_report([])


def test_record_invariants():
    with pytest.raises(ValueError):
        SessionRecord("s", segment_count=2, first_shot_count=3, shot_count=1)
    with pytest.raises(ValueError):
        SessionRecord("s", segment_count=2, first_shot_count=1, shot_count=0)


def test_reference_dataset_means_match_published_values():
    report = aggregate_report(reference_sessions())
    assert report.mean_msc == pytest.approx(19.13, abs=0.01)
    assert report.mean_msfs == pytest.approx(4.06, abs=0.01)


def test_single_session_aggregate_is_identity():
    report = aggregate_report([SessionMetrics("s9", 12.0, 3.0, 2.5)])
    assert (report.mean_msc, report.mean_msfs, report.mean_mpsc) == (12.0, 3.0, 2.5)


def test_mpsc_mean_of_two_sessions():
    report = aggregate_report([
        SessionMetrics("a", 10.0, 3.0, 2.0),
        SessionMetrics("b", 10.0, 3.0, 4.0),
    ])
    assert report.mean_mpsc == 3.0


def test_aggregate_means_are_permutation_invariant():
    sessions = reference_sessions()
    rng = random.Random(8)
    for _ in range(10):
        shuffled = sessions[:]
        rng.shuffle(shuffled)
        report = aggregate_report(shuffled)
        baseline = aggregate_report(sessions)
        assert report.mean_msc == pytest.approx(baseline.mean_msc, abs=1e-12)
        assert report.mean_msfs == pytest.approx(baseline.mean_msfs, abs=1e-12)
        assert report.mean_mpsc == pytest.approx(baseline.mean_mpsc, abs=1e-12)


def test_csv_round_trip_reproduces_identical_means():
    report = aggregate_report(reference_sessions())
    reparsed = parse_metrics_csv(report.csv)
    again = aggregate_report(reparsed)
    assert again.mean_msc == report.mean_msc
    assert again.mean_msfs == report.mean_msfs
    assert again.mean_mpsc == report.mean_mpsc


def test_table_shape():
    report = aggregate_report(reference_sessions())
    lines = report.table.splitlines()
    assert lines[0].split() == ["Session", "ID", "MSC", "MSFS", "MPSC"]
    assert len([line for line in lines if line and not line.startswith("-")]) == 17
    assert lines[-1].startswith("mean")


def test_records_grouping():
    csv_text = (
        "session_label,segment_count,first_shot_count,shot_count\n"
        "s1,10,3,4\n"
        "s1,20,5,6\n"
        "s2,8,3,2\n"
    )
    report = records_to_report(parse_records_csv(csv_text))
    assert report.mean_msc == pytest.approx((15 + 8) / 2)
    assert report.mean_msfs == pytest.approx((4 + 3) / 2)
    assert report.mean_mpsc == pytest.approx((5 + 2) / 2)


def test_cli_metrics_table_and_csv(tmp_path):
    records = tmp_path / "records.csv"
    records.write_text(
        "session_label,segment_count,first_shot_count,shot_count\n"
        "s1,10,3,4\ns1,20,5,6\ns2,8,3,2\n",
        encoding="utf-8",
    )
    runner = CliRunner()
    result = runner.invoke(main, ["metrics", "--input", str(records)])
    assert result.exit_code == 0
    assert "Session ID" in result.output
    assert "mean" in result.output

    result = runner.invoke(main, ["metrics", "--input", str(records), "--format", "csv"])
    assert result.exit_code == 0
    reparsed = parse_metrics_csv(result.output)
    assert {m.session_id for m in reparsed} == {"s1", "s2"}


def test_cli_metrics_rejects_malformed_input(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope,nope\n1,2\n", encoding="utf-8")
    runner = CliRunner()
    result = runner.invoke(main, ["metrics", "--input", str(bad)])
    assert result.exit_code == 1
    assert "malformed" in result.output


def test_cli_serve_reports_occupied_port(tmp_path):
    import socket

    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    runner = CliRunner()
    result = runner.invoke(main, ["serve", "--listen", f"127.0.0.1:{port}"])
    blocker.close()
    assert result.exit_code == 1
    assert "cannot listen" in result.output
