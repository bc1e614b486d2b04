"""CSV input parsing and plain-text report rendering for the analytics CLI."""

from __future__ import annotations

import csv
from typing import Iterable, Sequence, TextIO

from .hits import TopicGraph, TopicScore, ranked_columns
from .stats import AssessmentRecord, Cohort, Group, StatsError, TestReport


class CsvFormatError(ValueError):
    """Malformed CSV input; message carries the offending line number."""


EDGE_COLUMNS = ("content", "prerequisite")
RECORD_COLUMNS = ("student_id", "group", "cohort", "pretest", "posttest", "grade")


def read_edges_csv(stream: TextIO) -> TopicGraph:
    reader = csv.DictReader(stream)
    _require_columns(reader, EDGE_COLUMNS[:2])
    edges = []
    for row in reader:
        line = reader.line_num
        content = (row.get("content") or "").strip()
        prerequisite = (row.get("prerequisite") or "").strip()
        if not content or not prerequisite:
            raise CsvFormatError(f"line {line}: empty topic label")
        if content == prerequisite:
            raise CsvFormatError(f"line {line}: self-loop on {content!r}")
        edges.append((content, prerequisite))
    if not edges:
        raise CsvFormatError("no edges in input")
    return TopicGraph.from_edges(edges)


def read_records_csv(stream: TextIO) -> list[AssessmentRecord]:
    reader = csv.DictReader(stream)
    _require_columns(reader, RECORD_COLUMNS[:5])
    has_grade = "grade" in (reader.fieldnames or ())
    records = []
    for row in reader:
        line = reader.line_num
        try:
            grade_text = (row.get("grade") or "").strip() if has_grade else ""
            records.append(
                AssessmentRecord(
                    student_id=(row.get("student_id") or "").strip(),
                    group=_parse_enum(Group, row.get("group"), "group", line),
                    cohort=_parse_enum(Cohort, row.get("cohort"), "cohort", line),
                    pretest=_parse_score(row.get("pretest"), "pretest", line),
                    posttest=_parse_score(row.get("posttest"), "posttest", line),
                    grade=float(grade_text) if grade_text else None,
                )
            )
        except StatsError as exc:
            raise CsvFormatError(f"line {line}: {exc}") from exc
        except ValueError as exc:
            raise CsvFormatError(f"line {line}: {exc}") from exc
    if not records:
        raise CsvFormatError("no records in input")
    return records


def _require_columns(reader: csv.DictReader, required: Iterable[str]) -> None:
    names = reader.fieldnames or []
    missing = [c for c in required if c not in names]
    if missing:
        raise CsvFormatError(f"missing column(s): {', '.join(missing)}")


def _parse_enum(enum_cls, raw, column: str, line: int):
    text = (raw or "").strip()
    try:
        return enum_cls(text)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise CsvFormatError(
            f"line {line}: bad {column} value {text!r} (allowed: {allowed})"
        ) from None


def _parse_score(raw, column: str, line: int) -> float:
    text = (raw or "").strip()
    if not text:
        raise CsvFormatError(f"line {line}: missing {column} value")
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(f"line {line}: bad {column} value {text!r}") from None


def render_score_table(scores: Sequence[TopicScore]) -> str:
    """Two ranked columns side by side: hubs (content) and authorities."""
    hubs, authorities = ranked_columns(scores)
    width = max([len("Hub (content)")] + [len(label) for label, _ in hubs]) + 2
    awidth = max([len("Authority (prerequisite)")] + [len(label) for label, _ in authorities]) + 2
    lines = [
        f"{'Hub (content)':<{width}}{'Score':>12}   "
        f"{'Authority (prerequisite)':<{awidth}}{'Score':>12}"
    ]
    for (h_label, h_score), (a_label, a_score) in zip(hubs, authorities):
        lines.append(
            f"{h_label:<{width}}{h_score:>12.9f}   {a_label:<{awidth}}{a_score:>12.9f}"
        )
    return "\n".join(lines)


def render_test_report(report: TestReport) -> str:
    lines = [f"test: {report.kind}"]
    if isinstance(report.df, tuple):
        lines.append(f"df:   ({report.df[0]:g}, {report.df[1]:g})")
        lines.append(f"F:    {report.statistic:.6f}")
    else:
        lines.append(f"df:   {report.df:g}")
        lines.append(f"t:    {report.statistic:.6f}")
    lines.append(f"p:    {report.p:.6f}  (two-sided)")
    if report.cor is not None:
        lines.append(f"cor:  {report.cor:.6f}")
    if report.mean_difference is not None:
        lines.append(f"mean difference: {report.mean_difference:.6f}")
    if report.adjusted_means:
        lines.append("adjusted means (at grand pretest mean):")
        for group, value in sorted(report.adjusted_means.items()):
            lines.append(f"  group {group}: {value:.6f}")
    if report.group_means:
        lines.append("raw posttest means:")
        for group, value in sorted(report.group_means.items()):
            lines.append(f"  group {group}: {value:.6f}")
    return "\n".join(lines)
