"""Usability measurement arithmetic and result-table generation.

Implements the three metric families used to evaluate the application:
satisfaction via the standard 10-item usability questionnaire (0..100 scale,
2.5-point resolution), effectiveness via assisted/unassisted task completion
rates, and efficiency as the ratio of an expert's target time to the
participant's actual time. Rounding is round-half-up everywhere.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

__all__ = [
    "MetricsError",
    "RangeError",
    "LengthError",
    "EmptyInputError",
    "ZeroTotalError",
    "NonPositiveTimeError",
    "SusResponse",
    "ParticipantRecord",
    "CaseTarget",
    "ParticipantRow",
    "CaseReport",
    "EvaluationReport",
    "sus_score",
    "sus_mean",
    "above_average",
    "completion_rates",
    "time_efficiency",
    "build_report",
    "parse_duration",
    "format_duration",
    "parse_records_file",
    "parse_sus_file",
]

SUS_ABOVE_AVERAGE_THRESHOLD = 68.0


class MetricsError(Exception):
    pass


class RangeError(MetricsError):
    pass


class LengthError(MetricsError):
    pass


class EmptyInputError(MetricsError):
    pass


class ZeroTotalError(MetricsError):
    pass


class NonPositiveTimeError(MetricsError):
    pass


def _round_half_up(value: float | Decimal, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


# ---------------------------------------------------------------------------
# Input records


@dataclass(frozen=True)
class SusResponse:
    """Ten questionnaire items, each answered 1..5."""

    items: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.items) != 10:
            raise LengthError(f"expected 10 items, got {len(self.items)}")
        for position, item in enumerate(self.items, start=1):
            if not 1 <= item <= 5:
                raise RangeError(f"item {position} out of range 1..5: {item}")


@dataclass(frozen=True)
class ParticipantRecord:
    participant_id: str
    case_id: int
    time_seconds: int
    assists: int
    errors: int
    tasks_total: int
    tasks_completed_without_assist: int
    tasks_completed_with_assist: int

    def __post_init__(self) -> None:
        if self.case_id not in (1, 2):
            raise RangeError(f"case_id must be 1 or 2, got {self.case_id}")
        if self.time_seconds <= 0:
            raise NonPositiveTimeError(f"time must be positive, got {self.time_seconds}")
        for name in ("assists", "errors", "tasks_total",
                     "tasks_completed_without_assist", "tasks_completed_with_assist"):
            if getattr(self, name) < 0:
                raise RangeError(f"{name} must be non-negative")
        completed = self.tasks_completed_without_assist + self.tasks_completed_with_assist
        if completed > self.tasks_total:
            raise RangeError(
                f"completed tasks {completed} exceed tasks_total {self.tasks_total}"
            )


@dataclass(frozen=True)
class CaseTarget:
    """Expert reference time for one task case."""

    case_id: int
    target_seconds: int

    def __post_init__(self) -> None:
        if self.target_seconds <= 0:
            raise NonPositiveTimeError("target time must be positive")


# ---------------------------------------------------------------------------
# Metric formulas


def sus_score(response: SusResponse | Sequence[int]) -> float:
    """0..100 usability score: odd items contribute (item-1), even (5-item), x2.5."""

    if not isinstance(response, SusResponse):
        response = SusResponse(items=tuple(response))
    total = 0
    for position, item in enumerate(response.items, start=1):
        total += (item - 1) if position % 2 == 1 else (5 - item)
    return total * 2.5


def sus_mean(scores: Sequence[float]) -> float:
    """Arithmetic mean of scores, round-half-up to 2 decimals."""

    if not scores:
        raise EmptyInputError("no scores to average")
    return _round_half_up(Decimal(str(sum(scores))) / len(scores))


def above_average(score: float) -> bool:
    """Conventional benchmark: strictly above 68 counts as above average."""

    return score > SUS_ABOVE_AVERAGE_THRESHOLD


def completion_rates(record: ParticipantRecord) -> tuple[float, float]:
    """(pct completed without assistance, pct completed with assistance)."""

    if record.tasks_total == 0:
        raise ZeroTotalError("tasks_total is zero")
    without = 100 * Decimal(record.tasks_completed_without_assist) / record.tasks_total
    with_assist = 100 * Decimal(record.tasks_completed_with_assist) / record.tasks_total
    return _round_half_up(without), _round_half_up(with_assist)


def time_efficiency(target: CaseTarget | int, actual_seconds: int) -> float:
    """Expert target time over actual time, round-half-up to 2 decimals."""

    target_seconds = target.target_seconds if isinstance(target, CaseTarget) else target
    if target_seconds <= 0:
        raise NonPositiveTimeError("target time must be positive")
    if actual_seconds <= 0:
        raise NonPositiveTimeError(f"actual time must be positive, got {actual_seconds}")
    return _round_half_up(Decimal(target_seconds) / Decimal(actual_seconds))


# ---------------------------------------------------------------------------
# Durations


def parse_duration(text: str) -> int:
    """'mm:ss' (or m'ss") to seconds."""

    match = re.fullmatch(r"\s*(\d+)[:'](\d{1,2})\"?\s*", text)
    if match is None:
        raise MetricsError(f"cannot parse duration {text!r} (expected mm:ss)")
    minutes, seconds = int(match.group(1)), int(match.group(2))
    if seconds >= 60:
        raise MetricsError(f"seconds out of range in {text!r}")
    return minutes * 60 + seconds


def format_duration(seconds: int) -> str:
    """Seconds to the m'ss\" display convention used in result tables."""

    return f"{seconds // 60}'{seconds % 60:02d}\""


# ---------------------------------------------------------------------------
# Result tables


@dataclass(frozen=True)
class ParticipantRow:
    participant_id: str
    time_seconds: int
    assists: int
    errors: int
    efficiency: float
    completed_without_pct: float
    completed_with_pct: float

    @property
    def time_display(self) -> str:
        return format_duration(self.time_seconds)


@dataclass(frozen=True)
class CaseReport:
    case_id: int
    target_seconds: int
    rows: tuple[ParticipantRow, ...]
    average: ParticipantRow


@dataclass(frozen=True)
class EvaluationReport:
    cases: tuple[CaseReport, ...]
    sus_scores: tuple[float, ...] = ()
    sus_mean_score: float | None = None

    def to_text(self) -> str:
        lines: list[str] = []
        header = (
            f"{'Participant':<12} {'Time':>8} {'Assist.':>8} {'Errors':>7} "
            f"{'Efficiency':>11} {'Without assist. (%)':>20} {'With assist. (%)':>17}"
        )
        for case in self.cases:
            lines.append(
                f"Case {case.case_id} results "
                f"(target time {format_duration(case.target_seconds)})"
            )
            lines.append(header)
            for row in list(case.rows) + [case.average]:
                lines.append(
                    f"{row.participant_id:<12} {row.time_display:>8} {row.assists:>8} "
                    f"{row.errors:>7} {row.efficiency:>11.2f} "
                    f"{row.completed_without_pct:>20.2f} {row.completed_with_pct:>17.2f}"
                )
            lines.append("")
        if self.sus_scores:
            lines.append("SUS scores")
            for index, score in enumerate(self.sus_scores, start=1):
                lines.append(f"{index:<12} {score:>8.1f}")
            assert self.sus_mean_score is not None
            verdict = "above average" if above_average(self.sus_mean_score) else "not above average"
            lines.append(f"{'Average':<12} {self.sus_mean_score:>8.2f}  ({verdict})")
            lines.append("")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            ["case", "participant", "time", "time_seconds", "assists", "errors",
             "efficiency", "completeness_without_pct", "completeness_with_pct"]
        )
        for case in self.cases:
            for row in list(case.rows) + [case.average]:
                writer.writerow(
                    [case.case_id, row.participant_id, row.time_display,
                     row.time_seconds, row.assists, row.errors,
                     f"{row.efficiency:.2f}",
                     f"{row.completed_without_pct:.2f}", f"{row.completed_with_pct:.2f}"]
                )
        return buffer.getvalue()

    def sus_to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["participant", "sus_score"])
        for index, score in enumerate(self.sus_scores, start=1):
            writer.writerow([index, f"{score:.1f}"])
        if self.sus_mean_score is not None:
            writer.writerow(["average", f"{self.sus_mean_score:.2f}"])
        return buffer.getvalue()


def build_report(
    records: Sequence[ParticipantRecord],
    targets: Iterable[CaseTarget],
    sus: Sequence[SusResponse] | Sequence[float] | None = None,
) -> EvaluationReport:
    """Compute per-participant metric rows plus averages, grouped by case."""

    if not records:
        raise EmptyInputError("no participant records")
    target_by_case = {t.case_id: t for t in targets}
    cases: list[CaseReport] = []
    for case_id in sorted({r.case_id for r in records}):
        target = target_by_case.get(case_id)
        if target is None:
            raise MetricsError(f"no target time provided for case {case_id}")
        rows = []
        for record in records:
            if record.case_id != case_id:
                continue
            try:
                without, with_assist = completion_rates(record)
                efficiency = time_efficiency(target, record.time_seconds)
            except MetricsError as exc:
                raise MetricsError(
                    f"participant {record.participant_id}, case {case_id}: {exc}"
                ) from exc
            rows.append(
                ParticipantRow(
                    participant_id=record.participant_id,
                    time_seconds=record.time_seconds,
                    assists=record.assists,
                    errors=record.errors,
                    efficiency=efficiency,
                    completed_without_pct=without,
                    completed_with_pct=with_assist,
                )
            )
        average = ParticipantRow(
            participant_id="Average",
            time_seconds=int(_round_half_up(sum(r.time_seconds for r in rows) / len(rows), 0)),
            assists=int(_round_half_up(sum(r.assists for r in rows) / len(rows), 0)),
            errors=int(_round_half_up(sum(r.errors for r in rows) / len(rows), 0)),
            efficiency=_round_half_up(sum(r.efficiency for r in rows) / len(rows)),
            completed_without_pct=_round_half_up(
                sum(r.completed_without_pct for r in rows) / len(rows)
            ),
            completed_with_pct=_round_half_up(
                sum(r.completed_with_pct for r in rows) / len(rows)
            ),
        )
        cases.append(
            CaseReport(case_id=case_id, target_seconds=target.target_seconds,
                       rows=tuple(rows), average=average)
        )

    scores: tuple[float, ...] = ()
    mean: float | None = None
    if sus:
        scores = tuple(
            sus_score(entry) if isinstance(entry, SusResponse) else float(entry)
            for entry in sus
        )
        mean = sus_mean(scores)
    return EvaluationReport(cases=tuple(cases), sus_scores=scores, sus_mean_score=mean)


# ---------------------------------------------------------------------------
# File formats

RECORDS_HEADER = [
    "participant", "case", "time", "assists", "errors",
    "tasks_total", "completed_without", "completed_with",
]


def parse_records_file(text: str) -> list[ParticipantRecord]:
    """Participant records CSV with times as mm:ss; header row required."""

    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyInputError("record file is empty")
    header = [cell.strip().lower() for cell in rows[0]]
    if header != RECORDS_HEADER:
        raise MetricsError(
            f"bad header: expected {','.join(RECORDS_HEADER)!r}, got {','.join(header)!r}"
        )
    records = []
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(RECORDS_HEADER):
            raise MetricsError(f"line {line_number}: expected {len(RECORDS_HEADER)} fields")
        try:
            records.append(
                ParticipantRecord(
                    participant_id=row[0].strip(),
                    case_id=int(row[1]),
                    time_seconds=parse_duration(row[2]),
                    assists=int(row[3]),
                    errors=int(row[4]),
                    tasks_total=int(row[5]),
                    tasks_completed_without_assist=int(row[6]),
                    tasks_completed_with_assist=int(row[7]),
                )
            )
        except (MetricsError, ValueError) as exc:
            raise MetricsError(f"line {line_number}: {exc}") from exc
    if not records:
        raise EmptyInputError("record file has a header but no data rows")
    return records


def parse_sus_file(text: str) -> list[SusResponse] | list[float]:
    """Questionnaire rows of 10 comma-separated items 1..5, or single
    pre-computed scores per row (passthrough mode)."""

    rows = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((line_number, [cell.strip() for cell in line.split(",")]))
    if not rows:
        raise EmptyInputError("questionnaire file is empty")

    widths = {len(cells) for _, cells in rows}
    if widths == {1}:
        scores = []
        for line_number, cells in rows:
            try:
                score = float(cells[0])
            except ValueError as exc:
                raise MetricsError(f"line {line_number}: not a number: {cells[0]!r}") from exc
            if not 0 <= score <= 100:
                raise RangeError(f"line {line_number}: score out of range 0..100: {score}")
            scores.append(score)
        return scores
    responses = []
    for line_number, cells in rows:
        if len(cells) != 10:
            raise LengthError(f"line {line_number}: expected 10 items, got {len(cells)}")
        try:
            items = tuple(int(cell) for cell in cells)
        except ValueError as exc:
            raise MetricsError(f"line {line_number}: non-integer item") from exc
        try:
            responses.append(SusResponse(items=items))
        except MetricsError as exc:
            raise type(exc)(f"line {line_number}: {exc}") from exc
    return responses
