"""Figure rendering for evaluation reports: PNG charts next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only, no display server

import matplotlib.pyplot as plt

from cuentoterapp.metrics import (
    SUS_ABOVE_AVERAGE_THRESHOLD,
    CaseReport,
    EvaluationReport,
)

__all__ = ["render_report_figures"]


def _case_efficiency_figure(case: CaseReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    labels = [row.participant_id for row in case.rows]
    values = [row.efficiency for row in case.rows]
    ax.bar(labels, values, color="#4878a8")
    ax.axhline(1.0, color="#666666", linewidth=1, linestyle="--", label="expert target")
    ax.axhline(case.average.efficiency, color="#c44e52", linewidth=1, label="average")
    ax.set_xlabel("Participant")
    ax.set_ylabel("Time efficiency (target / actual)")
    ax.set_title(f"Case {case.case_id} time efficiency")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _case_completeness_figure(case: CaseReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    labels = [row.participant_id for row in case.rows]
    without = [row.completed_without_pct for row in case.rows]
    with_assist = [row.completed_with_pct for row in case.rows]
    ax.bar(labels, without, color="#55a868", label="without assistance")
    ax.bar(labels, with_assist, bottom=without, color="#dd8452", label="with assistance")
    ax.set_xlabel("Participant")
    ax.set_ylabel("Tasks completed (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"Case {case.case_id} task completeness")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _sus_figure(report: EvaluationReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    labels = [str(i) for i in range(1, len(report.sus_scores) + 1)]
    ax.bar(labels, report.sus_scores, color="#4878a8")
    ax.axhline(
        SUS_ABOVE_AVERAGE_THRESHOLD, color="#666666", linewidth=1, linestyle="--",
        label="above-average threshold (68)",
    )
    if report.sus_mean_score is not None:
        ax.axhline(report.sus_mean_score, color="#c44e52", linewidth=1, label="average")
    ax.set_xlabel("Participant")
    ax.set_ylabel("SUS score")
    ax.set_ylim(0, 100)
    ax.set_title("Satisfaction questionnaire scores")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report_figures(report: EvaluationReport, out_dir: str | Path) -> list[Path]:
    """Write one efficiency and one completeness chart per case, plus the
    questionnaire chart when scores are present. Returns the written paths."""

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for case in report.cases:
        efficiency_path = out_dir / f"case{case.case_id}_efficiency.png"
        _case_efficiency_figure(case, efficiency_path)
        written.append(efficiency_path)
        completeness_path = out_dir / f"case{case.case_id}_completeness.png"
        _case_completeness_figure(case, completeness_path)
        written.append(completeness_path)
    if report.sus_scores:
        sus_path = out_dir / "sus_scores.png"
        _sus_figure(report, sus_path)
        written.append(sus_path)
    return written
