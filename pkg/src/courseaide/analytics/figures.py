"""Plot-ready CSV tables derived from a usage report and annotation tables.

One file per chart family: counts, durations, rounds, weekly/hourly
initiations, mode shares, rounds by mode, follow-up engagement, and (when
annotations are supplied) linguistic features, cognitive-level
distributions, correctness, and teaching-style shares.
"""

from __future__ import annotations

import csv
import json
import os
from datetime import date

from ..models import Conversation
from .annotations import (
    BLOOM_LEVELS,
    CORRECTNESS_LABELS,
    Annotation,
    aggregate_annotations,
)
from .reports import compute_report, follow_up_report


def render_report_files(
    conversations: list[Conversation],
    semester_start: date,
    out_dir: str,
    tz_offset_hours: float = 0.0,
    exclude_developers: bool = True,
    annotations: list[Annotation] | None = None,
) -> list[str]:
    """Write report.json plus every CSV table into out_dir; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    report = compute_report(
        conversations, semester_start, tz_offset_hours, exclude_developers
    )
    per_course_reports = {}
    for course_id in sorted({c.course_id for c in conversations}):
        per_course_reports[course_id] = compute_report(
            [c for c in conversations if c.course_id == course_id],
            semester_start,
            tz_offset_hours,
            exclude_developers,
        )

    def path(name: str) -> str:
        full = os.path.join(out_dir, name)
        written.append(full)
        return full

    with open(path("report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    with open(path("counts.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "users", "conversations", "conversations_per_user"])
        for course_id, stats in sorted(report.per_course.items()):
            writer.writerow(
                [course_id, stats.users, stats.conversations, f"{stats.conversations_per_user:.4f}"]
            )

    with open(path("durations.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bucket_low_min", "bucket_high_min", "count", "relative", "cumulative"])
        edges = report.durations.edges
        total = max(report.conversations, 1)
        for i, count in enumerate(report.durations.counts):
            high = edges[i + 1] if i + 1 < len(edges) else ""
            writer.writerow(
                [edges[i], high, count, f"{count / total:.6f}", f"{report.durations.cumulative[i]:.6f}"]
            )

    with open(path("rounds.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rounds", "count", "relative"])
        total = max(report.conversations, 1)
        for r, count in sorted(report.rounds_histogram.items()):
            writer.writerow([r, count, f"{count / total:.6f}"])

    with open(path("weekly.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "week", "conversations", "questions"])
        for course_id, sub in [("all", report)] + sorted(per_course_reports.items()):
            weeks = sorted(set(sub.weekly_conversations) | set(sub.weekly_questions))
            for week in weeks:
                writer.writerow(
                    [
                        course_id,
                        week,
                        sub.weekly_conversations.get(week, 0),
                        sub.weekly_questions.get(week, 0),
                    ]
                )

    with open(path("hourly.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "hour", "conversations", "questions", "cdf"])
        for course_id, sub in [("all", report)] + sorted(per_course_reports.items()):
            for hour in range(24):
                writer.writerow(
                    [
                        course_id,
                        hour,
                        sub.hourly_conversations[hour],
                        sub.hourly_questions[hour],
                        f"{sub.hourly_cdf[hour]:.6f}",
                    ]
                )

    with open(path("modes.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "share"])
        for mode, share in sorted(report.mode_shares.items()):
            writer.writerow([mode, f"{share:.6f}"])

    with open(path("rounds_by_mode.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "rounds", "count"])
        for mode, hist in sorted(report.rounds_by_mode.items()):
            for r, count in sorted(hist.items()):
                writer.writerow([mode, r, count])

    with open(path("follow_up.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["course_id", "conversations", "emitted", "answered", "emitted_ratio", "answered_ratio"]
        )
        for course_id, stats in sorted(
            follow_up_report(conversations, exclude_developers).items()
        ):
            writer.writerow(
                [
                    course_id,
                    stats["conversations"],
                    stats["emitted"],
                    stats["answered"],
                    f"{stats['emitted_ratio']:.6f}",
                    "" if stats["answered_ratio"] is None else f"{stats['answered_ratio']:.6f}",
                ]
            )

    if annotations:
        written.extend(_render_annotation_files(annotations, out_dir))
    return written


def _render_annotation_files(annotations: list[Annotation], out_dir: str) -> list[str]:
    written: list[str] = []
    tables = aggregate_annotations(annotations)

    def path(name: str) -> str:
        full = os.path.join(out_dir, name)
        written.append(full)
        return full

    with open(path("linguistic.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["flag", "share"])
        for flag, share in sorted(tables.linguistic_shares.items()):
            writer.writerow([flag, f"{share:.6f}"])

    with open(path("bloom_by_course.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "level", "share"])
        for course_id, dist in tables.bloom_by_course.items():
            for level in BLOOM_LEVELS:
                writer.writerow([course_id, level, f"{dist[level]:.6f}"])

    with open(path("bloom_by_mode.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "level", "share"])
        for mode, dist in tables.bloom_by_mode.items():
            for level in BLOOM_LEVELS:
                writer.writerow([mode, level, f"{dist[level]:.6f}"])

    with open(path("correctness.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "share"])
        for label in CORRECTNESS_LABELS:
            writer.writerow([label, f"{tables.correctness_shares.get(label, 0.0):.6f}"])

    with open(path("teaching_style.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        writer.writerow(["example_share", f"{tables.example_share:.6f}"])
        writer.writerow(["follow_up_present_share", f"{tables.follow_up_present_share:.6f}"])
        answered = tables.follow_up_answered_share
        writer.writerow(
            ["follow_up_answered_share", "" if answered is None else f"{answered:.6f}"]
        )

    # cognitive levels within the follow-up sample only
    follow_up_rows = [a for a in annotations if a.llm_question_present]
    with open(path("bloom_follow_up.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["course_id", "level", "share"])
        if follow_up_rows:
            sub = aggregate_annotations(follow_up_rows)
            for course_id, dist in sub.bloom_by_course.items():
                for level in BLOOM_LEVELS:
                    writer.writerow([course_id, level, f"{dist[level]:.6f}"])
    return written
