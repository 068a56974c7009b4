"""Usage metrics over persisted conversations.

Everything the interaction reports cover: per-course user/conversation
counts, duration buckets, round histograms, weekly and hourly distributions,
mode shares, and follow-up engagement. Conversations from developer users are
excluded unless requested. All computations are deterministic single passes.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta

from ..models import Conversation, question_count, rounds

# minute edges; the final bucket is open-ended (>= last edge)
DEFAULT_DURATION_EDGES_MIN = (0.0, 5.0, 10.0, 20.0, 30.0, 60.0, 120.0)

ROUNDS_WITHIN_TARGET = 3  # "completed within three rounds" bucket boundary


@dataclass
class DurationBuckets:
    edges: list[float]  # ascending; bucket i is [edges[i], edges[i+1]), last is open
    counts: list[int]
    cumulative: list[float]  # fraction of conversations at or below each bucket

    def to_dict(self) -> dict:
        return {"edges": self.edges, "counts": self.counts, "cumulative": self.cumulative}


@dataclass
class CourseStats:
    users: int
    conversations: int
    conversations_per_user: float

    def to_dict(self) -> dict:
        return {
            "users": self.users,
            "conversations": self.conversations,
            "conversations_per_user": self.conversations_per_user,
        }


@dataclass
class UsageReport:
    empty: bool
    conversations: int
    users: int
    conversations_per_user: float
    per_course: dict[str, CourseStats]
    durations: DurationBuckets
    within_10_min_ratio: float
    rounds_histogram: dict[int, int]
    within_3_rounds_ratio: float
    no_question_ratio: float
    single_round_ratio: float
    mode_shares: dict[str, float]
    rounds_by_mode: dict[str, dict[int, int]]
    weekly_conversations: dict[int, int]
    weekly_questions: dict[int, int]
    hourly_conversations: list[int]
    hourly_questions: list[int]
    hourly_cdf: list[float]
    follow_up_emitted_ratio: float
    follow_up_answered_ratio: float | None
    semester_start: str = ""
    tz_offset_hours: float = 0.0

    def to_dict(self) -> dict:
        return {
            "empty": self.empty,
            "conversations": self.conversations,
            "users": self.users,
            "conversations_per_user": self.conversations_per_user,
            "per_course": {k: v.to_dict() for k, v in sorted(self.per_course.items())},
            "durations": self.durations.to_dict(),
            "within_10_min_ratio": self.within_10_min_ratio,
            "rounds_histogram": {str(k): v for k, v in sorted(self.rounds_histogram.items())},
            "within_3_rounds_ratio": self.within_3_rounds_ratio,
            "no_question_ratio": self.no_question_ratio,
            "single_round_ratio": self.single_round_ratio,
            "mode_shares": self.mode_shares,
            "rounds_by_mode": {
                m: {str(k): v for k, v in sorted(h.items())}
                for m, h in sorted(self.rounds_by_mode.items())
            },
            "weekly_conversations": {str(k): v for k, v in sorted(self.weekly_conversations.items())},
            "weekly_questions": {str(k): v for k, v in sorted(self.weekly_questions.items())},
            "hourly_conversations": self.hourly_conversations,
            "hourly_questions": self.hourly_questions,
            "hourly_cdf": self.hourly_cdf,
            "follow_up_emitted_ratio": self.follow_up_emitted_ratio,
            "follow_up_answered_ratio": self.follow_up_answered_ratio,
            "semester_start": self.semester_start,
            "tz_offset_hours": self.tz_offset_hours,
        }


def conversation_has_follow_up(conv: Conversation) -> bool:
    return any(m.role == "assistant" and m.has_follow_up for m in conv.messages)


def follow_up_was_answered(conv: Conversation) -> bool:
    """True if any flagged assistant message has a later user message."""
    for i, msg in enumerate(conv.messages):
        if msg.role == "assistant" and msg.has_follow_up:
            if any(m.role == "user" for m in conv.messages[i + 1 :]):
                return True
    return False


def local_hour(dt: datetime, tz_offset_hours: float) -> int:
    return (dt + timedelta(hours=tz_offset_hours)).hour


def local_date(dt: datetime, tz_offset_hours: float) -> date:
    return (dt + timedelta(hours=tz_offset_hours)).date()


def compute_report(
    conversations: list[Conversation],
    semester_start: date,
    tz_offset_hours: float = 0.0,
    exclude_developers: bool = True,
    duration_edges: tuple[float, ...] = DEFAULT_DURATION_EDGES_MIN,
) -> UsageReport:
    """Compute the full usage report over a set of conversations.

    Duration is last activity minus start; the week index is whole days since
    semester_start divided by 7; hours are local per the timezone offset.
    Weekly counts are conversation initiations, hourly question counts follow
    each question's own timestamp. An empty input yields a zeroed report with
    the explicit empty flag set.
    """
    included = [
        c for c in conversations if not (exclude_developers and c.user_kind == "developer")
    ]
    total = len(included)
    edges = list(duration_edges)

    if total == 0:
        return UsageReport(
            empty=True,
            conversations=0,
            users=0,
            conversations_per_user=0.0,
            per_course={},
            durations=DurationBuckets(edges=edges, counts=[0] * len(edges), cumulative=[0.0] * len(edges)),
            within_10_min_ratio=0.0,
            rounds_histogram={},
            within_3_rounds_ratio=0.0,
            no_question_ratio=0.0,
            single_round_ratio=0.0,
            mode_shares={"general": 0.0, "homework": 0.0, "practice": 0.0},
            rounds_by_mode={},
            weekly_conversations={},
            weekly_questions={},
            hourly_conversations=[0] * 24,
            hourly_questions=[0] * 24,
            hourly_cdf=[0.0] * 24,
            follow_up_emitted_ratio=0.0,
            follow_up_answered_ratio=None,
            semester_start=semester_start.isoformat(),
            tz_offset_hours=tz_offset_hours,
        )

    users: set[str] = set()
    course_users: dict[str, set[str]] = defaultdict(set)
    course_convs: Counter[str] = Counter()
    duration_counts = [0] * len(edges)
    within_10 = 0
    rounds_hist: Counter[int] = Counter()
    rounds_by_mode: dict[str, Counter[int]] = defaultdict(Counter)
    mode_counts: Counter[str] = Counter()
    weekly_convs: Counter[int] = Counter()
    weekly_questions: Counter[int] = Counter()
    hourly_convs = [0] * 24
    hourly_questions = [0] * 24
    emitted = 0
    answered = 0
    within_3 = no_question = single_round = 0

    for conv in included:
        users.add(conv.user_ref)
        course_users[conv.course_id].add(conv.user_ref)
        course_convs[conv.course_id] += 1

        minutes = conv.duration_minutes()
        duration_counts[_bucket_index(minutes, edges)] += 1
        if minutes < 10.0:
            within_10 += 1

        r = rounds(conv)
        rounds_hist[r] += 1
        rounds_by_mode[conv.mode_at_start][r] += 1
        if r <= ROUNDS_WITHIN_TARGET:
            within_3 += 1
        if r == 0:
            no_question += 1
        if r == 1:
            single_round += 1

        mode_counts[conv.mode_at_start] += 1

        week = (local_date(conv.started_at, tz_offset_hours) - semester_start).days // 7
        weekly_convs[week] += 1
        hourly_convs[local_hour(conv.started_at, tz_offset_hours)] += 1
        for msg in conv.messages:
            if msg.role == "user":
                q_week = (local_date(msg.created_at, tz_offset_hours) - semester_start).days // 7
                weekly_questions[q_week] += 1
                hourly_questions[local_hour(msg.created_at, tz_offset_hours)] += 1

        if conversation_has_follow_up(conv):
            emitted += 1
            if follow_up_was_answered(conv):
                answered += 1

    cumulative = []
    running = 0
    for count in duration_counts:
        running += count
        cumulative.append(running / total)
    cdf = []
    running = 0
    for count in hourly_convs:
        running += count
        cdf.append(running / total)

    return UsageReport(
        empty=False,
        conversations=total,
        users=len(users),
        conversations_per_user=total / len(users),
        per_course={
            course: CourseStats(
                users=len(course_users[course]),
                conversations=course_convs[course],
                conversations_per_user=course_convs[course] / len(course_users[course]),
            )
            for course in course_convs
        },
        durations=DurationBuckets(edges=edges, counts=duration_counts, cumulative=cumulative),
        within_10_min_ratio=within_10 / total,
        rounds_histogram=dict(rounds_hist),
        within_3_rounds_ratio=within_3 / total,
        no_question_ratio=no_question / total,
        single_round_ratio=single_round / total,
        mode_shares={
            mode: mode_counts.get(mode, 0) / total for mode in ("general", "homework", "practice")
        },
        rounds_by_mode={m: dict(h) for m, h in rounds_by_mode.items()},
        weekly_conversations=dict(weekly_convs),
        weekly_questions=dict(weekly_questions),
        hourly_conversations=hourly_convs,
        hourly_questions=hourly_questions,
        hourly_cdf=cdf,
        follow_up_emitted_ratio=emitted / total,
        follow_up_answered_ratio=(answered / emitted) if emitted else None,
        semester_start=semester_start.isoformat(),
        tz_offset_hours=tz_offset_hours,
    )


def follow_up_report(
    conversations: list[Conversation], exclude_developers: bool = True
) -> dict[str, dict]:
    """Per-course follow-up engagement: emitted and answered ratios.

    Emitted counts conversations holding at least one flagged assistant
    message; answered counts those where a user message follows the flag
    within the same conversation. The answered ratio is absent when nothing
    was emitted.
    """
    per_course: dict[str, dict] = {}
    grouped: dict[str, list[Conversation]] = defaultdict(list)
    for conv in conversations:
        if exclude_developers and conv.user_kind == "developer":
            continue
        grouped[conv.course_id].append(conv)
    for course_id, convs in sorted(grouped.items()):
        emitted = [c for c in convs if conversation_has_follow_up(c)]
        answered = [c for c in emitted if follow_up_was_answered(c)]
        per_course[course_id] = {
            "conversations": len(convs),
            "emitted": len(emitted),
            "answered": len(answered),
            "emitted_ratio": len(emitted) / len(convs) if convs else 0.0,
            "answered_ratio": (len(answered) / len(emitted)) if emitted else None,
        }
    return per_course


def _bucket_index(minutes: float, edges: list[float]) -> int:
    for i in range(len(edges) - 1):
        if edges[i] <= minutes < edges[i + 1]:
            return i
    return len(edges) - 1
