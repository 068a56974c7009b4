"""Deterministic synthetic conversation logs.

The generator takes exact target counts (not fractions) and emits a
conversation set realizing every count precisely, which makes the
generator/analyzer round trip an exact oracle for the report code. Same spec
and seed always produce the same conversations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

import yaml

from ..models import Conversation, Message


class InconsistentSpecError(ValueError):
    """Target counts contradict each other or exceed the total."""


@dataclass
class CourseSpec:
    course_id: str
    total: int
    users: int
    zero_rounds: int = 0
    single_round: int = 0
    within_3_rounds: int = 0
    within_10_min: int = 0
    homework_mode: int = 0
    practice_mode: int = 0
    follow_up_emitted: int = 0
    follow_up_answered: int = 0
    developer_conversations: int = 0
    developer_zero_rounds: int = 0
    developer_users: int = 1

    def validate(self) -> None:
        counts = {
            "total": self.total,
            "users": self.users,
            "zero_rounds": self.zero_rounds,
            "single_round": self.single_round,
            "within_3_rounds": self.within_3_rounds,
            "within_10_min": self.within_10_min,
            "homework_mode": self.homework_mode,
            "practice_mode": self.practice_mode,
            "follow_up_emitted": self.follow_up_emitted,
            "follow_up_answered": self.follow_up_answered,
            "developer_conversations": self.developer_conversations,
            "developer_zero_rounds": self.developer_zero_rounds,
        }
        for name, value in counts.items():
            if value < 0:
                raise InconsistentSpecError(f"{self.course_id}: {name} must be >= 0")
        if self.total > 0 and not 1 <= self.users <= self.total:
            raise InconsistentSpecError(
                f"{self.course_id}: users must be in [1, total], got {self.users}"
            )
        if self.zero_rounds + self.single_round > self.within_3_rounds:
            raise InconsistentSpecError(
                f"{self.course_id}: zero_rounds + single_round exceeds within_3_rounds"
            )
        if self.within_3_rounds > self.total:
            raise InconsistentSpecError(f"{self.course_id}: within_3_rounds exceeds total")
        if self.within_10_min > self.total:
            raise InconsistentSpecError(f"{self.course_id}: within_10_min exceeds total")
        if self.within_10_min < self.zero_rounds:
            # conversations without questions have zero duration, so they all
            # land under ten minutes; fewer is unrealizable
            raise InconsistentSpecError(
                f"{self.course_id}: within_10_min must be >= zero_rounds"
            )
        if self.homework_mode + self.practice_mode > self.total:
            raise InconsistentSpecError(f"{self.course_id}: mode counts exceed total")
        if self.follow_up_emitted > self.total - self.zero_rounds:
            raise InconsistentSpecError(
                f"{self.course_id}: follow_up_emitted exceeds conversations with questions"
            )
        if self.follow_up_answered > self.follow_up_emitted:
            raise InconsistentSpecError(
                f"{self.course_id}: follow_up_answered exceeds follow_up_emitted"
            )
        multi_round = self.total - self.zero_rounds - self.single_round
        if self.follow_up_answered > multi_round:
            raise InconsistentSpecError(
                f"{self.course_id}: follow_up_answered needs that many multi-round conversations"
            )
        if self.developer_zero_rounds > self.developer_conversations:
            raise InconsistentSpecError(
                f"{self.course_id}: developer_zero_rounds exceeds developer_conversations"
            )
        if self.developer_conversations > 0 and self.developer_users < 1:
            raise InconsistentSpecError(f"{self.course_id}: developer_users must be >= 1")


@dataclass
class SimulationSpec:
    courses: list[CourseSpec]
    semester_start: date = date(2024, 1, 15)
    weeks: int = 16
    seed: int = 0

    def validate(self) -> None:
        if self.weeks < 1:
            raise InconsistentSpecError("weeks must be positive")
        if not self.courses:
            raise InconsistentSpecError("at least one course is required")
        for course in self.courses:
            course.validate()

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationSpec":
        try:
            start = data.get("semester_start", "2024-01-15")
            if isinstance(start, date) and not isinstance(start, datetime):
                semester_start = start
            else:
                semester_start = date.fromisoformat(str(start))
            spec = cls(
                courses=[
                    CourseSpec(**{str(k): v for k, v in course.items()})
                    for course in data.get("courses", [])
                ],
                semester_start=semester_start,
                weeks=int(data.get("weeks", 16)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InconsistentSpecError(f"malformed simulation spec: {exc}") from exc
        spec.validate()
        return spec

    @classmethod
    def load(cls, path: str) -> "SimulationSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(yaml.safe_load(fh) or {})


def generate_synthetic_logs(spec: SimulationSpec, seed: int | None = None) -> list[Conversation]:
    """Emit conversations realizing every target count in the spec exactly."""
    spec.validate()
    seed = spec.seed if seed is None else seed
    conversations: list[Conversation] = []
    for course in spec.courses:
        rng = random.Random(f"{seed}:{course.course_id}")
        conversations.extend(_generate_course(course, spec, rng))
    return conversations


def _generate_course(
    course: CourseSpec, spec: SimulationSpec, rng: random.Random
) -> list[Conversation]:
    total = course.total

    # round counts: zeros, singles, a 2/3-round block up to within_3, longer tail
    round_counts: list[int] = []
    round_counts += [0] * course.zero_rounds
    round_counts += [1] * course.single_round
    mid = course.within_3_rounds - course.zero_rounds - course.single_round
    round_counts += [2 + (i % 2) for i in range(mid)]
    tail = total - course.within_3_rounds
    round_counts += [4 + (i % 4) for i in range(tail)]

    zero_idx = [i for i in range(total) if round_counts[i] == 0]
    nonzero_idx = [i for i in range(total) if round_counts[i] >= 1]
    multi_idx = [i for i in range(total) if round_counts[i] >= 2]

    short_set = set(zero_idx)
    short_set.update(rng.sample(nonzero_idx, course.within_10_min - course.zero_rounds))

    homework_set = set(rng.sample(range(total), course.homework_mode))
    rest = sorted(set(range(total)) - homework_set)
    practice_set = set(rng.sample(rest, course.practice_mode))

    answered_set = set(rng.sample(multi_idx, course.follow_up_answered))
    emit_pool = [i for i in nonzero_idx if i not in answered_set]
    emitted_set = answered_set | set(
        rng.sample(emit_pool, course.follow_up_emitted - course.follow_up_answered)
    )

    day_zero = datetime(
        spec.semester_start.year, spec.semester_start.month, spec.semester_start.day,
        tzinfo=timezone.utc,
    )

    conversations = []
    for i in range(total):
        r = round_counts[i]
        if r == 0:
            duration_s = 0
        elif i in short_set:
            duration_s = rng.randint(30, 540)
        else:
            duration_s = rng.randint(660, 7200)
        started = day_zero + timedelta(
            days=rng.randint(0, spec.weeks * 7 - 1),
            seconds=rng.randint(8 * 3600, 24 * 3600 - 1),
        )
        mode = "homework" if i in homework_set else "practice" if i in practice_set else "general"
        flag_round = 0
        if i in emitted_set:
            flag_round = (r - 1) if i in answered_set else r
        conv = Conversation(
            id=f"{course.course_id}-c{i:05d}",
            course_id=course.course_id,
            user_ref=f"{course.course_id}-user-{i % course.users:04d}",
            user_kind="student",
            mode_at_start=mode,
            started_at=started,
            last_activity_at=started + timedelta(seconds=duration_s),
            messages=_messages(course.course_id, i, r, mode, started, duration_s, flag_round),
        )
        conversations.append(conv)

    for j in range(course.developer_conversations):
        r = 0 if j < course.developer_zero_rounds else 1
        duration_s = 0 if r == 0 else rng.randint(30, 540)
        started = day_zero + timedelta(
            days=rng.randint(0, spec.weeks * 7 - 1),
            seconds=rng.randint(8 * 3600, 24 * 3600 - 1),
        )
        conversations.append(
            Conversation(
                id=f"{course.course_id}-dev-c{j:05d}",
                course_id=course.course_id,
                user_ref=f"{course.course_id}-devuser-{j % course.developer_users:02d}",
                user_kind="developer",
                mode_at_start="general",
                started_at=started,
                last_activity_at=started + timedelta(seconds=duration_s),
                messages=_messages(course.course_id, -j - 1, r, "general", started, duration_s, 0),
            )
        )
    return conversations


def _messages(
    course_id: str,
    conv_idx: int,
    round_count: int,
    mode: str,
    started: datetime,
    duration_s: int,
    flag_round: int,
) -> list[Message]:
    """2 * round_count alternating messages spread across the duration.

    `flag_round` marks whose assistant reply carries the follow-up flag
    (1-based; 0 for none).
    """
    messages = []
    n = 2 * round_count
    for j in range(n):
        ts = started + timedelta(seconds=duration_s * (j + 1) / n)
        round_no = j // 2 + 1
        if j % 2 == 0:
            messages.append(
                Message(
                    id=f"{course_id}-c{conv_idx}-m{j:03d}",
                    role="user",
                    text=f"Question {round_no} about topic {abs(conv_idx)} in {course_id}.",
                    created_at=ts,
                    metadata={"mode": mode},
                )
            )
        else:
            flagged = round_no == flag_round
            text = f"Here is some guidance for question {round_no}."
            if flagged:
                text += "\nWhat happens if you change the first step?"
            messages.append(
                Message(
                    id=f"{course_id}-c{conv_idx}-m{j:03d}",
                    role="assistant",
                    text=text,
                    created_at=ts,
                    metadata={
                        "mode": mode,
                        "has_follow_up": flagged,
                        "advisory_shown": False,
                        "retrieval_ids": [],
                    },
                )
            )
    return messages
