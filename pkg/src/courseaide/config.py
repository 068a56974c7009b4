"""Course-level configuration: educator rules, mode instructions, guidance
windows, detection thresholds, and prompt budgets.

One YAML file per course; every field has a default so a minimal file only
needs ``course_id``. The service hot-swaps the parsed config atomically, so
updates apply from the next turn onward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

import yaml

MODES = ("general", "homework", "practice")
FOLLOW_UP_POLICIES = ("never", "model_decides", "always")

DEFAULT_THRESHOLD_LOW = 0.60
DEFAULT_THRESHOLD_HIGH = 0.90
DEFAULT_HISTORY_MAX_ROUNDS = 6
DEFAULT_PROMPT_CHAR_BUDGET = 24000

DEFAULT_MODE_INSTRUCTIONS = {
    "general": (
        "Answer the student's question clearly and accurately, grounded in the "
        "provided course material when it is relevant."
    ),
    "homework": (
        "This question concerns graded homework. Give hints, guiding questions, "
        "and pointers to the relevant course material instead of direct answers. "
        "Do not state the final answer or a complete solution."
    ),
    "practice": (
        "Generate practice exercises modeled on the current quizzes and exams in "
        "the provided material, then guide the student through attempting them."
    ),
}


class InvalidConfigError(ValueError):
    """Config file or update violates the schema."""


@dataclass(frozen=True)
class GuidanceWindow:
    active_from: datetime
    active_to: datetime
    text: str


@dataclass
class CourseConfig:
    course_id: str
    name: str = ""
    description: str = ""
    audience_note: str = ""
    educator_rules: list[str] = field(default_factory=list)
    time_guidance: list[GuidanceWindow] = field(default_factory=list)
    mode_instructions: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_MODE_INSTRUCTIONS)
    )
    follow_up_policy: str = "model_decides"
    threshold_low: float = DEFAULT_THRESHOLD_LOW
    threshold_high: float = DEFAULT_THRESHOLD_HIGH
    history_max_rounds: int = DEFAULT_HISTORY_MAX_ROUNDS
    prompt_char_budget: int = DEFAULT_PROMPT_CHAR_BUDGET
    tz_offset_hours: float = 0.0

    def validate(self) -> None:
        if not self.course_id:
            raise InvalidConfigError("course_id is required")
        if not self.threshold_low < self.threshold_high:
            raise InvalidConfigError(
                f"threshold_low ({self.threshold_low}) must be < threshold_high ({self.threshold_high})"
            )
        if self.follow_up_policy not in FOLLOW_UP_POLICIES:
            raise InvalidConfigError(
                f"follow_up_policy must be one of {FOLLOW_UP_POLICIES}, got {self.follow_up_policy!r}"
            )
        if self.history_max_rounds < 1:
            raise InvalidConfigError("history_max_rounds must be positive")
        if self.prompt_char_budget < 1:
            raise InvalidConfigError("prompt_char_budget must be positive")
        for mode in MODES:
            if not self.mode_instructions.get(mode):
                raise InvalidConfigError(f"missing mode instruction for {mode!r}")
        for window in self.time_guidance:
            if not window.active_from < window.active_to:
                raise InvalidConfigError(
                    f"guidance window must have active_from < active_to: {window.text[:40]!r}"
                )

    @property
    def thresholds(self) -> tuple[float, float]:
        return (self.threshold_low, self.threshold_high)

    @classmethod
    def from_dict(cls, data: dict) -> "CourseConfig":
        if not isinstance(data, dict):
            raise InvalidConfigError("config must be a mapping")
        known = {
            "course_id", "name", "description", "audience_note", "educator_rules",
            "time_guidance", "mode_instructions", "follow_up_policy", "thresholds",
            "threshold_low", "threshold_high", "history_max_rounds",
            "prompt_char_budget", "tz_offset_hours",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            guidance = [
                GuidanceWindow(
                    active_from=_parse_ts(w["active_from"]),
                    active_to=_parse_ts(w["active_to"]),
                    text=str(w["text"]),
                )
                for w in data.get("time_guidance", [])
            ]
            instructions = dict(DEFAULT_MODE_INSTRUCTIONS)
            instructions.update(data.get("mode_instructions", {}) or {})
            thresholds = data.get("thresholds") or {}
            config = cls(
                course_id=str(data.get("course_id", "")),
                name=str(data.get("name", "")),
                description=str(data.get("description", "")),
                audience_note=str(data.get("audience_note", "")),
                educator_rules=[str(r) for r in data.get("educator_rules", [])],
                time_guidance=guidance,
                mode_instructions=instructions,
                follow_up_policy=str(data.get("follow_up_policy", "model_decides")),
                threshold_low=float(
                    data.get("threshold_low", thresholds.get("low", DEFAULT_THRESHOLD_LOW))
                ),
                threshold_high=float(
                    data.get("threshold_high", thresholds.get("high", DEFAULT_THRESHOLD_HIGH))
                ),
                history_max_rounds=int(data.get("history_max_rounds", DEFAULT_HISTORY_MAX_ROUNDS)),
                prompt_char_budget=int(data.get("prompt_char_budget", DEFAULT_PROMPT_CHAR_BUDGET)),
                tz_offset_hours=float(data.get("tz_offset_hours", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfigError(f"malformed config: {exc}") from exc
        config.validate()
        return config

    def to_dict(self) -> dict:
        return {
            "course_id": self.course_id,
            "name": self.name,
            "description": self.description,
            "audience_note": self.audience_note,
            "educator_rules": list(self.educator_rules),
            "time_guidance": [
                {
                    "active_from": w.active_from.isoformat(),
                    "active_to": w.active_to.isoformat(),
                    "text": w.text,
                }
                for w in self.time_guidance
            ],
            "mode_instructions": dict(self.mode_instructions),
            "follow_up_policy": self.follow_up_policy,
            "threshold_low": self.threshold_low,
            "threshold_high": self.threshold_high,
            "history_max_rounds": self.history_max_rounds,
            "prompt_char_budget": self.prompt_char_budget,
            "tz_offset_hours": self.tz_offset_hours,
        }

    @classmethod
    def load(cls, path: str) -> "CourseConfig":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        return cls.from_dict(data or {})


def _parse_ts(value) -> datetime:
    if isinstance(value, datetime):
        dt = value
    else:
        dt = datetime.fromisoformat(str(value).replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)
