"""Chat service: persistence, turn pipeline, and the HTTP API."""

from .pipeline import (
    AuthorizationError,
    CourseAssistant,
    TurnFailedError,
    TurnResult,
    UnknownConversationError,
    ValidationError,
)
from .storage import ConversationStore

__all__ = [
    "AuthorizationError",
    "CourseAssistant",
    "TurnFailedError",
    "TurnResult",
    "UnknownConversationError",
    "ValidationError",
    "ConversationStore",
]
