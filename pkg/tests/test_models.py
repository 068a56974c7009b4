import io
from datetime import datetime, timezone

import pytest

from courseaide.models import (
    Conversation,
    Message,
    format_ts,
    parse_ts,
    question_count,
    read_export,
    rounds,
    scan_for_pii_keys,
    write_export,
)

from conftest import make_conversation


def test_rounds_empty_conversation():
    assert rounds(make_conversation(round_count=0)) == 0


def test_rounds_counts_completed_pairs():
    assert rounds(make_conversation(round_count=2, duration_s=120)) == 2


def test_rounds_ignores_error_turns():
    conv = make_conversation(round_count=2, duration_s=120)
    conv.messages[3].metadata["error"] = True  # second assistant reply failed
    assert rounds(conv) == 1
    assert question_count(conv) == 2


def test_rounds_trailing_unanswered_user():
    conv = make_conversation(round_count=1, duration_s=60)
    conv.messages.append(
        Message(id="m9", role="user", text="dangling", created_at=conv.last_activity_at,
                metadata={"mode": "general"})
    )
    assert rounds(conv) == 1


def test_timestamp_round_trip():
    dt = datetime(2024, 3, 5, 13, 45, 12, 345678, tzinfo=timezone.utc)
    assert parse_ts(format_ts(dt)) == dt
    assert format_ts(dt) == "2024-03-05T13:45:12.345678Z"


def test_parse_ts_accepts_plain_iso():
    assert parse_ts("2024-03-05T13:45:12Z") == datetime(2024, 3, 5, 13, 45, 12, tzinfo=timezone.utc)


def test_export_round_trip_is_byte_identical():
    convs = [
        make_conversation("c1", round_count=2, duration_s=300),
        make_conversation("c2", round_count=0),
        make_conversation("c3", round_count=3, duration_s=1200, follow_up_round=2),
    ]
    first = io.StringIO()
    write_export(convs, first)
    reread = read_export(io.StringIO(first.getvalue()))
    second = io.StringIO()
    write_export(reread, second)
    assert first.getvalue() == second.getvalue()
    assert len(reread) == 3


def test_export_orders_by_started_then_id():
    late = make_conversation("a-late", started=datetime(2024, 3, 1, tzinfo=timezone.utc))
    early = make_conversation("z-early", started=datetime(2024, 2, 1, tzinfo=timezone.utc))
    buf = io.StringIO()
    write_export([late, early], buf)
    lines = buf.getvalue().splitlines()
    assert '"id":"z-early"' in lines[0]
    assert '"id":"a-late"' in lines[1]


def test_malformed_export_line_reports_lineno():
    buf = io.StringIO()
    write_export([make_conversation("c1")], buf)
    with pytest.raises(ValueError, match="line 2"):
        read_export(io.StringIO(buf.getvalue() + "not json\n"))
    with pytest.raises(ValueError, match="line 1"):
        read_export(io.StringIO('{"missing": "fields"}\n'))


def test_pii_scan_clean_record():
    record = make_conversation("c1", round_count=1, duration_s=60).to_record()
    assert scan_for_pii_keys(record) == []


def test_pii_scan_flags_denied_keys_recursively():
    record = make_conversation("c1", round_count=1, duration_s=60).to_record()
    record["messages"][0]["metadata"]["email"] = "x@y.z"
    record["Name"] = "someone"
    violations = scan_for_pii_keys(record)
    assert "Name" in violations
    assert any(v.endswith("metadata.email") for v in violations)


def test_conversation_record_schema():
    record = make_conversation("c1", round_count=1, duration_s=60).to_record()
    assert set(record) == {
        "id", "course_id", "user_ref", "user_kind", "mode_at_start",
        "started_at", "last_activity_at", "shared", "messages",
    }
    assert set(record["messages"][0]) == {"id", "role", "text", "created_at", "metadata"}


def test_conversation_from_record_round_trip():
    conv = make_conversation("c1", round_count=2, duration_s=90, follow_up_round=1)
    again = Conversation.from_record(conv.to_record())
    assert again == conv
