import itertools

import pytest

from courseaide.config import CourseConfig
from courseaide.dispatch import (
    NO_MATCH_SIMILARITY,
    Dispatcher,
    kind_filter_for_mode,
    resolve_mode,
)
from courseaide.gateway import Gateway

from conftest import FixedScoreStore, make_assistant, make_mock

GRAY_CHUNK = "alpha beta gamma delta"
GRAY_QUESTION = "alpha beta gamma qqq1"  # cosine 0.75 against GRAY_CHUNK


def configured(rules=None, threshold_low=0.60, threshold_high=0.90):
    assistant, mock = make_assistant(rules)
    assistant.update_course_config(
        "cs101",
        {"threshold_low": threshold_low, "threshold_high": threshold_high},
    )
    return assistant, mock


# ── resolve_mode ────────────────────────────────────────────────────────────


def test_resolve_mode_default_is_general():
    assert resolve_mode([], None) == "general"


def test_resolve_mode_enumerates_kind_combinations():
    # precedence: homework > quiz/exam > general, over all subsets
    for kinds in itertools.chain.from_iterable(
        itertools.combinations(["lecture", "homework", "quiz", "exam"], r) for r in range(5)
    ):
        expected = (
            "homework"
            if "homework" in kinds
            else "practice" if {"quiz", "exam"} & set(kinds) else "general"
        )
        assert resolve_mode(kinds, None) == expected


def test_explicit_mode_wins():
    assert resolve_mode(["homework"], "general") == "general"
    assert resolve_mode([], "practice") == "practice"


def test_unknown_explicit_mode_rejected():
    with pytest.raises(ValueError):
        resolve_mode([], "exam-cram")


def test_kind_filter_per_mode():
    assert kind_filter_for_mode("homework") == frozenset({"homework"})
    assert kind_filter_for_mode("practice") == frozenset({"quiz", "exam"})
    assert kind_filter_for_mode("general") is None


# ── detect_homework ─────────────────────────────────────────────────────────


def test_empty_homework_corpus_reports_sentinel():
    assistant, mock = configured()
    verdict = assistant.dispatcher.detect_homework("cs101", "anything")
    assert verdict.is_homework is False
    assert verdict.max_similarity == NO_MATCH_SIMILARITY
    assert verdict.matched_chunk is None
    assert verdict.llm_consulted is False
    assert verdict.llm_verdict is None
    assert mock.calls == []


def test_exact_match_short_circuits_above_high_threshold():
    assistant, mock = configured()
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    verdict = assistant.dispatcher.detect_homework("cs101", GRAY_CHUNK)
    assert verdict.is_homework is True
    assert verdict.max_similarity == pytest.approx(1.0, abs=1e-9)
    assert verdict.llm_consulted is False
    assert mock.calls == []


def test_low_similarity_skips_llm():
    assistant, mock = configured()
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    verdict = assistant.dispatcher.detect_homework("cs101", "unrelated zzz9 words qqq7 here xxx3")
    assert verdict.is_homework is False
    assert verdict.llm_consulted is False
    assert mock.calls == []


def test_gray_zone_consults_llm_yes():
    assistant, mock = configured(rules=[(GRAY_QUESTION, "Yes.")])
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    verdict = assistant.dispatcher.detect_homework("cs101", GRAY_QUESTION)
    assert 0.60 <= verdict.max_similarity < 0.90
    assert verdict.is_homework is True
    assert verdict.llm_consulted is True
    assert verdict.llm_verdict is True
    assert len(mock.calls) == 1


def test_gray_zone_consults_llm_no():
    assistant, mock = configured(rules=[(GRAY_QUESTION, "no")])
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    verdict = assistant.dispatcher.detect_homework("cs101", GRAY_QUESTION)
    assert verdict.is_homework is False
    assert verdict.llm_consulted is True
    assert verdict.llm_verdict is False


def test_gray_zone_llm_failure_fails_open(caplog):
    assistant, mock = configured()
    mock.fail_always = True
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    with caplog.at_level("WARNING"):
        verdict = assistant.dispatcher.detect_homework("cs101", GRAY_QUESTION)
    assert verdict.is_homework is False
    assert verdict.llm_consulted is False
    assert verdict.llm_verdict is None
    assert any("fail" in r.message or "failed" in r.message for r in caplog.records)


def test_gray_zone_unparseable_verdict_fails_open():
    assistant, mock = configured(rules=[(GRAY_QUESTION, "maybe, depends")])
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    verdict = assistant.dispatcher.detect_homework("cs101", GRAY_QUESTION)
    assert verdict.is_homework is False
    assert verdict.llm_consulted is False


# ── threshold sweep via a stub store ────────────────────────────────────────


def sweep(verdict_text: str) -> list[bool]:
    config = CourseConfig(course_id="c")
    outcomes = []
    for i in range(50):
        score = i / 49.0
        mock = make_mock([("", verdict_text)])
        dispatcher = Dispatcher(FixedScoreStore(score), Gateway(mock, backoff_s=0), lambda _c: config)
        outcomes.append(dispatcher.detect_homework("c", "q").is_homework)
    return outcomes


def test_threshold_monotonicity_with_fixed_llm_verdict():
    for text in ("yes", "no"):
        outcomes = sweep(text)
        # once true, raising similarity never flips back to false
        assert outcomes == sorted(outcomes)


def test_gray_zone_containment():
    config = CourseConfig(course_id="c")
    for i in range(50):
        score = i / 49.0
        mock = make_mock([("", "yes")])
        dispatcher = Dispatcher(FixedScoreStore(score), Gateway(mock, backoff_s=0), lambda _c: config)
        verdict = dispatcher.detect_homework("c", "q")
        if verdict.llm_consulted:
            assert 0.60 <= verdict.max_similarity < 0.90


# ── dispatch ────────────────────────────────────────────────────────────────


def test_advisory_raised_outside_homework_mode():
    assistant, _ = configured()
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    decision = assistant.dispatcher.dispatch("cs101", GRAY_CHUNK, [], None)
    assert decision.mode == "general"
    assert decision.homework.is_homework is True
    assert decision.advisory is True


def test_no_advisory_in_homework_mode():
    assistant, _ = configured()
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    decision = assistant.dispatcher.dispatch("cs101", GRAY_CHUNK, [], "homework")
    assert decision.mode == "homework"
    assert decision.advisory is False
    assert decision.retrieval_kind_filter == frozenset({"homework"})


def test_no_advisory_for_unrelated_question():
    assistant, _ = configured()
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    decision = assistant.dispatcher.dispatch("cs101", "zzz9 totally xxx3 unrelated", [], None)
    assert decision.advisory is False
    assert decision.retrieval_kind_filter is None


def test_advisory_soundness_truth_table():
    # advisory <=> is_homework and mode != homework, over every combination
    config = CourseConfig(course_id="c")
    for mode in ("general", "homework", "practice"):
        for score in (0.0, 1.0):  # below low / above high: fixed verdicts
            mock = make_mock()
            dispatcher = Dispatcher(FixedScoreStore(score), Gateway(mock, backoff_s=0), lambda _c: config)
            decision = dispatcher.dispatch("c", "q", [], mode)
            expected = decision.homework.is_homework and mode != "homework"
            assert decision.advisory == expected


def test_selected_documents_drive_mode():
    assistant, _ = configured()
    hw = assistant.upload_document("cs101", "HW", "homework", "homework text here")
    quiz = assistant.upload_document("cs101", "Quiz", "quiz", "quiz text here")
    lecture = assistant.upload_document("cs101", "Notes", "lecture", "notes text here")
    assert assistant.dispatcher.dispatch("cs101", "q", [hw], None).mode == "homework"
    assert assistant.dispatcher.dispatch("cs101", "q", [quiz, lecture], None).mode == "practice"
    assert assistant.dispatcher.dispatch("cs101", "q", [lecture], None).mode == "general"


def test_dispatch_deterministic():
    assistant, _ = configured(rules=[(GRAY_QUESTION, "yes")])
    assistant.upload_document("cs101", "HW 2", "homework", GRAY_CHUNK)
    first = assistant.dispatcher.dispatch("cs101", GRAY_QUESTION, [], None)
    second = assistant.dispatcher.dispatch("cs101", GRAY_QUESTION, [], None)
    assert first == second
