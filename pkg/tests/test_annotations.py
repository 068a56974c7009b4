import io

import pytest

from courseaide.analytics.annotations import (
    CSV_HEADER,
    Annotation,
    AnnotationValidationError,
    aggregate_annotations,
    read_annotations_csv,
    write_annotations_csv,
)


def make_annotation(**overrides) -> Annotation:
    base = dict(
        conversation_id="c1",
        question_index=0,
        course_id="css",
        mode="general",
        bloom="Understand",
        correctness="correct_helpful",
        grammatical_error=False,
        polite=False,
        off_topic=False,
        has_example=False,
        llm_question_present=False,
        llm_question_answered=False,
        annotator_id="ann1",
    )
    base.update(overrides)
    return Annotation(**base)


def as_csv(annotations) -> io.StringIO:
    buf = io.StringIO()
    write_annotations_csv(annotations, buf)
    return io.StringIO(buf.getvalue())


def test_csv_round_trip():
    original = [
        make_annotation(),
        make_annotation(conversation_id="c2", bloom="Create", llm_question_present=True,
                        llm_question_answered=True),
    ]
    assert read_annotations_csv(as_csv(original)) == original


def test_answered_without_present_rejected():
    bad = make_annotation(llm_question_present=False, llm_question_answered=False)
    rows = as_csv([bad]).getvalue().replace("false,false,ann1", "false,true,ann1")
    with pytest.raises(AnnotationValidationError, match="row 2"):
        read_annotations_csv(io.StringIO(rows))


def test_unknown_bloom_level_rejected():
    rows = as_csv([make_annotation()]).getvalue().replace("Understand", "Memorize")
    with pytest.raises(AnnotationValidationError):
        read_annotations_csv(io.StringIO(rows))


def test_unknown_correctness_rejected():
    rows = as_csv([make_annotation()]).getvalue().replace("correct_helpful", "fine")
    with pytest.raises(AnnotationValidationError):
        read_annotations_csv(io.StringIO(rows))


def test_bad_boolean_rejected_with_row_number():
    rows = as_csv([make_annotation(), make_annotation(conversation_id="c2")])
    text = rows.getvalue().replace("c2,0,css,general", "c2,0,css,general").splitlines()
    text[2] = text[2].replace("false", "perhaps", 1)
    with pytest.raises(AnnotationValidationError, match="row 3"):
        read_annotations_csv(io.StringIO("\n".join(text) + "\n"))


def test_header_mismatch_rejected():
    with pytest.raises(AnnotationValidationError, match="header"):
        read_annotations_csv(io.StringIO("a,b,c\n1,2,3\n"))
    assert CSV_HEADER[0] == "conversation_id"


def test_aggregation_shares_sum_to_one():
    annotations = (
        [make_annotation(bloom="Apply") for _ in range(3)]
        + [make_annotation(bloom="Analyze", mode="homework") for _ in range(5)]
        + [make_annotation(bloom="Create", course_id="os", correctness="unhelpful") for _ in range(2)]
    )
    tables = aggregate_annotations(annotations)
    for dist in list(tables.bloom_by_course.values()) + list(tables.bloom_by_mode.values()):
        assert abs(sum(dist.values()) - 1.0) <= 1e-9
    assert abs(sum(tables.correctness_shares.values()) - 1.0) <= 1e-9
    assert tables.bloom_by_course["css"]["Apply"] == 3 / 8
    assert tables.bloom_by_mode["homework"]["Analyze"] == 1.0


def test_grammatical_error_share_example():
    annotations = [make_annotation(grammatical_error=(i < 31)) for i in range(200)]
    tables = aggregate_annotations(annotations)
    assert tables.linguistic_shares["grammatical_error"] == pytest.approx(0.155)


def test_single_bloom_level_dominates():
    annotations = [make_annotation(bloom="Remember") for _ in range(4)]
    dist = aggregate_annotations(annotations).bloom_by_course["css"]
    assert dist["Remember"] == 1.0
    assert all(v == 0.0 for level, v in dist.items() if level != "Remember")


def test_follow_up_shares():
    annotations = (
        [make_annotation(llm_question_present=True, llm_question_answered=True) for _ in range(3)]
        + [make_annotation(llm_question_present=True) for _ in range(7)]
        + [make_annotation() for _ in range(10)]
    )
    tables = aggregate_annotations(annotations)
    assert tables.follow_up_present_share == 0.5
    assert tables.follow_up_answered_share == 0.3


def test_empty_aggregation():
    tables = aggregate_annotations([])
    assert tables.total == 0
    assert tables.bloom_by_course == {}
    assert tables.follow_up_answered_share is None


def test_example_share():
    annotations = [make_annotation(has_example=(i % 25 == 0)) for i in range(100)]
    assert aggregate_annotations(annotations).example_share == 0.04
