import json

import pytest

from courseaide.cli import main
from courseaide.db import Database
from courseaide.models import load_export
from courseaide.service.storage import ConversationStore

SPEC_YAML = """
semester_start: 2024-01-15
weeks: 12
seed: 7
courses:
  - course_id: css
    total: 100
    users: 10
    zero_rounds: 20
    single_round: 30
    within_3_rounds: 85
    within_10_min: 64
    homework_mode: 53
    practice_mode: 7
    follow_up_emitted: 11
    follow_up_answered: 3
"""

COURSE_YAML = """
course_id: cs101
name: Intro CS
description: Introductory programming.
"""


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.yaml"
    path.write_text(SPEC_YAML, encoding="utf-8")
    return str(path)


def run(*argv) -> int:
    return main(list(argv))


def test_simulate_is_deterministic(tmp_path, spec_file):
    out1 = tmp_path / "a.ndjson"
    out2 = tmp_path / "b.ndjson"
    assert run("simulate", "--spec", spec_file, "--seed", "7", "--out", str(out1)) == 0
    assert run("simulate", "--spec", spec_file, "--seed", "7", "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 100


def test_simulate_inconsistent_spec_exits_4(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(SPEC_YAML.replace("within_3_rounds: 85", "within_3_rounds: 10"), encoding="utf-8")
    code = run("simulate", "--spec", str(bad), "--out", str(tmp_path / "x.ndjson"))
    assert code == 4
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "invalid"


def test_report_on_empty_export(tmp_path, capsys):
    export = tmp_path / "empty.ndjson"
    export.write_text("", encoding="utf-8")
    out_dir = tmp_path / "report"
    assert run("report", "--export", str(export), "--out", str(out_dir)) == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["empty"] is True
    assert report["conversations"] == 0


def test_simulate_report_round_trip(tmp_path, spec_file):
    export = tmp_path / "logs.ndjson"
    out_dir = tmp_path / "report"
    assert run("simulate", "--spec", spec_file, "--out", str(export)) == 0
    assert run("report", "--export", str(export), "--out", str(out_dir)) == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["conversations"] == 100
    assert report["within_10_min_ratio"] == 64 / 100
    assert report["no_question_ratio"] == 20 / 100
    assert report["mode_shares"]["homework"] == 53 / 100
    for name in ["counts.csv", "durations.csv", "rounds.csv", "weekly.csv", "hourly.csv",
                 "modes.csv", "rounds_by_mode.csv", "follow_up.csv"]:
        assert (out_dir / name).exists(), name


def test_report_with_annotations_renders_annotation_tables(tmp_path, spec_file):
    export = tmp_path / "logs.ndjson"
    run("simulate", "--spec", spec_file, "--out", str(export))
    csv_path = tmp_path / "ann.csv"
    csv_path.write_text(
        "conversation_id,question_index,course_id,mode,bloom,correctness,grammatical_error,"
        "polite,off_topic,has_example,llm_question_present,llm_question_answered,annotator_id\n"
        "css-c00020,0,css,general,Apply,correct_helpful,false,false,false,false,true,false,a1\n"
        "css-c00021,0,css,homework,Analyze,unhelpful,true,false,false,true,false,false,a1\n",
        encoding="utf-8",
    )
    out_dir = tmp_path / "report"
    assert run(
        "report", "--export", str(export), "--out", str(out_dir), "--annotations", str(csv_path)
    ) == 0
    for name in ["linguistic.csv", "bloom_by_course.csv", "bloom_by_mode.csv",
                 "correctness.csv", "teaching_style.csv", "bloom_follow_up.csv"]:
        assert (out_dir / name).exists(), name
    correctness = (out_dir / "correctness.csv").read_text().splitlines()
    assert "correct_helpful,0.500000" in correctness


def test_sample_subcommand(tmp_path, spec_file):
    export = tmp_path / "logs.ndjson"
    run("simulate", "--spec", spec_file, "--out", str(export))
    out = tmp_path / "sample.json"
    assert run("sample", "--export", str(export), "--n", "5", "--seed", "3", "--out", str(out)) == 0
    data = json.loads(out.read_text())
    assert len(data["samples"]["all"]["ids"]) == 5
    assert data["samples"]["all"]["shortfall"] is False

    out2 = tmp_path / "sample2.json"
    run("sample", "--export", str(export), "--n", "5", "--seed", "3", "--out", str(out2))
    assert out.read_text() == out2.read_text()


def test_sample_per_course_with_predicate_shortfall(tmp_path, spec_file):
    export = tmp_path / "logs.ndjson"
    run("simulate", "--spec", spec_file, "--out", str(export))
    out = tmp_path / "sample.json"
    assert run(
        "sample", "--export", str(export), "--n", "50", "--seed", "1",
        "--predicate", "has-llm-question", "--per-course", "--out", str(out),
    ) == 0
    data = json.loads(out.read_text())
    group = data["samples"]["css"]
    assert group["shortfall"] is True
    assert len(group["ids"]) == 11  # only the emitted conversations are eligible


def test_ingest_manifest_and_missing_file(tmp_path, capsys):
    course = tmp_path / "course.yaml"
    course.write_text(COURSE_YAML, encoding="utf-8")
    doc = tmp_path / "week1.md"
    doc.write_text("lecture notes " * 50, encoding="utf-8")
    manifest = tmp_path / "manifest.yaml"
    manifest.write_text(
        f"documents:\n  - title: Week 1\n    kind: lecture\n    path: {doc}\n",
        encoding="utf-8",
    )
    db_path = str(tmp_path / "data.sqlite")
    assert run("ingest", "--config", str(course), "--manifest", str(manifest), "--db", db_path) == 0
    out = capsys.readouterr().out
    assert '"ingested": 1' in out

    # a manifest with a missing file ingests nothing
    manifest.write_text(
        "documents:\n"
        f"  - title: Week 1\n    kind: lecture\n    path: {doc}\n"
        f"  - title: Ghost\n    kind: lecture\n    path: {tmp_path}/missing.md\n",
        encoding="utf-8",
    )
    db2 = str(tmp_path / "data2.sqlite")
    code = run("ingest", "--config", str(course), "--manifest", str(manifest), "--db", db2)
    assert code == 3
    from courseaide.knowledge.embedding import HashEmbedder
    from courseaide.knowledge.store import KnowledgeStore

    store = KnowledgeStore(Database(db2), HashEmbedder())
    assert store.documents("cs101") == [] or not store.has_course("cs101")


def test_annotate_import(tmp_path, capsys):
    csv_path = tmp_path / "ann.csv"
    csv_path.write_text(
        "conversation_id,question_index,course_id,mode,bloom,correctness,grammatical_error,"
        "polite,off_topic,has_example,llm_question_present,llm_question_answered,annotator_id\n"
        "c1,0,css,general,Apply,correct_helpful,false,false,false,false,true,true,a1\n",
        encoding="utf-8",
    )
    db_path = str(tmp_path / "ann.sqlite")
    assert run("annotate-import", "--in", str(csv_path), "--db", db_path) == 0
    assert ConversationStore(Database(db_path)).annotation_count() == 1

    bad = tmp_path / "bad.csv"
    bad.write_text(
        csv_path.read_text().replace("true,true,a1", "false,true,a1"), encoding="utf-8"
    )
    assert run("annotate-import", "--in", str(bad), "--db", db_path) == 4


def test_export_subcommand_round_trip(tmp_path, spec_file):
    export1 = tmp_path / "logs.ndjson"
    run("simulate", "--spec", spec_file, "--out", str(export1))

    db_path = str(tmp_path / "conv.sqlite")
    store = ConversationStore(Database(db_path))
    store.import_conversations(load_export(str(export1)))

    export2 = tmp_path / "again.ndjson"
    assert run("export", "--db", db_path, "--course", "css", "--out", str(export2)) == 0
    assert export1.read_bytes() == export2.read_bytes()


def test_missing_input_exit_code(tmp_path):
    assert run("report", "--export", str(tmp_path / "nope.ndjson"), "--out", str(tmp_path / "o")) == 3


def test_serve_port_in_use_exit_code(tmp_path, capfd):
    import socket

    service = tmp_path / "service.yaml"
    service.write_text(
        'db: ":memory:"\nembedding: {provider: hash}\ngateway: {provider: scripted}\ncourses: []\n',
        encoding="utf-8",
    )
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    port = sock.getsockname()[1]
    try:
        code = run("serve", "--config", str(service), "--port", str(port))
    finally:
        sock.close()
    assert code == 5
    # last stderr line is the machine-parseable error (uvicorn logs come first)
    err = json.loads(capfd.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "bind_failed"


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 2
