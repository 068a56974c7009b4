"""Operator command line.

Subcommands: ingest (batch-load a document manifest), serve (run the HTTP
service), simulate (write synthetic logs), report (render report JSON/CSV
from an export), sample (draw annotation samples), annotate-import (validate
and load annotation CSV), export (dump conversations from a database).

Everything is scriptable: inputs come from flags and files, errors are a
single machine-parseable JSON line on stderr, and exit codes are stable:
0 success, 2 usage, 3 missing/malformed input, 4 invalid config or spec,
5 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date, datetime, timezone

import yaml

from .analytics.annotations import AnnotationValidationError, load_annotations
from .analytics.figures import render_report_files
from .analytics.sampling import has_llm_question, sample_for_annotation
from .analytics.synthetic import InconsistentSpecError, SimulationSpec, generate_synthetic_logs
from .config import CourseConfig, InvalidConfigError
from .db import Database
from .gateway import make_gateway
from .knowledge.embedding import make_embedder
from .knowledge.store import IngestionError
from .models import load_export, parse_ts, write_export
from .service.pipeline import CourseAssistant
from .service.storage import ConversationStore

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_INVALID = 4
EXIT_RUNTIME = 5


class CliError(Exception):
    def __init__(self, code: int, name: str, message: str):
        super().__init__(message)
        self.code = code
        self.name = name


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except CliError as exc:
        _fail(exc.name, str(exc))
        return exc.code
    except (InvalidConfigError, InconsistentSpecError, AnnotationValidationError) as exc:
        _fail("invalid", str(exc))
        return EXIT_INVALID
    except (FileNotFoundError, IsADirectoryError) as exc:
        _fail("missing_input", str(exc))
        return EXIT_INPUT
    except (ValueError, IngestionError) as exc:
        _fail("bad_input", str(exc))
        return EXIT_INPUT
    except OSError as exc:
        _fail("runtime", str(exc))
        return EXIT_RUNTIME


def _fail(name: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": name, "message": message}) + "\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="courseaide")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="batch-ingest a document manifest into a course")
    p.add_argument("--config", required=True, help="course config YAML")
    p.add_argument("--manifest", required=True, help="manifest YAML: one {title, kind, path} per document")
    p.add_argument("--db", required=True, help="sqlite database path")
    p.add_argument("--embedding", help="embedding provider config YAML (default: local hash embedder)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="service config YAML")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="write a synthetic conversation export")
    p.add_argument("--spec", required=True, help="simulation spec YAML/JSON")
    p.add_argument("--seed", type=int, default=None, help="overrides the spec seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="render report JSON and figure CSVs from an export")
    p.add_argument("--export", required=True, dest="export_path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--annotations", help="annotation CSV to include")
    p.add_argument("--semester-start", help="YYYY-MM-DD (default: first conversation date)")
    p.add_argument("--tz-offset", type=float, default=0.0, help="hours added to UTC for local time")
    p.add_argument("--developers", action="store_true", help="include developer conversations")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sample", help="draw a seeded annotation sample from an export")
    p.add_argument("--export", required=True, dest="export_path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--predicate", choices=["any", "has-llm-question"], default="any")
    p.add_argument("--per-course", action="store_true", help="sample n per course instead of overall")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("annotate-import", help="validate and load an annotation CSV")
    p.add_argument("--in", required=True, dest="in_path")
    p.add_argument("--db", required=True)
    p.set_defaults(func=cmd_annotate_import)

    p = sub.add_parser("export", help="dump conversations from a database")
    p.add_argument("--db", required=True)
    p.add_argument("--course", help="restrict to one course")
    p.add_argument("--from", dest="from_ts", help="ISO timestamp lower bound")
    p.add_argument("--to", dest="to_ts", help="ISO timestamp upper bound (exclusive)")
    p.add_argument("--developers", action="store_true", help="include developer conversations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


# ── subcommands ────────────────────────────────────────────────────────────


def cmd_ingest(args) -> int:
    config = CourseConfig.load(args.config)
    manifest = _load_manifest(args.manifest)

    # validate everything before touching the store: no partial ingestion
    documents = []
    for entry in manifest:
        try:
            title, kind, path = entry["title"], entry["kind"], entry["path"]
        except (KeyError, TypeError) as exc:
            raise CliError(EXIT_INPUT, "bad_manifest", f"manifest entry {entry!r}: {exc}") from exc
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(EXIT_INPUT, "missing_input", f"cannot read {path}: {exc}") from exc
        if not text:
            raise CliError(EXIT_INPUT, "bad_manifest", f"{path} is empty")
        documents.append((title, kind, text, path))

    embedder = make_embedder(_load_yaml(args.embedding) if args.embedding else {})
    gateway = make_gateway({"provider": "scripted"})
    assistant = CourseAssistant(Database(args.db), embedder, gateway)
    assistant.update_course_config(config.course_id, config.to_dict())
    for title, kind, text, path in documents:
        doc_id = assistant.upload_document(config.course_id, title, kind, text, source_uri=path)
        chunks = assistant.knowledge.chunk_count(doc_id)
        print(json.dumps({"document_id": doc_id, "title": title, "kind": kind, "chunks": chunks}))
    print(json.dumps({"ingested": len(documents), "course_id": config.course_id}))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    service_config = _load_yaml(args.config)
    embedder = make_embedder(service_config.get("embedding", {}))
    gateway = make_gateway(service_config.get("gateway", {"provider": "scripted"}))
    assistant = CourseAssistant(Database(service_config.get("db", ":memory:")), embedder, gateway)
    for course_path in service_config.get("courses", []):
        course = CourseConfig.load(course_path)
        assistant.update_course_config(course.course_id, course.to_dict())
    app = create_app(assistant)

    ui_dir = service_config.get("ui_dir")
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    host = args.host or service_config.get("host", "127.0.0.1")
    port = args.port if args.port is not None else int(service_config.get("port", 8000))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise CliError(EXIT_RUNTIME, "bind_failed", f"cannot bind {host}:{port}: {exc}") from exc
    except SystemExit as exc:  # uvicorn exits on startup failures such as a busy port
        if exc.code not in (0, None):
            raise CliError(
                EXIT_RUNTIME, "bind_failed", f"server failed to start on {host}:{port}"
            ) from exc
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = SimulationSpec.load(args.spec)
    conversations = generate_synthetic_logs(spec, seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        count = write_export(conversations, fh)
    print(json.dumps({"written": count, "out": args.out}))
    return EXIT_OK


def cmd_report(args) -> int:
    conversations = load_export(args.export_path)
    if args.semester_start:
        semester_start = date.fromisoformat(args.semester_start)
    elif conversations:
        semester_start = min(c.started_at for c in conversations).date()
    else:
        semester_start = datetime.now(timezone.utc).date()
    annotations = load_annotations(args.annotations) if args.annotations else None
    written = render_report_files(
        conversations,
        semester_start,
        args.out,
        tz_offset_hours=args.tz_offset,
        exclude_developers=not args.developers,
        annotations=annotations,
    )
    print(json.dumps({"files": len(written), "out": args.out}))
    return EXIT_OK


def cmd_sample(args) -> int:
    conversations = load_export(args.export_path)
    predicate = has_llm_question if args.predicate == "has-llm-question" else None
    samples = {}
    if args.per_course:
        for course_id in sorted({c.course_id for c in conversations}):
            subset = [c for c in conversations if c.course_id == course_id]
            result = sample_for_annotation(subset, args.n, args.seed, predicate)
            samples[course_id] = {"ids": result.ids, "shortfall": result.shortfall}
    else:
        result = sample_for_annotation(conversations, args.n, args.seed, predicate)
        samples["all"] = {"ids": result.ids, "shortfall": result.shortfall}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump({"seed": args.seed, "n": args.n, "samples": samples}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps({"out": args.out, "groups": len(samples)}))
    return EXIT_OK


def cmd_annotate_import(args) -> int:
    annotations = load_annotations(args.in_path)
    store = ConversationStore(Database(args.db))
    count = store.insert_annotations(annotations)
    print(json.dumps({"imported": count, "db": args.db}))
    return EXIT_OK


def cmd_export(args) -> int:
    store = ConversationStore(Database(args.db))
    course_ids = [args.course] if args.course else _course_ids(store)
    conversations = []
    for course_id in course_ids:
        conversations.extend(
            store.conversations_for_course(
                course_id,
                from_ts=parse_ts(args.from_ts) if args.from_ts else None,
                to_ts=parse_ts(args.to_ts) if args.to_ts else None,
                include_developers=args.developers,
            )
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        count = write_export(conversations, fh)
    print(json.dumps({"written": count, "out": args.out}))
    return EXIT_OK


# ── helpers ────────────────────────────────────────────────────────────────


def _load_yaml(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CliError(EXIT_INPUT, "bad_input", f"{path}: expected a mapping")
    return data


def _load_manifest(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if isinstance(data, dict):
        data = data.get("documents")
    if not isinstance(data, list):
        raise CliError(EXIT_INPUT, "bad_manifest", f"{path}: expected a list of documents")
    return data


def _course_ids(store: ConversationStore) -> list[str]:
    with store.db.read() as conn:
        rows = conn.execute("SELECT DISTINCT course_id FROM conversations ORDER BY course_id")
        return [r["course_id"] for r in rows]


if __name__ == "__main__":
    sys.exit(main())
