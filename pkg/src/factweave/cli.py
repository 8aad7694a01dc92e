"""Command-line interface: generate stories offline, serve the API, validate documents."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .model import deserialize_story, serialize_story
from .pipeline import PipelineConfig, generate_story
from .validation import validate_story_document


def _add_generate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("generate", help="generate a story document for a query")
    p.add_argument("--query", required=True)
    p.add_argument("--corpus", type=Path, help="offline article corpus directory (mock mode)")
    p.add_argument("--mode", choices=["live", "mock"], default="mock")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-articles", type=int, default=15)
    p.add_argument("--fixtures", type=Path, help="fixture directory for mock search/pages/llm")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--debug-dir", type=Path, help="dump per-stage artifacts here")


def _add_serve(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", type=Path, default=Path("data"))
    p.add_argument("--static-dir", type=Path, help="frontend bundle to serve at /")
    p.add_argument("--corpus", type=Path, help="offline article corpus directory (mock mode)")
    p.add_argument("--mode", choices=["live", "mock"], default="mock")
    p.add_argument("--fixtures", type=Path, help="fixture directory for mock search/pages/llm")
    p.add_argument("--seed", type=int, default=0)


def _add_validate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("validate", help="check a story document's invariants")
    p.add_argument("story", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factweave", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_serve(sub)
    _add_validate(sub)
    return parser


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        mode=args.mode,
        corpus_dir=args.corpus,
        fixture_dir=args.fixtures,
        seed=args.seed,
        max_articles=getattr(args, "max_articles", 15),
        debug_dir=getattr(args, "debug_dir", None),
    )


def cmd_generate(args: argparse.Namespace) -> int:
    doc = generate_story(args.query, _pipeline_config(args))
    serialized = serialize_story(doc)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(serialized, encoding="utf-8")
        print(f"wrote {args.out} ({doc.stats.total_facts} facts, {doc.stats.total_clusters} clusters)")
    else:
        sys.stdout.write(serialized)
    return 0

def cmd_serve(args: argparse.Namespace) -> int:
    from .jobs import JobManager
    from .service import serve_forever
    from .storage import StoryStore

    store = StoryStore(args.data_dir)
    jobs = JobManager(store, _pipeline_config(args))
    serve_forever(jobs, args.host, args.port, args.static_dir)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    doc = deserialize_story(args.story.read_text(encoding="utf-8"))
    violations = validate_story_document(doc)
    for v in violations:
        print(v)
    if not violations:
        print("ok: no violations")
    return min(len(violations), 125)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "generate":
        return cmd_generate(args)
    if args.command == "serve":
        return cmd_serve(args)
    return cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
