"""Command-line interface: ``serve``, ``suggest``, and ``index``.

``serve`` runs the HTTP service from a JSON config file (path from
``--config`` or the SPARQLCOMPLETE_CONFIG environment variable), with a
few flag overrides.  ``suggest`` is the one-shot scripting surface: build
a knowledge base from flags, run one completion request, print the
response JSON.  ``index`` loads ontologies offline and reports the term
count, optionally dumping the index for diffing.

Exit codes: 0 on success (including "no suggestions"), 1 on I/O failure,
2 on bad flags.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .engine import SuggestOptions, load_registry_file
from .index import LangPref
from .knowledge import FetchPolicy, KnowledgeBase, ensure_from_graphs, load_graph
from .rdf import Iri
from .service import ConfigError, ServiceConfig, build_suggest_body, serve_forever

CONFIG_ENV = "SPARQLCOMPLETE_CONFIG"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparqlcomplete",
        description="Context-sensitive completion for SPARQL queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", "-c", help=f"JSON config path (or ${CONFIG_ENV})")
    serve.add_argument("--port", type=int, help="override listen_port")
    serve.add_argument("--ontology", action="append", default=[], help="extra ontology file/URL")
    serve.add_argument("--registry", help="override registry file path")
    serve.add_argument("--lang", action="append", default=[], help="preferred language (repeatable)")
    serve.add_argument("--cache-dir", help="override cache directory")
    serve.add_argument("--allow-network", action="store_true", help="permit outbound HTTP(S)")
    serve.add_argument("--static-dir", help="serve UI assets from this directory at /")

    suggest_p = sub.add_parser("suggest", help="one-shot suggestion request")
    suggest_p.add_argument("query_file", help="file containing the (partial) query; '-' for stdin")
    suggest_p.add_argument("--cursor", type=int, default=None, help="UTF-8 byte offset (default: end)")
    suggest_p.add_argument("--ontology", action="append", default=[], help="ontology file/URL (repeatable)")
    suggest_p.add_argument("--registry", help="registry file")
    suggest_p.add_argument("--lang", action="append", default=[], help="preferred language (repeatable)")
    suggest_p.add_argument("--limit", type=int, default=20)
    suggest_p.add_argument("--no-syntax", action="store_true", help="omit keyword suggestions")
    suggest_p.add_argument("--depth", type=int, default=2, help="variable connectivity depth")
    suggest_p.add_argument("--allow-network", action="store_true")
    suggest_p.add_argument("--cache-dir", help="fetch cache directory")

    index_p = sub.add_parser("index", help="load ontologies offline and report the index")
    index_p.add_argument("--ontology", action="append", default=[], required=True)
    index_p.add_argument("--dump", help="write one line per index entry to this file")
    index_p.add_argument("--allow-network", action="store_true")
    return parser


def _policy(args) -> FetchPolicy:
    return FetchPolicy(
        cache_dir=Path(args.cache_dir) if getattr(args, "cache_dir", None) else None,
        allow_network=args.allow_network,
    )


def _load_kb(ontologies: list[str], policy: FetchPolicy) -> tuple[KnowledgeBase, list[str]]:
    kb = KnowledgeBase()
    failures = []
    for source in ontologies:
        result = load_graph(source, policy)
        if result.status.state != "loaded":
            failures.append(f"{source}: {result.status.reason}")
            continue
        kb = kb.with_graph(result.graph, source=_source_iri(source))
    return kb, failures


def _source_iri(source: str) -> Iri:
    if source.startswith(("http://", "https://", "file://")):
        return Iri(source)
    return Iri(Path(source).absolute().as_uri())


def _cmd_serve(args) -> int:
    path = args.config or os.environ.get(CONFIG_ENV)
    try:
        config = ServiceConfig.from_file(path) if path else ServiceConfig()
        overrides = {}
        if args.port is not None:
            overrides["listen_port"] = args.port
        if args.ontology:
            overrides["ontologies"] = tuple(config.ontologies) + tuple(args.ontology)
        if args.registry:
            overrides["registry_path"] = args.registry
        if args.lang:
            overrides["languages"] = LangPref(tuple(args.lang))
        if args.cache_dir:
            overrides["cache_dir"] = args.cache_dir
        if args.static_dir:
            overrides["static_dir"] = args.static_dir
        if args.allow_network:
            from dataclasses import replace as _replace

            overrides["fetch"] = _replace(config.fetch, allow_network=True)
        if overrides:
            from dataclasses import replace as _replace

            config = _replace(config, **overrides)
        serve_forever(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_suggest(args) -> int:
    try:
        if args.query_file == "-":
            query = sys.stdin.read()
        else:
            query = Path(args.query_file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    policy = _policy(args)
    kb, failures = _load_kb(args.ontology, policy)
    for failure in failures:
        print(f"warning: {failure}", file=sys.stderr)
    if failures and not kb.index.by_iri and args.ontology:
        return 1

    registry = None
    if args.registry:
        try:
            registry = load_registry_file(args.registry)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2

    from .context import derive_context

    data = query.encode("utf-8")
    cursor = len(data) if args.cursor is None else args.cursor
    if cursor < 0 or cursor > len(data):
        print("error: cursor out of range", file=sys.stderr)
        return 2
    ctx = derive_context(query, cursor)
    kb = ensure_from_graphs(ctx, kb, policy)
    opts = SuggestOptions(
        langs=LangPref(tuple(args.lang)) if args.lang else LangPref(("en",)),
        limit=args.limit,
        include_syntax=not args.no_syntax,
        registry_enabled=registry is not None,
        connectivity_depth=args.depth,
    )
    body = build_suggest_body(ctx, kb, registry, opts)
    sys.stdout.write(body.decode("utf-8") + "\n")
    return 0


def _cmd_index(args) -> int:
    policy = _policy(args)
    kb, failures = _load_kb(args.ontology, policy)
    for failure in failures:
        print(f"warning: {failure}", file=sys.stderr)
    if failures:
        return 1
    print(f"terms: {len(kb.index.by_iri)}")
    print(f"entries: {len(kb.index.entries)}")
    if args.dump:
        try:
            with open(args.dump, "w", encoding="utf-8") as fh:
                kb.index.dump(fh)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"dump: {args.dump}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "suggest":
        return _cmd_suggest(args)
    return _cmd_index(args)


if __name__ == "__main__":
    raise SystemExit(main())
