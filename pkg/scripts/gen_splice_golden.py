"""Regenerate frontend/test/fixtures/splice_cases.json from the core.

The frontend's splice implementation must reproduce the core's
apply_suggestion byte semantics exactly; these cases are the contract.

Run from the repo root:  python3 scripts/gen_splice_golden.py
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).parent.parent

import sys

sys.path.insert(0, str(ROOT / "src"))

from sparqlcomplete import (  # noqa: E402
    KnowledgeBase,
    SuggestOptions,
    apply_suggestion,
    derive_context,
    load_registry_file,
    parse_turtle,
    suggest,
)

DATA = ROOT / "tests" / "data"
OUT = ROOT / "frontend" / "test" / "fixtures" / "splice_cases.json"


def main() -> None:
    kb = KnowledgeBase().with_graph(
        parse_turtle((DATA / "bilingual.ttl").read_text(encoding="utf-8"))
    )
    registry = load_registry_file(DATA / "registry.tsv")
    corpus = json.loads((DATA / "context_corpus.json").read_text(encoding="utf-8"))

    cases = []
    for entry in corpus:
        text = entry["text"]
        data = text.encode("utf-8")
        cursor = entry["cursor"] if entry["cursor"] is not None else len(data)
        ctx = derive_context(text, cursor)
        got = suggest(ctx, kb, registry, SuggestOptions(limit=4, registry_enabled=True))
        for s in got[:3]:
            new_text, new_cursor = apply_suggestion(text, cursor, ctx, s)
            cases.append(
                {
                    "name": f"{entry['name']}::{s.insert_text}",
                    "text": text,
                    "cursor": cursor,
                    "partial_token": ctx.partial_token,
                    "insert_text": s.insert_text,
                    "new_text": new_text,
                    "new_cursor": new_cursor,
                }
            )
    # multibyte coverage: é (2 bytes) and a CJK char (3 bytes) around the splice
    for text, partial, insert in [
        ("SELECT * WHERE { ?x <http://x/é> gen", "gen", "<http://x/Gen>"),
        ("SELECT * WHERE { ?す ", "", "<http://x/p>"),
        ("PREFIX é: <http://x/> SELECT * WHERE { ?a é:", "é:", "é:p"),
    ]:
        cursor = len(text.encode("utf-8"))
        ctx = derive_context(text, cursor)
        from sparqlcomplete.engine import ScoreTuple, Suggestion
        from sparqlcomplete.index import TermKind

        s = Suggestion(
            insert_text=insert,
            display_label=insert,
            kind=TermKind.PROPERTY,
            score=ScoreTuple(2, 0, 0, insert, ""),
        )
        new_text, new_cursor = apply_suggestion(text, cursor, ctx, s)
        cases.append(
            {
                "name": f"multibyte::{insert}",
                "text": text,
                "cursor": cursor,
                "partial_token": ctx.partial_token,
                "insert_text": insert,
                "new_text": new_text,
                "new_cursor": new_cursor,
            }
        )

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(cases, ensure_ascii=False, indent=1), encoding="utf-8")
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
