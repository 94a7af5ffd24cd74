"""Label indexing: one ontology, queried in two languages.

Opaque identifiers (SIO_000253) stay reachable by typing the identifier,
but human-language labels always rank first.
Run:  python3 demos/03_multilingual_index.py
"""

from pathlib import Path

from sparqlcomplete import (
    KnowledgeBase,
    LangPref,
    TermKind,
    normalize_label,
    parse_turtle,
    prefix_search,
)

FIXTURE = Path(__file__).parent.parent / "tests" / "data" / "bilingual.ttl"

kb = KnowledgeBase().with_graph(parse_turtle(FIXTURE.read_text(encoding="utf-8")))
index = kb.index
print(f"indexed {len(index.by_iri)} terms, {len(index.entries)} searchable entries\n")

KINDS = frozenset({TermKind.PROPERTY, TermKind.ONT_CLASS, TermKind.INDIVIDUAL})


def show(prefix: str, langs: list[str]) -> None:
    print(f"prefix {prefix!r} with languages {langs}:")
    for hit in prefix_search(index, prefix, LangPref(tuple(langs)), KINDS, 5):
        e = hit.entry
        print(
            f"  [{hit.tier}] {e.matched_text!r:24s} lang={e.lang or '-':4s}"
            f" {e.field.value:9s} {e.term.iri.local_name}"
        )
    print()


# Same prefix, different preferred language, symmetric results.
show("ha", ["en"])
show("ha", ["de"])

# Normalization: case, accents, and ß all fold before matching.
print(f"normalize('Größe')  = {normalize_label('Größe')!r}")
print(f"normalize('CAFÉ  x') = {normalize_label('CAFÉ  x')!r}\n")

# Typing the opaque identifier itself still works (local-name tier, last).
show("sio_0002", ["en"])
