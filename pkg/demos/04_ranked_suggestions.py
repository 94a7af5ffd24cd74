"""End-to-end suggestions: context rules, preference, registry filtering.

Run:  python3 demos/04_ranked_suggestions.py
"""

from pathlib import Path

from sparqlcomplete import (
    KnowledgeBase,
    LangPref,
    SuggestOptions,
    apply_suggestion,
    derive_context,
    load_registry_file,
    parse_turtle,
    suggest,
)

DATA = Path(__file__).parent.parent / "tests" / "data"

kb = KnowledgeBase().with_graph(parse_turtle((DATA / "bilingual.ttl").read_text(encoding="utf-8")))
registry = load_registry_file(DATA / "registry.tsv")


def show(text: str, title: str, **opt_kwargs) -> None:
    ctx = derive_context(text)
    opts = SuggestOptions(limit=8, registry_enabled=True, **opt_kwargs)
    print(f"-- {title}")
    print(f"   {text!r}")
    print(f"   position={ctx.position.value}")
    for s in suggest(ctx, kb, registry, opts):
        origin = s.provenance.type.lower()
        print(f"   {s.insert_text:42s} {s.display_label!r:28s} boost={s.score.context_boost} [{origin}]")
    print()


# 1. Keywords while the query skeleton is being typed.
show("SELE", "prologue keyword completion")

# 2. The clause names an individual: its known properties come first.
show("SELECT * WHERE { <http://lab.example/data/brca1> ", "focus individual ranks its properties first")

# 3. A variable connected to that individual inherits the preference.
show(
    "SELECT * WHERE { <http://lab.example/data/repair> "
    "<http://semanticscience.org/resource/SIO_000253> ?who . ?who ",
    "connectivity: ?who is linked to a known individual",
)

# 4. German-first ranking of the same candidates.
show("SELECT * WHERE { ?s ha", "typing 'ha' with German preferred", langs=LangPref(("de",)))

# 5. Accepting a suggestion splices it and the position advances.
text = "SELECT * WHERE { ?s "
ctx = derive_context(text)
first = suggest(ctx, kb, registry, SuggestOptions(limit=1, include_syntax=False))[0]
new_text, new_cursor = apply_suggestion(text, len(text.encode()), ctx, first)
print("-- accepting the top suggestion")
print(f"   before: {text!r}")
print(f"   after:  {new_text!r}")
print(f"   next position: {derive_context(new_text, new_cursor).position.value}")
