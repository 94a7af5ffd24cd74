"""Cursor-context derivation: golden corpus, totality, connectivity."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparqlcomplete.context import (
    ClausePosition,
    Direction,
    QueryContext,
    UnknownPrefixError,
    Variable,
    connected_individuals,
    derive_context,
    expand_prefixed_name,
    pattern_node_text,
)
from sparqlcomplete.rdf import Iri


def check_corpus_entry(entry: dict) -> None:
    ctx = derive_context(entry["text"], entry["cursor"])
    assert ctx.position.value == entry["position"], entry["name"]
    assert list(ctx.variables) == entry["variables"], entry["name"]
    assert {p: iri.value for p, iri in ctx.prefixes.items()} == entry["prefixes"], entry["name"]
    assert ctx.partial_token == entry["partial_token"], entry["name"]
    assert pattern_node_text(ctx.focus_subject) == entry["focus_subject"], entry["name"]
    if "focus_predicate" in entry:
        assert pattern_node_text(ctx.focus_predicate) == entry["focus_predicate"], entry["name"]
    if "from_graphs" in entry:
        assert [g.value for g in ctx.from_graphs] == entry["from_graphs"], entry["name"]
    if "from_named" in entry:
        assert [g.value for g in ctx.from_named] == entry["from_named"], entry["name"]
    if "in_string" in entry:
        assert ctx.in_string == entry["in_string"], entry["name"]
    if "in_comment" in entry:
        assert ctx.in_comment == entry["in_comment"], entry["name"]


def test_corpus_golden(context_corpus):
    for entry in context_corpus:
        check_corpus_entry(entry)


def test_corpus_covers_every_position(context_corpus):
    seen = {e["position"] for e in context_corpus}
    assert seen == {p.value for p in ClausePosition}


def test_spec_examples():
    ctx = derive_context("SELECT * WHERE { ", 17)
    assert ctx.position is ClausePosition.SUBJECT_POS
    assert ctx.variables == () and ctx.partial_token == ""

    ctx = derive_context("SELECT * WHERE { ?p ", 20)
    assert ctx.position is ClausePosition.PREDICATE_POS
    assert ctx.variables == ("p",)
    assert ctx.focus_subject == Variable("p")


def test_pattern_collection():
    ctx = derive_context("SELECT * WHERE { ?x <http://x/p> <http://x/o> . ?x a <http://x/C> . ")
    assert len(ctx.patterns) == 2
    pats = {(pattern_node_text(p.subject), p.predicate.value, pattern_node_text(p.object)) for p in ctx.patterns}
    assert ("?x", "http://x/p", "<http://x/o>") in pats
    assert ("?x", "http://www.w3.org/1999/02/22-rdf-syntax-ns#type", "<http://x/C>") in pats


def test_unresolved_pname_advances_but_contributes_nothing():
    ctx = derive_context("SELECT * WHERE { ?x undeclared:p ?y . ")
    assert ctx.patterns == ()
    assert ctx.position is ClausePosition.SUBJECT_POS


def test_prefix_stability():
    # context depends only on the text left of the cursor: replacing
    # everything right of it changes nothing
    rng = random.Random(3)
    texts = [
        "SELECT * WHERE { ?x <http://x/p> ?y . ?y ",
        "PREFIX dc: <http://p/> SELECT ?a WHERE { ?a dc:t ",
        'ASK { ?s ?p "v"@en ; ',
    ]
    for text in texts:
        data = text.encode("utf-8")
        for _ in range(30):
            cursor = rng.randrange(0, len(data) + 1)
            suffix = "".join(rng.choice(" ?x.}{<>\"") for _ in range(rng.randrange(0, 8)))
            prefix = data[:cursor].decode("utf-8", "ignore")
            assert derive_context(text, cursor) == derive_context(prefix + suffix, cursor)


@settings(max_examples=400, deadline=None)
@given(st.text(max_size=60), st.integers(min_value=0, max_value=80))
def test_totality_fuzz(text: str, cursor: int):
    ctx = derive_context(text, cursor)
    assert isinstance(ctx, QueryContext)
    for p in ctx.patterns:
        for name in [n.name for n in (p.subject, p.predicate, p.object) if isinstance(n, Variable)]:
            assert name in ctx.variables


def test_expand_prefixed_name():
    ctx = derive_context("PREFIX dc: <http://purl.org/dc/elements/1.1/> SELECT * WHERE { ")
    assert expand_prefixed_name(ctx, "dc:title").value == "http://purl.org/dc/elements/1.1/title"

    ctx = derive_context("PREFIX : <http://e/> SELECT * WHERE { ")
    assert expand_prefixed_name(ctx, ":x").value == "http://e/x"

    with pytest.raises(UnknownPrefixError) as exc:
        expand_prefixed_name(ctx, "nope:x")
    assert exc.value.prefix == "nope"


class TestConnectedIndividuals:
    def ctx_for(self, text: str) -> QueryContext:
        return derive_context(text)

    def test_single_edge_reverse(self):
        ctx = self.ctx_for("SELECT * WHERE { <http://x/i> <http://x/p1> ?v . ")
        got = connected_individuals(ctx, "v", 1)
        assert got == [(Iri("http://x/i"), [(Iri("http://x/p1"), Direction.REVERSE)])]

    def test_disconnected_variable(self):
        ctx = self.ctx_for("SELECT * WHERE { ?a <http://x/p> ?b . ")
        assert connected_individuals(ctx, "c", 2) == []

    def test_two_hop_depth_bound(self):
        ctx = self.ctx_for(
            "SELECT * WHERE { <http://x/i1> <http://x/p1> ?a . ?a <http://x/p2> ?b . "
        )
        # oracle: exhaustive enumeration on this 2-edge graph gives exactly
        # one path of length 2 from ?b to i1 (via ?a), none of length 1.
        got = connected_individuals(ctx, "b", 2)
        assert [(i.value, len(path)) for i, path in got] == [("http://x/i1", 2)]
        assert connected_individuals(ctx, "b", 1) == []

    def test_each_individual_once_with_existing_paths(self):
        ctx = self.ctx_for(
            "SELECT * WHERE { <http://x/i> <http://x/p> ?v . <http://x/i> <http://x/q> ?v . "
            "?v <http://x/r> <http://x/j> . "
        )
        got = connected_individuals(ctx, "v", 2)
        iris = [i.value for i, _ in got]
        assert iris == sorted(set(iris)) == ["http://x/i", "http://x/j"]
        # tie between p and q broken by predicate order
        path_i = dict((i.value, path) for i, path in got)["http://x/i"]
        assert path_i[0][0].value == "http://x/p"
        # every returned path actually exists in the patterns
        edges = set()
        for p in ctx.patterns:
            edges.add((pattern_node_text(p.subject), p.predicate.value, pattern_node_text(p.object)))
        start = "?v"
        for iri, path in got:
            node = start
            for pred, direction in path:
                if direction is Direction.REVERSE:
                    nxt = [s for (s, pv, o) in edges if pv == pred.value and o == node]
                else:
                    nxt = [o for (s, pv, o) in edges if pv == pred.value and s == node]
                assert nxt, (iri.value, path)
                node = nxt[0]
            assert node == f"<{iri.value}>"

    def test_literal_nodes_do_not_yield_individuals(self):
        ctx = self.ctx_for('SELECT * WHERE { ?v <http://x/p> "lit" . ')
        assert connected_individuals(ctx, "v", 2) == []
