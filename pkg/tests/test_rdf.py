"""Data model and parser tests for the RDF layer."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparqlcomplete.rdf import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    ParseDiagnostic,
    ParseError,
    Triple,
    UnsupportedConstructError,
    canonicalize_blank_labels,
    graph_merge,
    graphs_equal_up_to_blanks,
    parse_ntriples,
    parse_turtle,
    render_ntriples,
    render_turtle,
)

DC_TITLE = Iri("http://purl.org/dc/elements/1.1/title")
RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")


class TestNodes:
    def test_iri_rejects_whitespace_and_brackets(self):
        for bad in ("", "http://x/a b", "http://x/<a>", "http://x/\n"):
            with pytest.raises(ValueError):
                Iri(bad)

    def test_iri_equality_is_exact(self):
        assert Iri("http://x/A") != Iri("http://x/a")

    def test_literal_lang_lowercased_and_validated(self):
        assert Literal("hi", lang="EN").lang == "en"
        assert Literal("hi", lang="zh-Hans").lang == "zh-hans"
        with pytest.raises(ValueError):
            Literal("hi", lang="not a tag")
        with pytest.raises(ValueError):
            Literal("hi", lang="en", datatype=Iri("http://x/dt"))

    def test_triple_constraints(self):
        with pytest.raises(ValueError):
            Triple(Literal("x"), DC_TITLE, Literal("y"))  # type: ignore[arg-type]

    def test_local_name(self):
        assert Iri("http://semanticscience.org/resource/SIO_000253").local_name == "SIO_000253"
        assert Iri("http://x/onto#Thing").local_name == "Thing"


class TestNTriples:
    def test_language_tag_lowercased(self):
        g = parse_ntriples('<http://x/a> <http://x/p> "hi"@EN .')
        assert len(g) == 1
        (t,) = g.triples
        assert t.object == Literal("hi", lang="en")

    def test_empty_text(self):
        assert len(parse_ntriples("")) == 0

    def test_lenient_skips_bad_lines_with_diagnostics(self):
        # Hand count: lines 1 and 3 are well-formed, line 2 is not.
        text = (
            "<http://x/a> <http://x/p> <http://x/b> .\n"
            "<http://x/a> <http://x/p> missing-brackets .\n"
            '<http://x/a> <http://x/q> "v" .\n'
        )
        diags: list[ParseDiagnostic] = []
        g = parse_ntriples(text, diagnostics=diags)
        assert len(g) == 2
        assert len(diags) == 1 and diags[0].line == 2

    def test_strict_mode_raises_with_line_number(self):
        with pytest.raises(ParseError) as exc:
            parse_ntriples("good line is not a triple\n", strict=True)
        assert exc.value.line == 1

    def test_escapes_and_datatype(self):
        g = parse_ntriples(
            '<http://x/a> <http://x/p> "tab\\there\\n"^^<http://www.w3.org/2001/XMLSchema#string> .'
        )
        (t,) = g.triples
        assert t.object.lexical == "tab\there\n"
        assert t.object.datatype.value.endswith("#string")

    def test_comments_and_bom(self):
        g = parse_ntriples("﻿# comment only\n<http://x/a> <http://x/p> _:b1 .\n")
        assert len(g) == 1

    def test_duplicate_lines_collapse(self):
        line = "<http://x/a> <http://x/p> <http://x/b> ."
        g = parse_ntriples(line + "\n" + line)
        assert len(g) == 1


class TestTurtle:
    def test_prefix_expansion_dc_title(self):
        g = parse_turtle('@prefix dc: <http://purl.org/dc/elements/1.1/> . <http://x/a> dc:title "T" .')
        (t,) = g.triples
        assert t.predicate == DC_TITLE

    def test_a_expands_to_rdf_type(self):
        g = parse_turtle("<http://x/a> a <http://x/C> .")
        (t,) = g.triples
        assert t.predicate == RDF_TYPE

    def test_semicolon_comma_match_hand_expanded_ntriples(self):
        turtle = (
            "@prefix ex: <http://x/> .\n"
            'ex:a ex:p ex:b , ex:c ;\n'
            '     ex:q "v"@de-AT .\n'
        )
        # Hand expansion of the abbreviations above:
        ntriples = (
            "<http://x/a> <http://x/p> <http://x/b> .\n"
            "<http://x/a> <http://x/p> <http://x/c> .\n"
            '<http://x/a> <http://x/q> "v"@de-at .\n'
        )
        assert parse_turtle(turtle).triples == parse_ntriples(ntriples).triples

    def test_sparql_style_directives_and_base(self):
        g = parse_turtle("PREFIX ex: <http://x/>\nBASE <http://base/>\nex:a ex:p <rel> .")
        (t,) = g.triples
        assert t.object == Iri("http://base/rel")

    def test_base_argument(self):
        g = parse_turtle("<s> <p> <o> .", base=Iri("http://b/"))
        (t,) = g.triples
        assert t.subject == Iri("http://b/s")

    def test_numeric_and_boolean_shorthand(self):
        g = parse_turtle("<http://x/a> <http://x/p> 42 ; <http://x/q> true ; <http://x/r> 3.5 .")
        objs = {t.object.lexical: t.object.datatype.value for t in g.triples}
        assert objs["42"].endswith("integer")
        assert objs["true"].endswith("boolean")
        assert objs["3.5"].endswith("decimal")

    def test_long_strings_and_blank_nodes(self):
        g = parse_turtle('<http://x/a> <http://x/p> """line1\nline2""" ; <http://x/q> _:b .')
        lexicals = {t.object.lexical for t in g.triples if isinstance(t.object, Literal)}
        assert "line1\nline2" in lexicals
        assert BlankNode("b") in {t.object for t in g.triples}

    def test_unsupported_constructs_are_named(self):
        with pytest.raises(UnsupportedConstructError) as exc:
            parse_turtle("<http://x/a> <http://x/p> (1 2) .")
        assert exc.value.construct == "collection"
        with pytest.raises(UnsupportedConstructError) as exc:
            parse_turtle("<http://x/a> <http://x/p> [ <http://x/q> 1 ] .")
        assert exc.value.construct == "blank node property list"

    def test_undeclared_prefix_errors(self):
        with pytest.raises(ParseError) as exc:
            parse_turtle("nope:a <http://x/p> 1 .")
        assert "nope" in str(exc.value)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            parse_turtle("<http://x/a> <http://x/p>\n@@@ .")
        assert exc.value.line == 2


class TestMerge:
    G = parse_ntriples("<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/q> _:n .")

    def test_merge_idempotent(self):
        merged = graph_merge([self.G, self.G])
        assert merged.triples == self.G.triples

    def test_merge_identity(self):
        assert graph_merge([Graph(), self.G]).triples == self.G.triples

    def test_blank_collision_renamed(self):
        g1 = parse_ntriples("_:b <http://x/p> <http://x/1> .")
        g2 = parse_ntriples("_:b <http://x/p> <http://x/2> .")
        merged = graph_merge([g1, g2])
        blank_subjects = {t.subject for t in merged.triples}
        assert len(blank_subjects) == 2  # oracle: distinct blanks after merge

    def test_merge_commutative_up_to_blanks(self):
        g1 = parse_ntriples("_:b <http://x/p> <http://x/1> .")
        g2 = parse_ntriples("_:b <http://x/p> <http://x/2> .\n_:c <http://x/p> <http://x/3> .")
        assert graphs_equal_up_to_blanks(graph_merge([g1, g2]), graph_merge([g2, g1]))

    def test_merge_associative_up_to_blanks(self):
        g1 = parse_ntriples("_:b <http://x/p> <http://x/1> .")
        g2 = parse_ntriples("_:b <http://x/p> <http://x/2> .")
        g3 = parse_ntriples("_:b <http://x/p> <http://x/3> .")
        left = graph_merge([graph_merge([g1, g2]), g3])
        right = graph_merge([g1, graph_merge([g2, g3])])
        assert graphs_equal_up_to_blanks(left, right)


class TestRoundTrip:
    def test_render_parse_ntriples(self):
        g = parse_turtle(
            "@prefix ex: <http://x/> .\n"
            'ex:a a ex:C ; ex:p "v"@en ; ex:q "w"^^ex:dt ; ex:r _:b .\n'
        )
        assert parse_ntriples(render_ntriples(g), strict=True).triples == g.triples

    def test_render_parse_turtle(self):
        g = parse_ntriples(
            "<http://x/a> <http://x/p> <http://x/b> .\n"
            '<http://x/a> <http://x/t> "hi"@en .\n'
            "_:z <http://x/p> <http://x/a> .\n"
        )
        again = parse_turtle(render_turtle(g, {"ex": "http://x/"}))
        assert graphs_equal_up_to_blanks(again, g)

    def test_canonicalize_blank_labels(self):
        g1 = parse_ntriples("_:x <http://x/p> <http://x/1> .\n_:y <http://x/p> <http://x/2> .")
        g2 = parse_ntriples("_:q <http://x/p> <http://x/1> .\n_:r <http://x/p> <http://x/2> .")
        assert canonicalize_blank_labels(g1) == canonicalize_blank_labels(g2)


# Property tests: both formats agree for any graph expressible in both.

_iri = st.sampled_from([Iri(f"http://x/{n}") for n in ("a", "b", "c", "p", "q")])
_lit = st.one_of(
    st.text(alphabet="ab \n\"\\é", max_size=6).map(Literal),
    st.sampled_from(["en", "de", "zh-hans"]).map(lambda tag: Literal("w", lang=tag)),
    st.just(Literal("5", datatype=Iri("http://www.w3.org/2001/XMLSchema#integer"))),
)
_blank = st.sampled_from([BlankNode("n1"), BlankNode("n2")])
_triple = st.builds(
    Triple,
    st.one_of(_iri, _blank),
    _iri,
    st.one_of(_iri, _blank, _lit),
)
_graph = st.frozensets(_triple, max_size=8).map(Graph)


@settings(max_examples=120, deadline=None)
@given(_graph)
def test_turtle_and_ntriples_renderings_parse_identically(g: Graph):
    from_nt = parse_ntriples(render_ntriples(g), strict=True)
    from_ttl = parse_turtle(render_turtle(g))
    assert from_nt.triples == g.triples
    assert graphs_equal_up_to_blanks(from_ttl, from_nt)


@settings(max_examples=60, deadline=None)
@given(_graph, _graph)
def test_merge_commutes(a: Graph, b: Graph):
    assert graphs_equal_up_to_blanks(graph_merge([a, b]), graph_merge([b, a]))


@settings(max_examples=60, deadline=None)
@given(_graph)
def test_parse_is_deterministic(g: Graph):
    text = render_ntriples(g)
    assert parse_ntriples(text).triples == parse_ntriples(text).triples
