"""Knowledge-base construction, fetching, caching, endpoint harvesting."""

from __future__ import annotations

import json
import threading
import urllib.parse

import pytest

from conftest import DATA_DIR
from sparqlcomplete.context import derive_context
from sparqlcomplete.index import LangPref, TermKind, prefix_search
from sparqlcomplete.knowledge import (
    EndpointError,
    EndpointSource,
    FetchPolicy,
    FetchResult,
    KnowledgeBase,
    ensure_from_graphs,
    extract_profiles,
    extract_terms,
    load_graph,
    preload_endpoint,
)
from sparqlcomplete.rdf import Graph, Iri, graph_merge, parse_ntriples, parse_turtle

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
ALL_KINDS = frozenset(TermKind) - {TermKind.KEYWORD, TermKind.VARIABLE}


def g(nt: str) -> Graph:
    return parse_ntriples(nt, strict=True)


class CountingFetcher:
    """Test double that serves canned responses and counts calls."""

    def __init__(self, responses: dict[str, FetchResult] | None = None, handler=None):
        self.responses = responses or {}
        self.handler = handler
        self.calls: list[str] = []
        self.lock = threading.Lock()

    def __call__(self, url: str, headers: dict, timeout: float, max_bytes: int) -> FetchResult:
        with self.lock:
            self.calls.append(url)
        if self.handler is not None:
            return self.handler(url, headers)
        if url in self.responses:
            return self.responses[url]
        raise OSError(f"unexpected URL: {url}")


class TestExtractTerms:
    def test_declared_property_with_label(self):
        graph = g(
            "<http://x/p> <" + RDF_TYPE + "> <http://www.w3.org/2002/07/owl#ObjectProperty> .\n"
            '<http://x/p> <http://www.w3.org/2000/01/rdf-schema#label> "has part"@en .'
        )
        terms = extract_terms(graph)
        assert [(t.iri.value, t.kind, t.labels) for t in terms] == [
            ("http://x/p", TermKind.PROPERTY, {"en": ("has part",)})
        ]

    def test_undeclared_subject_predicate_object(self):
        terms = extract_terms(g("<http://x/a> <http://x/p> <http://x/b> ."))
        got = {t.iri.value: t.kind for t in terms}
        assert got == {
            "http://x/a": TermKind.INDIVIDUAL,
            "http://x/b": TermKind.INDIVIDUAL,
            "http://x/p": TermKind.PROPERTY,
        }

    def test_bilingual_fixture_hand_enumeration(self):
        graph = parse_turtle((DATA_DIR / "bilingual.ttl").read_text(encoding="utf-8"))
        terms = {t.iri.value: t for t in extract_terms(graph)}
        gene = terms["http://semanticscience.org/resource/SIO_010035"]
        assert gene.kind is TermKind.ONT_CLASS
        assert gene.labels == {"en": ("gene",), "de": ("Gen",)}
        participant = terms["http://semanticscience.org/resource/SIO_000253"]
        assert participant.kind is TermKind.PROPERTY
        assert set(participant.descriptions) == {"en", "de"}
        # untagged label kept under the reserved "" key
        assert terms["http://lab.example/data/brca1"].labels == {"": ("BRCA1",)}

    def test_rdf_type_object_becomes_class(self):
        terms = {t.iri.value: t for t in extract_terms(g(f"<http://x/i> <{RDF_TYPE}> <http://x/C> ."))}
        assert terms["http://x/C"].kind is TermKind.ONT_CLASS
        assert terms["http://x/i"].kind is TermKind.INDIVIDUAL

    def test_merge_commutes_with_extraction(self):
        g1 = g('<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> "A"@en .')
        g2 = g("<http://x/a> <http://x/p> <http://x/b> .")
        from sparqlcomplete.index import build_index

        merged_first = {t.iri.value: t for t in extract_terms(graph_merge([g1, g2]))}
        extract_first = build_index(extract_terms(g1) + extract_terms(g2)).by_iri
        assert merged_first.keys() == extract_first.keys()
        for iri, t in merged_first.items():
            assert t.labels == extract_first[iri].labels
            assert t.kinds == extract_first[iri].kinds


class TestExtractProfiles:
    def test_basic_profile(self):
        kb = extract_profiles(
            g(
                f"<http://x/a> <{RDF_TYPE}> <http://x/C> .\n"
                "<http://x/a> <http://x/p> <http://x/b> ."
            ),
            KnowledgeBase(),
        )
        assert kb.individual_properties["http://x/a"] == {RDF_TYPE, "http://x/p"}
        assert "http://x/p" in kb.class_properties["http://x/C"]
        assert kb.types_of["http://x/a"] == {"http://x/C"}

    def test_empty_graph_is_identity(self):
        kb = KnowledgeBase()
        kb2 = extract_profiles(Graph(), kb)
        assert kb2.individual_properties == {}
        assert kb2.class_properties == {}

    def test_three_individual_fixture_hand_tabulated(self):
        graph = parse_ntriples((DATA_DIR / "instances.nt").read_text(encoding="utf-8"), strict=True)
        kb = extract_profiles(graph, KnowledgeBase())
        sio = "http://semanticscience.org/resource/"
        ex = "http://lab.example/data/"
        label = "http://www.w3.org/2000/01/rdf-schema#label"
        assert kb.individual_properties[ex + "exp1"] == {RDF_TYPE, sio + "SIO_000253", label}
        assert kb.individual_properties[ex + "brca1"] == {RDF_TYPE, sio + "SIO_010081"}
        assert kb.individual_properties[ex + "brca1_protein"] == {RDF_TYPE, sio + "SIO_000053"}
        assert kb.class_properties[sio + "SIO_000006"] == {sio + "SIO_000253", label}
        assert kb.types_of[ex + "brca1"] == {sio + "SIO_010035"}

    def test_profiles_monotone_under_additional_graphs(self):
        g1 = g("<http://x/a> <http://x/p> <http://x/b> .")
        g2 = g("<http://x/a> <http://x/q> <http://x/c> .")
        kb1 = extract_profiles(g1, KnowledgeBase())
        kb2 = extract_profiles(g2, kb1)
        for iri, props in kb1.individual_properties.items():
            assert props <= kb2.individual_properties[iri]

    def test_subclass_closure_cycle_safe(self):
        kb = extract_profiles(
            g(
                "<http://x/A> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://x/B> .\n"
                "<http://x/B> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://x/A> ."
            ),
            KnowledgeBase(),
        )
        assert kb.superclass_closure("http://x/A") == {"http://x/A", "http://x/B"}


class TestLoadGraph:
    def test_local_fixture_path(self, tmp_path):
        policy = FetchPolicy(cache_dir=tmp_path)
        result = load_graph(DATA_DIR / "instances.nt", policy)
        assert result.status.state == "loaded"
        assert len(result.graph) == 8  # hand count of fixture statements

    def test_network_disabled(self, tmp_path):
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=False)
        fetcher = CountingFetcher()
        result = load_graph(Iri("http://remote.example/onto.ttl"), policy, fetcher)
        assert result.status.state == "failed"
        assert result.status.reason == "network disabled"
        assert len(result.graph) == 0
        assert fetcher.calls == []

    def test_cache_hit_within_ttl(self, tmp_path):
        url = "http://remote.example/onto.ttl"
        body = b"<http://x/a> <http://x/p> <http://x/b> ."
        fetcher = CountingFetcher({url: FetchResult(200, "application/n-triples", body)})
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=True, cache_ttl=3600)
        first = load_graph(Iri(url), policy, fetcher)
        second = load_graph(Iri(url), policy, fetcher)
        assert first.status.state == second.status.state == "loaded"
        assert first.graph.triples == second.graph.triples
        assert len(fetcher.calls) == 1
        assert second.from_cache

    def test_cache_expiry_refetches(self, tmp_path):
        url = "http://remote.example/onto.nt"
        body = b"<http://x/a> <http://x/p> <http://x/b> ."
        fetcher = CountingFetcher({url: FetchResult(200, "application/n-triples", body)})
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=True, cache_ttl=0.0)
        load_graph(Iri(url), policy, fetcher)
        load_graph(Iri(url), policy, fetcher)
        assert len(fetcher.calls) == 2

    def test_content_type_beats_extension(self, tmp_path):
        url = "http://remote.example/data"  # no extension: sniffing fallback
        turtle = b"@prefix ex: <http://x/> . ex:a ex:p ex:b ."
        fetcher = CountingFetcher({url: FetchResult(200, "text/turtle", turtle)})
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=True)
        result = load_graph(Iri(url), policy, fetcher)
        assert result.status.state == "loaded" and len(result.graph) == 1

    def test_http_error_degrades(self, tmp_path):
        url = "http://remote.example/missing.ttl"
        fetcher = CountingFetcher({url: FetchResult(404, "text/plain", b"nope")})
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=True)
        result = load_graph(Iri(url), policy, fetcher)
        assert result.status.state == "failed" and "404" in result.status.reason


def make_endpoint_fetcher(label_rows: list[dict], predicate_rows: list[dict]) -> CountingFetcher:
    """Stub SPARQL endpoint honoring OFFSET/LIMIT paging on two query shapes."""

    def handler(url: str, headers: dict) -> FetchResult:
        assert headers["Accept"] == "application/sparql-results+json"
        query = urllib.parse.parse_qs(urllib.parse.urlparse(url).query)["query"][0]
        offset = int(query.rsplit("OFFSET", 1)[1].split("LIMIT")[0])
        limit = int(query.rsplit("LIMIT", 1)[1])
        rows = predicate_rows if "DISTINCT ?p" in query else label_rows
        payload = {"head": {"vars": []}, "results": {"bindings": rows[offset : offset + limit]}}
        return FetchResult(200, "application/sparql-results+json", json.dumps(payload).encode())

    return CountingFetcher(handler=handler)


def uri(v: str) -> dict:
    return {"type": "uri", "value": v}


class TestPreloadEndpoint:
    def test_two_labeled_classes(self):
        rows = [
            {
                "term": uri("http://x/C1"),
                "label": {"type": "literal", "value": "gene", "xml:lang": "EN"},
                "type": uri("http://www.w3.org/2002/07/owl#Class"),
            },
            {
                "term": uri("http://x/C2"),
                "label": {"type": "literal", "value": "protein"},
                "type": uri("http://www.w3.org/2002/07/owl#Class"),
            },
        ]
        fetcher = make_endpoint_fetcher(rows, [])
        src = EndpointSource("http://endpoint.example/sparql", page_size=10)
        terms = preload_endpoint(src, LangPref(("en",)), FetchPolicy(), fetcher)
        assert {t.iri.value: t.kind for t in terms} == {
            "http://x/C1": TermKind.ONT_CLASS,
            "http://x/C2": TermKind.ONT_CLASS,
        }
        assert terms[0].labels == {"en": ("gene",)}
        assert terms[1].labels == {"": ("protein",)}

    def test_empty_result_set(self):
        fetcher = make_endpoint_fetcher([], [])
        src = EndpointSource("http://endpoint.example/sparql", page_size=5)
        assert preload_endpoint(src, LangPref(), FetchPolicy(), fetcher) == []

    def test_paging_contract_three_rows_page_size_one(self):
        rows = [
            {"term": uri(f"http://x/i{k}"), "label": {"type": "literal", "value": f"row {k}"}}
            for k in range(3)
        ]
        fetcher = make_endpoint_fetcher(rows, [])
        src = EndpointSource("http://endpoint.example/sparql", page_size=1, max_rows=3)
        terms = preload_endpoint(src, LangPref(), FetchPolicy(), fetcher)
        assert len(terms) == 3
        label_calls = [c for c in fetcher.calls if "DISTINCT" not in urllib.parse.unquote(c)]
        assert len(label_calls) == 3

    def test_predicates_become_property_terms(self):
        fetcher = make_endpoint_fetcher([], [{"p": uri("http://x/newprop")}])
        src = EndpointSource("http://endpoint.example/sparql", page_size=10)
        terms = preload_endpoint(src, LangPref(), FetchPolicy(), fetcher)
        assert [(t.iri.value, t.kind) for t in terms] == [("http://x/newprop", TermKind.PROPERTY)]

    def test_partial_pages_kept_on_failure(self):
        good_payload = {
            "head": {"vars": []},
            "results": {
                "bindings": [
                    {"term": uri("http://x/i0"), "label": {"type": "literal", "value": "zero"}}
                ]
            },
        }
        state = {"calls": 0}

        def handler(url, headers):
            state["calls"] += 1
            if state["calls"] == 1:
                return FetchResult(200, "application/sparql-results+json", json.dumps(good_payload).encode())
            return FetchResult(500, "text/plain", b"boom")

        fetcher = CountingFetcher(handler=handler)
        src = EndpointSource("http://endpoint.example/sparql", page_size=1)
        with pytest.raises(EndpointError) as exc:
            preload_endpoint(src, LangPref(), FetchPolicy(), fetcher)
        assert [t.iri.value for t in exc.value.partial] == ["http://x/i0"]


class TestEnsureFromGraphs:
    def fixture_url_fetcher(self) -> CountingFetcher:
        body = (DATA_DIR / "bilingual.ttl").read_bytes()
        return CountingFetcher(
            {"http://onto.example/bilingual": FetchResult(200, "text/turtle", body)}
        )

    def test_from_clause_feeds_index(self, tmp_path):
        ctx = derive_context("SELECT * FROM <http://onto.example/bilingual> WHERE { ?x ")
        kb = ensure_from_graphs(
            ctx, KnowledgeBase(), FetchPolicy(cache_dir=tmp_path, allow_network=True),
            self.fixture_url_fetcher(),
        )
        hits = prefix_search(kb.index, "has parti", LangPref(("en",)), ALL_KINDS, 10)
        assert hits and hits[0].entry.term.iri.value == "http://semanticscience.org/resource/SIO_000253"
        assert kb.loaded_graphs["http://onto.example/bilingual"].state == "loaded"

    def test_no_from_is_identity(self, tmp_path):
        ctx = derive_context("SELECT * WHERE { ?x ")
        kb = KnowledgeBase()
        kb2 = ensure_from_graphs(ctx, kb, FetchPolicy(cache_dir=tmp_path))
        assert kb2.index.generation == kb.index.generation
        assert kb2.loaded_graphs == {}

    def test_failed_iri_not_retried_within_ttl(self, tmp_path):
        ctx = derive_context("SELECT * FROM <http://down.example/g> WHERE { ?x ")
        fetcher = CountingFetcher()  # every call raises
        policy = FetchPolicy(cache_dir=tmp_path, allow_network=True, cache_ttl=3600)
        kb = ensure_from_graphs(ctx, KnowledgeBase(), policy, fetcher)
        kb = ensure_from_graphs(ctx, kb, policy, fetcher)
        assert len(fetcher.calls) == 1
        assert kb.loaded_graphs["http://down.example/g"].state == "failed"

    def test_no_network_calls_when_disabled(self, tmp_path):
        ctx = derive_context("SELECT * FROM <http://onto.example/bilingual> WHERE { ?x ")
        fetcher = self.fixture_url_fetcher()
        kb = ensure_from_graphs(
            ctx, KnowledgeBase(), FetchPolicy(cache_dir=tmp_path, allow_network=False), fetcher
        )
        assert fetcher.calls == []
        assert kb.loaded_graphs["http://onto.example/bilingual"].state == "failed"
