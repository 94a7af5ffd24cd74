"""Term and fact acquisition: graphs in, knowledge base snapshots out.

A KnowledgeBase is an immutable snapshot bundling the label index with the
fact tables the ranking rules need: which properties each individual is
known to have, which properties instances of each class carry, declared
types, and direct ``rdfs:subClassOf`` edges.  Loading a graph produces a
new snapshot; readers holding the old one are never disturbed.

Graphs come from local files, HTTP(S) documents (the FROM-clause path), or
SPARQL endpoints harvested over the protocol with paged SELECT queries.
All network access goes through an injectable fetch function and is gated
by a FetchPolicy, so tests run hermetically and ``allow_network=False``
provably performs no I/O.  Fetched bytes are cached on disk keyed by a
hash of the source IRI.
"""

from __future__ import annotations

import hashlib
import json
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from .context import QueryContext
from .index import LangPref, Term, TermIndex, TermKind, build_index, swap_generation
from .rdf import (
    Graph,
    Iri,
    Literal,
    OWL_NS,
    ParseDiagnostic,
    ParseError,
    RDF_NS,
    RDFS_NS,
    XSD_NS,
    parse_ntriples,
    parse_turtle,
)

RDF_TYPE = Iri(RDF_NS + "type")
RDFS_LABEL = Iri(RDFS_NS + "label")
RDFS_COMMENT = Iri(RDFS_NS + "comment")
RDFS_SUBCLASSOF = Iri(RDFS_NS + "subClassOf")

_CLASS_TYPES = {OWL_NS + "Class", RDFS_NS + "Class"}
_PROPERTY_TYPES = {
    OWL_NS + "ObjectProperty",
    OWL_NS + "DatatypeProperty",
    OWL_NS + "AnnotationProperty",
    RDF_NS + "Property",
}

# Vocabulary namespaces: annotation plumbing, never emitted as terms.
_BUILTIN_NAMESPACES = (RDF_NS, RDFS_NS, OWL_NS, XSD_NS)


def _is_builtin(iri: Iri) -> bool:
    return iri.value.startswith(_BUILTIN_NAMESPACES)


@dataclass(frozen=True)
class LoadStatus:
    state: str  # "loaded" | "failed" | "pending"
    reason: str | None = None
    at: float = 0.0
    triple_count: int = 0


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable snapshot of everything the suggestion engine consults."""

    index: TermIndex = field(default_factory=lambda: build_index([]))
    individual_properties: dict[str, frozenset[str]] = field(default_factory=dict)
    class_properties: dict[str, frozenset[str]] = field(default_factory=dict)
    subclass_of: dict[str, frozenset[str]] = field(default_factory=dict)
    types_of: dict[str, frozenset[str]] = field(default_factory=dict)
    loaded_graphs: dict[str, LoadStatus] = field(default_factory=dict)

    @property
    def generation(self) -> int:
        return self.index.generation

    def superclass_closure(self, class_iri: str) -> frozenset[str]:
        """Reflexive-transitive closure over declared subClassOf edges.

        Terminates on cyclic input via the visited set.
        """
        seen = {class_iri}
        stack = [class_iri]
        while stack:
            for sup in self.subclass_of.get(stack.pop(), ()):
                if sup not in seen:
                    seen.add(sup)
                    stack.append(sup)
        return frozenset(seen)

    def with_graph(self, graph: Graph, source: Iri | None = None) -> KnowledgeBase:
        """Extract terms and profiles from *graph* and publish a new snapshot."""
        source = source or graph.source
        terms = extract_terms(graph if source is None else graph.with_source(source))
        kb = extract_profiles(graph, self)
        return replace(kb, index=swap_generation(kb.index, terms))

    def with_status(self, source: Iri, status: LoadStatus) -> KnowledgeBase:
        statuses = dict(self.loaded_graphs)
        statuses[source.value] = status
        return replace(self, loaded_graphs=statuses)


def extract_terms(g: Graph) -> list[Term]:
    """Terms for every non-builtin IRI a graph mentions.

    Kinds come from ``rdf:type`` statements; IRIs in predicate position are
    PROPERTY even if undeclared, objects of ``rdf:type`` are classes, and
    anything else defaults to INDIVIDUAL.  Labels come from ``rdfs:label``,
    descriptions from ``rdfs:comment``, grouped by language tag.
    """
    kinds: dict[str, set[TermKind]] = {}
    labels: dict[str, dict[str, list[str]]] = {}
    descriptions: dict[str, dict[str, list[str]]] = {}
    mentioned: dict[str, Iri] = {}

    def note(iri: Iri, kind: TermKind | None) -> None:
        mentioned.setdefault(iri.value, iri)
        if kind is not None:
            kinds.setdefault(iri.value, set()).add(kind)

    for t in g.triples:
        s, p, o = t.subject, t.predicate, t.object
        if isinstance(s, Iri) and not _is_builtin(s):
            note(s, None)
        if not _is_builtin(p):
            note(p, TermKind.PROPERTY)
        if p == RDF_TYPE and isinstance(s, Iri) and isinstance(o, Iri):
            if o.value in _CLASS_TYPES:
                note(s, TermKind.ONT_CLASS)
            elif o.value in _PROPERTY_TYPES:
                note(s, TermKind.PROPERTY)
            if not _is_builtin(o):
                note(o, TermKind.ONT_CLASS)
            continue
        if isinstance(o, Iri) and not _is_builtin(o):
            note(o, None)
        if isinstance(s, Iri) and isinstance(o, Literal):
            if p == RDFS_LABEL:
                labels.setdefault(s.value, {}).setdefault(o.lang or "", []).append(o.lexical)
            elif p == RDFS_COMMENT:
                descriptions.setdefault(s.value, {}).setdefault(o.lang or "", []).append(o.lexical)

    terms = []
    for value, iri in mentioned.items():
        term_kinds = kinds.get(value) or {TermKind.INDIVIDUAL}
        terms.append(
            Term(
                iri=iri,
                kinds=frozenset(term_kinds),
                labels={k: tuple(sorted(set(v))) for k, v in labels.get(value, {}).items()},
                descriptions={
                    k: tuple(sorted(set(v))) for k, v in descriptions.get(value, {}).items()
                },
                source=g.source,
            )
        )
    terms.sort(key=lambda t: t.iri.value)
    return terms


def extract_profiles(g: Graph, kb: KnowledgeBase) -> KnowledgeBase:
    """Fold a graph's facts into the property/type tables (new snapshot)."""
    ind_props = {k: set(v) for k, v in kb.individual_properties.items()}
    cls_props = {k: set(v) for k, v in kb.class_properties.items()}
    subclass = {k: set(v) for k, v in kb.subclass_of.items()}
    types = {k: set(v) for k, v in kb.types_of.items()}

    by_subject: dict[str, list] = {}
    for t in g.triples:
        if isinstance(t.subject, Iri):
            by_subject.setdefault(t.subject.value, []).append(t)

    for subject, triples in by_subject.items():
        props = ind_props.setdefault(subject, set())
        non_type_preds = set()
        declared: list[str] = []
        for t in triples:
            props.add(t.predicate.value)
            if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
                declared.append(t.object.value)
            else:
                non_type_preds.add(t.predicate.value)
            if t.predicate == RDFS_SUBCLASSOF and isinstance(t.object, Iri):
                subclass.setdefault(subject, set()).add(t.object.value)
        if declared:
            types.setdefault(subject, set()).update(declared)
            for cls in declared:
                cls_props.setdefault(cls, set()).update(non_type_preds)

    return replace(
        kb,
        individual_properties={k: frozenset(v) for k, v in ind_props.items()},
        class_properties={k: frozenset(v) for k, v in cls_props.items()},
        subclass_of={k: frozenset(v) for k, v in subclass.items()},
        types_of={k: frozenset(v) for k, v in types.items()},
    )


# ---------------------------------------------------------------------------
# Fetching and caching
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FetchPolicy:
    timeout: float = 2.0
    max_bytes: int = 8_000_000
    cache_dir: Path | None = None
    cache_ttl: float = 3600.0
    allow_network: bool = False

    def __post_init__(self) -> None:
        if self.timeout <= 0 or self.max_bytes <= 0:
            raise ValueError("timeout and max_bytes must be positive")


@dataclass(frozen=True)
class EndpointSource:
    url: str
    default_graph: Iri | None = None
    page_size: int = 1000
    max_rows: int = 50_000

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")


@dataclass(frozen=True)
class FetchResult:
    status: int
    content_type: str
    body: bytes


# fetch(url, headers, timeout, max_bytes) -> FetchResult
Fetcher = Callable[[str, dict[str, str], float, int], FetchResult]


def urllib_fetcher(url: str, headers: dict[str, str], timeout: float, max_bytes: int) -> FetchResult:
    """Default HTTP(S) fetcher; follows up to 5 redirects, caps body size."""

    class _CappingRedirects(urllib.request.HTTPRedirectHandler):
        max_redirections = 5

    opener = urllib.request.build_opener(_CappingRedirects)
    req = urllib.request.Request(url, headers=headers)
    with opener.open(req, timeout=timeout) as resp:
        body = resp.read(max_bytes + 1)
        if len(body) > max_bytes:
            raise OSError(f"response exceeds {max_bytes} bytes")
        ctype = resp.headers.get("Content-Type", "") or ""
        return FetchResult(resp.status, ctype.split(";")[0].strip(), body)


@dataclass(frozen=True)
class LoadResult:
    graph: Graph
    status: LoadStatus
    diagnostics: tuple[ParseDiagnostic, ...] = ()
    from_cache: bool = False


ACCEPT_DOCUMENT = "text/turtle, application/n-triples;q=0.9, text/plain;q=0.5"
ACCEPT_SPARQL_JSON = "application/sparql-results+json"


def _cache_paths(policy: FetchPolicy, source: str) -> tuple[Path, Path] | None:
    if policy.cache_dir is None:
        return None
    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
    root = Path(policy.cache_dir)
    return root / f"{digest}.bin", root / f"{digest}.meta"


def _cache_read(policy: FetchPolicy, source: str) -> tuple[bytes, str] | None:
    paths = _cache_paths(policy, source)
    if paths is None:
        return None
    data_path, meta_path = paths
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if time.time() - meta["fetched_at"] > policy.cache_ttl:
            return None
        return data_path.read_bytes(), meta.get("content_type", "")
    except (OSError, ValueError, KeyError):
        return None


def _cache_write(policy: FetchPolicy, source: str, body: bytes, content_type: str) -> None:
    paths = _cache_paths(policy, source)
    if paths is None:
        return
    data_path, meta_path = paths
    try:
        data_path.parent.mkdir(parents=True, exist_ok=True)
        data_path.write_bytes(body)
        meta_path.write_text(
            json.dumps(
                {"source": source, "content_type": content_type, "fetched_at": time.time()}
            ),
            encoding="utf-8",
        )
    except OSError:
        pass  # cache failures never break a load


def _choose_format(content_type: str, source: str, body: bytes) -> str:
    if content_type in ("text/turtle", "application/x-turtle", "application/turtle"):
        return "turtle"
    if content_type in ("application/n-triples",):
        return "ntriples"
    lowered = source.lower().split("?")[0]
    if lowered.endswith((".ttl", ".turtle")):
        return "turtle"
    if lowered.endswith(".nt"):
        return "ntriples"
    head = body[:4096].decode("utf-8", errors="replace")
    if "@prefix" in head or "@base" in head or _has_sparql_directive(head):
        return "turtle"
    return "ntriples"


def _has_sparql_directive(head: str) -> bool:
    for line in head.splitlines():
        stripped = line.strip()
        if stripped.upper().startswith(("PREFIX ", "BASE ")):
            return True
        if stripped and not stripped.startswith("#"):
            return False
    return False


def _parse_bytes(body: bytes, content_type: str, source: Iri) -> tuple[Graph, tuple[ParseDiagnostic, ...]]:
    text = body.decode("utf-8", errors="replace")
    fmt = _choose_format(content_type, source.value, body)
    if fmt == "turtle":
        return parse_turtle(text, source=source), ()
    diags: list[ParseDiagnostic] = []
    graph = parse_ntriples(text, diagnostics=diags, source=source)
    return graph, tuple(diags)


def load_graph(
    source: Iri | str | Path,
    policy: FetchPolicy,
    fetcher: Fetcher | None = None,
) -> LoadResult:
    """Load one ontology document from cache, HTTP(S), or the filesystem.

    Failures never raise; they come back as a ``failed`` status with a
    reason, and an empty graph, so the suggestion path can degrade.
    """
    name = source.value if isinstance(source, Iri) else str(source)
    is_http = name.startswith(("http://", "https://"))
    try:
        iri = Iri(name) if is_http else Iri("file://" + urllib.parse.quote(str(Path(name).absolute())))
    except ValueError:
        return LoadResult(Graph(), LoadStatus("failed", "invalid source IRI", time.time()))

    if not is_http:
        path = Path(name[7:]) if name.startswith("file://") else Path(name)
        try:
            body = path.read_bytes()
        except OSError as exc:
            return LoadResult(Graph(), LoadStatus("failed", str(exc), time.time()))
        return _finish_load(body, "", iri)

    cached = _cache_read(policy, name)
    if cached is not None:
        result = _finish_load(cached[0], cached[1], Iri(name))
        return replace(result, from_cache=True)
    if not policy.allow_network:
        return LoadResult(Graph(), LoadStatus("failed", "network disabled", time.time()))
    fetch = fetcher or urllib_fetcher
    try:
        resp = fetch(name, {"Accept": ACCEPT_DOCUMENT}, policy.timeout, policy.max_bytes)
    except Exception as exc:  # network errors are data, not bugs
        return LoadResult(Graph(), LoadStatus("failed", f"fetch error: {exc}", time.time()))
    if resp.status != 200:
        return LoadResult(Graph(), LoadStatus("failed", f"HTTP {resp.status}", time.time()))
    _cache_write(policy, name, resp.body, resp.content_type)
    return _finish_load(resp.body, resp.content_type, Iri(name))


def _finish_load(body: bytes, content_type: str, iri: Iri) -> LoadResult:
    try:
        graph, diags = _parse_bytes(body, content_type, iri)
    except ParseError as exc:
        return LoadResult(Graph(), LoadStatus("failed", f"parse error: {exc}", time.time()))
    return LoadResult(graph, LoadStatus("loaded", None, time.time(), len(graph)), diags)


# ---------------------------------------------------------------------------
# Endpoint harvesting
# ---------------------------------------------------------------------------

_LABEL_QUERY = (
    "SELECT ?term ?label ?type WHERE { "
    "?term <http://www.w3.org/2000/01/rdf-schema#label> ?label . "
    "OPTIONAL { ?term <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> ?type } "
    "} OFFSET %d LIMIT %d"
)
_PREDICATE_QUERY = "SELECT DISTINCT ?p WHERE { ?s ?p ?o } OFFSET %d LIMIT %d"


class EndpointError(RuntimeError):
    pass


def _endpoint_get(
    src: EndpointSource, query: str, policy: FetchPolicy, fetch: Fetcher
) -> list[dict]:
    params = {"query": query}
    if src.default_graph is not None:
        params["default-graph-uri"] = src.default_graph.value
    url = src.url + ("&" if "?" in src.url else "?") + urllib.parse.urlencode(params)
    resp = fetch(url, {"Accept": ACCEPT_SPARQL_JSON}, policy.timeout, policy.max_bytes)
    if resp.status != 200:
        raise EndpointError(f"HTTP {resp.status} from {src.url}")
    try:
        payload = json.loads(resp.body.decode("utf-8"))
        return payload["results"]["bindings"]
    except (ValueError, KeyError) as exc:
        raise EndpointError(f"malformed SPARQL JSON from {src.url}: {exc}") from exc


def _paged(src, policy, fetch, template):
    offset = 0
    while offset < src.max_rows:
        page = min(src.page_size, src.max_rows - offset)
        rows = _endpoint_get(src, template % (offset, page), policy, fetch)
        yield from rows
        if len(rows) < page:
            return
        offset += page


def preload_endpoint(
    src: EndpointSource,
    langs: LangPref,
    policy: FetchPolicy,
    fetcher: Fetcher | None = None,
) -> list[Term]:
    """Harvest (term, label, lang) rows and predicate IRIs from an endpoint.

    Pages with OFFSET/LIMIT up to ``src.max_rows`` rows per query shape.
    Protocol errors raise EndpointError, but rows already received are kept
    by the caller via the exception's partial payload attribute.
    """
    if not policy.allow_network and fetcher is None:
        raise EndpointError("network disabled and no fetcher supplied")
    fetch = fetcher or urllib_fetcher
    terms: list[Term] = []
    try:
        for row in _paged(src, policy, fetch, _LABEL_QUERY):
            term = _row_to_term(row, source=Iri(src.url))
            if term is not None:
                terms.append(term)
        for row in _paged(src, policy, fetch, _PREDICATE_QUERY):
            p = row.get("p", {})
            if p.get("type") == "uri":
                try:
                    iri = Iri(p["value"])
                except ValueError:
                    continue
                if not _is_builtin(iri):
                    terms.append(Term(iri, frozenset({TermKind.PROPERTY}), source=Iri(src.url)))
    except EndpointError as exc:
        exc.partial = terms  # type: ignore[attr-defined]
        raise
    return terms


def _row_to_term(row: dict, source: Iri) -> Term | None:
    term_binding = row.get("term", {})
    label_binding = row.get("label", {})
    if term_binding.get("type") != "uri" or "value" not in label_binding:
        return None
    try:
        iri = Iri(term_binding["value"])
    except ValueError:
        return None
    kind = TermKind.INDIVIDUAL
    type_value = row.get("type", {}).get("value")
    if type_value in _CLASS_TYPES:
        kind = TermKind.ONT_CLASS
    elif type_value in _PROPERTY_TYPES:
        kind = TermKind.PROPERTY
    lang = (label_binding.get("xml:lang") or "").lower()
    return Term(
        iri,
        frozenset({kind}),
        labels={lang: (label_binding["value"],)},
        source=source,
    )


# ---------------------------------------------------------------------------
# FROM-clause driven loading
# ---------------------------------------------------------------------------


def ensure_from_graphs(
    ctx: QueryContext,
    kb: KnowledgeBase,
    policy: FetchPolicy,
    fetcher: Fetcher | None = None,
    include_named: bool = True,
) -> KnowledgeBase:
    """Load any FROM / FROM NAMED graphs not yet loaded into a new snapshot.

    Failures are recorded in ``loaded_graphs`` (and not retried until the
    cache TTL elapses); they never surface to the suggestion path.
    """
    wanted = list(ctx.from_graphs) + (list(ctx.from_named) if include_named else [])
    for iri in wanted:
        status = kb.loaded_graphs.get(iri.value)
        if status is not None:
            if status.state == "loaded":
                continue
            if status.state == "failed" and time.time() - status.at < policy.cache_ttl:
                continue
        result = load_graph(iri, policy, fetcher)
        if result.status.state == "loaded":
            kb = kb.with_graph(result.graph, source=iri).with_status(iri, result.status)
        else:
            kb = kb.with_status(iri, result.status)
    return kb
