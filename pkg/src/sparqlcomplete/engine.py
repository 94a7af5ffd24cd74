"""Ranked, context-sensitive completion suggestions.

Candidate pools follow the clause position: previously declared variables
and known individuals at subject/object positions, known properties (plus
the ``a`` keyword) at predicate position, syntax keywords elsewhere.  When
the clause already names an individual, or a variable connectable to one
through the query's other patterns, that individual's known properties are
ranked first; declared types add a second preference tier.  A service
registry can contribute additional properties, filtered to services whose
input class accepts the focus individual's type (via subclass closure).

Ordering is a single lexicographic score tuple::

    (context_boost, lang_tier, match_tier, normalized_label, iri)

so context relevance dominates, then language preference, then label text.
Lower sorts earlier everywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .context import ClausePosition, QueryContext, Variable, connected_individuals
from .index import LangPref, Term, TermKind, normalize_label, prefix_search
from .knowledge import KnowledgeBase, RDF_TYPE
from .lexer import TokenKind, tokenize
from .rdf import Iri


class ScoreTuple(NamedTuple):
    context_boost: int
    lang_tier: int
    match_tier: int
    normalized_label: str
    iri: str


@dataclass(frozen=True)
class Provenance:
    type: str  # ONTOLOGY | REGISTRY | SYNTAX | QUERY_LOCAL
    source: str | None = None

    @classmethod
    def ontology(cls, graph: Iri | None) -> Provenance:
        return cls("ONTOLOGY", graph.value if graph else None)

    @classmethod
    def registry(cls, service: str) -> Provenance:
        return cls("REGISTRY", service)


SYNTAX = Provenance("SYNTAX")
QUERY_LOCAL = Provenance("QUERY_LOCAL")


@dataclass(frozen=True)
class Suggestion:
    insert_text: str
    display_label: str
    kind: TermKind
    score: ScoreTuple
    description: str | None = None
    iri: Iri | None = None
    lang: str = ""
    provenance: Provenance = SYNTAX

    def dedup_key(self) -> str:
        return self.iri.value if self.iri else self.insert_text


@dataclass(frozen=True)
class RegistryService:
    iri: Iri
    input_class: Iri
    attached_properties: frozenset[Iri]
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.attached_properties:
            raise ValueError(f"service {self.iri.value} attaches no properties")


@dataclass(frozen=True)
class Registry:
    services: tuple[RegistryService, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for s in self.services:
            if s.iri.value in seen:
                raise ValueError(f"duplicate service IRI: {s.iri.value}")
            seen.add(s.iri.value)


def load_registry(source: str | Path) -> Registry:
    """Parse the line-oriented registry file.

    One record per line: service IRI, input class IRI, comma-separated
    attached property IRIs, optional label; tab-separated, ``#`` comments.
    """
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) else source
    services = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) < 3:
            raise ValueError(f"registry line {lineno}: expected at least 3 tab-separated fields")
        try:
            services.append(
                RegistryService(
                    iri=Iri(parts[0]),
                    input_class=Iri(parts[1]),
                    attached_properties=frozenset(
                        Iri(p.strip()) for p in parts[2].split(",") if p.strip()
                    ),
                    label=parts[3] if len(parts) > 3 and parts[3] else None,
                )
            )
        except ValueError as exc:
            raise ValueError(f"registry line {lineno}: {exc}") from exc
    return Registry(tuple(services))


def load_registry_file(path: str | Path) -> Registry:
    return load_registry(Path(path))


@dataclass(frozen=True)
class SuggestOptions:
    langs: LangPref = LangPref(("en",))
    limit: int = 20
    include_syntax: bool = True
    registry_enabled: bool = False
    connectivity_depth: int = 2

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise ValueError("limit must be >= 1")


SYNTAX_VOCABULARY = (
    "SELECT", "ASK", "DISTINCT", "WHERE", "FROM", "FROM NAMED", "PREFIX",
    "BASE", "FILTER", "OPTIONAL", "UNION", "GRAPH", "ORDER BY", "ASC",
    "DESC", "LIMIT", "OFFSET", "a",
)

_TERM_POSITIONS = (
    ClausePosition.SUBJECT_POS,
    ClausePosition.PREDICATE_POS,
    ClausePosition.OBJECT_POS,
)


def registry_filter(
    registry: Registry, focus_types: Iterable[Iri], kb: KnowledgeBase
) -> set[Iri]:
    """Properties attached by services that can accept the focus individual.

    A service passes when its input class lies in the reflexive-transitive
    subclass closure of any focus type.  With no focus types there is no
    individual to filter on, so every service passes.
    """
    return {Iri(p) for p in _registry_property_services(registry, focus_types, kb)}


def _registry_property_services(
    registry: Registry, focus_types: Iterable[Iri], kb: KnowledgeBase
) -> dict[str, str]:
    types = [t.value if isinstance(t, Iri) else str(t) for t in focus_types]
    closure: set[str] = set()
    for t in types:
        closure |= kb.superclass_closure(t)
    out: dict[str, str] = {}
    for service in registry.services:
        if types and service.input_class.value not in closure:
            continue
        for prop in service.attached_properties:
            existing = out.get(prop.value)
            if existing is None or service.iri.value < existing:
                out[prop.value] = service.iri.value
    return out


# ---------------------------------------------------------------------------
# suggest
# ---------------------------------------------------------------------------


def suggest_syntax(ctx: QueryContext, opts: SuggestOptions | None = None) -> list[Suggestion]:
    """Grammar-legal keywords at this position, filtered by the partial."""
    if ctx.in_string or ctx.in_comment:
        return []
    boost = _syntax_boost(ctx.position)
    partial = ctx.partial_token.casefold()
    out = []
    for kw in sorted(set(ctx.keyword_candidates) & set(SYNTAX_VOCABULARY), key=str.casefold):
        if partial and not kw.casefold().startswith(partial):
            continue
        out.append(
            Suggestion(
                insert_text=kw,
                display_label=kw,
                kind=TermKind.KEYWORD,
                score=ScoreTuple(boost, 0, 0, kw.casefold(), ""),
                provenance=SYNTAX,
            )
        )
    return out


def _syntax_boost(position: ClausePosition) -> int:
    if position is ClausePosition.PREDICATE_POS:
        return 2
    if position in (ClausePosition.SUBJECT_POS, ClausePosition.OBJECT_POS):
        return 3
    return 0


def suggest(
    ctx: QueryContext,
    kb: KnowledgeBase,
    registry: Registry | None = None,
    opts: SuggestOptions = SuggestOptions(),
) -> list[Suggestion]:
    """Ranked completions for the derived context over one KB snapshot.

    Pure and total: degenerate contexts yield syntax suggestions or an
    empty list, never an error.
    """
    if ctx.in_string or ctx.in_comment:
        return []

    candidates: list[Suggestion] = []
    if ctx.position in _TERM_POSITIONS:
        candidates.extend(_term_candidates(ctx, kb, registry, opts))
    if opts.include_syntax:
        candidates.extend(suggest_syntax(ctx, opts))

    candidates.sort(key=lambda s: (s.score, s.insert_text))
    out: list[Suggestion] = []
    seen: set[str] = set()
    for s in candidates:
        key = s.dedup_key()
        if key in seen:
            continue
        seen.add(key)
        out.append(s)
        if len(out) == opts.limit:
            break
    return out


def _term_candidates(
    ctx: QueryContext,
    kb: KnowledgeBase,
    registry: Registry | None,
    opts: SuggestOptions,
) -> list[Suggestion]:
    partial = ctx.partial_token
    position = ctx.position

    if position is ClausePosition.SUBJECT_POS:
        kinds: tuple[TermKind, ...] = (TermKind.INDIVIDUAL, TermKind.ONT_CLASS)
    elif position is ClausePosition.PREDICATE_POS:
        kinds = (TermKind.PROPERTY,)
    else:  # OBJECT_POS: classes only after rdf:type
        if isinstance(ctx.focus_predicate, Iri) and ctx.focus_predicate == RDF_TYPE:
            kinds = (TermKind.ONT_CLASS,)
        else:
            kinds = (TermKind.INDIVIDUAL,)

    out: list[Suggestion] = []
    route = _partial_route(ctx)

    if position in (ClausePosition.SUBJECT_POS, ClausePosition.OBJECT_POS):
        out.extend(_variable_candidates(ctx, partial))
    if route[0] == "var":
        return out  # a ?partial can only complete to a variable

    boost0: set[str] = set()
    boost1: set[str] = set()
    registry_services: dict[str, str] = {}
    if position is ClausePosition.PREDICATE_POS:
        individuals, focus_types = _focus_info(ctx, kb, opts.connectivity_depth)
        for i in individuals:
            boost0 |= kb.individual_properties.get(i, frozenset())
        for t in focus_types:
            boost1 |= kb.class_properties.get(t, frozenset())
        if opts.registry_enabled and registry is not None:
            registry_services = _registry_property_services(
                registry, [Iri(t) for t in focus_types], kb
            )

    boosted_iris = boost0 | boost1 | set(registry_services)
    emitted: set[str] = set()

    # Boosted and registry-derived properties are matched directly so a low
    # label rank can never push them out of the candidate window.
    for iri_value in sorted(boosted_iris):
        term = kb.index.by_iri.get(iri_value)
        if term is None and iri_value not in registry_services:
            continue  # unindexed profile entries (builtin predicates like rdf:type)
        if term is not None and not (set(term.kinds) & set(kinds)):
            continue
        match = _match_term(term, iri_value, route, opts.langs)
        if match is None:
            continue
        boost = 0 if iri_value in boost0 else (1 if iri_value in boost1 else 2)
        if term is not None:
            provenance = Provenance.ontology(term.source)
        else:
            provenance = Provenance.registry(registry_services[iri_value])
        out.append(_build_suggestion(ctx, kb, term, iri_value, kinds, boost, match, provenance, opts))
        emitted.add(iri_value)

    window = opts.limit + len(boosted_iris)
    if route[0] == "label":
        hits = prefix_search(kb.index, route[1], opts.langs, frozenset(kinds), window)
        for hit in hits:
            iri_value = hit.entry.term.iri.value
            if iri_value in emitted:
                continue
            match = (hit.lang_tier, hit.match_tier, hit.entry.normalized_key)
            out.append(
                _build_suggestion(
                    ctx, kb, hit.entry.term, iri_value, kinds, 2, match,
                    Provenance.ontology(hit.entry.term.source), opts,
                )
            )
    elif route[0] == "iri":
        for term in kb.index.iris_with_prefix(route[1]):
            iri_value = term.iri.value
            if iri_value in emitted or not (set(term.kinds) & set(kinds)):
                continue
            match = _match_term(term, iri_value, route, opts.langs)
            if match is not None:
                out.append(
                    _build_suggestion(
                        ctx, kb, term, iri_value, kinds, 2, match,
                        Provenance.ontology(term.source), opts,
                    )
                )
    return out


def _variable_candidates(ctx: QueryContext, partial: str) -> list[Suggestion]:
    sigil = "$" if partial.startswith("$") else "?"
    out = []
    for name in ctx.variables:
        insert = sigil + name
        if partial and not (("?" + name).startswith(partial) or ("$" + name).startswith(partial)):
            continue
        out.append(
            Suggestion(
                insert_text=insert,
                display_label=insert,
                kind=TermKind.VARIABLE,
                score=ScoreTuple(0, 0, 0, normalize_label(name), ""),
                provenance=QUERY_LOCAL,
            )
        )
    return out


def _partial_route(ctx: QueryContext) -> tuple[str, str]:
    """Classify the partial token: variable, IRI prefix, PNAME, or label."""
    p = ctx.partial_token
    if p.startswith(("?", "$")):
        return ("var", p)
    if p.startswith("<"):
        return ("iri", p[1:-1] if p.endswith(">") else p[1:])
    if ":" in p and not p[0].isdigit():
        prefix, _, local = p.partition(":")
        ns = ctx.prefixes.get(prefix)
        if ns is None:
            return ("iri", "\0")  # undeclared prefix: matches nothing
        return ("iri", ns.value + local)
    return ("label", p)


def _focus_info(ctx: QueryContext, kb: KnowledgeBase, depth: int) -> tuple[list[str], set[str]]:
    """Focus individuals (direct or connected) and their known types."""
    node = ctx.focus_subject
    individuals: list[str] = []
    types: set[str] = set()
    if isinstance(node, Iri):
        individuals.append(node.value)
    elif isinstance(node, Variable):
        for iri, _path in connected_individuals(ctx, node.name, depth):
            individuals.append(iri.value)
    if node is not None:
        for p in ctx.patterns:
            if p.subject == node and p.predicate == RDF_TYPE and isinstance(p.object, Iri):
                types.add(p.object.value)
    for i in individuals:
        types |= kb.types_of.get(i, frozenset())
    return individuals, types


def _match_term(
    term: Term | None, iri_value: str, route: tuple[str, str], langs: LangPref
) -> tuple[int, int, str] | None:
    """(lang_tier, match_tier, sort label) if the term matches the partial."""
    if route[0] == "iri":
        if not iri_value.startswith(route[1]):
            return None
        if term is None:
            local = Iri(iri_value).local_name or iri_value
            return (langs.localname_tier, 2, normalize_label(local))
        lt, mt, text, _lang = term.best_label(langs)
        return (lt, mt, normalize_label(text))
    wanted = normalize_label(route[1])
    best: tuple[int, int, str] | None = None
    if term is None:
        local = Iri(iri_value).local_name
        key = normalize_label(local) if local else ""
        if key.startswith(wanted):
            return (langs.localname_tier, 2, key or normalize_label(iri_value))
        return None
    for lang, texts in term.labels.items():
        lt = langs.lang_tier(lang)
        for text in texts:
            key = normalize_label(text)
            if key.startswith(wanted):
                cand = (lt, 0, key)
                if best is None or cand < best:
                    best = cand
    for lang, texts in term.descriptions.items():
        lt = langs.lang_tier(lang)
        for text in texts:
            key = normalize_label(text)
            if key.startswith(wanted):
                cand = (lt, 1, key)
                if best is None or cand < best:
                    best = cand
    local = term.iri.local_name
    if local:
        key = normalize_label(local)
        if key.startswith(wanted):
            cand = (langs.localname_tier, 2, key)
            if best is None or cand < best:
                best = cand
    return best


_LOCAL_OK = re.compile(r"^(?:[A-Za-z0-9_%\-](?:[A-Za-z0-9_.%\-]*[A-Za-z0-9_%\-])?)?$")


def _insert_text_for_iri(ctx: QueryContext, iri_value: str) -> str:
    """PNAME form when a declared prefix covers the IRI, else ``<IRI>``."""
    best: tuple[int, str, str] | None = None  # (-ns length, prefix, local)
    for prefix, ns in ctx.prefixes.items():
        if iri_value.startswith(ns.value):
            local = iri_value[len(ns.value):]
            if _LOCAL_OK.match(local):
                cand = (-len(ns.value), prefix, local)
                if best is None or cand < best:
                    best = cand
    if best is not None:
        pname = f"{best[1]}:{best[2]}"
        if _single_token(pname, TokenKind.PNAME):
            return pname
    return f"<{iri_value}>"


def _single_token(text: str, kind: TokenKind) -> bool:
    toks = [t for t in tokenize(text) if t.kind is not TokenKind.EOF]
    return len(toks) == 1 and toks[0].kind is kind


def _build_suggestion(
    ctx: QueryContext,
    kb: KnowledgeBase,
    term: Term | None,
    iri_value: str,
    kinds: Sequence[TermKind],
    boost: int,
    match: tuple[int, int, str],
    provenance: Provenance,
    opts: SuggestOptions,
) -> Suggestion:
    lang_tier, match_tier, sort_label = match
    if term is not None:
        _, _, text, lang = term.best_label(opts.langs)
        display, display_lang = text, lang
        description = term.best_description(opts.langs)
        kind = term.kind_for(kinds)
    else:
        iri = Iri(iri_value)
        display, display_lang = iri.local_name or iri_value, ""
        description = None
        kind = kinds[0]
    return Suggestion(
        insert_text=_insert_text_for_iri(ctx, iri_value),
        display_label=display,
        kind=kind,
        score=ScoreTuple(boost, lang_tier, match_tier, sort_label, iri_value),
        description=description,
        iri=Iri(iri_value),
        lang=display_lang,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Applying a suggestion
# ---------------------------------------------------------------------------


def apply_suggestion(
    text: str, cursor: int, ctx: QueryContext, s: Suggestion
) -> tuple[str, int]:
    """Splice ``insert_text`` over the partial token at *cursor* (bytes).

    The partial token (or nothing, if the cursor follows whitespace) is
    replaced by the insertion plus one trailing space; the new cursor sits
    after that space.
    """
    data = text.encode("utf-8")
    cursor = max(0, min(cursor, len(data)))
    partial_len = len(ctx.partial_token.encode("utf-8"))
    start = cursor - partial_len
    insert = s.insert_text.encode("utf-8") + b" "
    new_data = data[:start] + insert + data[cursor:]
    return new_data.decode("utf-8"), start + len(insert)
