"""Context-sensitive, language-aware completion for SPARQL queries.

The library derives the grammatical context at a cursor inside partially
typed SPARQL, indexes ontology terms by their multilingual labels, and
ranks completion candidates by what the query already says.  A thin HTTP
JSON service and a CLI expose the same engine.
"""

__version__ = "0.1.0"

from .context import (
    ClausePosition,
    Direction,
    QueryContext,
    TriplePattern,
    UnknownPrefixError,
    Variable,
    connected_individuals,
    derive_context,
    expand_prefixed_name,
    pattern_node_text,
)
from .engine import (
    Provenance,
    Registry,
    RegistryService,
    ScoreTuple,
    SuggestOptions,
    Suggestion,
    apply_suggestion,
    load_registry,
    load_registry_file,
    registry_filter,
    suggest,
    suggest_syntax,
)
from .index import (
    LangPref,
    Term,
    TermIndex,
    TermKind,
    build_index,
    normalize_label,
    prefix_search,
    swap_generation,
)
from .knowledge import (
    EndpointSource,
    FetchPolicy,
    KnowledgeBase,
    ensure_from_graphs,
    extract_profiles,
    extract_terms,
    load_graph,
    preload_endpoint,
)
from .lexer import Token, TokenKind, tokenize
from .rdf import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    ParseError,
    Triple,
    UnsupportedConstructError,
    graph_merge,
    parse_ntriples,
    parse_turtle,
    render_ntriples,
    render_turtle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
