"""Derive the grammatical context at a cursor inside partial SPARQL text.

Everything a completion decision needs is computed from the text strictly
left of the cursor: declared prefixes, dataset clauses, variables in order
of first appearance, triple patterns completed so far, the clause position
(subject / predicate / object / keyword / prologue), the token being typed,
and the subject and predicate of the clause under construction.

The analysis is total.  Ill-formed input never raises: an uninterpretable
token aborts the clause it appears in (contributing no pattern) and the
reader resynchronizes at the next ``.``, ``;``, ``,``, ``{`` or ``}``.
SELECT and ASK bodies get full position tracking; CONSTRUCT and DESCRIBE
templates, FILTER bodies, and GRAPH name slots report UNKNOWN.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .lexer import Token, TokenKind, tokenize
from .rdf import BlankNode, Iri, Literal, RDF_NS, XSD_NS

RDF_TYPE = Iri(RDF_NS + "type")
_XSD_INTEGER = Iri(XSD_NS + "integer")
_XSD_DECIMAL = Iri(XSD_NS + "decimal")
_XSD_DOUBLE = Iri(XSD_NS + "double")
_XSD_BOOLEAN = Iri(XSD_NS + "boolean")


class UnknownPrefixError(KeyError):
    def __init__(self, prefix: str):
        super().__init__(prefix)
        self.prefix = prefix

    def __str__(self) -> str:
        return f"undeclared prefix: {self.prefix!r}"


@dataclass(frozen=True, slots=True)
class Variable:
    """A query variable; ``?x`` and ``$x`` are the same variable ``x``."""

    name: str

    def __str__(self) -> str:
        return "?" + self.name


PatternNode = Variable | Iri | Literal | BlankNode


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: PatternNode
    predicate: Variable | Iri
    object: PatternNode


class ClausePosition(Enum):
    SUBJECT_POS = "SUBJECT_POS"
    PREDICATE_POS = "PREDICATE_POS"
    OBJECT_POS = "OBJECT_POS"
    KEYWORD_POS = "KEYWORD_POS"
    PROLOGUE_POS = "PROLOGUE_POS"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class QueryContext:
    """Everything derivable from the text left of the cursor."""

    prefixes: dict[str, Iri] = field(default_factory=dict)
    base: Iri | None = None
    from_graphs: tuple[Iri, ...] = ()
    from_named: tuple[Iri, ...] = ()
    variables: tuple[str, ...] = ()
    patterns: tuple[TriplePattern, ...] = ()
    position: ClausePosition = ClausePosition.PROLOGUE_POS
    partial_token: str = ""
    focus_subject: PatternNode | None = None
    focus_predicate: PatternNode | None = None
    in_string: bool = False
    in_comment: bool = False
    # Grammar-legal keywords at this point; consumed by syntax suggestions.
    keyword_candidates: tuple[str, ...] = ()


def pattern_node_text(node: PatternNode | None) -> str | None:
    """Stable textual form used on the wire and in golden files."""
    if node is None:
        return None
    if isinstance(node, Variable):
        return str(node)
    if isinstance(node, Iri):
        return f"<{node.value}>"
    if isinstance(node, BlankNode):
        return f"_:{node.label}"
    return node.lexical


def expand_prefixed_name(ctx: QueryContext, pname: str) -> Iri:
    """Expand ``prefix:local`` against the context's PREFIX declarations."""
    prefix, sep, local = pname.partition(":")
    if not sep:
        prefix, local = "", pname
    ns = ctx.prefixes.get(prefix)
    if ns is None:
        raise UnknownPrefixError(prefix)
    return Iri(ns.value + local)


# Tokens the cursor can be "inside": prefixes of VAR/IRIREF/PNAME/KEYWORD.
_PARTIAL_KINDS = (
    TokenKind.VAR,
    TokenKind.PNAME,
    TokenKind.KEYWORD,
    TokenKind.A_KEYWORD,
    TokenKind.IRIREF,
)

# Sentinel for a lexically fine but unresolvable term (e.g. undeclared
# prefix): it fills its slot so the position advances, but any pattern
# containing it is dropped.
_UNRESOLVED = object()

_PROLOGUE_KEYWORDS = ("SELECT", "ASK", "PREFIX", "BASE")
_DATASET_KEYWORDS = ("FROM", "FROM NAMED", "WHERE")
_GROUP_KEYWORDS = ("FILTER", "OPTIONAL", "GRAPH")
_MODS_KEYWORDS = ("ORDER BY", "LIMIT", "OFFSET")


class _Phase(Enum):
    PROLOGUE = 0
    PREFIX_NAME = 1
    PREFIX_IRI = 2
    BASE_IRI = 3
    SELECT_PROJ = 4
    DATASET = 5
    DATASET_IRI = 6
    DATASET_NAMED_IRI = 7
    PRE_GROUP = 8
    GROUP = 9
    MODS = 10
    MODS_ORDER = 11
    MODS_NUM = 12
    TEMPLATE = 13


@dataclass
class _Frame:
    slot: str = "subj"  # subj | pred | obj | after_obj
    subject: object = None
    predicate: object = None
    after_group: bool = False  # a nested group just closed (UNION legal)
    resync: bool = False


class _ContextReader:
    def __init__(self) -> None:
        self.prefixes: dict[str, Iri] = {}
        self.base: Iri | None = None
        self.from_graphs: list[Iri] = []
        self.from_named: list[Iri] = []
        self.variables: list[str] = []
        self.patterns: list[TriplePattern] = []
        self.phase = _Phase.PROLOGUE
        self.frames: list[_Frame] = []
        self.pending_prefix_label: str | None = None
        self.proj_seen = False
        self.distinct_seen = False
        self.pending_brace = False
        self.pending_graph_name = False
        self.filter_pending_paren = False
        self.filter_depth = 0
        self.select_paren_depth = 0

    # -- term construction -----------------------------------------------

    def _note_var(self, name: str) -> None:
        if name and name not in self.variables:
            self.variables.append(name)

    def _resolve_pname(self, text: str):
        prefix, _, local = text.partition(":")
        ns = self.prefixes.get(prefix)
        if ns is None:
            return _UNRESOLVED
        try:
            return Iri(ns.value + local)
        except ValueError:
            return _UNRESOLVED

    def _resolve_iriref(self, text: str):
        raw = text[1:-1] if text.endswith(">") else text[1:]
        if self.base and raw and not _has_scheme(raw):
            from urllib.parse import urljoin

            raw = urljoin(self.base.value, raw)
        try:
            return Iri(raw)
        except ValueError:
            return _UNRESOLVED

    def _term_node(self, tokens: list[Token], i: int):
        """Build the node for tokens[i]; returns (node-or-None, next index)."""
        tok = tokens[i]
        k = tok.kind
        if k is TokenKind.VAR:
            name = tok.text[1:]
            if not name:
                return None, i + 1
            return Variable(name), i + 1
        if k is TokenKind.IRIREF:
            return self._resolve_iriref(tok.text), i + 1
        if k is TokenKind.PNAME:
            return self._resolve_pname(tok.text), i + 1
        if k is TokenKind.BLANK_LABEL:
            return BlankNode(tok.text[2:]), i + 1
        if k is TokenKind.STRING:
            lexical = _string_value(tok.text)
            j = i + 1
            if j < len(tokens) and tokens[j].kind is TokenKind.LANGTAG:
                try:
                    return Literal(lexical, lang=tokens[j].text[1:].lower()), j + 1
                except ValueError:
                    return _UNRESOLVED, j + 1
            if (
                j + 1 < len(tokens)
                and tokens[j].kind is TokenKind.PUNCT
                and tokens[j].text == "^^"
            ):
                dt, nxt = self._term_node(tokens, j + 1)
                if isinstance(dt, Iri):
                    return Literal(lexical, datatype=dt), nxt
                return _UNRESOLVED, nxt
            return Literal(lexical), j
        if k is TokenKind.NUMBER:
            lex = tok.text
            if "e" in lex.lower():
                dt = _XSD_DOUBLE
            elif "." in lex:
                dt = _XSD_DECIMAL
            else:
                dt = _XSD_INTEGER
            return Literal(lex, datatype=dt), i + 1
        if k is TokenKind.KEYWORD and tok.text.upper() in ("TRUE", "FALSE"):
            return Literal(tok.text.lower(), datatype=_XSD_BOOLEAN), i + 1
        return None, i + 1

    # -- group-pattern machinery -------------------------------------------

    def _frame(self) -> _Frame:
        return self.frames[-1]

    def _garbage(self) -> None:
        if self.frames:
            f = self._frame()
            f.resync = True
            f.subject = None
            f.predicate = None

    def _push_group(self) -> None:
        if self.frames:
            f = self._frame()
            f.slot = "subj"
            f.subject = None
            f.predicate = None
            f.resync = False
        self.frames.append(_Frame())
        self.pending_brace = False
        if self.phase is not _Phase.TEMPLATE:
            self.phase = _Phase.GROUP

    def _pop_group(self) -> None:
        if self.frames:
            self.frames.pop()
        if self.frames:
            f = self._frame()
            f.slot = "subj"
            f.subject = None
            f.predicate = None
            f.after_group = True
            f.resync = False
        elif self.phase is _Phase.GROUP:
            self.phase = _Phase.MODS

    def _group_punct(self, ch: str) -> None:
        f = self._frame()
        if ch == ".":
            f.slot, f.subject, f.predicate = "subj", None, None
            f.after_group = False
            f.resync = False
        elif ch == ";":
            f.slot, f.predicate = "pred", None
            f.resync = False
        elif ch == ",":
            if f.predicate is None:
                f.slot = "pred" if f.subject is not None else "subj"
            else:
                f.slot = "obj"
            f.resync = False
        else:
            self._garbage()

    def _group_term(self, tokens: list[Token], i: int) -> int:
        f = self._frame()
        tok = tokens[i]
        if f.resync:
            return i + 1  # ignored until a sync token
        if f.slot == "subj":
            node, nxt = self._term_node(tokens, i)
            if node is None or isinstance(node, Literal):
                self._garbage()
                return nxt
            f.subject = node
            f.slot = "pred"
            f.after_group = False
            return nxt
        if f.slot == "pred":
            if tok.kind is TokenKind.A_KEYWORD:
                f.predicate = RDF_TYPE
                f.slot = "obj"
                return i + 1
            node, nxt = self._term_node(tokens, i)
            if node is None or isinstance(node, (Literal, BlankNode)):
                self._garbage()
                return nxt
            f.predicate = node
            f.slot = "obj"
            return nxt
        if f.slot == "obj":
            node, nxt = self._term_node(tokens, i)
            if node is None:
                self._garbage()
                return nxt
            if (
                node is not _UNRESOLVED
                and f.subject is not None
                and f.subject is not _UNRESOLVED
                and f.predicate is not None
                and f.predicate is not _UNRESOLVED
            ):
                self.patterns.append(TriplePattern(f.subject, f.predicate, node))
            f.slot = "after_obj"
            return nxt
        # after an object only punctuation or a group keyword is legal
        self._garbage()
        return i + 1

    # -- main loop ---------------------------------------------------------

    def feed(self, tokens: list[Token]) -> None:
        i = 0
        while i < len(tokens):
            tok = tokens[i]
            if tok.kind is TokenKind.VAR:
                self._note_var(tok.text[1:])
            if self.filter_depth > 0:
                if tok.kind is TokenKind.PUNCT:
                    if tok.text == "(":
                        self.filter_depth += 1
                    elif tok.text == ")":
                        self.filter_depth -= 1
                i += 1
                continue
            if self.filter_pending_paren:
                self.filter_pending_paren = False
                if tok.kind is TokenKind.PUNCT and tok.text == "(":
                    self.filter_depth = 1
                    i += 1
                    continue
                self._garbage()
                # fall through: process the unexpected token normally
            i = self._dispatch(tokens, i)

    def _dispatch(self, tokens: list[Token], i: int) -> int:
        tok = tokens[i]
        phase = self.phase

        if phase is _Phase.TEMPLATE:
            return i + 1

        if self.select_paren_depth > 0:
            if tok.kind is TokenKind.PUNCT:
                if tok.text == "(":
                    self.select_paren_depth += 1
                elif tok.text == ")":
                    self.select_paren_depth -= 1
            return i + 1

        if self.pending_graph_name:
            if tok.kind in (TokenKind.VAR, TokenKind.IRIREF, TokenKind.PNAME):
                self.pending_graph_name = False
                self.pending_brace = True
            elif tok.kind is TokenKind.PUNCT and tok.text == "{":
                self.pending_graph_name = False
                self._push_group()
            else:
                self.pending_graph_name = False
                self._garbage()
            return i + 1

        if self.pending_brace:
            if tok.kind is TokenKind.PUNCT and tok.text == "{":
                self._push_group()
            else:
                self.pending_brace = False
                self._garbage()
            return i + 1

        if phase in (_Phase.PROLOGUE, _Phase.SELECT_PROJ, _Phase.DATASET, _Phase.PRE_GROUP):
            handled = self._keyword_or_top(tokens, i)
            if handled is not None:
                return handled

        if phase is _Phase.PREFIX_NAME:
            if tok.kind is TokenKind.PNAME:
                self.pending_prefix_label = tok.text.partition(":")[0]
                self.phase = _Phase.PREFIX_IRI
            else:
                self.phase = _Phase.PROLOGUE
            return i + 1
        if phase is _Phase.PREFIX_IRI:
            if tok.kind is TokenKind.IRIREF:
                node = self._resolve_iriref(tok.text)
                if isinstance(node, Iri) and self.pending_prefix_label is not None:
                    self.prefixes[self.pending_prefix_label] = node
            self.pending_prefix_label = None
            self.phase = _Phase.PROLOGUE
            return i + 1
        if phase is _Phase.BASE_IRI:
            if tok.kind is TokenKind.IRIREF:
                node = self._resolve_iriref(tok.text)
                if isinstance(node, Iri):
                    self.base = node
            self.phase = _Phase.PROLOGUE
            return i + 1

        if phase in (_Phase.DATASET_IRI, _Phase.DATASET_NAMED_IRI):
            if tok.kind is TokenKind.KEYWORD and tok.text.upper() == "NAMED":
                self.phase = _Phase.DATASET_NAMED_IRI
                return i + 1
            if tok.kind in (TokenKind.IRIREF, TokenKind.PNAME):
                node = (
                    self._resolve_iriref(tok.text)
                    if tok.kind is TokenKind.IRIREF
                    else self._resolve_pname(tok.text)
                )
                if isinstance(node, Iri):
                    if phase is _Phase.DATASET_NAMED_IRI:
                        if node not in self.from_named:
                            self.from_named.append(node)
                    elif node not in self.from_graphs:
                        self.from_graphs.append(node)
            self.phase = _Phase.DATASET
            return i + 1

        if phase is _Phase.GROUP:
            return self._group_token(tokens, i)

        if phase in (_Phase.MODS, _Phase.MODS_ORDER, _Phase.MODS_NUM):
            if tok.kind is TokenKind.KEYWORD:
                up = tok.text.upper()
                if up in ("ORDER BY",):
                    self.phase = _Phase.MODS_ORDER
                elif up in ("LIMIT", "OFFSET"):
                    self.phase = _Phase.MODS_NUM
                elif up in ("ASC", "DESC") and phase is _Phase.MODS_ORDER:
                    pass
            elif tok.kind is TokenKind.NUMBER and phase is _Phase.MODS_NUM:
                self.phase = _Phase.MODS
            return i + 1

        return i + 1

    def _keyword_or_top(self, tokens: list[Token], i: int) -> int | None:
        """Handle tokens in the top-level phases; None means unhandled."""
        tok = tokens[i]
        if tok.kind is TokenKind.PUNCT and tok.text == "{":
            self._push_group()
            return i + 1
        if tok.kind is TokenKind.KEYWORD:
            up = tok.text.upper()
            if up == "PREFIX" and self.phase is _Phase.PROLOGUE:
                self.phase = _Phase.PREFIX_NAME
                return i + 1
            if up == "BASE" and self.phase is _Phase.PROLOGUE:
                self.phase = _Phase.BASE_IRI
                return i + 1
            if up == "SELECT":
                self.phase = _Phase.SELECT_PROJ
                self.proj_seen = False
                self.distinct_seen = False
                return i + 1
            if up == "ASK":
                self.phase = _Phase.DATASET
                return i + 1
            if up in ("CONSTRUCT", "DESCRIBE"):
                self.phase = _Phase.TEMPLATE
                return i + 1
            if up in ("DISTINCT", "REDUCED") and self.phase is _Phase.SELECT_PROJ:
                self.distinct_seen = True
                return i + 1
            if up == "WHERE":
                self.phase = _Phase.PRE_GROUP
                return i + 1
            if up == "FROM":
                self.phase = _Phase.DATASET_IRI
                return i + 1
            if up == "FROM NAMED":
                self.phase = _Phase.DATASET_NAMED_IRI
                return i + 1
            return i + 1  # other keywords: tolerated, no effect
        if self.phase is _Phase.SELECT_PROJ:
            if tok.kind is TokenKind.VAR:
                self.proj_seen = True
                return i + 1
            if tok.kind is TokenKind.PUNCT and tok.text == "*":
                self.proj_seen = True
                return i + 1
            if tok.kind is TokenKind.PUNCT and tok.text == "(":
                self.select_paren_depth = 1
                self.proj_seen = True
                return i + 1
            return i + 1
        if self.phase is _Phase.PROLOGUE:
            return i + 1
        if self.phase is _Phase.DATASET:
            if tok.kind is TokenKind.VAR:
                return i + 1  # continued projection after SELECT
            return i + 1
        return None

    def _group_token(self, tokens: list[Token], i: int) -> int:
        tok = tokens[i]
        f = self._frame()
        if tok.kind is TokenKind.PUNCT:
            ch = tok.text
            if ch == "{":
                self._push_group()
            elif ch == "}":
                self._pop_group()
            elif ch in ".;,":
                self._group_punct(ch)
            elif ch == "(":
                self._garbage()
            elif ch == ")":
                pass  # stray: ignore
            else:
                if not f.resync:
                    self._garbage()
            return i + 1
        if tok.kind is TokenKind.KEYWORD:
            up = tok.text.upper()
            if up in ("OPTIONAL", "UNION", "GRAPH", "FILTER"):
                # these terminate the current triples block
                f.slot, f.subject, f.predicate = "subj", None, None
                f.resync = False
                if up == "GRAPH":
                    self.pending_graph_name = True
                elif up == "FILTER":
                    self.filter_pending_paren = True
                else:
                    self.pending_brace = True
                return i + 1
            if up in ("TRUE", "FALSE") and f.slot == "obj" and not f.resync:
                return self._group_term(tokens, i)
            self._garbage()
            return i + 1
        if f.resync:
            return i + 1
        if tok.kind in (
            TokenKind.VAR,
            TokenKind.IRIREF,
            TokenKind.PNAME,
            TokenKind.BLANK_LABEL,
            TokenKind.STRING,
            TokenKind.NUMBER,
            TokenKind.A_KEYWORD,
        ):
            return self._group_term(tokens, i)
        self._garbage()
        return i + 1

    # -- final position --------------------------------------------------

    def result_position(self) -> tuple[ClausePosition, tuple[str, ...], object, object]:
        """(position, keyword candidates, focus subject, focus predicate)."""
        if self.phase is _Phase.TEMPLATE or self.filter_depth > 0 or self.filter_pending_paren:
            return ClausePosition.UNKNOWN, (), None, None
        if self.pending_graph_name:
            return ClausePosition.UNKNOWN, (), None, None
        if self.pending_brace:
            return ClausePosition.KEYWORD_POS, (), None, None
        if self.select_paren_depth > 0:
            return ClausePosition.UNKNOWN, (), None, None
        phase = self.phase
        if phase in (_Phase.PREFIX_NAME, _Phase.PREFIX_IRI, _Phase.BASE_IRI):
            return ClausePosition.PROLOGUE_POS, (), None, None
        if phase is _Phase.PROLOGUE:
            return ClausePosition.PROLOGUE_POS, _PROLOGUE_KEYWORDS, None, None
        if phase is _Phase.SELECT_PROJ:
            kw = _DATASET_KEYWORDS if self.proj_seen else (("DISTINCT",) if not self.distinct_seen else ())
            return ClausePosition.KEYWORD_POS, kw, None, None
        if phase is _Phase.DATASET:
            return ClausePosition.KEYWORD_POS, _DATASET_KEYWORDS, None, None
        if phase in (_Phase.DATASET_IRI, _Phase.DATASET_NAMED_IRI):
            return ClausePosition.KEYWORD_POS, (), None, None
        if phase is _Phase.PRE_GROUP:
            return ClausePosition.KEYWORD_POS, (), None, None
        if phase is _Phase.MODS:
            return ClausePosition.KEYWORD_POS, _MODS_KEYWORDS, None, None
        if phase is _Phase.MODS_ORDER:
            return ClausePosition.KEYWORD_POS, ("ASC", "DESC") + _MODS_KEYWORDS, None, None
        if phase is _Phase.MODS_NUM:
            return ClausePosition.KEYWORD_POS, (), None, None
        # inside a group
        f = self._frame()
        if f.resync:
            return ClausePosition.UNKNOWN, (), None, None
        if f.slot == "subj":
            kw = _GROUP_KEYWORDS + (("UNION",) if f.after_group else ())
            return ClausePosition.SUBJECT_POS, kw, None, None
        subj = f.subject if f.subject is not _UNRESOLVED else None
        if f.slot == "pred":
            return ClausePosition.PREDICATE_POS, ("a",), subj, None
        pred = f.predicate if f.predicate is not _UNRESOLVED else None
        if f.slot == "obj":
            return ClausePosition.OBJECT_POS, (), subj, pred
        return ClausePosition.KEYWORD_POS, _GROUP_KEYWORDS, None, None


def _has_scheme(s: str) -> bool:
    import re as _re

    return bool(_re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", s))


def _string_value(raw: str) -> str:
    for q in ('"""', "'''"):
        if raw.startswith(q):
            body = raw[3:]
            return body[:-3] if body.endswith(q) else body
    if raw and raw[0] in "\"'":
        body = raw[1:]
        if body.endswith(raw[0]):
            body = body[:-1]
        return _light_unescape(body)
    return raw


def _light_unescape(s: str) -> str:
    if "\\" not in s:
        return s
    out = []
    i = 0
    table = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            out.append(table.get(s[i + 1], s[i + 1]))
            i += 2
        else:
            out.append(s[i])
            i += 1
    return "".join(out)


def _byte_prefix(text: str, cursor: int | None) -> str:
    """Slice *text* at a byte offset, snapping down to a char boundary."""
    if cursor is None:
        return text
    if text.isascii():
        return text[: max(0, min(cursor, len(text)))]
    data = text.encode("utf-8")
    cursor = max(0, min(cursor, len(data)))
    while 0 < cursor < len(data) and (data[cursor] & 0xC0) == 0x80:
        cursor -= 1  # snap down off a continuation byte
    return data[:cursor].decode("utf-8", errors="ignore")


def derive_context(text: str, cursor: int | None = None) -> QueryContext:
    """Analyze the text strictly left of *cursor* (a UTF-8 byte offset).

    Total: returns a context for any input and any cursor.  ``None`` means
    end of text.
    """
    prefix = _byte_prefix(text, cursor)
    tokens = tokenize(prefix)
    # trailing layout state
    in_string = False
    in_comment = False
    last = tokens[-2] if len(tokens) >= 2 else None  # before EOF
    partial = ""
    if last is not None:
        if last.kind is TokenKind.INCOMPLETE:
            if last.text[0] in "\"'":
                in_string = True
            else:
                partial = last.text
        elif last.kind is TokenKind.COMMENT:
            in_comment = True
        elif last.kind in _PARTIAL_KINDS:
            partial = last.text

    significant = [t for t in tokens if not t.is_layout() and t.kind is not TokenKind.INCOMPLETE]
    if partial and significant and significant[-1] is last:
        significant = significant[:-1]

    reader = _ContextReader()
    reader.feed(significant)
    position, keywords, focus_subject, focus_predicate = reader.result_position()
    if in_string or in_comment:
        position, keywords = ClausePosition.UNKNOWN, ()
        focus_subject = focus_predicate = None
    return QueryContext(
        prefixes=reader.prefixes,
        base=reader.base,
        from_graphs=tuple(reader.from_graphs),
        from_named=tuple(reader.from_named),
        variables=tuple(reader.variables),
        patterns=tuple(reader.patterns),
        position=position,
        partial_token=partial,
        focus_subject=focus_subject,
        focus_predicate=focus_predicate,
        in_string=in_string,
        in_comment=in_comment,
        keyword_candidates=keywords,
    )


# ---------------------------------------------------------------------------
# Variable-to-individual connectivity
# ---------------------------------------------------------------------------


class Direction(Enum):
    """How an edge was traversed relative to its triple pattern."""

    FORWARD = "subject_to_object"
    REVERSE = "object_to_subject"


def connected_individuals(
    ctx: QueryContext, variable: str, max_depth: int = 2
) -> list[tuple[Iri, list[tuple[Iri, Direction]]]]:
    """IRIs reachable from *variable* through the query's triple patterns.

    Patterns form an undirected multigraph over their subject/object nodes
    (predicates label the edges; variable predicates are not traversable).
    Returns each reachable IRI once with one shortest path, ties broken by
    predicate IRI order with forward traversal preferred, ordered by
    (depth, IRI).
    """
    start: PatternNode = Variable(variable.lstrip("?$"))
    edges: dict[PatternNode, list[tuple[tuple, PatternNode, Iri, Direction]]] = {}
    for p in ctx.patterns:
        if not isinstance(p.predicate, Iri):
            continue
        fwd = (p.predicate.value, 0)
        rev = (p.predicate.value, 1)
        edges.setdefault(p.subject, []).append((fwd, p.object, p.predicate, Direction.FORWARD))
        edges.setdefault(p.object, []).append((rev, p.subject, p.predicate, Direction.REVERSE))
    if start not in edges:
        return []

    Path = tuple  # of (pred value, direction rank) pairs, for comparison
    best: dict[PatternNode, tuple[Path, list[tuple[Iri, Direction]]]] = {start: ((), [])}
    frontier: dict[PatternNode, tuple[Path, list[tuple[Iri, Direction]]]] = dict(best)
    depth_of: dict[PatternNode, int] = {start: 0}

    for depth in range(1, max_depth + 1):
        candidates: dict[PatternNode, tuple[Path, list[tuple[Iri, Direction]]]] = {}
        for node, (key_path, path) in frontier.items():
            for edge_key, other, pred, direction in sorted(
                edges.get(node, []), key=lambda e: e[0]
            ):
                if other in best:
                    continue
                cand_key = key_path + (edge_key,)
                cand_path = path + [(pred, direction)]
                prev = candidates.get(other)
                if prev is None or cand_key < prev[0]:
                    candidates[other] = (cand_key, cand_path)
        for node, entry in candidates.items():
            best[node] = entry
            depth_of[node] = depth
        frontier = candidates
        if not frontier:
            break

    results = [
        (node, best[node][1])
        for node in best
        if isinstance(node, Iri) and node != start
    ]
    results.sort(key=lambda r: (depth_of[r[0]], r[0].value))
    return results
