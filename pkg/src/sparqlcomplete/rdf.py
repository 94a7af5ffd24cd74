"""Minimal RDF data model plus N-Triples and Turtle-subset ingestion.

The model is deliberately small: IRIs, language-tagged or datatyped
literals, blank nodes, triples, and immutable graphs.  It exists to load
ontologies and instance data for the completion index, not to be a general
triple store.  Supported inputs:

* N-Triples, in full, one statement per line.  A lenient mode (the default
  for remote content) skips malformed lines and records a diagnostic per
  line instead of aborting.
* A Turtle subset: ``@prefix``/``@base`` (and the SPARQL-style ``PREFIX``/
  ``BASE`` spellings), prefixed names, the ``a`` keyword, ``;`` and ``,``
  abbreviations, labeled blank nodes, language-tagged/datatyped literals,
  short and long string quoting, and bare numeric/boolean shorthand.
  Collections ``( ... )`` and anonymous blank-node brackets ``[ ... ]`` are
  rejected with an error naming the construct; nothing is skipped silently.

RDF/XML is out of scope; convert such files offline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator
from urllib.parse import urljoin

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

_IRI_FORBIDDEN = re.compile(r'[\s<>"]')
_LANG_TAG = re.compile(r"^[a-z]{1,8}(-[a-z0-9]{1,8})*$")


class ParseError(ValueError):
    """Syntax error in an RDF document; carries a 1-based line number."""

    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, col {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class UnsupportedConstructError(ParseError):
    """A construct outside the supported Turtle subset (named explicitly)."""

    def __init__(self, construct: str, line: int, column: int | None = None):
        super().__init__(f"unsupported construct: {construct}", line, column)
        self.construct = construct


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI, treated as an opaque key (no normalization)."""

    value: str

    def __post_init__(self) -> None:
        if not self.value or _IRI_FORBIDDEN.search(self.value):
            raise ValueError(f"invalid IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value

    @property
    def local_name(self) -> str:
        """Text after the last ``#`` or ``/`` (may be empty)."""
        cut = max(self.value.rfind("#"), self.value.rfind("/"))
        return self.value[cut + 1 :]


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal with an optional language tag or datatype, never both."""

    lexical: str
    lang: str | None = None
    datatype: Iri | None = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")
        if self.lang is not None:
            lowered = self.lang.lower()
            if not _LANG_TAG.match(lowered):
                raise ValueError(f"invalid language tag: {self.lang!r}")
            object.__setattr__(self, "lang", lowered)


@dataclass(frozen=True, slots=True)
class BlankNode:
    """A blank node; labels are scoped to the document that produced them."""

    label: str


Node = Iri | BlankNode | Literal


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri | BlankNode
    predicate: Iri
    object: Node

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")


@dataclass(frozen=True)
class Graph:
    """An immutable set of triples, optionally keyed by its origin IRI."""

    triples: frozenset[Triple] = frozenset()
    source: Iri | None = None

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self.triples

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=_triple_sort_key)

    def with_source(self, source: Iri | None) -> Graph:
        return Graph(self.triples, source)


@dataclass(frozen=True, slots=True)
class ParseDiagnostic:
    line: int
    message: str


def _node_sort_key(n: Node) -> tuple:
    if isinstance(n, Iri):
        return (0, n.value)
    if isinstance(n, BlankNode):
        return (1, n.label)
    return (2, n.lexical, n.lang or "", n.datatype.value if n.datatype else "")


def _triple_sort_key(t: Triple) -> tuple:
    return (_node_sort_key(t.subject), t.predicate.value, _node_sort_key(t.object))


# ---------------------------------------------------------------------------
# N-Triples
# ---------------------------------------------------------------------------

_NT_IRI = r"<([^<>]*)>"
_NT_BLANK = r"_:([A-Za-z0-9_][A-Za-z0-9_.\-]*)"
_NT_STRING = r'"((?:[^"\\]|\\.)*)"'
_NT_SUFFIX = r"(?:@([A-Za-z]{1,8}(?:-[A-Za-z0-9]{1,8})*)|\^\^<([^<>]*)>)?"

_NT_LINE = re.compile(
    rf"^\s*(?:{_NT_IRI}|{_NT_BLANK})"  # subject: iri(1) or blank(2)
    rf"\s+{_NT_IRI}"  # predicate: iri(3)
    rf"\s+(?:{_NT_IRI}|{_NT_BLANK}|{_NT_STRING}{_NT_SUFFIX})"  # object: 4/5/6+7/8
    r"\s*\.\s*(?:#.*)?$"
)

_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")


def _unescape(s: str) -> str:
    def repl(m: re.Match) -> str:
        e = m.group(1)
        if e[0] == "u" or e[0] == "U":
            return chr(int(e[1:], 16))
        try:
            return _ESCAPES[e]
        except KeyError:
            raise ValueError(f"bad escape \\{e}") from None

    return _ESCAPE_RE.sub(repl, s)


def _escape_literal(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def parse_ntriples(
    text: str,
    *,
    strict: bool = False,
    diagnostics: list[ParseDiagnostic] | None = None,
    source: Iri | None = None,
) -> Graph:
    """Parse N-Triples text into a Graph, one statement per line.

    In lenient mode (the default) malformed lines are skipped and recorded
    in *diagnostics* if a list is supplied; in strict mode the first bad
    line raises :class:`ParseError`.  Language tags are lowercased.
    """
    if text.startswith("﻿"):
        text = text[1:]
    triples: set[Triple] = set()
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _NT_LINE.match(line)
        if not m:
            if strict:
                raise ParseError("malformed N-Triples statement", lineno)
            if diagnostics is not None:
                diagnostics.append(ParseDiagnostic(lineno, "malformed N-Triples statement"))
            continue
        try:
            subject: Iri | BlankNode
            if m.group(1) is not None:
                subject = Iri(_unescape(m.group(1)))
            else:
                subject = BlankNode(m.group(2))
            predicate = Iri(_unescape(m.group(3)))
            obj: Node
            if m.group(4) is not None:
                obj = Iri(_unescape(m.group(4)))
            elif m.group(5) is not None:
                obj = BlankNode(m.group(5))
            else:
                lang = m.group(7)
                dt = m.group(8)
                obj = Literal(
                    _unescape(m.group(6)),
                    lang=lang.lower() if lang else None,
                    datatype=Iri(_unescape(dt)) if dt else None,
                )
            triples.add(Triple(subject, predicate, obj))
        except ValueError as exc:
            if strict:
                raise ParseError(str(exc), lineno) from exc
            if diagnostics is not None:
                diagnostics.append(ParseDiagnostic(lineno, str(exc)))
    return Graph(frozenset(triples), source)


def render_ntriples(graph: Graph) -> str:
    """Render a graph as N-Triples, deterministically ordered."""
    out = []
    for t in graph.sorted_triples():
        out.append(f"{_render_node_nt(t.subject)} {_render_node_nt(t.predicate)} {_render_node_nt(t.object)} .")
    return "\n".join(out) + ("\n" if out else "")


def _render_node_nt(n: Node) -> str:
    if isinstance(n, Iri):
        return f"<{n.value}>"
    if isinstance(n, BlankNode):
        return f"_:{n.label}"
    base = f'"{_escape_literal(n.lexical)}"'
    if n.lang:
        return f"{base}@{n.lang}"
    if n.datatype:
        return f"{base}^^<{n.datatype.value}>"
    return base


# ---------------------------------------------------------------------------
# Turtle subset
# ---------------------------------------------------------------------------

_TTL_PNAME = re.compile(
    r"([A-Za-z_][A-Za-z0-9_\-.]*)?:((?:[A-Za-z0-9_\-%](?:[A-Za-z0-9_\-.%]*[A-Za-z0-9_\-%])?)?)"
)
_TTL_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_TTL_BLANK = re.compile(r"_:([A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)")
_TTL_WORD = re.compile(r"[A-Za-z]+")

_XSD_INTEGER = Iri(XSD_NS + "integer")
_XSD_DECIMAL = Iri(XSD_NS + "decimal")
_XSD_DOUBLE = Iri(XSD_NS + "double")
_XSD_BOOLEAN = Iri(XSD_NS + "boolean")

RDF_TYPE = Iri(RDF_NS + "type")


class _TurtleReader:
    """Recursive-descent reader for the documented Turtle subset."""

    def __init__(self, text: str, base: str | None):
        if text.startswith("﻿"):
            text = text[1:]
        self.text = text
        self.pos = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.triples: set[Triple] = set()

    # -- position bookkeeping ------------------------------------------------

    def _line_col(self, pos: int | None = None) -> tuple[int, int]:
        p = self.pos if pos is None else pos
        line = self.text.count("\n", 0, p) + 1
        col = p - (self.text.rfind("\n", 0, p) + 1) + 1
        return line, col

    def _err(self, message: str) -> ParseError:
        line, col = self._line_col()
        return ParseError(message, line, col)

    def _skip_ws(self) -> None:
        text, n = self.text, len(self.text)
        while self.pos < n:
            ch = text[self.pos]
            if ch in " \t\r\n":
                self.pos += 1
            elif ch == "#":
                nl = text.find("\n", self.pos)
                self.pos = n if nl < 0 else nl
            else:
                return

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _at_end(self) -> bool:
        self._skip_ws()
        return self.pos >= len(self.text)

    # -- terms ---------------------------------------------------------------

    def _resolve(self, iri: str) -> Iri:
        if self.base and not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", iri):
            iri = urljoin(self.base, iri)
        try:
            return Iri(iri)
        except ValueError as exc:
            raise self._err(str(exc)) from exc

    def _read_iriref(self) -> Iri:
        assert self._peek() == "<"
        end = self.text.find(">", self.pos + 1)
        if end < 0:
            raise self._err("unterminated IRI")
        raw = self.text[self.pos + 1 : end]
        if re.search(r"[\s<]", raw):
            raise self._err("whitespace inside IRI")
        self.pos = end + 1
        return self._resolve(_unescape(raw))

    def _read_pname(self) -> Iri:
        m = _TTL_PNAME.match(self.text, self.pos)
        if not m:
            raise self._err("expected prefixed name")
        prefix = m.group(1) or ""
        if prefix not in self.prefixes:
            raise self._err(f"undeclared prefix: {prefix}:")
        self.pos = m.end()
        return self._resolve(self.prefixes[prefix] + _unescape(m.group(2)))

    def _read_string(self) -> str:
        quote = self._peek()
        text = self.text
        if text.startswith(quote * 3, self.pos):
            end = text.find(quote * 3, self.pos + 3)
            if end < 0:
                raise self._err("unterminated long string")
            raw = text[self.pos + 3 : end]
            self.pos = end + 3
        else:
            i = self.pos + 1
            chars = []
            while True:
                if i >= len(text) or text[i] == "\n":
                    self.pos = i
                    raise self._err("unterminated string")
                ch = text[i]
                if ch == "\\":
                    if i + 1 >= len(text):
                        self.pos = i
                        raise self._err("unterminated escape")
                    chars.append(text[i : i + 2])
                    i += 2
                    continue
                if ch == quote:
                    break
                chars.append(ch)
                i += 1
            raw = "".join(chars)
            self.pos = i + 1
        try:
            return _unescape(raw)
        except ValueError as exc:
            raise self._err(str(exc)) from exc

    def _read_literal(self) -> Literal:
        lexical = self._read_string()
        if self._peek() == "@":
            m = re.compile(r"@([A-Za-z]{1,8}(?:-[A-Za-z0-9]{1,8})*)").match(self.text, self.pos)
            if not m:
                raise self._err("malformed language tag")
            self.pos = m.end()
            return Literal(lexical, lang=m.group(1).lower())
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            ch = self._peek()
            dt = self._read_iriref() if ch == "<" else self._read_pname()
            return Literal(lexical, datatype=dt)
        return Literal(lexical)

    def _read_object(self) -> Node:
        self._skip_ws()
        ch = self._peek()
        if ch == "<":
            return self._read_iriref()
        if ch in "\"'":
            return self._read_literal()
        if ch == "(":
            raise UnsupportedConstructError("collection", *self._line_col())
        if ch == "[":
            raise UnsupportedConstructError("blank node property list", *self._line_col())
        if self.text.startswith("_:", self.pos):
            return self._read_blank()
        m = _TTL_NUMBER.match(self.text, self.pos)
        if m and not _TTL_PNAME.match(self.text, self.pos):
            self.pos = m.end()
            lex = m.group(0)
            if "e" in lex.lower():
                return Literal(lex, datatype=_XSD_DOUBLE)
            if "." in lex:
                return Literal(lex, datatype=_XSD_DECIMAL)
            return Literal(lex, datatype=_XSD_INTEGER)
        w = _TTL_WORD.match(self.text, self.pos)
        if w and w.group(0) in ("true", "false") and not _TTL_PNAME.match(self.text, self.pos):
            self.pos = w.end()
            return Literal(w.group(0), datatype=_XSD_BOOLEAN)
        if _TTL_PNAME.match(self.text, self.pos):
            return self._read_pname()
        raise self._err("expected object term")

    def _read_blank(self) -> BlankNode:
        m = _TTL_BLANK.match(self.text, self.pos)
        if not m:
            raise self._err("malformed blank node label")
        self.pos = m.end()
        return BlankNode(m.group(1))

    def _read_subject(self) -> Iri | BlankNode:
        self._skip_ws()
        ch = self._peek()
        if ch == "<":
            return self._read_iriref()
        if self.text.startswith("_:", self.pos):
            return self._read_blank()
        if ch == "[":
            raise UnsupportedConstructError("blank node property list", *self._line_col())
        if ch == "(":
            raise UnsupportedConstructError("collection", *self._line_col())
        return self._read_pname()

    def _read_verb(self) -> Iri:
        self._skip_ws()
        if self._peek() == "<":
            return self._read_iriref()
        # 'a' only when not the start of a longer name or pname
        if self._peek() == "a":
            nxt = self.text[self.pos + 1 : self.pos + 2]
            if not nxt or not re.match(r"[A-Za-z0-9_\-:.]", nxt):
                self.pos += 1
                return RDF_TYPE
        return self._read_pname()

    # -- statements ----------------------------------------------------------

    def _expect(self, ch: str) -> None:
        self._skip_ws()
        if self._peek() != ch:
            raise self._err(f"expected {ch!r}")
        self.pos += 1

    def _read_directive(self) -> bool:
        """Consume one @prefix/@base/PREFIX/BASE directive if present."""
        self._skip_ws()
        text = self.text
        at_form = None
        if text.startswith("@prefix", self.pos):
            at_form, kind = True, "prefix"
            self.pos += len("@prefix")
        elif text.startswith("@base", self.pos):
            at_form, kind = True, "base"
            self.pos += len("@base")
        else:
            m = re.compile(r"(PREFIX|BASE)\b", re.IGNORECASE).match(text, self.pos)
            # Only treat as a directive if it is followed by directive syntax;
            # a pname like BASE:x must not be swallowed.
            if m and text[m.end() : m.end() + 1] != ":":
                at_form, kind = False, m.group(1).lower()
                self.pos = m.end()
            else:
                return False
        if kind == "prefix":
            self._skip_ws()
            m = re.compile(r"([A-Za-z_][A-Za-z0-9_\-.]*)?:").match(text, self.pos)
            if not m:
                raise self._err("expected prefix label")
            self.pos = m.end()
            self._skip_ws()
            if self._peek() != "<":
                raise self._err("expected IRI in prefix directive")
            iri = self._read_iriref()
            self.prefixes[m.group(1) or ""] = iri.value
        else:
            self._skip_ws()
            if self._peek() != "<":
                raise self._err("expected IRI in base directive")
            self.base = self._read_iriref().value
        if at_form:
            self._expect(".")
        else:
            # SPARQL-style directives take no terminating dot
            self._skip_ws()
            if self._peek() == ".":
                self.pos += 1
        return True

    def _read_triples(self) -> None:
        subject = self._read_subject()
        while True:
            verb = self._read_verb()
            while True:
                obj = self._read_object()
                self.triples.add(Triple(subject, verb, obj))
                self._skip_ws()
                if self._peek() == ",":
                    self.pos += 1
                    continue
                break
            self._skip_ws()
            if self._peek() == ";":
                self.pos += 1
                self._skip_ws()
                # a ; may be followed by . or } (dangling semicolon is legal)
                if self._peek() in ".;" or self._at_end():
                    break
                continue
            break
        self._expect(".")

    def read_document(self) -> None:
        while not self._at_end():
            if self._read_directive():
                continue
            self._read_triples()


def parse_turtle(text: str, base: Iri | None = None, *, source: Iri | None = None) -> Graph:
    """Parse the documented Turtle subset into a Graph.

    Raises :class:`ParseError` with line/column on syntax errors and
    :class:`UnsupportedConstructError` for collections or anonymous
    blank-node property lists.
    """
    reader = _TurtleReader(text, base.value if base else None)
    reader.read_document()
    return Graph(frozenset(reader.triples), source)


def render_turtle(graph: Graph, prefixes: dict[str, str] | None = None) -> str:
    """Render a graph in the supported Turtle subset (``;``/``,`` grouping)."""
    prefixes = dict(prefixes or {})
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes.items())]
    if lines:
        lines.append("")

    def shorten(n: Node) -> str:
        if isinstance(n, Iri):
            for p, ns in prefixes.items():
                if n.value.startswith(ns):
                    local = n.value[len(ns):]
                    if re.fullmatch(r"[A-Za-z0-9_][A-Za-z0-9_\-]*", local or ""):
                        return f"{p}:{local}"
            return f"<{n.value}>"
        if isinstance(n, BlankNode):
            return f"_:{n.label}"
        rendered = _render_node_nt(n)
        if isinstance(n, Literal) and n.datatype:
            return f'"{_escape_literal(n.lexical)}"^^{shorten(n.datatype)}'
        return rendered

    by_subject: dict[str, list[Triple]] = {}
    for t in graph.sorted_triples():
        by_subject.setdefault(shorten(t.subject), []).append(t)
    for subj, trips in by_subject.items():
        by_pred: dict[str, list[str]] = {}
        for t in trips:
            pred = "a" if t.predicate == RDF_TYPE else shorten(t.predicate)
            by_pred.setdefault(pred, []).append(shorten(t.object))
        parts = [f"{pred} {', '.join(objs)}" for pred, objs in by_pred.items()]
        joiner = " ;\n    "
        lines.append(f"{subj} {joiner.join(parts)} .")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Merging and blank-node handling
# ---------------------------------------------------------------------------


def graph_merge(graphs: Iterable[Graph]) -> Graph:
    """Set-union of graphs; colliding blank-node labels are renamed apart.

    Equal graphs are deduplicated first, so merging a graph with itself is
    the identity.  When two distinct inputs use the same blank label, the
    later graph's label is renamed with a per-source ``g{i}_`` prefix so
    accidental coreference never occurs.
    """
    distinct: list[Graph] = []
    for g in graphs:
        if g not in distinct:
            distinct.append(g)
    seen_labels: set[str] = set()
    merged: set[Triple] = set()
    for i, g in enumerate(distinct):
        labels = {
            n.label
            for t in g.triples
            for n in (t.subject, t.object)
            if isinstance(n, BlankNode)
        }
        clashes = labels & seen_labels
        mapping = {lab: f"g{i}_{lab}" for lab in clashes}
        seen_labels.update(mapping.get(lab, lab) for lab in labels)
        if mapping:
            for t in g.triples:
                merged.add(_relabel_triple(t, mapping))
        else:
            merged.update(g.triples)
    return Graph(frozenset(merged))


def _relabel_triple(t: Triple, mapping: dict[str, str]) -> Triple:
    s = t.subject
    o = t.object
    if isinstance(s, BlankNode) and s.label in mapping:
        s = BlankNode(mapping[s.label])
    if isinstance(o, BlankNode) and o.label in mapping:
        o = BlankNode(mapping[o.label])
    if s is t.subject and o is t.object:
        return t
    return Triple(s, t.predicate, o)


def canonicalize_blank_labels(graph: Graph) -> Graph:
    """Rename blank nodes to b0, b1, ... by structural signature.

    Lets two graphs be compared for equality up to consistent blank-node
    relabeling.  Signatures are refined over a few rounds of neighborhood
    hashing, which is enough to distinguish the blank structures that occur
    in ontology-style data (it is not a general isomorphism decision).
    """
    blanks = {
        n.label
        for t in graph.triples
        for n in (t.subject, t.object)
        if isinstance(n, BlankNode)
    }
    if not blanks:
        return Graph(graph.triples, None)
    sig: dict[str, tuple] = {b: () for b in blanks}
    for _ in range(3):
        nxt: dict[str, list] = {b: [] for b in blanks}
        for t in graph.triples:
            s, o = t.subject, t.object
            if isinstance(s, BlankNode):
                other = sig[o.label] if isinstance(o, BlankNode) else _node_sort_key(o)
                nxt[s.label].append(("out", t.predicate.value, other))
            if isinstance(o, BlankNode):
                other = sig[s.label] if isinstance(s, BlankNode) else _node_sort_key(s)
                nxt[o.label].append(("in", t.predicate.value, other))
        sig = {b: tuple(sorted(map(repr, edges))) for b, edges in nxt.items()}
    order = sorted(blanks, key=lambda b: (sig[b], b))
    mapping = {b: f"b{i}" for i, b in enumerate(order)}
    return Graph(frozenset(_relabel_triple(t, mapping) for t in graph.triples), None)


def graphs_equal_up_to_blanks(a: Graph, b: Graph) -> bool:
    return canonicalize_blank_labels(a).triples == canonicalize_blank_labels(b).triples
