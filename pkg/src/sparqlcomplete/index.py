"""Label index over ontology terms with normalized prefix search.

Terms are indexed by every label and description they carry, in every
language, plus the local name of their IRI, so a query can be composed in
the user's preferred language while opaque identifiers (``SIO_000253``)
stay reachable by typing the identifier itself.

Matching is prefix-of-normalized-text.  Results are tiered: labels in the
preferred languages first (in preference order), each language's
descriptions one step below its labels, then untagged labels, then other
languages, with IRI local names always last.  Indexes are immutable
snapshots; updates build a new generation and leave in-flight readers
undisturbed.
"""

from __future__ import annotations

import heapq
import unicodedata
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, TextIO

from .rdf import Iri


class TermKind(Enum):
    ONT_CLASS = "ONT_CLASS"
    PROPERTY = "PROPERTY"
    INDIVIDUAL = "INDIVIDUAL"
    GRAPH = "GRAPH"
    KEYWORD = "KEYWORD"  # syntax suggestions only; never stored in the index
    VARIABLE = "VARIABLE"  # query-local suggestions only; never stored


class EntryField(Enum):
    LABEL = "LABEL"
    DESCRIPTION = "DESCRIPTION"
    LOCALNAME = "LOCALNAME"


# Match tiers within one language tier.
_FIELD_TIER = {EntryField.LABEL: 0, EntryField.DESCRIPTION: 1, EntryField.LOCALNAME: 2}


@dataclass(frozen=True)
class LangPref:
    """Ordered language preference, e.g. ``("de", "en")``.

    Untagged labels rank after every preferred language, other languages
    after that, and IRI local names last.
    """

    tags: tuple[str, ...] = ("en",)

    def __post_init__(self) -> None:
        seen: list[str] = []
        for tag in self.tags:
            low = tag.lower()
            if low and low not in seen:
                seen.append(low)
        object.__setattr__(self, "tags", tuple(seen))

    def lang_tier(self, lang: str) -> int:
        if lang in self.tags:
            return self.tags.index(lang)
        if lang == "":
            return len(self.tags)
        return len(self.tags) + 1

    @property
    def localname_tier(self) -> int:
        return len(self.tags) + 2


@dataclass
class Term:
    """An ontology entity with multilingual labels and descriptions.

    ``kinds`` is a set because real ontologies pun (the same IRI declared
    class and property); position filtering matches any member.
    """

    iri: Iri
    kinds: frozenset[TermKind]
    labels: dict[str, tuple[str, ...]] = field(default_factory=dict)
    descriptions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    source: Iri | None = None

    @property
    def kind(self) -> TermKind:
        for k in (TermKind.PROPERTY, TermKind.ONT_CLASS, TermKind.INDIVIDUAL, TermKind.GRAPH):
            if k in self.kinds:
                return k
        return next(iter(self.kinds))

    def kind_for(self, allowed: Sequence[TermKind]) -> TermKind:
        for k in allowed:
            if k in self.kinds:
                return k
        return self.kind

    def best_label(self, langs: LangPref) -> tuple[int, int, str, str]:
        """(lang_tier, field_tier, text, lang) of the best display label."""
        best: tuple[int, int, str, str] | None = None
        for lang, texts in self.labels.items():
            tier = langs.lang_tier(lang)
            for text in texts:
                cand = (tier, 0, text, lang)
                if best is None or (cand[0], normalize_label(cand[2])) < (
                    best[0],
                    normalize_label(best[2]),
                ):
                    best = cand
        if best is not None:
            return best
        return (langs.localname_tier, 2, self.iri.local_name or self.iri.value, "")

    def best_description(self, langs: LangPref) -> str | None:
        best: tuple[int, str] | None = None
        for lang, texts in self.descriptions.items():
            tier = langs.lang_tier(lang)
            for text in texts:
                if best is None or (tier, text) < best:
                    best = (tier, text)
        return best[1] if best else None


@dataclass(frozen=True)
class IndexEntry:
    normalized_key: str
    term: Term
    matched_text: str
    lang: str
    field: EntryField


@dataclass(frozen=True)
class SearchHit:
    entry: IndexEntry
    tier: int

    @property
    def lang_tier(self) -> int:
        return self.tier // 3

    @property
    def match_tier(self) -> int:
        return self.tier % 3


def normalize_label(s: str) -> str:
    """NFKD-decompose, strip combining marks, case-fold, squeeze whitespace."""
    decomposed = unicodedata.normalize("NFKD", s)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    folded = stripped.casefold()
    # folding can reintroduce decomposable characters; run once more
    folded = unicodedata.normalize("NFKD", folded)
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    return " ".join(folded.split())


def _merge_terms(a: Term, b: Term) -> Term:
    labels = {k: v for k, v in a.labels.items()}
    for lang, texts in b.labels.items():
        have = labels.get(lang, ())
        labels[lang] = have + tuple(t for t in texts if t not in have)
    descriptions = {k: v for k, v in a.descriptions.items()}
    for lang, texts in b.descriptions.items():
        have = descriptions.get(lang, ())
        descriptions[lang] = have + tuple(t for t in texts if t not in have)
    return Term(
        iri=a.iri,
        kinds=a.kinds | b.kinds,
        labels=labels,
        descriptions=descriptions,
        source=a.source or b.source,
    )


@dataclass(frozen=True)
class TermIndex:
    """Immutable snapshot: sorted entries plus an IRI lookup table."""

    entries: tuple[IndexEntry, ...] = ()
    by_iri: dict[str, Term] = field(default_factory=dict)
    generation: int = 0
    _keys: tuple[str, ...] = ()
    _iris_sorted: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.by_iri)

    def iris_with_prefix(self, iri_prefix: str) -> list[Term]:
        """Terms whose IRI starts with *iri_prefix* (exact string match)."""
        lo = bisect_left(self._iris_sorted, iri_prefix)
        out = []
        for i in range(lo, len(self._iris_sorted)):
            if not self._iris_sorted[i].startswith(iri_prefix):
                break
            out.append(self.by_iri[self._iris_sorted[i]])
        return out

    def dump(self, out: TextIO) -> int:
        """Write one diagnostic line per entry; returns the line count."""
        n = 0
        for e in self.entries:
            kinds = ",".join(sorted(k.value for k in e.term.kinds))
            out.write(
                f"{e.normalized_key}\t{e.field.value}\t{e.lang}\t{kinds}\t{e.term.iri.value}\n"
            )
            n += 1
        return n


def build_index(terms: Iterable[Term], generation: int = 0) -> TermIndex:
    """Index one entry per (term, label/description, lang) plus a local-name
    entry per term; terms sharing an IRI are merged first."""
    merged: dict[str, Term] = {}
    for t in terms:
        key = t.iri.value
        merged[key] = _merge_terms(merged[key], t) if key in merged else t

    entries: list[IndexEntry] = []
    for term in merged.values():
        for lang, texts in term.labels.items():
            for text in texts:
                entries.append(IndexEntry(normalize_label(text), term, text, lang, EntryField.LABEL))
        for lang, texts in term.descriptions.items():
            for text in texts:
                entries.append(
                    IndexEntry(normalize_label(text), term, text, lang, EntryField.DESCRIPTION)
                )
        local = term.iri.local_name
        if local:
            entries.append(
                IndexEntry(normalize_label(local), term, local, "", EntryField.LOCALNAME)
            )
    entries.sort(key=lambda e: (e.normalized_key, e.term.iri.value, e.field.value, e.lang, e.matched_text))
    return TermIndex(
        entries=tuple(entries),
        by_iri=merged,
        generation=generation,
        _keys=tuple(e.normalized_key for e in entries),
        _iris_sorted=tuple(sorted(merged)),
    )


def swap_generation(index: TermIndex, new_terms: Iterable[Term]) -> TermIndex:
    """New snapshot containing old plus new terms, generation bumped.

    The old index is left untouched for readers that still hold it.
    """
    combined = list(index.by_iri.values()) + list(new_terms)
    return build_index(combined, generation=index.generation + 1)


def _entry_tier(entry: IndexEntry, langs: LangPref) -> int:
    if entry.field is EntryField.LOCALNAME:
        return langs.localname_tier * 3 + _FIELD_TIER[entry.field]
    return langs.lang_tier(entry.lang) * 3 + _FIELD_TIER[entry.field]


def prefix_search(
    index: TermIndex,
    prefix: str,
    langs: LangPref,
    kinds: frozenset[TermKind] | set[TermKind],
    limit: int,
) -> list[SearchHit]:
    """Entries whose normalized key starts with the normalized prefix.

    Ordered by (tier, matched text normalized, IRI), deduplicated per IRI
    keeping the best tier, truncated to *limit*.  An empty prefix matches
    everything.  Equivalent to a linear scan with the same filter/sort
    (property-tested against exactly that).
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    key = normalize_label(prefix)
    lo = bisect_left(index._keys, key)
    matches: list[tuple[tuple[int, str, str], IndexEntry, int]] = []
    keys = index._keys
    entries = index.entries
    for i in range(lo, len(entries)):
        if not keys[i].startswith(key):
            break
        e = entries[i]
        if not (e.term.kinds & kinds):
            continue
        tier = _entry_tier(e, langs)
        matches.append(((tier, e.normalized_key, e.term.iri.value), e, tier))

    # nsmallest(m) == sorted()[:m]; grow m until the deduped result is full
    m = limit * 2
    while True:
        top = heapq.nsmallest(m, matches, key=lambda x: x[0]) if m < len(matches) else sorted(
            matches, key=lambda x: x[0]
        )
        out: list[SearchHit] = []
        seen: set[str] = set()
        for _, e, tier in top:
            iri = e.term.iri.value
            if iri in seen:
                continue
            seen.add(iri)
            out.append(SearchHit(e, tier))
            if len(out) == limit:
                break
        if len(out) == limit or m >= len(matches):
            return out
        m *= 4
