"""Error-tolerant SPARQL tokenizer.

The scanner is total: any byte string yields a token list, and
concatenating the token texts reproduces the input exactly (whitespace and
comments are tokens too).  It never raises.  Unrecognizable characters
become single-character PUNCT tokens; an unterminated string or IRI at the
end of the scanned region becomes a single INCOMPLETE token.  Offsets are
byte offsets into the UTF-8 encoding of the input, which is what the wire
protocol speaks.

Two keyword pairs that the suggestion vocabulary treats as units,
``FROM NAMED`` and ``ORDER BY``, are fused into one KEYWORD token when
separated by exactly one space, so an accepted suggestion always splices
back in as a single token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    KEYWORD = "KEYWORD"
    VAR = "VAR"
    IRIREF = "IRIREF"
    PNAME = "PNAME"
    BLANK_LABEL = "BLANK_LABEL"
    STRING = "STRING"
    NUMBER = "NUMBER"
    LANGTAG = "LANGTAG"
    PUNCT = "PUNCT"
    A_KEYWORD = "A_KEYWORD"
    COMMENT = "COMMENT"
    WHITESPACE = "WHITESPACE"
    INCOMPLETE = "INCOMPLETE"
    EOF = "EOF"  # synthetic, zero-width, always last


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    start: int  # byte offset
    end: int  # byte offset

    def is_layout(self) -> bool:
        return self.kind in (TokenKind.WHITESPACE, TokenKind.COMMENT, TokenKind.EOF)


KEYWORDS = frozenset(
    """
    SELECT ASK CONSTRUCT DESCRIBE WHERE FROM NAMED PREFIX BASE FILTER
    OPTIONAL UNION GRAPH ORDER BY ASC DESC LIMIT OFFSET DISTINCT REDUCED
    MINUS SERVICE BIND VALUES GROUP HAVING AS EXISTS NOT IN TRUE FALSE
    """.split()
)

# IRIREF body: anything except control chars, space, and <>"{}|^`\
_IRI_BODY = frozenset('<>"{}|^`\\')
_NUMBER = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_LANGTAG = re.compile(r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*")
_WS = re.compile(r"[ \t\r\n]+")


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_" or ord(ch) >= 0x80


def _is_local_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-.%" or ord(ch) >= 0x80


def _iri_body_char(ch: str) -> bool:
    return ord(ch) > 0x20 and ch not in _IRI_BODY


def tokenize(text: str) -> list[Token]:
    """Scan *text* into tokens covering it exactly, plus a zero-width EOF."""
    tokens: list[tuple[TokenKind, int, int]] = []  # (kind, char start, char end)
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            m = _WS.match(text, i)
            tokens.append((TokenKind.WHITESPACE, i, m.end()))
            i = m.end()
        elif ch == "#":
            nl = text.find("\n", i)
            end = n if nl < 0 else nl
            tokens.append((TokenKind.COMMENT, i, end))
            i = end
        elif ch == "<":
            i = _scan_iri(text, i, tokens)
        elif ch in "?$":
            j = i + 1
            while j < n and _is_word_char(text[j]):
                j += 1
            tokens.append((TokenKind.VAR, i, j))
            i = j
        elif ch in "\"'":
            i = _scan_string(text, i, tokens)
        elif ch.isdigit() or (ch in "+-." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER.match(text, i)
            if m:
                tokens.append((TokenKind.NUMBER, i, m.end()))
                i = m.end()
            else:
                tokens.append((TokenKind.PUNCT, i, i + 1))
                i += 1
        elif ch == "@":
            m = _LANGTAG.match(text, i)
            if m:
                tokens.append((TokenKind.LANGTAG, i, m.end()))
                i = m.end()
            else:
                tokens.append((TokenKind.PUNCT, i, i + 1))
                i += 1
        elif text.startswith("_:", i):
            j = i + 2
            while j < n and _is_local_char(text[j]):
                j += 1
            while j > i + 2 and text[j - 1] == ".":
                j -= 1  # trailing dots are statement punctuation
            tokens.append((TokenKind.BLANK_LABEL, i, j))
            i = j
        elif ch == ":" or _is_word_char(ch) and not ch.isdigit():
            i = _scan_word(text, i, tokens)
        elif text.startswith("^^", i):
            tokens.append((TokenKind.PUNCT, i, i + 2))
            i += 2
        else:
            # covers {}()[].,;*=!&|+-/^ and any unrecognizable character
            tokens.append((TokenKind.PUNCT, i, i + 1))
            i += 1

    fused = _fuse_keyword_pairs(text, tokens)
    return _with_byte_offsets(text, fused)


def _scan_iri(text: str, i: int, tokens: list) -> int:
    n = len(text)
    j = i + 1
    while j < n and _iri_body_char(text[j]):
        j += 1
    if j == i + 1 and not (j < n and text[j] == ">"):
        # bare '<' (comparison operator or stray); <> is an empty IRI ref
        tokens.append((TokenKind.PUNCT, i, i + 1))
        return i + 1
    if j < n and text[j] == ">":
        tokens.append((TokenKind.IRIREF, i, j + 1))
        return j + 1
    if j >= n:
        tokens.append((TokenKind.INCOMPLETE, i, n))
        return n
    # terminated by an illegal character mid-text: recover as an IRI-ish token
    tokens.append((TokenKind.IRIREF, i, j))
    return j


def _scan_string(text: str, i: int, tokens: list) -> int:
    n = len(text)
    quote = text[i]
    if text.startswith(quote * 3, i):
        end = text.find(quote * 3, i + 3)
        if end < 0:
            tokens.append((TokenKind.INCOMPLETE, i, n))
            return n
        tokens.append((TokenKind.STRING, i, end + 3))
        return end + 3
    j = i + 1
    while j < n:
        ch = text[j]
        if ch == "\\" and j + 1 < n:
            j += 2
            continue
        if ch == quote:
            tokens.append((TokenKind.STRING, i, j + 1))
            return j + 1
        if ch == "\n":
            # unterminated before a newline: recover, do not swallow the line
            tokens.append((TokenKind.STRING, i, j))
            return j
        j += 1
    tokens.append((TokenKind.INCOMPLETE, i, n))
    return n


def _scan_word(text: str, i: int, tokens: list) -> int:
    n = len(text)
    j = i
    while j < n and (_is_word_char(text[j]) or text[j] == "-"):
        j += 1
    if j < n and text[j] == ":":
        # prefixed name: consume local part, not letting it end with a dot
        j += 1
        while j < n and (_is_local_char(text[j]) or text[j] == ":"):
            j += 1
        while text[j - 1] == "." and j - 1 > i:
            j -= 1
        tokens.append((TokenKind.PNAME, i, j))
        return j
    word = text[i:j]
    if word == "a":
        tokens.append((TokenKind.A_KEYWORD, i, j))
    elif word.upper() in KEYWORDS:
        tokens.append((TokenKind.KEYWORD, i, j))
    else:
        tokens.append((TokenKind.PNAME, i, j))
    return j


_FUSED_PAIRS = {("FROM", "NAMED"), ("ORDER", "BY")}


def _fuse_keyword_pairs(text: str, tokens: list) -> list:
    out: list = []
    k = 0
    while k < len(tokens):
        if (
            k + 2 < len(tokens)
            and tokens[k][0] is TokenKind.KEYWORD
            and tokens[k + 1][0] is TokenKind.WHITESPACE
            and tokens[k + 2][0] is TokenKind.KEYWORD
            and text[tokens[k + 1][1] : tokens[k + 1][2]] == " "
        ):
            first = text[tokens[k][1] : tokens[k][2]].upper()
            second = text[tokens[k + 2][1] : tokens[k + 2][2]].upper()
            if (first, second) in _FUSED_PAIRS:
                out.append((TokenKind.KEYWORD, tokens[k][1], tokens[k + 2][2]))
                k += 3
                continue
        out.append(tokens[k])
        k += 1
    return out


def _with_byte_offsets(text: str, spans: list) -> list[Token]:
    tokens: list[Token] = []
    if text.isascii():
        for kind, s, e in spans:
            tokens.append(Token(kind, text[s:e], s, e))
        tokens.append(Token(TokenKind.EOF, "", len(text), len(text)))
        return tokens
    byte_pos = 0
    prev_end = 0
    for kind, s, e in spans:
        # spans are contiguous, so the running byte position tracks char ends
        assert s == prev_end
        piece = text[s:e]
        start = byte_pos
        byte_pos += len(piece.encode("utf-8"))
        tokens.append(Token(kind, piece, start, byte_pos))
        prev_end = e
    tokens.append(Token(TokenKind.EOF, "", byte_pos, byte_pos))
    return tokens
