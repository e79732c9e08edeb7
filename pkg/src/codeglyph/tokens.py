"""Single-pass lexical scanner driving the colored visualization variants.

The scanner assigns every byte of the source to exactly one token class.
It never fails on malformed code: unterminated strings and block comments
simply classify the remainder of the source as the open token class. Only
token classes are produced, not a parse tree; that is all the renderer
needs to pick glyph colors.

Spans index into the UTF-8 byte sequence of the source. Bytes >= 0x80
are never identifier characters and fall through to punctuation; the
renderer draws them as replacement glyphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import IngestionError, ProfileError


class TokenClass(str, Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    NUMBER = "number-literal"
    STRING = "string-literal"
    CHAR = "char-literal"
    COMMENT = "comment"
    PUNCTUATION = "punctuation"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class TokenSpan:
    """Half-open byte range [start, end) with its token class."""

    start: int
    end: int
    cls: TokenClass


@dataclass(frozen=True)
class LanguageProfile:
    """Per-language lexing parameters.

    Keywords must be identifier-shaped (``[A-Za-z_][A-Za-z0-9_]*``); the
    scanner recognizes them as whole identifier runs, so keywords are
    automatically delimited by non-identifier characters.
    """

    name: str
    keywords: frozenset[str]
    line_comment: str
    block_comment_open: str
    block_comment_close: str
    string_delim: str = '"'
    char_delim: str = "'"

    def __post_init__(self) -> None:
        if not self.name:
            raise ProfileError("profile name must be non-empty")
        if not self.keywords:
            raise ProfileError(f"profile {self.name!r}: keywords must be non-empty")
        for kw in self.keywords:
            if not kw or any(c.isspace() for c in kw):
                raise ProfileError(f"profile {self.name!r}: bad keyword {kw!r}")
        for label, value in (("line_comment", self.line_comment),
                             ("block_comment_open", self.block_comment_open),
                             ("block_comment_close", self.block_comment_close)):
            if not value:
                raise ProfileError(f"profile {self.name!r}: {label} must be non-empty")
        if len(self.string_delim) != 1 or len(self.char_delim) != 1:
            raise ProfileError(f"profile {self.name!r}: delimiters must be single characters")


_JAVA_KEYWORDS = frozenset("""
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    true false null
""".split())

_C_KEYWORDS = frozenset("""
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
""".split())

JAVA_PROFILE = LanguageProfile(
    name="java",
    keywords=_JAVA_KEYWORDS,
    line_comment="//",
    block_comment_open="/*",
    block_comment_close="*/",
)

C_PROFILE = LanguageProfile(
    name="c",
    keywords=_C_KEYWORDS,
    line_comment="//",
    block_comment_open="/*",
    block_comment_close="*/",
)


def builtin_profiles() -> dict[str, LanguageProfile]:
    """Profiles that ship with the tool, keyed by name."""
    return {p.name: p for p in (JAVA_PROFILE, C_PROFILE)}


def load_profile(path: str | Path) -> LanguageProfile:
    """Load a LanguageProfile from its JSON file format."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProfileError(f"cannot read profile {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile {path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProfileError(f"profile {path}: expected a JSON object")
    try:
        return LanguageProfile(
            name=obj["name"],
            keywords=frozenset(obj["keywords"]),
            line_comment=obj["line_comment"],
            block_comment_open=obj["block_comment_open"],
            block_comment_close=obj["block_comment_close"],
            string_delim=obj.get("string_delim", '"'),
            char_delim=obj.get("char_delim", "'"),
        )
    except KeyError as exc:
        raise ProfileError(f"profile {path}: missing field {exc.args[0]!r}") from exc


_WHITESPACE = frozenset(b" \t\n\r\x0b\x0c")
_IDENT_START = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | frozenset(b"0123456789")
_DIGITS = frozenset(b"0123456789")


def to_source_bytes(source: str | bytes) -> bytes:
    """Normalize lexer input to validated UTF-8 bytes."""
    if isinstance(source, str):
        return source.encode("utf-8")
    try:
        source.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestionError(f"source is not valid UTF-8: {exc}") from exc
    return source


def lex(source: str | bytes, profile: LanguageProfile) -> list[TokenSpan]:
    """Scan ``source`` into a covering, sorted, non-overlapping span list.

    Classification, in priority order at each position: whitespace runs;
    line comments (to end of line, newline excluded); block comments
    (delimiters included); string/char literals with backslash escapes;
    identifier runs (keyword when the whole run is in the profile);
    digit runs with one optional ``.<digits>`` fraction; any other single
    byte is punctuation. Unterminated strings and block comments extend
    to the end of the source under the open class.
    """
    data = to_source_bytes(source)
    n = len(data)
    line_comment = profile.line_comment.encode("utf-8")
    block_open = profile.block_comment_open.encode("utf-8")
    block_close = profile.block_comment_close.encode("utf-8")
    string_delim = profile.string_delim.encode("utf-8")[0]
    char_delim = profile.char_delim.encode("utf-8")[0]
    keywords = {kw.encode("utf-8") for kw in profile.keywords}

    spans: list[TokenSpan] = []
    i = 0
    while i < n:
        start = i
        b = data[i]
        if b in _WHITESPACE:
            while i < n and data[i] in _WHITESPACE:
                i += 1
            spans.append(TokenSpan(start, i, TokenClass.WHITESPACE))
        elif data.startswith(line_comment, i):
            nl = data.find(b"\n", i)
            i = n if nl < 0 else nl
            spans.append(TokenSpan(start, i, TokenClass.COMMENT))
        elif data.startswith(block_open, i):
            close = data.find(block_close, i + len(block_open))
            i = n if close < 0 else close + len(block_close)
            spans.append(TokenSpan(start, i, TokenClass.COMMENT))
        elif b == string_delim or b == char_delim:
            cls = TokenClass.STRING if b == string_delim else TokenClass.CHAR
            i += 1
            while i < n:
                if data[i] == 0x5C:  # backslash escape: skip next byte
                    i += 2 if i + 1 < n else 1
                elif data[i] == b:
                    i += 1
                    break
                else:
                    i += 1
            i = min(i, n)
            spans.append(TokenSpan(start, i, cls))
        elif b in _IDENT_START:
            while i < n and data[i] in _IDENT_CONT:
                i += 1
            cls = TokenClass.KEYWORD if data[start:i] in keywords else TokenClass.IDENTIFIER
            spans.append(TokenSpan(start, i, cls))
        elif b in _DIGITS:
            while i < n and data[i] in _DIGITS:
                i += 1
            if i + 1 < n and data[i] == 0x2E and data[i + 1] in _DIGITS:
                i += 1
                while i < n and data[i] in _DIGITS:
                    i += 1
            spans.append(TokenSpan(start, i, TokenClass.NUMBER))
        else:
            i += 1
            spans.append(TokenSpan(start, i, TokenClass.PUNCTUATION))
    return spans
