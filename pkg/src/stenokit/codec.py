"""Reversible target-sequence encoding schemes for stenographic transliterations.

Four schemes rewrite a Swedish transliteration so that multi-character units
(whole words, affixes, letter groups) become single placeholder symbols,
approximating the one-symbol-per-unit structure of the shorthand:

* ``shortform`` - 14 whole words that the writing system renders as a single
  character symbol.
* ``suffix``    - four frequent suffixes (-are, -ing, -en, -et).
* ``ngram``     - 31 consonant groups with their own symbols, matched longest
  first to avoid overlap conflicts (e.g. "nskt" before "skt").
* ``melin``     - the combined system set: common whole-word forms, prefixes,
  suffixes and letter groups, applied in that order per token.

Placeholders are fresh private-use codepoints allocated consecutively per
scheme (shortform from U+E000, suffix from U+E040, ngram from U+E080, melin
from U+E100; the whole block U+E000-U+E1FF is reserved).  Decoding replaces
each placeholder by the exact character run it stands for, so
``decode(scheme, encode(scheme, s)) == s`` for any placeholder-free input.

Matching is case-sensitive against the lowercase targets; capitalized
occurrences stay unencoded.  Tokens are maximal whitespace-separated runs and
whitespace is preserved verbatim, so encoding never changes the token count.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputContainsPlaceholder, ParseError, UnknownPlaceholder, UnknownScheme

SCHEMES = ("shortform", "suffix", "ngram", "melin")

CONTEXT_WHOLE_WORD = "whole-word"
CONTEXT_PREFIX = "prefix"
CONTEXT_SUFFIX = "suffix"
CONTEXT_ANYWHERE = "anywhere"
CONTEXTS = (CONTEXT_WHOLE_WORD, CONTEXT_PREFIX, CONTEXT_SUFFIX, CONTEXT_ANYWHERE)

# Reserved placeholder block and per-scheme allocation origins.  Consecutive
# codepoints are assigned in table order, so encoded files interchange
# between builds.
PLACEHOLDER_BLOCK = (0xE000, 0xE1FF)
_ORIGINS = {"shortform": 0xE000, "suffix": 0xE040, "ngram": 0xE080, "melin": 0xE100}

BASE_ALPHABET = frozenset(
    "abcdefghijklmnopqrstuvwxyzåäöé"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZÅÄÖÉ"
    "0123456789"
    " .,;:!?'\"()-"
)

# Whole words written as a single character symbol; the replaced character is
# kept as a display mnemonic only, the placeholder is a fresh codepoint.
_SHORTFORMS = (
    ("av", "a"), ("bar", "b"), ("de", "d"), ("en", "e"), ("från", "f"),
    ("har", "h"), ("jag", "j"), ("kan", "k"), ("men", "m"), ("och", "o"),
    ("ut", "u"), ("var", "v"), ("är", "ä"), ("över", "ö"),
)

_SUFFIXES = ("are", "ing", "en", "et")

# Letter groups with their own symbols, in canonical table order.
_NGRAMS = (
    "nsion", "nskt", "nsj", "nst", "nsk", "nkt", "skt", "ng",
    "sj", "tj", "br", "fr", "tr", "kv", "tv", "sk",
    "sl", "sm", "sn", "sp", "st", "sv", "nt", "nd",
    "ns", "nj", "nk", "bt", "pt", "kt", "xt",
)

_MELIN_WORDS = (
    "alldeles", "bland", "bättre", "de", "den", "det",
    "då", "där", "efter", "eller", "en", "ett",
    "genom", "gång", "har", "honom", "här", "ingen",
    "inte", "jag", "just", "kan", "kom", "kunna",
    "med", "men", "mot", "mycket", "måste", "och",
    "om", "själv", "skulle", "som", "under", "upp",
    "var", "varit", "är", "även",
)

_MELIN_PREFIXES = (
    "an", "be", "fort", "fram", "hän", "in",
    "kon", "kun", "kän", "lång", "märk", "någo",
    "på", "slut", "särskil", "till", "tänk", "ut",
    "verk", "vill", "över",
)

_MELIN_SUFFIXES = ("ande", "de", "are", "het", "kring", "ning", "ing")

_MELIN_NGRAMS = (
    "ng", "sj", "tj", "br", "fr", "tr",
    "kv", "tv", "sk", "sl", "sm", "sn",
    "sp", "st", "sv", "nst", "ns", "nk",
    "nkt", "av", "för",
)


@dataclass(frozen=True)
class TableEntry:
    placeholder: str  # single private-use codepoint
    target: str       # character run the placeholder stands for
    context: str      # one of CONTEXTS
    display: str      # human mnemonic, mirrors the written table form


@dataclass
class SymbolTable:
    """Ordered placeholder table for one scheme, with derived lookups."""

    scheme: str
    entries: tuple[TableEntry, ...]
    base_alphabet: frozenset[str] = BASE_ALPHABET

    def __post_init__(self):
        placeholders = [e.placeholder for e in self.entries]
        if len(set(placeholders)) != len(placeholders):
            raise ValueError("placeholders must be pairwise distinct")
        if any(p in self.base_alphabet for p in placeholders):
            raise ValueError("placeholders must be disjoint from the base alphabet")
        keys = [(e.target, e.context) for e in self.entries]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (target, context) entry")
        for e in self.entries:
            if not e.target:
                raise ValueError("empty target")

        self._decode_map = {ord(e.placeholder): e.target for e in self.entries}
        self._known = frozenset(e.placeholder for e in self.entries)
        self._whole_word = {e.target: e.placeholder
                            for e in self.entries if e.context == CONTEXT_WHOLE_WORD}
        self._prefixes = sorted(
            ((e.target, e.placeholder) for e in self.entries if e.context == CONTEXT_PREFIX),
            key=lambda t: -len(t[0]))
        self._suffixes = sorted(
            ((e.target, e.placeholder) for e in self.entries if e.context == CONTEXT_SUFFIX),
            key=lambda t: -len(t[0]))
        self._anywhere = {e.target: e.placeholder
                          for e in self.entries if e.context == CONTEXT_ANYWHERE}
        self._anywhere_lengths = tuple(sorted({len(t) for t in self._anywhere}, reverse=True))

    def __len__(self):
        return len(self.entries)

    @property
    def placeholders(self) -> frozenset[str]:
        return self._known


def _alloc(scheme: str, groups: list[tuple[str, list[str], str]]) -> SymbolTable:
    """Build a table from (context, targets, display-format) groups."""
    origin = _ORIGINS[scheme]
    entries = []
    for context, targets, fmt in groups:
        for target in targets:
            entries.append(TableEntry(
                placeholder=chr(origin + len(entries)),
                target=target,
                context=context,
                display=fmt.format(target),
            ))
    return SymbolTable(scheme=scheme, entries=tuple(entries))


@lru_cache(maxsize=None)
def build_symbol_table(scheme: str) -> SymbolTable:
    """Return the full table for a scheme; tables are canonical and cached."""
    if scheme == "shortform":
        table = _alloc(scheme, [(CONTEXT_WHOLE_WORD, [w for w, _ in _SHORTFORMS], "{}")])
        # shortform displays are the replaced single characters, not the words
        entries = tuple(TableEntry(e.placeholder, e.target, e.context, ch)
                        for e, (_, ch) in zip(table.entries, _SHORTFORMS))
        return SymbolTable(scheme=scheme, entries=entries)
    if scheme == "suffix":
        return _alloc(scheme, [(CONTEXT_SUFFIX, list(_SUFFIXES), "-{}")])
    if scheme == "ngram":
        return _alloc(scheme, [(CONTEXT_ANYWHERE, list(_NGRAMS), "{}")])
    if scheme == "melin":
        return _alloc(scheme, [
            (CONTEXT_WHOLE_WORD, list(_MELIN_WORDS), "{}"),
            (CONTEXT_PREFIX, list(_MELIN_PREFIXES), "{}-"),
            (CONTEXT_SUFFIX, list(_MELIN_SUFFIXES), "-{}"),
            (CONTEXT_ANYWHERE, list(_MELIN_NGRAMS), "-{}-"),
        ])
    raise UnknownScheme(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")


_RESERVED_RE = re.compile("[\\ue000-\\ue1ff]")
_WS_SPLIT_RE = re.compile(r"(\s+)")


def _encode_anywhere(text: str, table: SymbolTable) -> str:
    """Left-to-right scan substituting the longest group at each position."""
    lookup = table._anywhere
    lengths = table._anywhere_lengths
    out = []
    i = 0
    n = len(text)
    while i < n:
        for length in lengths:
            if i + length <= n:
                ph = lookup.get(text[i:i + length])
                if ph is not None:
                    out.append(ph)
                    i += length
                    break
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _encode_token(token: str, table: SymbolTable) -> str:
    scheme = table.scheme
    if scheme == "shortform":
        return table._whole_word.get(token, token)
    if scheme == "suffix":
        for target, ph in table._suffixes:
            if len(token) > len(target) and token.endswith(target):
                return token[:-len(target)] + ph
        return token
    if scheme == "ngram":
        return _encode_anywhere(token, table)
    # melin: whole word, else prefix, then suffix on the remainder (stem must
    # stay non-empty), then the letter-group pass on what is left in between
    ph = table._whole_word.get(token)
    if ph is not None:
        return ph
    head = ""
    rest = token
    for target, p in table._prefixes:
        if len(rest) > len(target) and rest.startswith(target):
            head = p
            rest = rest[len(target):]
            break
    tail = ""
    for target, p in table._suffixes:
        if len(rest) > len(target) and rest.endswith(target):
            tail = p
            rest = rest[:-len(target)]
            break
    return head + _encode_anywhere(rest, table) + tail


def encode(scheme: str, text: str) -> str:
    """Apply one scheme to placeholder-free text; whitespace is preserved."""
    table = build_symbol_table(scheme)
    bad = _RESERVED_RE.search(text)
    if bad is not None:
        raise InputContainsPlaceholder(
            f"input already contains placeholder U+{ord(bad.group()):04X} at index {bad.start()}")
    parts = _WS_SPLIT_RE.split(text)
    # even indices are (possibly empty) tokens, odd indices are whitespace runs
    for k in range(0, len(parts), 2):
        if parts[k]:
            parts[k] = _encode_token(parts[k], table)
    return "".join(parts)


def decode(scheme: str, text: str) -> str:
    """Replace every placeholder by its target run; exact inverse of encode."""
    table = build_symbol_table(scheme)
    for match in _RESERVED_RE.finditer(text):
        if match.group() not in table._known:
            raise UnknownPlaceholder(
                f"placeholder U+{ord(match.group()):04X} at index {match.start()} "
                f"is not in the {scheme!r} table")
    return text.translate(table._decode_map)


def placeholder_for(scheme: str, target: str, context: str | None = None) -> str:
    """Look up the placeholder codepoint for a table target (test/tooling aid)."""
    table = build_symbol_table(scheme)
    hits = [e for e in table.entries
            if e.target == target and (context is None or e.context == context)]
    if len(hits) != 1:
        raise KeyError(f"{target!r} ({context or 'any context'}) not unique in {scheme!r} table")
    return hits[0].placeholder


# --- symbol-table export format -------------------------------------------
#
# UTF-8 text, header line `#scheme=<id> version=1`, then one entry per line:
# `<placeholder hex>\t<target>\t<context>\t<display>` in table order.

_HEADER_RE = re.compile(r"^#scheme=(\S+) version=(\d+)$")


def write_symbol_table(table: SymbolTable, path) -> None:
    lines = [f"#scheme={table.scheme} version=1"]
    for e in table.entries:
        lines.append(f"{ord(e.placeholder):04X}\t{e.target}\t{e.context}\t{e.display}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_symbol_table(path) -> SymbolTable:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ParseError(f"{path}: empty symbol table file")
    m = _HEADER_RE.match(raw[0])
    if m is None:
        raise ParseError(f"{path}: bad header {raw[0]!r}")
    if m.group(2) != "1":
        raise ParseError(f"{path}: unsupported version {m.group(2)}")
    entries = []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(f"{path}:{lineno}: expected 4 tab-separated fields")
        cp, target, context, display = fields
        if context not in CONTEXTS:
            raise ParseError(f"{path}:{lineno}: unknown context {context!r}")
        entries.append(TableEntry(chr(int(cp, 16)), target, context, display))
    return SymbolTable(scheme=m.group(1), entries=tuple(entries))
