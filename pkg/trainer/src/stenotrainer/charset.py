"""Class-list binding between training targets and the toolkit's symbol
tables.

The class list is the sorted base alphabet of the training transliterations
followed by the scheme's placeholders in symbol-table order; class 0 is the
CTC blank and is not part of the list.  The placeholders come from the
symbol-table export file (``#scheme=<id> version=1`` header, tab-separated
rows starting with a 4-digit hex codepoint) — read here independently, so a
drifting export format fails loudly instead of silently re-deriving it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

PRIVATE_USE = (0xE000, 0xE1FF)


class CharsetError(Exception):
    """Targets and symbol table disagree; training must not start."""


def _is_placeholder(ch: str) -> bool:
    return PRIVATE_USE[0] <= ord(ch) <= PRIVATE_USE[1]


def read_table_placeholders(path) -> tuple[str, list[str]]:
    """(scheme, placeholders in table order) from a symbol-table export."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#scheme=") or "version=1" not in lines[0]:
        raise CharsetError(f"{path}: not a version-1 symbol table export")
    scheme = lines[0].split("=", 1)[1].split()[0]
    placeholders = []
    for lineno, row in enumerate(lines[1:], start=2):
        if not row:
            continue
        fields = row.split("\t")
        if len(fields) != 4:
            raise CharsetError(f"{path}:{lineno}: expected 4 fields")
        placeholders.append(chr(int(fields[0], 16)))
    if len(set(placeholders)) != len(placeholders):
        raise CharsetError(f"{path}: duplicate placeholder codepoints")
    return scheme, placeholders


@dataclass(frozen=True)
class CharsetBinding:
    scheme: str
    symbols: tuple[str, ...]       # class k+1 -> symbols[k]; 0 is blank

    @property
    def n_classes(self) -> int:
        return len(self.symbols) + 1

    def encode(self, text: str) -> list[int]:
        try:
            return [self.symbols.index(ch) + 1 for ch in text]
        except ValueError:
            missing = sorted({ch for ch in text if ch not in self.symbols})
            raise CharsetError(f"target contains symbols outside the charset: "
                               f"{missing!r}") from None

    def write_sidecar(self, path) -> None:
        for sym in self.symbols:
            if "\n" in sym or "\r" in sym:
                raise CharsetError(f"symbol {sym!r} contains a line break")
        Path(path).write_text("#blank=0\n" + "\n".join(self.symbols) + "\n",
                              encoding="utf-8")


def build_charset(texts, table_path) -> CharsetBinding:
    """Base alphabet of the encoded targets + the scheme's placeholders.

    Every placeholder occurring in the targets must exist in the export;
    an unknown one means targets and table were produced by different
    scheme versions, which is a hard error.
    """
    scheme, placeholders = read_table_placeholders(table_path)
    base = set()
    used_placeholders = set()
    for text in texts:
        for ch in text:
            (used_placeholders if _is_placeholder(ch) else base).add(ch)
    unknown = used_placeholders - set(placeholders)
    if unknown:
        raise CharsetError(
            f"targets use {len(unknown)} placeholder(s) missing from the "
            f"{scheme} table export: {[hex(ord(c)) for c in sorted(unknown)]}")
    return CharsetBinding(scheme=scheme, symbols=tuple(sorted(base)) + tuple(placeholders))
