"""Best-path decoding of CTC output matrices and the on-disk logits format.

A logit matrix is (T, C) float32: T timesteps, C classes with class 0
reserved for the CTC blank.  Class k >= 1 maps to the k-th line of the
charset sidecar.  Files carry the magic ``LOGT``, a little-endian u16
version (currently 1), u32 T, u32 C, then T*C float32 values row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import (BadMagic, CharsetMismatch, NonFiniteValue,
                     TruncatedTensor, VersionMismatch)

MAGIC = b"LOGT"
VERSION = 1
_HEADER = struct.Struct("<4sHII")


def validate_logits(logits) -> np.ndarray:
    """Check shape and finiteness, returning a float32 (T, C) array."""
    arr = np.asarray(logits, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"logits must be 2-D (T, C), got shape {arr.shape}")
    if arr.shape[1] < 2:
        raise ValueError("need at least two classes (blank plus one symbol)")
    if not np.isfinite(arr).all():
        t, c = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteValue(f"non-finite logit at timestep {t}, class {c}")
    return arr


def best_path_decode(logits, charset: list[str] | None = None):
    """Greedy CTC decode: argmax per timestep, collapse repeats, drop blanks.

    Ties go to the lowest class index (np.argmax convention).  Returns the
    class-index sequence, or the joined string when a charset is given.
    """
    arr = validate_logits(logits)
    best = arr.argmax(axis=1)
    out = []
    prev = -1
    for k in best:
        if k != prev and k != 0:
            out.append(int(k))
        prev = k
    if charset is None:
        return out
    for k in out:
        if k > len(charset):
            raise CharsetMismatch(
                f"class index {k} outside charset of {len(charset)} symbols")
    return "".join(charset[k - 1] for k in out)


def write_logits(path, logits) -> None:
    arr = validate_logits(logits)
    t, c = arr.shape
    data = _HEADER.pack(MAGIC, VERSION, t, c) + arr.astype("<f4").tobytes()
    Path(path).write_bytes(data)


def read_logits(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedTensor(f"{path}: file shorter than header")
    magic, version, t, c = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagic(f"{path}: expected magic {MAGIC!r}, found {magic!r}")
    if version != VERSION:
        raise VersionMismatch(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    expected = t * c * 4
    if len(body) < expected:
        raise TruncatedTensor(
            f"{path}: expected {expected} payload bytes, found {len(body)}")
    arr = np.frombuffer(body[:expected], dtype="<f4").reshape(t, c)
    return validate_logits(arr)


def write_charset(path, charset: list[str]) -> None:
    """One symbol per line, preceded by the blank-convention header."""
    lines = ["#blank=0"] + list(charset)
    for sym in charset:
        if "\n" in sym or "\r" in sym:
            raise ValueError(f"charset symbol {sym!r} contains a line break")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_charset(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != "#blank=0":
        raise CharsetMismatch(f"{path}: missing '#blank=0' header")
    charset = lines[1:]
    if not charset:
        raise CharsetMismatch(f"{path}: charset is empty")
    seen = set()
    for sym in charset:
        if sym in seen:
            raise CharsetMismatch(f"{path}: duplicate charset symbol {sym!r}")
        seen.add(sym)
    return charset


def find_charset(logits_path, charset_path=None) -> Path:
    """Resolve the sidecar: explicit path, then <file>.charset, then
    charset.txt next to the logits file."""
    if charset_path is not None:
        p = Path(charset_path)
        if not p.exists():
            raise CharsetMismatch(f"charset file not found: {p}")
        return p
    lp = Path(logits_path)
    for candidate in (lp.with_name(lp.name + ".charset"),
                      lp.parent / "charset.txt"):
        if candidate.exists():
            return candidate
    raise CharsetMismatch(f"no charset sidecar found for {lp}")


def decode_file(logits_path, charset_path=None) -> str:
    """Read a logits file, resolve its charset and best-path decode it."""
    arr = read_logits(logits_path)
    charset = read_charset(find_charset(logits_path, charset_path))
    if arr.shape[1] != len(charset) + 1:
        raise CharsetMismatch(
            f"{logits_path}: {arr.shape[1]} classes but charset has "
            f"{len(charset)} symbols (want classes == symbols + 1)")
    return best_path_decode(arr, charset)
