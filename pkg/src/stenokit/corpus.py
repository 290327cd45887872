"""Dataset model for stenographed-manuscript corpora.

A manifest is UTF-8 JSON-lines, one record per line image:

    {"id": "...", "image": "relative/path.png", "text": "transliteration",
     "type": "clean|struck|added|missing", "split": "train-fold-1",
     "notepad": "...", "work": "...", "boxes": [[x, y, w, h], ...]}

``split`` is one of train-fold-1..K, validation, test-lh or test-oov;
the fold suffix is split off into its own field on load.  Lines of type
``missing`` carry incomplete transliterations and are excluded from counts
and evaluations unless explicitly requested.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DuplicateId, EmptyDocument, ParseError, UnknownType

LINE_TYPES = ("clean", "struck", "added", "missing")
SPLITS = ("train", "validation", "test-lh", "test-oov")


@dataclass
class LineRecord:
    line_id: str
    image: str
    text: str
    type: str
    split: str
    fold: int | None = None
    notepad: str | None = None
    work: str | None = None
    boxes: list[tuple[int, int, int, int]] | None = None


def _parse_split(raw: str):
    if raw.startswith("train-fold-"):
        tail = raw[len("train-fold-"):]
        if not tail.isdigit() or int(tail) < 1:
            raise ValueError(f"bad fold in split {raw!r}")
        return "train", int(tail)
    if raw == "train":
        return "train", None
    if raw in SPLITS:
        return raw, None
    raise ValueError(f"unknown split {raw!r}")


def parse_record(obj: dict) -> LineRecord:
    for key in ("id", "image", "text", "type", "split"):
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    if obj["type"] not in LINE_TYPES:
        raise UnknownType(f"line {obj['id']}: unknown type {obj['type']!r} "
                          f"(expected one of {', '.join(LINE_TYPES)})")
    split, fold = _parse_split(obj["split"])
    boxes = obj.get("boxes")
    if boxes is not None:
        parsed = []
        for b in boxes:
            x, y, w, h = (int(v) for v in b)
            if w < 1 or h < 1 or x < 0 or y < 0:
                raise ValueError(f"line {obj['id']}: bad box {b}")
            parsed.append((x, y, w, h))
        boxes = parsed
    return LineRecord(line_id=str(obj["id"]), image=obj["image"], text=obj["text"],
                      type=obj["type"], split=split, fold=fold,
                      notepad=obj.get("notepad"), work=obj.get("work"), boxes=boxes)


def load_manifest(path) -> list[LineRecord]:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
                rec = parse_record(obj)
            except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if rec.line_id in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rec.line_id!r}")
            seen.add(rec.line_id)
            records.append(rec)
    return records


def save_manifest(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = asdict(rec)
            obj["id"] = obj.pop("line_id")
            split = obj.pop("split")
            fold = obj.pop("fold")
            obj["split"] = f"train-fold-{fold}" if fold is not None else split
            obj = {k: v for k, v in obj.items() if v is not None}
            if obj.get("boxes") is not None:
                obj["boxes"] = [list(b) for b in obj["boxes"]]
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_id_list(path) -> list[str]:
    """Plain-text split list: one line id per line, # comments allowed."""
    ids = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            ids.append(raw)
    return ids


def select(records, split: str | None = None, fold: int | None = None,
           types=None, include_missing: bool = False):
    """Filter records; missing-type lines are dropped unless asked for."""
    out = []
    for rec in records:
        if rec.type == "missing" and not include_missing and (
                types is None or "missing" not in types):
            continue
        if split is not None and rec.split != split:
            continue
        if fold is not None and rec.fold != fold:
            continue
        if types is not None and rec.type not in types:
            continue
        out.append(rec)
    return out


def split_stats(records, include_missing: bool = False) -> dict[str, dict[str, int]]:
    """Line counts per (split, type), in canonical split order."""
    types = LINE_TYPES if include_missing else LINE_TYPES[:3]
    table = {split: {t: 0 for t in types} for split in SPLITS}
    for rec in records:
        if rec.type in types:
            table[rec.split][rec.type] += 1
    return table


def format_stats(table: dict[str, dict[str, int]]) -> str:
    types = list(next(iter(table.values())).keys())
    width = max(len(s) for s in list(table) + ["total"]) + 2
    header = "".join(f"{t:>9}" for t in types) + f"{'total':>9}"
    rows = [" " * width + header]
    for split, counts in table.items():
        cells = "".join(f"{counts[t]:>9}" for t in types)
        rows.append(f"{split:<{width}}{cells}{sum(counts.values()):>9}")
    col_totals = [sum(table[s][t] for s in table) for t in types]
    cells = "".join(f"{v:>9}" for v in col_totals)
    rows.append(f"{'total':<{width}}{cells}{sum(col_totals):>9}")
    return "\n".join(rows)


# --- TF-IDF corpus analysis --------------------------------------------------

def load_stopwords(path=None) -> set[str]:
    """Stop-word list, one word per line; defaults to the bundled Swedish one."""
    if path is None:
        text = (resources.files("stenokit") / "data" / "stopwords_sv.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return {w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#")}


def tfidf_vectors(documents: dict, stopwords=frozenset()):
    """Unit-norm TF-IDF vectors: count * (ln((1+N)/(1+df)) + 1).

    ``documents`` maps label -> token list.  Stop words are matched
    case-insensitively.  A document with no remaining terms is an error.
    """
    stop = {w.casefold() for w in stopwords}
    counts = {}
    for label, tokens in documents.items():
        kept = [t for t in tokens if t.casefold() not in stop]
        if not kept:
            raise EmptyDocument(f"document {label!r} has no terms after stop-word removal")
        bag = {}
        for t in kept:
            bag[t] = bag.get(t, 0) + 1
        counts[label] = bag
    n_docs = len(counts)
    df = {}
    for bag in counts.values():
        for term in bag:
            df[term] = df.get(term, 0) + 1
    vectors = {}
    for label, bag in counts.items():
        vec = {t: c * (math.log((1 + n_docs) / (1 + df[t])) + 1.0)
               for t, c in bag.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        vectors[label] = {t: w / norm for t, w in vec.items()}
    return vectors


def top_terms(vector: dict, k: int = 10):
    """Highest-weight terms, ties broken alphabetically."""
    ranked = sorted(vector.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def tfidf_cosine(documents: dict, stopwords=frozenset()):
    """Pairwise cosine similarities between documents.

    Returns (labels, matrix, tops): labels in input order, a symmetric
    (n, n) array with an exact unit diagonal, and the top-10 terms per
    document.
    """
    if len(documents) < 2:
        raise ValueError("need at least two documents to compare")
    vectors = tfidf_vectors(documents, stopwords)
    labels = list(vectors)
    terms = sorted({t for vec in vectors.values() for t in vec})
    index = {t: i for i, t in enumerate(terms)}
    mat = np.zeros((len(labels), len(terms)))
    for i, label in enumerate(labels):
        for t, w in vectors[label].items():
            mat[i, index[t]] = w
    sim = np.clip(mat @ mat.T, 0.0, 1.0)
    np.fill_diagonal(sim, 1.0)
    tops = {label: top_terms(vectors[label]) for label in labels}
    return labels, sim, tops
