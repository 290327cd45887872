"""Shared fixtures: a full-size corpus manifest mirroring the published
split/type counts, small word-crop images for synthesis tests, and a
terminal summary that prints one PASS/FAIL line per acceptance criterion.
"""

import json
import random
from pathlib import Path

import pytest

from drawhelpers import draw_word_image

DATA_DIR = Path(__file__).parent / "data"

# (split, type) -> line count; folds 1-5 round-robin within train
SPLIT_TYPE_COUNTS = {
    "train": {"clean": 1224, "struck": 196, "added": 200, "missing": 58},
    "validation": {"clean": 306, "struck": 49, "added": 50, "missing": 12},
    "test-lh": {"clean": 474, "struck": 31, "added": 24, "missing": 11},
    "test-oov": {"clean": 191, "struck": 31, "added": 34, "missing": 9},
}

VOCAB = ("jag tänkte att det var finare och har från över kan men huset skriver "
         "boken under kriget staden alla mycket arbete dagen natten ljuset vägen "
         "hem tid stora lilla kvinnan mannen barnen såg gick kommer skulle aldrig "
         "alltid kanske genom utan efter innan sedan redan bara just nu där här "
         "vem vilken berättelse dikten pennan papperet").split()

WORKS = ("romanen", "dagboken", "breven", "novellerna")
NOTEPADS = tuple(f"np-{k:02d}" for k in range(1, 13))


def make_manifest_records(seed: int = 7):
    """Full-size corpus fixture as JSON-ready dicts, deterministic."""
    rng = random.Random(seed)
    records = []
    serial = 0
    for split, type_counts in SPLIT_TYPE_COUNTS.items():
        for line_type, count in type_counts.items():
            for _ in range(count):
                serial += 1
                line_id = f"line-{serial:05d}"
                n_words = rng.randint(3, 9)
                words = [rng.choice(VOCAB) for _ in range(n_words)]
                text = " ".join(words)
                if line_type == "missing":
                    text = " ".join(words[: max(1, n_words // 2)])
                raw_split = split
                if split == "train":
                    raw_split = f"train-fold-{serial % 5 + 1}"
                records.append({
                    "id": line_id,
                    "image": f"{line_id}.png",
                    "text": text,
                    "type": line_type,
                    "split": raw_split,
                    "notepad": rng.choice(NOTEPADS),
                    "work": rng.choice(WORKS),
                })
    return records


@pytest.fixture(scope="session")
def manifest_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "lines.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for rec in make_manifest_records():
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path


@pytest.fixture(scope="session")
def toy_pool():
    """Fifty word crops from ten 5-word source lines."""
    from stenokit.synth import WordCrop

    rng = random.Random(11)
    pool = []
    for line_no in range(10):
        line_id = f"src-{line_no:03d}"
        tokens = [rng.choice(VOCAB) for _ in range(5)]
        for k, token in enumerate(tokens):
            img = draw_word_image(token, seed=line_no * 10 + k)
            h, w = img.shape
            pool.append(WordCrop(word_id=f"{line_id}:{k}", line_id=line_id,
                                 token=token, image=img, box=(0, 0, w, h)))
    return pool


# --- acceptance criterion reporting ---------------------------------------

_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results:
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{flag}  {name}")
