"""Edit-distance based error rates and paired significance testing.

The error rate of a hypothesis against a reference is (S + D + I) / N, where
S, D and I are the minimal numbers of substitutions, deletions and insertions
needed to turn the hypothesis into the reference and N is the reference
length.  Character level operates on codepoints, word level on single-space
separated tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyReference, LengthMismatch

LEVELS = ("char", "word")


@dataclass(frozen=True)
class EditSummary:
    """Minimal edit counts for one reference/hypothesis pair."""

    S: int
    D: int
    I: int
    N: int

    @property
    def total(self) -> int:
        return self.S + self.D + self.I

    @property
    def rate(self) -> float:
        """(S+D+I)/N; NaN when the reference is empty (N == 0)."""
        if self.N == 0:
            return math.nan
        return self.total / self.N


def edit_distance(ref, hyp) -> EditSummary:
    """Levenshtein alignment of hyp against ref with unit costs.

    Ties among optimal alignments are resolved deterministically by the
    backtrace preference match/substitution > deletion > insertion, so a
    swapped pair counts as two substitutions rather than a delete plus an
    insert.  Deletions are reference items absent from the hypothesis,
    insertions are extra hypothesis items.
    """
    m, n = len(ref), len(hyp)
    prev = list(range(n + 1))
    rows = [prev]
    for i in range(1, m + 1):
        cur = [i] + [0] * n
        ri = ref[i - 1]
        for j in range(1, n + 1):
            cur[j] = min(prev[j - 1] + (ri != hyp[j - 1]),
                         prev[j] + 1,
                         cur[j - 1] + 1)
        rows.append(cur)
        prev = cur
    s = d = ins = 0
    i, j = m, n
    while i > 0 or j > 0:
        here = rows[i][j]
        if i > 0 and j > 0 and rows[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]) == here:
            s += ref[i - 1] != hyp[j - 1]
            i -= 1
            j -= 1
        elif i > 0 and rows[i - 1][j] + 1 == here:
            d += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return EditSummary(S=s, D=d, I=ins, N=m)


def _as_units(text: str, level: str):
    if level == "char":
        return text
    if level == "word":
        # single-space tokenization; the corpus is single-spaced
        return text.split(" ") if text else []
    raise ValueError(f"level must be one of {LEVELS}, got {level!r}")


@dataclass
class EvalReport:
    """Per-line edit summaries plus macro and micro aggregates for one level."""

    level: str
    line_ids: list
    summaries: list[EditSummary]
    excluded_ids: list = field(default_factory=list)

    @property
    def macro_rate(self) -> float:
        rates = [s.rate for s in self.summaries if s.N > 0]
        return sum(rates) / len(rates) if rates else 0.0

    @property
    def micro_rate(self) -> float:
        edits = sum(s.total for s in self.summaries)
        n = sum(s.N for s in self.summaries)
        return edits / n if n else 0.0

    @property
    def per_line_rates(self) -> list[float]:
        return [s.rate for s in self.summaries]


def evaluate(pairs, level: str = "char", ids=None, on_empty: str = "raise") -> EvalReport:
    """Score (reference, hypothesis) pairs at char or word level.

    Empty references make the rate undefined; by default they raise
    EmptyReference listing the offending line ids, with on_empty="exclude"
    they are scored but left out of the macro mean and reported in
    excluded_ids.
    """
    pairs = list(pairs)
    if ids is None:
        ids = list(range(len(pairs)))
    else:
        ids = list(ids)
        if len(ids) != len(pairs):
            raise LengthMismatch(f"{len(ids)} ids for {len(pairs)} pairs")
    empty = [i for i, (ref, _) in zip(ids, pairs) if len(_as_units(ref, level)) == 0]
    if empty and on_empty == "raise":
        raise EmptyReference(empty)
    summaries = [edit_distance(_as_units(ref, level), _as_units(hyp, level))
                 for ref, hyp in pairs]
    return EvalReport(level=level, line_ids=ids, summaries=summaries, excluded_ids=empty)


# --- paired signed-rank test ------------------------------------------------

def _rank_abs(values):
    """Average ranks of |values|, scaled by 2 so ties stay integral."""
    order = sorted(range(len(values)), key=lambda k: abs(values[k]))
    ranks2 = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs(values[order[j + 1]]) == abs(values[order[i]]):
            j += 1
        # average of ranks i+1 .. j+1, times two
        avg2 = (i + j + 2)
        for k in range(i, j + 1):
            ranks2[order[k]] = avg2
        i = j + 1
    return ranks2


def _exact_two_sided_p(ranks2, wplus2: int) -> float:
    """P(|W+ - mu| >= |observed - mu|) under random sign flips, exactly.

    Computed from the full distribution of the scaled rank sum via
    subset-sum counting; equivalent to enumerating all 2^n sign vectors.
    """
    total2 = sum(ranks2)
    dist = [0] * (total2 + 1)
    dist[0] = 1
    for r in ranks2:
        for s in range(total2, r - 1, -1):
            if dist[s - r]:
                dist[s] += dist[s - r]
    dev = abs(2 * wplus2 - total2)
    hits = sum(c for s, c in enumerate(dist) if abs(2 * s - total2) >= dev)
    return hits / 2 ** len(ranks2)


def wilcoxon_bonferroni(a, b, m: int = 1):
    """Two-sided paired signed-rank test with a Bonferroni-adjusted p-value.

    Zero differences are discarded (all-zero input returns p = 1 by
    convention).  Exact sign-flip distribution for n <= 25 non-zero
    differences, normal approximation with tie correction above that.
    Returns (statistic, p_adjusted) where the statistic is min(W+, W-) and
    p_adjusted = min(1, m * p).
    """
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise LengthMismatch(f"paired samples differ in length: {len(a)} vs {len(b)}")
    if len(a) < 5:
        raise ValueError("need at least 5 pairs")
    if m < 1:
        raise ValueError("comparison count m must be >= 1")
    diffs = [x - y for x, y in zip(a, b) if x != y]
    if not diffs:
        return 0.0, 1.0
    n = len(diffs)
    ranks2 = _rank_abs(diffs)
    wplus2 = sum(r for r, d in zip(ranks2, diffs) if d > 0)
    wminus2 = sum(ranks2) - wplus2
    statistic = min(wplus2, wminus2) / 2.0
    if n <= 25:
        p = _exact_two_sided_p(ranks2, wplus2)
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        # tie correction: subtract sum(t^3 - t)/48 over groups of tied |d|
        counts = {}
        for r in ranks2:
            counts[r] = counts.get(r, 0) + 1
        var -= sum(t ** 3 - t for t in counts.values()) / 48.0
        z = (wplus2 / 2.0 - mu) / math.sqrt(var)
        p = math.erfc(abs(z) / math.sqrt(2.0))
    return statistic, min(1.0, m * p)
