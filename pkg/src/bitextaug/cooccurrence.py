"""Cross-lingual word co-occurrence counts and the association-score gate."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .config import StopwordSet
from .corpus import ParallelCorpus
from .errors import EmptyCorpus, IoError
from .masking import WORD, tokenize
from .scoring import CandidatePair


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Sparse joint counts of source and target word types.

    source_totals and target_totals are the row and column sums of counts;
    pair_total is the grand total.
    """

    vocab_source: dict[str, int]
    vocab_target: dict[str, int]
    counts: dict[tuple[int, int], int]
    source_totals: tuple[int, ...]
    target_totals: tuple[int, ...]
    pair_total: int


def _segment_types(text: str, stopwords: StopwordSet) -> list[str]:
    """Distinct case-folded word tokens of one segment, stop words removed."""
    types = {
        t.text.casefold()
        for t in tokenize(text)
        if t.kind == WORD and t.text not in stopwords
    }
    return sorted(types)


def build_matrix(
    corpus: ParallelCorpus,
    stop_src: Optional[StopwordSet] = None,
    stop_tgt: Optional[StopwordSet] = None,
) -> CooccurrenceMatrix:
    """Count, for every segment pair, each source word type against each
    target word type (once per pair regardless of repetition)."""
    if len(corpus) == 0:
        raise EmptyCorpus("cannot build a co-occurrence matrix from an empty corpus")
    stop_src = stop_src or StopwordSet.empty()
    stop_tgt = stop_tgt or StopwordSet.empty()

    joint: Counter[tuple[str, str]] = Counter()
    for pair in corpus:
        src_types = _segment_types(pair.source_text, stop_src)
        tgt_types = _segment_types(pair.target_text, stop_tgt)
        for s in src_types:
            for t in tgt_types:
                joint[(s, t)] += 1

    vocab_source = {w: i for i, w in enumerate(sorted({s for s, _ in joint}))}
    vocab_target = {w: i for i, w in enumerate(sorted({t for _, t in joint}))}
    counts: dict[tuple[int, int], int] = {}
    source_totals = [0] * len(vocab_source)
    target_totals = [0] * len(vocab_target)
    for (s, t), c in joint.items():
        i, j = vocab_source[s], vocab_target[t]
        counts[(i, j)] = c
        source_totals[i] += c
        target_totals[j] += c

    return CooccurrenceMatrix(
        vocab_source=vocab_source,
        vocab_target=vocab_target,
        counts=counts,
        source_totals=tuple(source_totals),
        target_totals=tuple(target_totals),
        pair_total=sum(counts.values()),
    )


def association_score(matrix: CooccurrenceMatrix, w_src: str, w_tgt: str) -> float:
    """Add-one smoothed pointwise mutual information of two words.

    log((c(s,t)+1) * N / ((c(s)+1) * (c(t)+1))) with N the total joint
    count; unseen words contribute count 0.
    """
    i = matrix.vocab_source.get(w_src.casefold())
    j = matrix.vocab_target.get(w_tgt.casefold())
    joint = matrix.counts.get((i, j), 0) if i is not None and j is not None else 0
    c_s = matrix.source_totals[i] if i is not None else 0
    c_t = matrix.target_totals[j] if j is not None else 0
    n = max(matrix.pair_total, 1)
    return math.log((joint + 1) * n / ((c_s + 1) * (c_t + 1)))


def cooc_gate(
    pair: CandidatePair, matrix: CooccurrenceMatrix, min_score: float
) -> tuple[bool, CandidatePair]:
    """Gate a candidate on replacement-word association strength.

    Only pairs where both sides were substituted are scored; with one side
    original there is no replacement pair to test, so the gate passes and
    no score is recorded.
    """
    src_rep = pair.source_variant.replacement
    tgt_rep = pair.target_variant.replacement
    if src_rep is None or tgt_rep is None:
        return True, pair
    score = association_score(matrix, src_rep, tgt_rep)
    return score >= min_score, replace(pair, cooc=score)


def save_matrix(matrix: CooccurrenceMatrix, path: str | Path) -> None:
    """Write the matrix as a TSV sidecar: source word, target word, count."""
    by_source = {i: w for w, i in matrix.vocab_source.items()}
    by_target = {j: w for w, j in matrix.vocab_target.items()}
    rows = sorted(
        (by_source[i], by_target[j], c) for (i, j), c in matrix.counts.items()
    )
    lines = ["source\ttarget\tcount"]
    lines.extend(f"{s}\t{t}\t{c}" for s, t, c in rows)
    try:
        Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot write matrix to {path}: {exc}") from exc


def load_matrix(path: str | Path) -> CooccurrenceMatrix:
    """Read a matrix written by save_matrix."""
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except OSError as exc:
        raise IoError(f"cannot read matrix from {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != "source\ttarget\tcount":
        raise IoError(f"{path} is not a co-occurrence matrix sidecar")

    joint: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise IoError(f"{path}:{lineno}: expected 3 tab-separated fields")
        s, t, raw = fields
        try:
            count = int(raw)
        except ValueError as exc:
            raise IoError(f"{path}:{lineno}: bad count {raw!r}") from exc
        if count < 0:
            raise IoError(f"{path}:{lineno}: negative count")
        joint[(s, t)] = count

    vocab_source = {w: i for i, w in enumerate(sorted({s for s, _ in joint}))}
    vocab_target = {w: i for i, w in enumerate(sorted({t for _, t in joint}))}
    counts: dict[tuple[int, int], int] = {}
    source_totals = [0] * len(vocab_source)
    target_totals = [0] * len(vocab_target)
    for (s, t), c in joint.items():
        i, j = vocab_source[s], vocab_target[t]
        counts[(i, j)] = c
        source_totals[i] += c
        target_totals[j] += c
    return CooccurrenceMatrix(
        vocab_source=vocab_source,
        vocab_target=vocab_target,
        counts=counts,
        source_totals=tuple(source_totals),
        target_totals=tuple(target_totals),
        pair_total=sum(counts.values()),
    )
