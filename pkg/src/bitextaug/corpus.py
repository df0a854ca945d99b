"""Bitext data types and the two-file parallel corpus format.

A parallel corpus is two UTF-8 plain text files with LF line endings where
line i of the first file and line i of the second file are translations of
each other. Augmented output adds a tab-separated metadata sidecar carrying
per-pair provenance and scores, so the two text files stay directly
consumable by MT training tools.

Usage:
    corpus = load_parallel_corpus("train.en", "train.hi", "en", "hi")
    report = write_augmented_corpus(corpus, "out.en", "out.hi", "out.meta.tsv")
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from .errors import (
    BlankSegment,
    EncodingError,
    InvariantViolation,
    IoError,
    MismatchedLineCount,
)

ORIGIN_SEED = "seed"
ORIGIN_GENERATED = "generated"

SIMILARITY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ScoreSet:
    """Scores attached to a segment pair.

    similarity is an embedding cosine in [-1, 1]. qe is a quality-estimation
    score on the backend's scale (the reference server documents [0, 1],
    higher is better). cooc is an unbounded word-association score.
    """

    similarity: float
    qe: Optional[float] = None
    cooc: Optional[float] = None


@dataclass(frozen=True)
class SegmentPair:
    """One aligned (source text, target text) unit with provenance."""

    id: str
    source_text: str
    target_text: str
    origin: str = ORIGIN_SEED
    round: Optional[int] = None
    scores: Optional[ScoreSet] = None


@dataclass(frozen=True)
class ParallelCorpus:
    """An ordered sequence of segment pairs with language tags."""

    pairs: tuple[SegmentPair, ...]
    lang_source: str
    lang_target: str

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SegmentPair]:
        return iter(self.pairs)


@dataclass(frozen=True)
class Violation:
    """One broken corpus invariant, reported as data."""

    rule: str
    pair_id: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.rule}({self.pair_id!r})"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True)
class WriteReport:
    """Counts and paths from writing an augmented corpus."""

    pairs_written: int
    path_l1: Path
    path_l2: Path
    path_meta: Path


def _read_lines(path: str | Path) -> list[str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path} is not valid UTF-8: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def load_parallel_corpus(
    path_l1: str | Path,
    path_l2: str | Path,
    lang_source: str,
    lang_target: str,
) -> ParallelCorpus:
    """Load the two-file bitext format into a ParallelCorpus.

    Pair i is (line i of path_l1, line i of path_l2), with ids assigned as
    the zero-based line index in decimal. Texts are NFC-normalized and
    trimmed of leading/trailing whitespace; interior whitespace is kept
    verbatim.

    Raises MismatchedLineCount when the files differ in line count,
    EncodingError on invalid UTF-8, and BlankSegment when a line is empty
    on either side after trimming.
    """
    lines_l1 = _read_lines(path_l1)
    lines_l2 = _read_lines(path_l2)
    if len(lines_l1) != len(lines_l2):
        raise MismatchedLineCount(len(lines_l1), len(lines_l2))

    pairs = []
    for i, (raw_src, raw_tgt) in enumerate(zip(lines_l1, lines_l2)):
        src = unicodedata.normalize("NFC", raw_src).strip()
        tgt = unicodedata.normalize("NFC", raw_tgt).strip()
        if not src:
            raise BlankSegment(i, "source side")
        if not tgt:
            raise BlankSegment(i, "target side")
        pairs.append(SegmentPair(id=str(i), source_text=src, target_text=tgt))
    return ParallelCorpus(tuple(pairs), lang_source, lang_target)


def _format_score(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_augmented_corpus(
    corpus: ParallelCorpus,
    out_l1: str | Path,
    out_l2: str | Path,
    out_meta: str | Path,
) -> WriteReport:
    """Write a corpus as two text files plus a metadata TSV.

    The metadata file has a header row and the columns id, origin, round,
    similarity, qe, cooc; absent values are empty fields. Reloading the two
    text files yields texts identical to the input corpus.
    """
    for pair in corpus.pairs:
        for side, text in (("source", pair.source_text), ("target", pair.target_text)):
            if "\n" in text or "\r" in text:
                raise InvariantViolation(
                    f"pair {pair.id!r}: newline embedded in {side} text"
                )
            if not text.strip():
                raise InvariantViolation(f"pair {pair.id!r}: blank {side} text")

    out_l1, out_l2, out_meta = Path(out_l1), Path(out_l2), Path(out_meta)
    meta_rows = [META_HEADER]
    for pair in corpus.pairs:
        scores = pair.scores
        meta_rows.append(
            "\t".join(
                (
                    pair.id,
                    pair.origin,
                    "" if pair.round is None else str(pair.round),
                    _format_score(scores.similarity if scores else None),
                    _format_score(scores.qe if scores else None),
                    _format_score(scores.cooc if scores else None),
                )
            )
        )
    try:
        out_l1.write_bytes(
            "".join(p.source_text + "\n" for p in corpus.pairs).encode("utf-8")
        )
        out_l2.write_bytes(
            "".join(p.target_text + "\n" for p in corpus.pairs).encode("utf-8")
        )
        out_meta.write_bytes(("\n".join(meta_rows) + "\n").encode("utf-8"))
    except OSError as exc:
        raise IoError(f"cannot write corpus: {exc}") from exc
    return WriteReport(len(corpus.pairs), out_l1, out_l2, out_meta)


META_HEADER = "id\torigin\tround\tsimilarity\tqe\tcooc"


def _parse_optional_float(raw: str, where: str) -> Optional[float]:
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise InvariantViolation(f"{where}: bad score {raw!r}") from exc


def load_augmented_corpus(
    path_l1: str | Path,
    path_l2: str | Path,
    path_meta: str | Path,
    lang_source: str,
    lang_target: str,
) -> ParallelCorpus:
    """Load two text files plus the metadata TSV written by
    write_augmented_corpus.

    Unlike load_parallel_corpus, texts are taken verbatim (no normalization
    or trimming): the reader must reproduce exactly what the writer
    produced.
    """
    lines_l1 = _read_lines(path_l1)
    lines_l2 = _read_lines(path_l2)
    if len(lines_l1) != len(lines_l2):
        raise MismatchedLineCount(len(lines_l1), len(lines_l2))
    meta_lines = _read_lines(path_meta)
    if not meta_lines or meta_lines[0] != META_HEADER:
        raise InvariantViolation(f"{path_meta}: missing or wrong header row")
    rows = meta_lines[1:]
    if len(rows) != len(lines_l1):
        raise MismatchedLineCount(len(lines_l1), len(rows))

    pairs = []
    for i, (src, tgt, row) in enumerate(zip(lines_l1, lines_l2, rows)):
        where = f"{path_meta}:{i + 2}"
        fields = row.split("\t")
        if len(fields) != 6:
            raise InvariantViolation(f"{where}: expected 6 fields, got {len(fields)}")
        pair_id, origin, round_raw, sim_raw, qe_raw, cooc_raw = fields
        if origin not in (ORIGIN_SEED, ORIGIN_GENERATED):
            raise InvariantViolation(f"{where}: unknown origin {origin!r}")
        round_no: Optional[int] = None
        if round_raw != "":
            try:
                round_no = int(round_raw)
            except ValueError as exc:
                raise InvariantViolation(f"{where}: bad round {round_raw!r}") from exc
        similarity = _parse_optional_float(sim_raw, where)
        qe = _parse_optional_float(qe_raw, where)
        cooc = _parse_optional_float(cooc_raw, where)
        scores = None
        if similarity is not None:
            scores = ScoreSet(similarity=similarity, qe=qe, cooc=cooc)
        elif qe is not None or cooc is not None:
            raise InvariantViolation(f"{where}: qe/cooc present without similarity")
        pairs.append(
            SegmentPair(
                id=pair_id,
                source_text=src,
                target_text=tgt,
                origin=origin,
                round=round_no,
                scores=scores,
            )
        )
    return ParallelCorpus(tuple(pairs), lang_source, lang_target)


def validate_corpus(corpus: ParallelCorpus) -> list[Violation]:
    """Check every type invariant; returns an empty list iff all hold."""
    violations: list[Violation] = []
    seen_ids: set[str] = set()
    for pair in corpus.pairs:
        if pair.id in seen_ids:
            violations.append(Violation("DuplicateId", pair.id))
        seen_ids.add(pair.id)
        if not pair.source_text.strip():
            violations.append(Violation("BlankSegment", pair.id, "source side"))
        if not pair.target_text.strip():
            violations.append(Violation("BlankSegment", pair.id, "target side"))
        for side, text in (("source", pair.source_text), ("target", pair.target_text)):
            if "\n" in text or "\r" in text:
                violations.append(
                    Violation("EmbeddedNewline", pair.id, f"{side} side")
                )
        if pair.origin == ORIGIN_GENERATED:
            if pair.round is None or pair.round < 1:
                violations.append(
                    Violation("InvalidRound", pair.id, f"round={pair.round!r}")
                )
            if pair.scores is None:
                violations.append(Violation("MissingSimilarity", pair.id))
        if pair.scores is not None:
            if abs(pair.scores.similarity) > 1.0 + SIMILARITY_TOLERANCE:
                violations.append(
                    Violation(
                        "SimilarityOutOfRange",
                        pair.id,
                        repr(pair.scores.similarity),
                    )
                )
    return violations
