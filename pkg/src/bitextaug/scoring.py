"""Cross-product pair scoring, similarity filtering, and deduplication."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .backends import EmbeddingVector, InferenceBackend
from .errors import DimensionMismatch
from .masking import GeneratedVariant

_WHITESPACE_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class CandidatePair:
    """A scored (source variant, target variant) combination."""

    source_variant: GeneratedVariant
    target_variant: GeneratedVariant
    similarity: float
    cooc: Optional[float] = None
    qe: Optional[float] = None

    @property
    def source_text(self) -> str:
        return self.source_variant.text

    @property
    def target_text(self) -> str:
        return self.target_variant.text


def normalize_key_text(text: str) -> str:
    """Duplicate-detection normalization: NFC, whitespace collapse, trim."""
    return _WHITESPACE_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip()


class DedupIndex:
    """Set of normalized (source_text, target_text) keys already emitted."""

    def __init__(self) -> None:
        self._seen: set[tuple[str, str]] = set()

    def __len__(self) -> int:
        return len(self._seen)

    def key(self, source_text: str, target_text: str) -> tuple[str, str]:
        return (normalize_key_text(source_text), normalize_key_text(target_text))

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return self.key(*pair) in self._seen

    def add(self, source_text: str, target_text: str) -> bool:
        """Record a pair; returns True when it was not seen before."""
        key = self.key(source_text, target_text)
        if key in self._seen:
            return False
        self._seen.add(key)
        return True

    def seed_with(self, pairs: Iterable) -> None:
        """Pre-load from objects with source_text and target_text fields."""
        for pair in pairs:
            self.add(pair.source_text, pair.target_text)


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Dot product of two unit vectors, clamped to [-1, 1]."""
    if u.dim != v.dim:
        raise DimensionMismatch(f"cannot compare dims {u.dim} and {v.dim}")
    dot = sum(a * b for a, b in zip(u.values, v.values))
    return min(1.0, max(-1.0, dot))


def score_pairs(
    src_variants: Sequence[GeneratedVariant],
    tgt_variants: Sequence[GeneratedVariant],
    backend: InferenceBackend,
) -> tuple[CandidatePair, ...]:
    """Score the full cross-product, excluding the (original, original) pair.

    Each distinct text is embedded once. Output order is row-major: source
    variant order, then target variant order.
    """
    texts = list(
        dict.fromkeys(
            [v.text for v in src_variants] + [v.text for v in tgt_variants]
        )
    )
    if not texts:
        return ()
    vectors = dict(zip(texts, backend.embed(texts)))

    pairs: list[CandidatePair] = []
    for src in src_variants:
        for tgt in tgt_variants:
            if src.is_original and tgt.is_original:
                continue
            similarity = cosine_similarity(vectors[src.text], vectors[tgt.text])
            pairs.append(CandidatePair(src, tgt, similarity))
    return tuple(pairs)


def filter_pairs(
    pairs: Sequence[CandidatePair], threshold: float
) -> tuple[CandidatePair, ...]:
    """Keep pairs with similarity >= threshold, preserving order."""
    return tuple(p for p in pairs if p.similarity >= threshold)


def dedup(
    pairs: Sequence[CandidatePair], index: DedupIndex
) -> tuple[CandidatePair, ...]:
    """Emit only pairs whose normalized key is new; first occurrence wins."""
    emitted = []
    for pair in pairs:
        if index.add(pair.source_text, pair.target_text):
            emitted.append(pair)
    return tuple(emitted)
