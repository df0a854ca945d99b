"""Tokenization, mask-site selection, and single-word variant generation."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Optional

from .backends import InferenceBackend
from .config import PipelineConfig, StopwordSet
from .errors import BackendError

WORD = "word"
PUNCTUATION = "punctuation"

SIDE_SOURCE = "source"
SIDE_TARGET = "target"


@dataclass(frozen=True)
class Token:
    """One tokenizer output span. Offsets are code-point indices."""

    text: str
    start: int
    end: int
    kind: str

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"empty token span [{self.start}, {self.end})")
        if self.kind not in (WORD, PUNCTUATION):
            raise ValueError(f"unknown token kind {self.kind!r}")


@dataclass(frozen=True)
class MaskSite:
    """A word position eligible for masking."""

    token_index: int
    original_token: str


@dataclass(frozen=True)
class GeneratedVariant:
    """A sentence derived from a parent segment by one substitution.

    The untouched parent is also carried as a variant with is_original=True;
    it has no site or replacement and model_prob 1.0.
    """

    text: str
    parent_pair_id: str
    side: str
    site: Optional[MaskSite]
    replacement: Optional[str]
    model_prob: float
    is_original: bool = False


def _is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> tuple[Token, ...]:
    """Split text into word and punctuation tokens.

    Rules: chunks are separated by Unicode whitespace; a maximal run of
    leading or trailing punctuation in a chunk becomes a punctuation token;
    interior punctuation (apostrophes, hyphens) stays inside the word token.
    Concatenating token texts with the original separators reconstructs the
    input exactly.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        lead = i
        while lead < j and _is_punct_char(text[lead]):
            lead += 1
        if lead == j:
            tokens.append(Token(text[i:j], i, j, PUNCTUATION))
            i = j
            continue
        trail = j
        while trail > lead and _is_punct_char(text[trail - 1]):
            trail -= 1
        if lead > i:
            tokens.append(Token(text[i:lead], i, lead, PUNCTUATION))
        tokens.append(Token(text[lead:trail], lead, trail, WORD))
        if trail < j:
            tokens.append(Token(text[trail:j], trail, j, PUNCTUATION))
        i = j
    return tuple(tokens)


def enumerate_mask_sites(
    tokens: tuple[Token, ...] | list[Token],
    stopwords: StopwordSet,
    max_sites: int,
) -> tuple[MaskSite, ...]:
    """Select maskable word positions, left to right, capped at max_sites.

    Punctuation tokens, stop words (case-insensitive), and all-digit tokens
    are never selected.
    """
    sites: list[MaskSite] = []
    for index, token in enumerate(tokens):
        if len(sites) >= max_sites:
            break
        if token.kind != WORD:
            continue
        if token.text in stopwords:
            continue
        if token.text.isdigit():
            continue
        sites.append(MaskSite(index, token.text))
    return tuple(sites)


def _is_pure_punctuation(text: str) -> bool:
    return bool(text) and all(_is_punct_char(ch) for ch in text)


def generate_variants_at(
    segment: str,
    site: MaskSite,
    topk: int,
    backend: InferenceBackend,
    parent_pair_id: str = "",
    side: str = SIDE_SOURCE,
) -> tuple[GeneratedVariant, ...]:
    """Produce one-substitution variants for a single mask site.

    The site token is replaced by the backend's mask sentinel, the backend
    predicts completions, and each usable prediction is spliced back in.
    Dropped predictions: the original token under case folding, anything
    containing whitespace or the sentinel, and pure punctuation. Output is
    sorted by model_prob descending, then replacement ascending.
    """
    tokens = tokenize(segment)
    if not 0 <= site.token_index < len(tokens):
        raise ValueError(f"mask site index {site.token_index} out of range")
    token = tokens[site.token_index]
    if token.kind != WORD or token.text != site.original_token:
        raise ValueError(
            f"mask site {site.token_index} does not match segment token {token.text!r}"
        )

    sentinel = backend.describe().mask_sentinel
    masked = segment[: token.start] + sentinel + segment[token.end :]
    try:
        predictions = backend.fill_mask(masked, topk)
    except BackendError as exc:
        raise BackendError(
            f"fill_mask failed at site {site.token_index}"
            f" ({site.original_token!r}): {exc}"
        ) from exc

    original_folded = site.original_token.casefold()
    variants = []
    for pred in predictions:
        word = pred.token
        if word.casefold() == original_folded:
            continue
        if sentinel in word or any(ch.isspace() for ch in word):
            continue
        if _is_pure_punctuation(word):
            continue
        variants.append(
            GeneratedVariant(
                text=segment[: token.start] + word + segment[token.end :],
                parent_pair_id=parent_pair_id,
                side=side,
                site=site,
                replacement=word,
                model_prob=pred.prob,
            )
        )
    variants.sort(key=lambda v: (-v.model_prob, v.replacement))
    return tuple(variants[:topk])


def generate_all_variants(
    segment: str,
    side: str,
    config: PipelineConfig,
    backend: InferenceBackend,
    parent_pair_id: str = "",
) -> tuple[GeneratedVariant, ...]:
    """All variants of one segment: the untouched original plus every
    single-site substitution.

    Exact-duplicate texts are collapsed keeping the highest model_prob, the
    result is sorted by model_prob descending (original first), and capped
    at config.max_variants_per_side.
    """
    original = GeneratedVariant(
        text=segment,
        parent_pair_id=parent_pair_id,
        side=side,
        site=None,
        replacement=None,
        model_prob=1.0,
        is_original=True,
    )
    tokens = tokenize(segment)
    sites = enumerate_mask_sites(tokens, config.stopwords_for(side), config.max_sites)

    best: dict[str, GeneratedVariant] = {segment: original}
    for site in sites:
        for variant in generate_variants_at(
            segment, site, config.topk, backend, parent_pair_id, side
        ):
            seen = best.get(variant.text)
            if seen is None:
                best[variant.text] = variant
            elif variant.model_prob > seen.model_prob:
                best[variant.text] = variant

    ranked = sorted(best.values(), key=lambda v: -v.model_prob)
    return tuple(ranked[: config.max_variants_per_side])
