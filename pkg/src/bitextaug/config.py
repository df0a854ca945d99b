"""Pipeline configuration and stop-word lists."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

#: Language tags with a stop-word list shipped in bitextaug/data/.
BUNDLED_STOPWORD_LANGS = ("en", "hi")


@dataclass(frozen=True)
class StopwordSet:
    """Case-insensitive stop-word membership for one language."""

    language: str
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_words(cls, language: str, words) -> "StopwordSet":
        folded = frozenset(
            unicodedata.normalize("NFC", w).strip().casefold()
            for w in words
            if w.strip()
        )
        return cls(language, folded)

    @classmethod
    def from_file(cls, path: str | Path, language: str = "") -> "StopwordSet":
        """Load a one-word-per-line UTF-8 stop-word file."""
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_words(language or Path(path).stem, text.splitlines())

    @classmethod
    def empty(cls, language: str = "") -> "StopwordSet":
        return cls(language, frozenset())


@lru_cache(maxsize=None)
def bundled_stopwords(language: str) -> StopwordSet:
    """Stop words shipped with the package; empty set for unknown tags."""
    if language not in BUNDLED_STOPWORD_LANGS:
        return StopwordSet.empty(language)
    data = resources.files("bitextaug.data").joinpath(f"stopwords_{language}.txt")
    return StopwordSet.from_words(language, data.read_text(encoding="utf-8").splitlines())


@lru_cache(maxsize=None)
def _stopwords_from_file(path: str) -> StopwordSet:
    return StopwordSet.from_file(path)


@dataclass(frozen=True)
class PipelineConfig:
    """All hyperparameters of an augmentation run.

    topk bounds fill-mask predictions kept per masked position; threshold is
    the cosine-similarity acceptance bar; rounds repeats the whole process on
    seed plus previously generated pairs. The qe and cooc gates are optional
    cross-checks, off by default.
    """

    topk: int = 10
    threshold: float = 0.80
    rounds: int = 1
    max_sites: int = 8
    max_variants_per_side: int = 100
    qe_check: bool = False
    qe_threshold: float = 0.8
    cooc_check: bool = False
    cooc_min_score: float = 0.0
    stopwords_src: Optional[str] = None
    stopwords_tgt: Optional[str] = None
    lang_source: str = ""
    lang_target: str = ""
    backend: str = ""
    seed_cap: Optional[int] = None
    include_seed: bool = False
    worker_limit: int = 1
    max_skip_rate: float = 0.5

    def __post_init__(self) -> None:
        if self.topk < 1:
            raise ValueError(f"topk must be >= 1, got {self.topk}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [-1, 1], got {self.threshold}")
        if self.max_sites < 1:
            raise ValueError(f"max_sites must be >= 1, got {self.max_sites}")
        if self.max_variants_per_side < 1:
            raise ValueError(
                f"max_variants_per_side must be >= 1, got {self.max_variants_per_side}"
            )
        if self.worker_limit < 1:
            raise ValueError(f"worker_limit must be >= 1, got {self.worker_limit}")
        if not 0.0 <= self.max_skip_rate <= 1.0:
            raise ValueError(
                f"max_skip_rate must be in [0, 1], got {self.max_skip_rate}"
            )
        if self.seed_cap is not None and self.seed_cap < 0:
            raise ValueError(f"seed_cap must be >= 0, got {self.seed_cap}")

    def stopwords_for(self, side: str) -> StopwordSet:
        """Resolve the stop-word set for "source" or "target".

        An explicit file path wins; otherwise the bundled list for the
        configured language tag is used (empty for unknown tags).
        """
        if side == "source":
            path, lang = self.stopwords_src, self.lang_source
        elif side == "target":
            path, lang = self.stopwords_tgt, self.lang_target
        else:
            raise ValueError(f"side must be 'source' or 'target', got {side!r}")
        if path is not None:
            return _stopwords_from_file(str(path))
        return bundled_stopwords(lang)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` configuration file.

    Blank lines and lines whose first non-space character is ``#`` are
    ignored. Values may be wrapped in single or double quotes; the quotes
    are stripped. Keys mirror the CLI flag names with underscores
    (``topk``, ``threshold``, ``backend``, ``stopwords_src``, ...).
    Raises ValueError on a line without ``=`` or a repeated key.
    """
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        if not key:
            raise ValueError(f"{path}:{lineno}: empty key")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values
