"""Model-inference backends: fill-mask, sentence embedding, quality estimation.

Three implementations share one interface: a deterministic in-process mock
for tests and offline runs, an HTTP client for a remote model server, and
transcript wrappers that record or replay call sequences.
"""

from __future__ import annotations

import json
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import requests

from .errors import (
    BackendError,
    BackendUnavailable,
    MalformedMaskInput,
)

MOCK_SENTINEL = "[MASK]"
MOCK_EMBEDDING_DIM = 16

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_FNV_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class MaskPrediction:
    """One fill-mask candidate with its model probability."""

    token: str
    prob: float

    def __post_init__(self) -> None:
        if not self.token:
            raise ValueError("prediction token must be non-empty")
        if not 0.0 <= self.prob <= 1.0:
            raise ValueError(f"prediction prob must be in [0, 1], got {self.prob}")


@dataclass(frozen=True)
class EmbeddingVector:
    """A unit-length sentence embedding."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("embedding must have at least one component")
        norm = math.sqrt(sum(v * v for v in self.values))
        if abs(norm - 1.0) > 1e-4:
            raise ValueError(f"embedding norm {norm} deviates from 1 by more than 1e-4")

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class BackendDescriptor:
    """Static facts about a backend needed by callers."""

    name: str
    mask_sentinel: str
    embedding_dim: int
    qe_scale: str = ""

    def __post_init__(self) -> None:
        if not self.mask_sentinel:
            raise ValueError("mask_sentinel must be non-empty")
        if self.embedding_dim < 2:
            raise ValueError(f"embedding_dim must be >= 2, got {self.embedding_dim}")


class InferenceBackend(ABC):
    """Interface through which the pipeline consumes model inference."""

    @abstractmethod
    def describe(self) -> BackendDescriptor:
        """Stable facts about this backend."""

    @abstractmethod
    def fill_mask(self, masked_text: str, topk: int) -> tuple[MaskPrediction, ...]:
        """Predictions for the single mask sentinel in masked_text.

        At most topk results, sorted by prob descending then token ascending.
        """

    @abstractmethod
    def embed(self, texts: Sequence[str]) -> tuple[EmbeddingVector, ...]:
        """One unit-norm vector per input text, in input order."""

    @abstractmethod
    def qe_score(self, source_text: str, target_text: str) -> float:
        """Scalar translation-quality estimate for a sentence pair."""


class _EmbedCache:
    """Thread-safe per-text embedding memo."""

    def __init__(self) -> None:
        self._vectors: dict[str, EmbeddingVector] = {}
        self._lock = threading.Lock()

    def get_many(
        self,
        texts: Sequence[str],
        compute: Callable[[list[str]], list[EmbeddingVector]],
    ) -> tuple[EmbeddingVector, ...]:
        with self._lock:
            missing = [t for t in dict.fromkeys(texts) if t not in self._vectors]
        if missing:
            computed = compute(missing)
            if len(computed) != len(missing):
                raise BackendError(
                    f"embedding count mismatch: sent {len(missing)} texts,"
                    f" got {len(computed)} vectors"
                )
            with self._lock:
                self._vectors.update(zip(missing, computed))
        with self._lock:
            return tuple(self._vectors[t] for t in texts)


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _FNV_MASK
    return h


def _word_bag(text: str) -> list[str]:
    from .masking import WORD, tokenize

    words = [t.text.casefold() for t in tokenize(text) if t.kind == WORD]
    return words or [""]


class MockBackend(InferenceBackend):
    """Deterministic in-process backend driven by a substitution table.

    fill_mask recovers the masked word by matching the text around the
    sentinel against registered texts, then answers from the table; texts
    seen by embed or produced by fill_mask are registered automatically, so
    derived sentences can be masked in later rounds. Embeddings hash
    case-folded word tokens into a fixed number of buckets (64-bit FNV-1a)
    and L2-normalize the counts. qe is the embedding cosine clamped to
    [0, 1].
    """

    def __init__(
        self,
        substitutions: Optional[dict[str, list[tuple[str, float]]]] = None,
        texts: Iterable[str] = (),
        embedding_dim: int = MOCK_EMBEDDING_DIM,
        name: str = "mock",
    ) -> None:
        self._substitutions: dict[str, tuple[MaskPrediction, ...]] = {}
        for word, preds in (substitutions or {}).items():
            self._substitutions[word] = tuple(
                MaskPrediction(token, float(prob)) for token, prob in preds
            )
        self._texts: set[str] = set(texts)
        self._dim = embedding_dim
        self._name = name
        self._cache = _EmbedCache()
        self._lock = threading.Lock()

    @classmethod
    def from_fixture(cls, path: str | Path, **kwargs) -> "MockBackend":
        """Load a JSON fixture with "substitutions" and optional "texts",
        "embedding_dim" keys."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ValueError(f"cannot read fixture {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"fixture {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValueError(f"fixture {path} must be a JSON object")
        subs = raw.get("substitutions", {})
        if not isinstance(subs, dict):
            raise ValueError(f"fixture {path}: substitutions must be an object")
        table: dict[str, list[tuple[str, float]]] = {}
        for word, preds in subs.items():
            if not isinstance(preds, list):
                raise ValueError(f"fixture {path}: predictions for {word!r} must be a list")
            entries = []
            for item in preds:
                if not isinstance(item, (list, tuple)) or len(item) != 2:
                    raise ValueError(
                        f"fixture {path}: each prediction must be [token, prob]"
                    )
                entries.append((str(item[0]), float(item[1])))
            table[word] = entries
        texts = raw.get("texts", [])
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            raise ValueError(f"fixture {path}: texts must be a list of strings")
        dim = raw.get("embedding_dim", kwargs.pop("embedding_dim", MOCK_EMBEDDING_DIM))
        return cls(table, texts=texts, embedding_dim=int(dim), **kwargs)

    def register_texts(self, texts: Iterable[str]) -> None:
        """Make texts visible to fill_mask's masked-word recovery."""
        with self._lock:
            self._texts.update(texts)

    def describe(self) -> BackendDescriptor:
        return BackendDescriptor(
            name=self._name,
            mask_sentinel=MOCK_SENTINEL,
            embedding_dim=self._dim,
            qe_scale="cosine of mock embeddings clamped to [0, 1]",
        )

    def _masked_word_candidates(self, prefix: str, suffix: str) -> list[str]:
        with self._lock:
            known = sorted(self._texts)
        overlap = len(prefix) + len(suffix)
        candidates = set()
        for text in known:
            if len(text) <= overlap:
                continue
            if text.startswith(prefix) and text.endswith(suffix):
                candidates.add(text[len(prefix) : len(text) - len(suffix)])
        return sorted(candidates)

    def fill_mask(self, masked_text: str, topk: int) -> tuple[MaskPrediction, ...]:
        if topk < 1:
            raise ValueError(f"topk must be >= 1, got {topk}")
        occurrences = masked_text.count(MOCK_SENTINEL)
        if occurrences != 1:
            raise MalformedMaskInput(
                f"expected exactly one {MOCK_SENTINEL}, found {occurrences}"
            )
        at = masked_text.index(MOCK_SENTINEL)
        prefix = masked_text[:at]
        suffix = masked_text[at + len(MOCK_SENTINEL) :]

        merged: dict[str, float] = {}
        for word in self._masked_word_candidates(prefix, suffix):
            for pred in self._substitutions.get(word, ()):
                prev = merged.get(pred.token)
                if prev is None or pred.prob > prev:
                    merged[pred.token] = pred.prob
        ranked = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))[:topk]
        self.register_texts(prefix + token + suffix for token, _ in ranked)
        return tuple(MaskPrediction(token, prob) for token, prob in ranked)

    def _embed_one(self, text: str) -> EmbeddingVector:
        counts = [0] * self._dim
        for word in _word_bag(text):
            counts[fnv1a_64(word.encode("utf-8")) % self._dim] += 1
        norm = math.sqrt(sum(c * c for c in counts))
        return EmbeddingVector(tuple(c / norm for c in counts))

    def embed(self, texts: Sequence[str]) -> tuple[EmbeddingVector, ...]:
        for text in texts:
            if not text:
                raise ValueError("cannot embed empty text")
        self.register_texts(texts)
        return self._cache.get_many(
            texts, lambda missing: [self._embed_one(t) for t in missing]
        )

    def qe_score(self, source_text: str, target_text: str) -> float:
        if not source_text or not target_text:
            raise ValueError("qe_score requires non-empty texts")
        u, v = self.embed([source_text, target_text])
        cos = sum(a * b for a, b in zip(u.values, v.values))
        return min(1.0, max(0.0, cos))


class HttpBackend(InferenceBackend):
    """Client for the remote model-server JSON protocol."""

    def __init__(
        self,
        base_url: str,
        timeout: float = 60.0,
        max_in_flight: int = 8,
    ) -> None:
        if max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
        self._base = base_url.rstrip("/")
        self._timeout = timeout
        self._session = requests.Session()
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._descriptor: Optional[BackendDescriptor] = None
        self._descriptor_lock = threading.Lock()
        self._cache = _EmbedCache()

    def _request(self, method: str, path: str, payload: Optional[dict] = None):
        url = f"{self._base}{path}"
        try:
            with self._slots:
                if method == "GET":
                    resp = self._session.get(url, timeout=self._timeout)
                else:
                    resp = self._session.post(url, json=payload, timeout=self._timeout)
        except requests.RequestException as exc:
            raise BackendUnavailable(f"{url}: {exc}") from exc
        if resp.status_code != 200:
            try:
                detail = resp.json().get("error", resp.text)
            except ValueError:
                detail = resp.text
            message = f"{url} returned {resp.status_code}: {detail}"
            if resp.status_code == 400 and path == "/fill_mask":
                raise MalformedMaskInput(message)
            if resp.status_code == 400:
                raise BackendError(message)
            raise BackendUnavailable(message)
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendError(f"{url}: response is not JSON: {exc}") from exc

    def describe(self) -> BackendDescriptor:
        with self._descriptor_lock:
            if self._descriptor is None:
                body = self._request("GET", "/health")
                try:
                    self._descriptor = BackendDescriptor(
                        name=str(body["name"]),
                        mask_sentinel=str(body["mask_sentinel"]),
                        embedding_dim=int(body["embedding_dim"]),
                        qe_scale=str(body.get("qe_scale", "")),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise BackendError(f"malformed /health response: {exc}") from exc
            return self._descriptor

    def fill_mask(self, masked_text: str, topk: int) -> tuple[MaskPrediction, ...]:
        if topk < 1:
            raise ValueError(f"topk must be >= 1, got {topk}")
        body = self._request(
            "POST", "/fill_mask", {"text": masked_text, "topk": topk}
        )
        try:
            preds = [
                MaskPrediction(str(p["token"]), float(p["prob"]))
                for p in body["predictions"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed /fill_mask response: {exc}") from exc
        preds.sort(key=lambda p: (-p.prob, p.token))
        return tuple(preds[:topk])

    def _embed_remote(self, texts: list[str]) -> list[EmbeddingVector]:
        body = self._request("POST", "/embed", {"texts": texts})
        try:
            vectors = [
                EmbeddingVector(tuple(float(x) for x in vec))
                for vec in body["vectors"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed /embed response: {exc}") from exc
        return vectors

    def embed(self, texts: Sequence[str]) -> tuple[EmbeddingVector, ...]:
        for text in texts:
            if not text:
                raise ValueError("cannot embed empty text")
        return self._cache.get_many(texts, self._embed_remote)

    def qe_score(self, source_text: str, target_text: str) -> float:
        if not source_text or not target_text:
            raise ValueError("qe_score requires non-empty texts")
        body = self._request(
            "POST", "/qe", {"source": source_text, "target": target_text}
        )
        try:
            return float(body["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed /qe response: {exc}") from exc


class TranscriptRecorder(InferenceBackend):
    """Pass-through backend that appends every call to a JSONL transcript."""

    def __init__(self, inner: InferenceBackend, path: str | Path) -> None:
        self._inner = inner
        self._path = Path(path)
        self._lock = threading.Lock()
        self._path.write_text("", encoding="utf-8")

    def _record(self, entry: dict) -> None:
        line = json.dumps(entry, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def describe(self) -> BackendDescriptor:
        desc = self._inner.describe()
        self._record(
            {
                "op": "describe",
                "request": {},
                "response": {
                    "name": desc.name,
                    "mask_sentinel": desc.mask_sentinel,
                    "embedding_dim": desc.embedding_dim,
                    "qe_scale": desc.qe_scale,
                },
            }
        )
        return desc

    def fill_mask(self, masked_text: str, topk: int) -> tuple[MaskPrediction, ...]:
        preds = self._inner.fill_mask(masked_text, topk)
        self._record(
            {
                "op": "fill_mask",
                "request": {"text": masked_text, "topk": topk},
                "response": [[p.token, p.prob] for p in preds],
            }
        )
        return preds

    def embed(self, texts: Sequence[str]) -> tuple[EmbeddingVector, ...]:
        vectors = self._inner.embed(texts)
        self._record(
            {
                "op": "embed",
                "request": {"texts": list(texts)},
                "response": [list(v.values) for v in vectors],
            }
        )
        return vectors

    def qe_score(self, source_text: str, target_text: str) -> float:
        score = self._inner.qe_score(source_text, target_text)
        self._record(
            {
                "op": "qe",
                "request": {"source": source_text, "target": target_text},
                "response": score,
            }
        )
        return score


class TranscriptReplay(InferenceBackend):
    """Backend that replays a recorded transcript in strict call order.

    Any divergence between the incoming call and the recorded one raises
    BackendError.
    """

    def __init__(self, path: str | Path) -> None:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        self._entries = [json.loads(line) for line in lines if line.strip()]
        self._next = 0
        self._lock = threading.Lock()

    def _take(self, op: str, request: dict) -> object:
        with self._lock:
            if self._next >= len(self._entries):
                raise BackendError(f"transcript exhausted at call {op} {request!r}")
            entry = self._entries[self._next]
            self._next += 1
        if entry["op"] != op or entry["request"] != request:
            raise BackendError(
                f"transcript divergence: expected {entry['op']} {entry['request']!r},"
                f" got {op} {request!r}"
            )
        return entry["response"]

    def describe(self) -> BackendDescriptor:
        body = self._take("describe", {})
        return BackendDescriptor(
            name=body["name"],
            mask_sentinel=body["mask_sentinel"],
            embedding_dim=body["embedding_dim"],
            qe_scale=body.get("qe_scale", ""),
        )

    def fill_mask(self, masked_text: str, topk: int) -> tuple[MaskPrediction, ...]:
        body = self._take("fill_mask", {"text": masked_text, "topk": topk})
        return tuple(MaskPrediction(token, prob) for token, prob in body)

    def embed(self, texts: Sequence[str]) -> tuple[EmbeddingVector, ...]:
        body = self._take("embed", {"texts": list(texts)})
        return tuple(EmbeddingVector(tuple(vec)) for vec in body)

    def qe_score(self, source_text: str, target_text: str) -> float:
        return float(self._take("qe", {"source": source_text, "target": target_text}))


def make_backend(spec: str, seed_texts: Iterable[str] = ()) -> InferenceBackend:
    """Build a backend from a CLI-style spec string.

    "mock" or "mock:fixture.json" selects the in-process mock (seed_texts
    are registered for masked-word recovery); an http(s) URL selects the
    remote client.
    """
    if spec == "mock":
        backend: InferenceBackend = MockBackend()
    elif spec.startswith("mock:"):
        backend = MockBackend.from_fixture(spec[len("mock:") :])
    elif spec.startswith(("http://", "https://")):
        return HttpBackend(spec)
    else:
        raise ValueError(
            f"backend must be 'mock', 'mock:<fixture.json>', or an http(s) URL,"
            f" got {spec!r}"
        )
    backend.register_texts(seed_texts)
    return backend
