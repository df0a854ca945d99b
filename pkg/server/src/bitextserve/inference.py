"""Model loading and the inference routines behind the HTTP endpoints."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import torch
from transformers import (
    AutoModel,
    AutoModelForMaskedLM,
    AutoModelForSequenceClassification,
    AutoTokenizer,
)

from .config import ServerConfig


class RequestError(ValueError):
    """The request payload cannot be served; maps to HTTP 400."""


class ModelMissing(RuntimeError):
    """The endpoint's model is not loaded; maps to HTTP 503."""


class InferenceFailure(RuntimeError):
    """The model ran but produced unusable output; maps to HTTP 500."""


# Vocabulary conventions for marking word boundaries, detected per model.
_WORDPIECE = "wordpiece"      # continuations carry a ## prefix
_SENTENCEPIECE = "sentencepiece"  # word starts carry a ▁ prefix
_BYTE_BPE = "byte-bpe"        # word starts carry a Ġ prefix


def _detect_vocab_style(vocab) -> str:
    for token in vocab:
        if token.startswith("▁"):
            return _SENTENCEPIECE
        if token.startswith("Ġ"):
            return _BYTE_BPE
    return _WORDPIECE


def _standalone_word(token: str, style: str) -> Optional[str]:
    """The surface word for a vocabulary token usable on its own, else None.

    Subword continuations are rejected so every prediction is one whole
    word, which is what single-site substitution requires downstream.
    """
    if style == _WORDPIECE:
        if token.startswith("##"):
            return None
        word = token
    elif style == _SENTENCEPIECE:
        if not token.startswith("▁"):
            return None
        word = token[len("▁"):]
    else:
        if not token.startswith("Ġ"):
            return None
        word = token[len("Ġ"):]
    if not word or any(ch.isspace() for ch in word):
        return None
    return word


class MaskFiller:
    """Top-k whole-word predictions for a single masked position."""

    def __init__(self, model_id: str, device: str) -> None:
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        if self._tokenizer.mask_token is None:
            raise ValueError(f"{model_id} has no mask token, cannot fill masks")
        self._model = AutoModelForMaskedLM.from_pretrained(model_id)
        self._model.eval()
        self._model.to(device)
        self._device = device
        self._style = _detect_vocab_style(self._tokenizer.get_vocab())
        self._special_ids = set(self._tokenizer.all_special_ids)
        self._lock = threading.Lock()

    @property
    def sentinel(self) -> str:
        return self._tokenizer.mask_token

    def predict(self, text: str, topk: int) -> list[dict]:
        if topk < 1:
            raise RequestError(f"topk must be >= 1, got {topk}")
        occurrences = text.count(self.sentinel)
        if occurrences != 1:
            raise RequestError(
                f"text must contain the mask sentinel {self.sentinel!r} "
                f"exactly once, found {occurrences}"
            )
        encoded = self._tokenizer(text, return_tensors="pt", truncation=True)
        positions = (
            encoded["input_ids"][0] == self._tokenizer.mask_token_id
        ).nonzero(as_tuple=True)[0]
        if len(positions) != 1:
            raise RequestError(
                "mask sentinel was lost in tokenization (input too long?)"
            )
        with self._lock, torch.inference_mode():
            logits = self._model(**encoded.to(self._device)).logits
        probs = torch.softmax(logits[0, positions[0]].float(), dim=-1)

        predictions: list[dict] = []
        seen: set[str] = set()
        for token_id in torch.argsort(probs, descending=True).tolist():
            if token_id in self._special_ids:
                continue
            token = self._tokenizer.convert_ids_to_tokens(token_id)
            word = _standalone_word(token, self._style)
            if word is None or word in seen:
                continue
            seen.add(word)
            predictions.append({"token": word, "prob": float(probs[token_id])})
            if len(predictions) == topk:
                break
        return predictions


class Embedder:
    """L2-normalized sentence vectors from the encoder's first token."""

    def __init__(self, model_id: str, device: str, max_batch: int) -> None:
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModel.from_pretrained(model_id)
        self._model.eval()
        self._model.to(device)
        self._device = device
        self._max_batch = max_batch
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return int(self._model.config.hidden_size)

    def encode(self, texts: list[str]) -> list[list[float]]:
        if not texts:
            raise RequestError("texts must be a non-empty list")
        for i, text in enumerate(texts):
            if not isinstance(text, str) or not text.strip():
                raise RequestError(f"texts[{i}] must be a non-empty string")

        vectors: list[list[float]] = []
        for start in range(0, len(texts), self._max_batch):
            chunk = texts[start : start + self._max_batch]
            encoded = self._tokenizer(
                chunk, padding=True, truncation=True, return_tensors="pt"
            )
            with self._lock, torch.inference_mode():
                hidden = self._model(**encoded.to(self._device)).last_hidden_state
            cls = hidden[:, 0, :].float()
            norms = cls.norm(dim=1, keepdim=True)
            if bool((norms < 1e-9).any()):
                raise InferenceFailure("embedding collapsed to the zero vector")
            vectors.extend((cls / norms).tolist())
        return vectors


class QualityEstimator:
    """Scalar translation-quality score for a (source, target) pair.

    The two texts are fed as one model input separated by the tokenizer's
    pair separator; the regression head's output is clipped to [0, 1].
    """

    def __init__(self, model_id: str, device: str) -> None:
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self._model.eval()
        self._model.to(device)
        self._device = device
        self._lock = threading.Lock()

    def score(self, source: str, target: str) -> float:
        if not source.strip() or not target.strip():
            raise RequestError("source and target must be non-empty")
        encoded = self._tokenizer(
            source, target, return_tensors="pt", truncation=True
        )
        with self._lock, torch.inference_mode():
            logits = self._model(**encoded.to(self._device)).logits
        raw = float(logits.flatten()[0])
        return min(1.0, max(0.0, raw))


QE_SCALE = "[0, 1], higher is better"


@dataclass(frozen=True)
class ModelBundle:
    """Everything the HTTP layer serves, loaded once at startup."""

    name: str
    mask_filler: MaskFiller
    embedder: Embedder
    quality: Optional[QualityEstimator]

    def descriptor(self) -> dict:
        """The /health payload; qe_scale is present iff /qe can answer."""
        body = {
            "name": self.name,
            "mask_sentinel": self.mask_filler.sentinel,
            "embedding_dim": self.embedder.dim,
        }
        if self.quality is not None:
            body["qe_scale"] = QE_SCALE
        return body


def load_bundle(config: ServerConfig) -> ModelBundle:
    """Load all configured models eagerly so startup fails fast."""
    mask_filler = MaskFiller(config.mlm_model, config.device)
    embedder = Embedder(config.embed_model, config.device, config.max_batch)
    quality = (
        QualityEstimator(config.qe_model, config.device)
        if config.qe_model
        else None
    )
    return ModelBundle(
        name="bitextserve",
        mask_filler=mask_filler,
        embedder=embedder,
        quality=quality,
    )
