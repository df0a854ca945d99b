"""Shared fixtures: tiny locally built models and loaded bundles.

The hub is not reachable from the test environment, so the fixtures build
miniature BERT-family models on disk: a real WordPiece tokenizer over a
small vocabulary and randomly initialized (seeded) weights for the three
architectures. Every protocol and shape guarantee is model-agnostic, so
these stand in for the full-size defaults.
"""

from __future__ import annotations

import os

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_VERBOSITY", "error")

from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.normalizers import BertNormalizer
from tokenizers.pre_tokenizers import BertPreTokenizer
from tokenizers.processors import TemplateProcessing
from transformers import (
    BertConfig,
    BertForMaskedLM,
    BertForSequenceClassification,
    BertModel,
    PreTrainedTokenizerFast,
)

try:
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
except ImportError:
    pass

from bitextserve import ServerConfig, load_bundle

SPECIAL_TOKENS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
VOCAB_WORDS = [
    "the", "a", "court", "tribunal", "government", "gives", "provides",
    "grants", "financial", "monetary", "medical", "legal", "aid", "help",
    "support", "victim", "family", "hospital", "school", "city", "people",
    "water", "food", "law", "house", "land", "money", "care", "work",
    "child", "road", "river", "in", "near", "new", "old", "big", "small",
    "good", "clean",
]
SUBWORD_TOKENS = ["##s", "##ing", "##ed"]
PUNCT_TOKENS = [",", ".", "!", "?"]
VOCAB = SPECIAL_TOKENS + VOCAB_WORDS + SUBWORD_TOKENS + PUNCT_TOKENS

HIDDEN_SIZE = 32

# Five aligned pairs built entirely from VOCAB_WORDS, used for the
# end-to-end run against the live server.
E2E_PAIRS = [
    ("the court gives financial aid", "the tribunal gives monetary aid"),
    ("a school provides medical care", "the hospital provides legal care"),
    ("people work in the city", "family work in the house"),
    ("clean water in the river", "good food in the house"),
    ("the government grants land", "the law grants money"),
]


def _build_tokenizer() -> PreTrainedTokenizerFast:
    vocab_map = {token: i for i, token in enumerate(VOCAB)}
    inner = Tokenizer(WordPiece(vocab_map, unk_token="[UNK]"))
    inner.normalizer = BertNormalizer(lowercase=True)
    inner.pre_tokenizer = BertPreTokenizer()
    inner.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[
            ("[CLS]", vocab_map["[CLS]"]),
            ("[SEP]", vocab_map["[SEP]"]),
        ],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=inner,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=64,
    )


def _bert_config(**overrides) -> BertConfig:
    settings = dict(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN_SIZE,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    settings.update(overrides)
    return BertConfig(**settings)


def build_model_dirs(root: Path) -> dict[str, Path]:
    """Write the three model directories; deterministic across runs."""
    tokenizer = _build_tokenizer()
    dirs = {}

    torch.manual_seed(0)
    dirs["mlm"] = root / "mlm"
    BertForMaskedLM(_bert_config()).save_pretrained(dirs["mlm"])
    tokenizer.save_pretrained(dirs["mlm"])

    torch.manual_seed(1)
    dirs["embed"] = root / "embed"
    BertModel(_bert_config()).save_pretrained(dirs["embed"])
    tokenizer.save_pretrained(dirs["embed"])

    torch.manual_seed(2)
    dirs["qe"] = root / "qe"
    BertForSequenceClassification(_bert_config(num_labels=1)).save_pretrained(
        dirs["qe"]
    )
    tokenizer.save_pretrained(dirs["qe"])
    return dirs


@pytest.fixture(scope="session")
def model_dirs(tmp_path_factory) -> dict[str, Path]:
    return build_model_dirs(tmp_path_factory.mktemp("models"))


@pytest.fixture(scope="session")
def server_config(model_dirs) -> ServerConfig:
    return ServerConfig(
        mlm_model=str(model_dirs["mlm"]),
        embed_model=str(model_dirs["embed"]),
        qe_model=str(model_dirs["qe"]),
        max_batch=4,
    )


@pytest.fixture(scope="session")
def bundle(server_config):
    return load_bundle(server_config)


@pytest.fixture(scope="session")
def bundle_no_qe(model_dirs):
    return load_bundle(
        ServerConfig(
            mlm_model=str(model_dirs["mlm"]),
            embed_model=str(model_dirs["embed"]),
            qe_model=None,
            max_batch=4,
        )
    )
