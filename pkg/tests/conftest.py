"""Shared fixtures: corpora, substitution tables, backend builders."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from bitextaug import MockBackend, ParallelCorpus, SegmentPair, StopwordSet

FIG_SENTENCE = "The court should provide financial assistance to the victim's family."

# Three-seed-pair corpus for oracle-equivalence runs. Within a pair the two
# sides share most words (high base similarity); across pairs vocabularies
# are disjoint and sentence lengths differ, so no mask context ever matches
# a foreign text. Replacements are never table keys; "india" and "golf"
# also occur in the seed, giving the association gate a real spread.
ORACLE_SEED = (
    ("alpha bravo charlie delta", "alpha bravo charlie"),
    ("golf hotel india juliet kilo", "golf hotel india juliet kilo lima"),
    (
        "november sierra victor whiskey yankee zulu quebec",
        "november sierra victor whiskey",
    ),
)
ORACLE_TABLE = {
    "bravo": [("uniform", 0.6), ("india", 0.3)],
    "delta": [("echo", 0.5)],
    "charlie": [("romeo", 0.4)],
    "hotel": [("papa", 0.7), ("mike", 0.2)],
    "kilo": [("xray", 0.45)],
    "lima": [("oscar", 0.35)],
    "victor": [("foxtrot", 0.55), ("golf", 0.25)],
    "whiskey": [("song", 0.4)],
}

# Two-round chain: every key has exactly one replacement, so round 2 can
# only substitute at still-untouched positions.
CHAIN_SEED = (("the court gives financial aid", "the tribunal gives monetary aid"),)
CHAIN_TABLE = {
    "court": [("hospital", 0.6)],
    "financial": [("medical", 0.5)],
    "tribunal": [("hospital", 0.6)],
    "monetary": [("medical", 0.5)],
}


def corpus_from_pairs(
    pairs, lang_source: str = "xx", lang_target: str = "yy"
) -> ParallelCorpus:
    segment_pairs = tuple(
        SegmentPair(id=str(i), source_text=src, target_text=tgt)
        for i, (src, tgt) in enumerate(pairs)
    )
    return ParallelCorpus(segment_pairs, lang_source, lang_target)


def mock_for(pairs, table, **kwargs) -> MockBackend:
    texts = [t for pair in pairs for t in pair]
    return MockBackend(table, texts=texts, **kwargs)


def write_bitext(tmp_path: Path, pairs, name: str = "seed") -> tuple[Path, Path]:
    src = tmp_path / f"{name}.xx"
    tgt = tmp_path / f"{name}.yy"
    src.write_bytes("".join(p[0] + "\n" for p in pairs).encode("utf-8"))
    tgt.write_bytes("".join(p[1] + "\n" for p in pairs).encode("utf-8"))
    return src, tgt


def write_fixture(tmp_path: Path, table, texts=(), name: str = "fixture.json") -> Path:
    path = tmp_path / name
    payload = {"substitutions": {k: [list(row) for row in v] for k, v in table.items()}}
    if texts:
        payload["texts"] = list(texts)
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def oracle_corpus() -> ParallelCorpus:
    return corpus_from_pairs(ORACLE_SEED)


@pytest.fixture
def oracle_backend() -> MockBackend:
    return mock_for(ORACLE_SEED, ORACLE_TABLE)


@pytest.fixture
def no_stopwords() -> StopwordSet:
    return StopwordSet.empty()
