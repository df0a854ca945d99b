"""Round orchestration: variants, scoring, gates, dedup, stats."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional, Protocol, Sequence

from .backends import InferenceBackend
from .config import PipelineConfig
from .cooccurrence import CooccurrenceMatrix, build_matrix, cooc_gate
from .corpus import ORIGIN_GENERATED, ParallelCorpus, ScoreSet, SegmentPair
from .errors import BackendError, RunAborted
from .masking import SIDE_SOURCE, SIDE_TARGET, generate_all_variants
from .scoring import CandidatePair, DedupIndex, dedup, filter_pairs, score_pairs


@dataclass(frozen=True)
class PairStats:
    """Gate funnel for one seed pair."""

    variants_src: int
    variants_tgt: int
    candidate_pairs: int
    passed_similarity: int
    passed_cooc: int
    passed_qe: int
    emitted_after_dedup: int


@dataclass(frozen=True)
class RoundStats:
    """Gate funnel and bookkeeping for one whole round.

    Inactive gates count as pass-through, so the chain
    emitted_after_dedup <= passed_qe <= passed_cooc <= passed_similarity
    <= candidate_pairs always holds. wall_time is informational and is
    excluded from the machine-readable form.
    """

    round_no: int
    seed_pairs: int
    variants_src: int
    variants_tgt: int
    candidate_pairs: int
    passed_similarity: int
    passed_cooc: int
    passed_qe: int
    emitted_after_dedup: int
    skipped_pairs: int
    wall_time: float

    def check_funnel(self) -> None:
        chain = (
            self.emitted_after_dedup,
            self.passed_qe,
            self.passed_cooc,
            self.passed_similarity,
            self.candidate_pairs,
        )
        if any(a > b for a, b in zip(chain, chain[1:])):
            raise AssertionError(f"stats funnel violated: {chain}")

    def to_json_dict(self) -> dict:
        """Deterministic machine-readable form (wall_time omitted)."""
        data = asdict(self)
        del data["wall_time"]
        return data


@dataclass(frozen=True)
class RunResult:
    """Final corpus plus one RoundStats per round."""

    corpus: ParallelCorpus
    round_stats: tuple[RoundStats, ...]


def _apply_gates(
    pairs: Sequence[CandidatePair],
    config: PipelineConfig,
    backend: InferenceBackend,
    matrix: Optional[CooccurrenceMatrix],
) -> tuple[tuple[CandidatePair, ...], tuple[CandidatePair, ...]]:
    """Run the optional co-occurrence and qe gates.

    Returns (survivors of cooc gate, survivors of qe gate).
    """
    if config.cooc_check and matrix is not None:
        kept = []
        for pair in pairs:
            passed, scored = cooc_gate(pair, matrix, config.cooc_min_score)
            if passed:
                kept.append(scored)
        passed_cooc = tuple(kept)
    else:
        passed_cooc = tuple(pairs)

    if config.qe_check:
        kept = []
        for pair in passed_cooc:
            qe = backend.qe_score(pair.source_text, pair.target_text)
            if qe >= config.qe_threshold:
                kept.append(replace(pair, qe=qe))
        passed_qe = tuple(kept)
    else:
        passed_qe = passed_cooc
    return passed_cooc, passed_qe


def _pre_dedup(
    pair: SegmentPair,
    config: PipelineConfig,
    backend: InferenceBackend,
    matrix: Optional[CooccurrenceMatrix],
) -> tuple[tuple[CandidatePair, ...], PairStats]:
    """Everything up to (not including) dedup for one seed pair."""
    src_variants = generate_all_variants(
        pair.source_text, SIDE_SOURCE, config, backend, parent_pair_id=pair.id
    )
    tgt_variants = generate_all_variants(
        pair.target_text, SIDE_TARGET, config, backend, parent_pair_id=pair.id
    )
    candidates = score_pairs(src_variants, tgt_variants, backend)
    passed_similarity = filter_pairs(candidates, config.threshold)
    passed_cooc, passed_qe = _apply_gates(passed_similarity, config, backend, matrix)
    stats = PairStats(
        variants_src=len(src_variants),
        variants_tgt=len(tgt_variants),
        candidate_pairs=len(candidates),
        passed_similarity=len(passed_similarity),
        passed_cooc=len(passed_cooc),
        passed_qe=len(passed_qe),
        emitted_after_dedup=0,
    )
    return passed_qe, stats


def augment_pair(
    pair: SegmentPair,
    config: PipelineConfig,
    backend: InferenceBackend,
    matrix: Optional[CooccurrenceMatrix] = None,
    index: Optional[DedupIndex] = None,
) -> tuple[tuple[CandidatePair, ...], PairStats]:
    """Generate, score, gate, and dedup all candidates for one seed pair.

    The index must already contain the seed corpus; a fresh one seeded with
    just this pair is used when none is given.
    """
    if index is None:
        index = DedupIndex()
        index.add(pair.source_text, pair.target_text)
    passed_qe, stats = _pre_dedup(pair, config, backend, matrix)
    emitted = dedup(passed_qe, index)
    return emitted, replace(stats, emitted_after_dedup=len(emitted))


def run_round(
    corpus: ParallelCorpus,
    round_no: int,
    config: PipelineConfig,
    backend: InferenceBackend,
    index: Optional[DedupIndex] = None,
    matrix: Optional[CooccurrenceMatrix] = None,
) -> tuple[ParallelCorpus, RoundStats]:
    """Augment every pair of the input corpus once.

    Pairs failing with BackendError are skipped and counted; when more than
    config.max_skip_rate of the round's input was skipped the round raises
    RunAborted. Output ids are r<round>n<seq> in input order; dedup and id
    assignment are serialized in input order, so output does not depend on
    worker scheduling.
    """
    started = time.perf_counter()
    if index is None:
        index = DedupIndex()
        index.seed_with(corpus.pairs)

    def work(pair: SegmentPair):
        try:
            return _pre_dedup(pair, config, backend, matrix), None
        except BackendError as exc:
            return None, exc

    if config.worker_limit == 1 or len(corpus) <= 1:
        outcomes = [work(p) for p in corpus.pairs]
    else:
        with ThreadPoolExecutor(max_workers=config.worker_limit) as pool:
            outcomes = list(pool.map(work, corpus.pairs))

    new_pairs: list[SegmentPair] = []
    totals = {
        "variants_src": 0,
        "variants_tgt": 0,
        "candidate_pairs": 0,
        "passed_similarity": 0,
        "passed_cooc": 0,
        "passed_qe": 0,
    }
    skipped = 0
    seq = 0
    for result, error in outcomes:
        if error is not None:
            skipped += 1
            continue
        passed_qe, stats = result
        for key in totals:
            totals[key] += getattr(stats, key)
        for candidate in dedup(passed_qe, index):
            seq += 1
            new_pairs.append(
                SegmentPair(
                    id=f"r{round_no}n{seq}",
                    source_text=candidate.source_text,
                    target_text=candidate.target_text,
                    origin=ORIGIN_GENERATED,
                    round=round_no,
                    scores=ScoreSet(
                        similarity=candidate.similarity,
                        qe=candidate.qe,
                        cooc=candidate.cooc,
                    ),
                )
            )

    stats = RoundStats(
        round_no=round_no,
        seed_pairs=len(corpus),
        candidate_pairs=totals["candidate_pairs"],
        variants_src=totals["variants_src"],
        variants_tgt=totals["variants_tgt"],
        passed_similarity=totals["passed_similarity"],
        passed_cooc=totals["passed_cooc"],
        passed_qe=totals["passed_qe"],
        emitted_after_dedup=len(new_pairs),
        skipped_pairs=skipped,
        wall_time=time.perf_counter() - started,
    )
    stats.check_funnel()
    if len(corpus) > 0 and skipped / len(corpus) > config.max_skip_rate:
        raise RunAborted(
            f"round {round_no}: {skipped}/{len(corpus)} input pairs skipped,"
            f" above the ceiling of {config.max_skip_rate:.0%}"
        )
    out = ParallelCorpus(
        pairs=tuple(new_pairs),
        lang_source=corpus.lang_source,
        lang_target=corpus.lang_target,
    )
    return out, stats


def run(
    seed: ParallelCorpus,
    config: PipelineConfig,
    backend: InferenceBackend,
) -> RunResult:
    """Run all configured rounds.

    Round r consumes the seed plus everything emitted in earlier rounds
    (truncated to config.seed_cap pairs when set). The result contains only
    generated pairs unless config.include_seed is on; the dedup index spans
    seed and all rounds, so no pair is ever emitted twice.
    """
    index = DedupIndex()
    index.seed_with(seed.pairs)
    matrix: Optional[CooccurrenceMatrix] = None
    if config.cooc_check and len(seed) > 0:
        matrix = build_matrix(
            seed,
            config.stopwords_for(SIDE_SOURCE),
            config.stopwords_for(SIDE_TARGET),
        )

    generated: list[SegmentPair] = []
    per_round: list[RoundStats] = []
    for round_no in range(1, config.rounds + 1):
        pool = seed.pairs + tuple(generated)
        if config.seed_cap is not None:
            pool = pool[: config.seed_cap]
        round_input = ParallelCorpus(
            pairs=pool, lang_source=seed.lang_source, lang_target=seed.lang_target
        )
        out, stats = run_round(round_input, round_no, config, backend, index, matrix)
        generated.extend(out.pairs)
        per_round.append(stats)

    final_pairs = (seed.pairs + tuple(generated)) if config.include_seed else tuple(generated)
    corpus = ParallelCorpus(
        pairs=final_pairs,
        lang_source=seed.lang_source,
        lang_target=seed.lang_target,
    )
    return RunResult(corpus=corpus, round_stats=tuple(per_round))


class _ScorablePair(Protocol):
    @property
    def source_text(self) -> str: ...

    @property
    def target_text(self) -> str: ...


@dataclass(frozen=True)
class QeEntry:
    """Quality-estimation outcome for one pair."""

    pair_id: str
    qe: Optional[float]
    passed: bool
    error: Optional[str] = None


@dataclass(frozen=True)
class QeReport:
    """Per-pair qe outcomes plus the overall pass rate."""

    entries: tuple[QeEntry, ...]
    qe_threshold: float

    @property
    def pass_rate(self) -> float:
        scored = [e for e in self.entries if e.error is None]
        if not scored:
            return 0.0
        return sum(e.passed for e in scored) / len(scored)

    @property
    def failures(self) -> tuple[QeEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)


def qe_cross_check(
    pairs: Sequence[_ScorablePair],
    backend: InferenceBackend,
    qe_threshold: float,
) -> QeReport:
    """Score every pair with the backend's quality estimator.

    Purely observational: input pairs are not modified or filtered. Backend
    failures are recorded per pair and scoring continues.
    """
    entries = []
    for position, pair in enumerate(pairs):
        pair_id = getattr(pair, "id", str(position))
        try:
            qe = backend.qe_score(pair.source_text, pair.target_text)
        except BackendError as exc:
            entries.append(QeEntry(pair_id, None, False, error=str(exc)))
            continue
        entries.append(QeEntry(pair_id, qe, qe >= qe_threshold))
    return QeReport(entries=tuple(entries), qe_threshold=qe_threshold)
