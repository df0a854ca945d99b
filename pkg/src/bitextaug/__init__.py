"""Parallel-corpus augmentation by single-word substitution.

Starting from a small aligned bitext, each sentence is varied by masking
one word at a time and letting a fill-mask model propose replacements; the
cross-product of source-side and target-side variants is then filtered by
sentence-embedding cosine similarity (optionally cross-checked by word
co-occurrence and quality-estimation gates) and deduplicated. Repeating
the process over rounds grows the corpus multiplicatively.
"""

from .backends import (
    MOCK_EMBEDDING_DIM,
    MOCK_SENTINEL,
    BackendDescriptor,
    EmbeddingVector,
    HttpBackend,
    InferenceBackend,
    MaskPrediction,
    MockBackend,
    TranscriptRecorder,
    TranscriptReplay,
    make_backend,
)
from .config import PipelineConfig, StopwordSet, bundled_stopwords, load_config_file
from .cooccurrence import (
    CooccurrenceMatrix,
    association_score,
    build_matrix,
    cooc_gate,
    load_matrix,
    save_matrix,
)
from .corpus import (
    ORIGIN_GENERATED,
    ORIGIN_SEED,
    ParallelCorpus,
    ScoreSet,
    SegmentPair,
    Violation,
    WriteReport,
    load_augmented_corpus,
    load_parallel_corpus,
    validate_corpus,
    write_augmented_corpus,
)
from .errors import (
    AugmentError,
    BackendError,
    BackendUnavailable,
    BlankSegment,
    CorpusError,
    DimensionMismatch,
    EmptyCorpus,
    EncodingError,
    InvariantViolation,
    IoError,
    MalformedMaskInput,
    MismatchedLineCount,
    RunAborted,
)
from .masking import (
    GeneratedVariant,
    MaskSite,
    Token,
    enumerate_mask_sites,
    generate_all_variants,
    generate_variants_at,
    tokenize,
)
from .pipeline import (
    PairStats,
    QeEntry,
    QeReport,
    RoundStats,
    RunResult,
    augment_pair,
    qe_cross_check,
    run,
    run_round,
)
from .scoring import (
    CandidatePair,
    DedupIndex,
    cosine_similarity,
    dedup,
    filter_pairs,
    normalize_key_text,
    score_pairs,
)

__version__ = "0.1.0"
