"""Command-line interface.

Subcommands: augment (run the pipeline), validate (check corpus files),
cooc-build (write a co-occurrence matrix sidecar), qe-check (score pairs
with the backend's quality estimator), stats (corpus summary and random
samples).

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend failure,
4 run aborted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional

from .backends import make_backend
from .config import PipelineConfig, StopwordSet, bundled_stopwords, load_config_file
from .cooccurrence import build_matrix, save_matrix
from .corpus import (
    ORIGIN_GENERATED,
    ORIGIN_SEED,
    ParallelCorpus,
    load_augmented_corpus,
    load_parallel_corpus,
    validate_corpus,
    write_augmented_corpus,
)
from .errors import (
    BackendError,
    CorpusError,
    DimensionMismatch,
    RunAborted,
)
from .pipeline import qe_cross_check, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3
EXIT_ABORTED = 4

OUT_META_NAME = "augmented.meta.tsv"
OUT_STATS_NAME = "stats.jsonl"

_STR_KEYS = (
    "src",
    "tgt",
    "src_lang",
    "tgt_lang",
    "out_dir",
    "backend",
    "stopwords_src",
    "stopwords_tgt",
)
_INT_KEYS = ("topk", "rounds", "max_sites", "max_variants", "seed_cap", "workers")
_FLOAT_KEYS = ("threshold", "qe_threshold", "cooc_min_score")
_BOOL_KEYS = ("qe_check", "cooc_check", "include_seed")
_ALL_KEYS = _STR_KEYS + _INT_KEYS + _FLOAT_KEYS + _BOOL_KEYS


class _UsageError(Exception):
    """Bad flags, bad config file, or missing required settings."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise _UsageError(f"expected a boolean, got {raw!r}")


def _merged_settings(args: argparse.Namespace) -> dict:
    """Combine config-file values and flags; flags win."""
    settings: dict = {}
    if getattr(args, "config", None):
        try:
            raw = load_config_file(args.config)
        except OSError as exc:
            raise _UsageError(f"cannot read config file: {exc}") from exc
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
        for key, value in raw.items():
            if key not in _ALL_KEYS:
                raise _UsageError(f"unknown config key {key!r}")
            try:
                if key in _INT_KEYS:
                    settings[key] = int(value)
                elif key in _FLOAT_KEYS:
                    settings[key] = float(value)
                elif key in _BOOL_KEYS:
                    settings[key] = _parse_bool(value)
                else:
                    settings[key] = value
            except ValueError as exc:
                raise _UsageError(f"config key {key!r}: {exc}") from exc
    for key in _ALL_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _require(settings: dict, *keys: str) -> None:
    missing = [k for k in keys if settings.get(k) in (None, "")]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise _UsageError(f"missing required settings: {flags}")


def _build_backend(settings: dict, corpus: Optional[ParallelCorpus] = None):
    spec = settings["backend"]
    if spec != "mock" and not spec.startswith(("mock:", "http://", "https://")):
        raise _UsageError(
            f"backend must be 'mock', 'mock:<fixture.json>', or an http(s) URL,"
            f" got {spec!r}"
        )
    seed_texts: list[str] = []
    if corpus is not None:
        seed_texts = [p.source_text for p in corpus] + [p.target_text for p in corpus]
    try:
        return make_backend(spec, seed_texts)
    except ValueError as exc:
        raise CorpusError(str(exc)) from exc


def _load_for_inspection(args: argparse.Namespace) -> ParallelCorpus:
    """Load a corpus for validate/qe-check/stats, with or without metadata."""
    if not args.src or not args.tgt:
        raise _UsageError("missing required settings: --src, --tgt")
    src_lang = args.src_lang or "l1"
    tgt_lang = args.tgt_lang or "l2"
    if args.meta:
        return load_augmented_corpus(args.src, args.tgt, args.meta, src_lang, tgt_lang)
    return load_parallel_corpus(args.src, args.tgt, src_lang, tgt_lang)


def _stopword_set(path: Optional[str], lang: Optional[str]) -> StopwordSet:
    if path:
        return StopwordSet.from_file(path)
    return bundled_stopwords(lang or "")


def cmd_augment(args: argparse.Namespace) -> int:
    settings = _merged_settings(args)
    _require(settings, "src", "tgt", "src_lang", "tgt_lang", "out_dir", "backend")
    if settings["src_lang"] == settings["tgt_lang"]:
        raise _UsageError("--src-lang and --tgt-lang must differ")

    config_kwargs = {
        key: settings[key]
        for key in (
            "topk",
            "threshold",
            "rounds",
            "max_sites",
            "qe_check",
            "qe_threshold",
            "cooc_check",
            "cooc_min_score",
            "stopwords_src",
            "stopwords_tgt",
            "seed_cap",
            "include_seed",
        )
        if key in settings
    }
    if "max_variants" in settings:
        config_kwargs["max_variants_per_side"] = settings["max_variants"]
    if "workers" in settings:
        config_kwargs["worker_limit"] = settings["workers"]
    config_kwargs["lang_source"] = settings["src_lang"]
    config_kwargs["lang_target"] = settings["tgt_lang"]
    config_kwargs["backend"] = settings["backend"]
    try:
        config = PipelineConfig(**config_kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc

    corpus = load_parallel_corpus(
        settings["src"], settings["tgt"], settings["src_lang"], settings["tgt_lang"]
    )
    backend = _build_backend(settings, corpus)
    result = run(corpus, config, backend)

    out_dir = Path(settings["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    out_l1 = out_dir / f"augmented.{settings['src_lang']}"
    out_l2 = out_dir / f"augmented.{settings['tgt_lang']}"
    report = write_augmented_corpus(
        result.corpus, out_l1, out_l2, out_dir / OUT_META_NAME
    )
    stats_lines = [
        json.dumps(s.to_json_dict(), sort_keys=True) for s in result.round_stats
    ]
    (out_dir / OUT_STATS_NAME).write_bytes(
        ("".join(line + "\n" for line in stats_lines)).encode("utf-8")
    )

    for s in result.round_stats:
        print(
            f"round {s.round_no}: {s.seed_pairs} pairs in,"
            f" {s.candidate_pairs} candidates,"
            f" {s.passed_similarity} passed similarity,"
            f" {s.emitted_after_dedup} emitted,"
            f" {s.skipped_pairs} skipped"
            f" ({s.wall_time:.2f}s)"
        )
    print(f"wrote {report.pairs_written} pairs to {out_l1} and {out_l2}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    corpus = _load_for_inspection(args)
    violations = validate_corpus(corpus)
    for violation in violations:
        print(violation)
    if violations:
        print(f"{len(violations)} violations in {len(corpus)} pairs")
        return EXIT_DATA
    print(f"ok: {len(corpus)} pairs")
    return EXIT_OK


def cmd_cooc_build(args: argparse.Namespace) -> int:
    if not args.src or not args.tgt:
        raise _UsageError("missing required settings: --src, --tgt")
    corpus = load_parallel_corpus(
        args.src, args.tgt, args.src_lang or "l1", args.tgt_lang or "l2"
    )
    matrix = build_matrix(
        corpus,
        _stopword_set(args.stopwords_src, args.src_lang),
        _stopword_set(args.stopwords_tgt, args.tgt_lang),
    )
    save_matrix(matrix, args.out)
    print(
        f"wrote {len(matrix.counts)} entries"
        f" ({len(matrix.vocab_source)} x {len(matrix.vocab_target)} vocabulary,"
        f" total mass {matrix.pair_total}) to {args.out}"
    )
    return EXIT_OK


def cmd_qe_check(args: argparse.Namespace) -> int:
    corpus = _load_for_inspection(args)
    settings = {"backend": args.backend}
    _require(settings, "backend")
    backend = _build_backend(settings, corpus)
    report = qe_cross_check(corpus.pairs, backend, args.qe_threshold)
    for entry in report.failures:
        if entry.error is not None:
            print(f"{entry.pair_id}: backend error: {entry.error}")
        else:
            print(f"{entry.pair_id}: qe {entry.qe:.4f} below {args.qe_threshold}")
    scored = [e for e in report.entries if e.error is None]
    print(
        f"pass rate {report.pass_rate:.2%}"
        f" ({sum(e.passed for e in scored)}/{len(scored)} scored,"
        f" {len(report.entries) - len(scored)} errors)"
    )
    if report.entries and not scored:
        return EXIT_BACKEND
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = _load_for_inspection(args)
    by_origin = {ORIGIN_SEED: 0, ORIGIN_GENERATED: 0}
    by_round: dict[int, int] = {}
    similarities = []
    for pair in corpus.pairs:
        by_origin[pair.origin] = by_origin.get(pair.origin, 0) + 1
        if pair.round is not None:
            by_round[pair.round] = by_round.get(pair.round, 0) + 1
        if pair.scores is not None:
            similarities.append(pair.scores.similarity)
    print(f"pairs: {len(corpus)}")
    print(f"seed: {by_origin[ORIGIN_SEED]}  generated: {by_origin[ORIGIN_GENERATED]}")
    for round_no in sorted(by_round):
        print(f"round {round_no}: {by_round[round_no]}")
    if similarities:
        mean = sum(similarities) / len(similarities)
        print(
            f"similarity: min {min(similarities):.4f}"
            f"  mean {mean:.4f}  max {max(similarities):.4f}"
        )
    if args.sample:
        rng = random.Random(args.sample_seed)
        chosen = rng.sample(corpus.pairs, min(args.sample, len(corpus.pairs)))
        print(f"sample of {len(chosen)}:")
        for pair in chosen:
            print(f"{pair.id}\t{pair.source_text}\t{pair.target_text}")
    return EXIT_OK


def _add_bitext_args(parser: argparse.ArgumentParser, with_langs: bool = True) -> None:
    parser.add_argument("--src", help="source-side text file")
    parser.add_argument("--tgt", help="target-side text file")
    if with_langs:
        parser.add_argument("--src-lang", help="source language tag")
        parser.add_argument("--tgt-lang", help="target language tag")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bitextaug", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("augment", help="generate new pairs from a seed bitext")
    _add_bitext_args(p)
    p.add_argument("--out-dir", help="directory for output files")
    p.add_argument("--config", help="key = value settings file; flags override it")
    p.add_argument("--backend", help="mock, mock:<fixture.json>, or an http(s) URL")
    p.add_argument("--topk", type=int, help="fill-mask predictions per site")
    p.add_argument("--threshold", type=float, help="similarity acceptance bar")
    p.add_argument("--rounds", type=int, help="augmentation rounds")
    p.add_argument("--max-sites", type=int, help="mask sites per segment")
    p.add_argument("--max-variants", type=int, help="variants kept per side")
    p.add_argument("--stopwords-src", help="stop-word file for the source side")
    p.add_argument("--stopwords-tgt", help="stop-word file for the target side")
    p.add_argument("--qe-check", action="store_true", default=None,
                   help="drop pairs below --qe-threshold")
    p.add_argument("--qe-threshold", type=float, help="qe acceptance bar")
    p.add_argument("--cooc-check", action="store_true", default=None,
                   help="gate on replacement co-occurrence")
    p.add_argument("--cooc-min-score", type=float, help="association score bar")
    p.add_argument("--include-seed", action="store_true", default=None,
                   help="copy seed pairs into the output")
    p.add_argument("--seed-cap", type=int, help="cap on per-round input pairs")
    p.add_argument("--workers", type=int, help="concurrent seed pairs")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("validate", help="check corpus files against the format rules")
    _add_bitext_args(p)
    p.add_argument("--meta", help="metadata TSV written by augment")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cooc-build", help="write a word co-occurrence matrix")
    _add_bitext_args(p)
    p.add_argument("--out", required=True, help="matrix TSV path")
    p.add_argument("--stopwords-src", help="stop-word file for the source side")
    p.add_argument("--stopwords-tgt", help="stop-word file for the target side")
    p.set_defaults(func=cmd_cooc_build)

    p = sub.add_parser("qe-check", help="score pairs with the quality estimator")
    _add_bitext_args(p)
    p.add_argument("--meta", help="metadata TSV written by augment")
    p.add_argument("--backend", help="mock, mock:<fixture.json>, or an http(s) URL")
    p.add_argument("--qe-threshold", type=float, default=0.8, help="pass bar")
    p.set_defaults(func=cmd_qe_check)

    p = sub.add_parser("stats", help="summarize a corpus, optionally sample pairs")
    _add_bitext_args(p)
    p.add_argument("--meta", help="metadata TSV written by augment")
    p.add_argument("--sample", type=int, help="print N randomly chosen pairs")
    p.add_argument("--sample-seed", type=int, default=0, help="sampling seed")
    p.set_defaults(func=cmd_stats)
    return parser


def entrypoint(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RunAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except (BackendError, DimensionMismatch) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


def main() -> None:
    sys.exit(entrypoint())


if __name__ == "__main__":
    main()
