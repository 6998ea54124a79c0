"""Command-line interface.

Subcommands mirror the pipeline stages: ingest, run, train-bpe,
build-syllable-vocab, tokenize, export-finetune, eval, review. Paths are
always explicit; no environment variables are consulted. On failure the
process exits nonzero after printing a machine-readable JSON error
({"category", "message"}) to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import PipelineConfig
from .errors import BokitError
from .evaluation import (
    EvalReport,
    EvalRow,
    aggregate_mos,
    corpus_syllable_accuracy,
    pairs_to_syllables,
    read_ratings,
    read_transcription_pairs,
    render_report,
)
from .manifest import read_manifest, write_manifest
from .normalize import normalize_text
from .pipeline import export_finetune, ingest, run_pipeline
from .tokenizer import (
    bpe_train,
    compute_token_stats,
    encode,
    load_model,
    syllable_vocab_build,
)

log = logging.getLogger("bokit")


def _read_lines(path: str) -> list[str]:
    return [
        line for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def _load_corpus(args) -> list[str]:
    """Corpus lines for tokenizer training, normalized when asked."""
    lines = _read_lines(args.input)
    if args.config:
        cfg = PipelineConfig.from_file(args.config)
        lines = [normalize_text(t, cfg.normalization).normalized for t in lines]
    return lines


def _cmd_ingest(args) -> int:
    records = ingest(args.index, args.audio_root)
    write_manifest(args.out, records)
    print(f"ingested {len(records)} records -> {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = PipelineConfig.from_file(args.config)
    records = read_manifest(args.records)
    _, summary = run_pipeline(records, config, args.out_dir)
    print(json.dumps(summary.to_dict(), ensure_ascii=False, indent=1))
    return 0


def _cmd_train_bpe(args) -> int:
    model = bpe_train(_load_corpus(args), args.vocab_size)
    model.save(args.out)
    print(f"trained BPE model: {len(model)} tokens, "
          f"{len(model.merges)} merges -> {args.out}")
    return 0


def _cmd_build_syllable_vocab(args) -> int:
    vocab = syllable_vocab_build(_load_corpus(args), args.min_count)
    vocab.save(args.out)
    print(f"built syllable vocab: {len(vocab)} tokens -> {args.out}")
    return 0


def _cmd_tokenize(args) -> int:
    model = load_model(args.model)
    lines = _read_lines(args.input)
    if args.config:
        cfg = PipelineConfig.from_file(args.config)
        lines = [normalize_text(t, cfg.normalization).normalized for t in lines]
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(" ".join(map(str, encode(model, line).ids)) + "\n")
    if args.stats:
        stats = compute_token_stats(lines, {"model": model})
        print(json.dumps({k: v.to_dict() for k, v in stats.items()},
                         ensure_ascii=False, indent=1))
    else:
        print(f"tokenized {len(lines)} utterances -> {args.out}")
    return 0


def _cmd_export_finetune(args) -> int:
    records = read_manifest(args.manifest)
    model = load_model(args.model)
    count = export_finetune(records, model, args.out)
    print(f"exported {count} accepted records -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    ratings = read_ratings(args.ratings)
    mos = aggregate_mos(ratings)
    normalization = None
    if args.config:
        normalization = PipelineConfig.from_file(args.config).normalization
    pair_files: dict[str, str] = {}
    for spec in args.pairs:
        system, sep, path = spec.partition("=")
        if not sep:
            raise BokitError(f"--pairs wants SYSTEM=PATH, got {spec!r}")
        pair_files[system] = path
    rows = []
    for system, summary in mos.items():
        accuracy = 0.0
        if system in pair_files:
            pairs = read_transcription_pairs(pair_files[system])
            accuracy = corpus_syllable_accuracy(
                pairs_to_syllables(pairs, normalization)
            )
        rows.append(EvalRow(
            name=system,
            mos_mean=summary.mean,
            mos_ci95=summary.ci95,
            syllable_accuracy_pct=accuracy,
            n_raters=summary.n_raters,
            n_utterances=summary.n_utterances,
        ))
    report = EvalReport(rows=tuple(rows))
    Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    print(render_report(report), end="")
    return 0


def _cmd_review(args) -> int:
    from .review_server import serve

    normalization = None
    if args.config:
        normalization = PipelineConfig.from_file(args.config).normalization
    serve(
        manifest_path=args.manifest,
        host=args.host,
        port=args.port,
        static_dir=args.static_dir,
        normalization=normalization,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bokit",
        description="Corpus governance and text front-end toolkit for Tibetan TTS",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a transcript index into pending records")
    p.add_argument("--index", required=True)
    p.add_argument("--audio-root", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("run", help="run the quality pipeline over ingested records")
    p.add_argument("--config", required=True)
    p.add_argument("--records", required=True, help="manifest from `bokit ingest`")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("train-bpe", help="train the syllable-scoped BPE tokenizer")
    p.add_argument("--input", required=True, help="one utterance per line")
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--config", help="normalize the corpus with this pipeline config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_bpe)

    p = sub.add_parser("build-syllable-vocab", help="build the syllable vocabulary")
    p.add_argument("--input", required=True, help="one utterance per line")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--config", help="normalize the corpus with this pipeline config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_syllable_vocab)

    p = sub.add_parser("tokenize", help="encode utterances with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="normalize the input with this pipeline config")
    p.add_argument("--stats", action="store_true", help="print token statistics")
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("export-finetune", help="export accepted records as token dump")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_finetune)

    p = sub.add_parser("eval", help="aggregate MOS ratings and syllable accuracy")
    p.add_argument("--ratings", required=True,
                   help="delimited file: system, rater, utterance_id, score")
    p.add_argument("--pairs", action="append", default=[], metavar="SYSTEM=PATH",
                   help="per-system transcription pairs file "
                        "(utterance_id, ref_text, hyp_text); repeatable")
    p.add_argument("--config", help="pipeline config whose normalization is "
                                    "applied to the pair texts")
    p.add_argument("--out", required=True, help="structured report (JSON)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("review", help="start the human-inspection server")
    p.add_argument("--manifest", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8377)
    p.add_argument("--static-dir", help="built review UI assets")
    p.add_argument("--config", help="pipeline config for re-normalizing edits")
    p.set_defaults(func=_cmd_review)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BokitError as exc:
        print(json.dumps({"category": exc.category, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"category": "io", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
