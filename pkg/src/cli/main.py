"""Command-line front end"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from src.cli import commands
from src.config import RunConfig, load_config
from src.errors import DocTabError, InputFormatError
from src.providers.factory import build_llm

PROVIDER_MODES = ("live", "replay", "record")


def _config(args: argparse.Namespace, **overrides) -> RunConfig:
    config = load_config(getattr(args, "config", None), **overrides)
    if getattr(args, "embedder", None):
        config.embedder.mode = args.embedder
    if getattr(args, "rewriter", None):
        config.rewriter.mode = args.rewriter
    if getattr(args, "llm", None):
        config.llm.mode = args.llm
    return config


def _annotate(args) -> dict:
    return commands.cmd_annotate(args.docs, args.tables, args.out, args.reviews, args.workers)


def _retrieve(args) -> dict:
    config = _config(args, k=args.k, retriever=args.retriever)
    return commands.cmd_retrieve(args.docs, args.triples, args.out, config)


def _generate(args) -> dict:
    mode = "oneshot" if args.baseline_oneshot else args.mode
    config = _config(args, fill_batch_size=args.batch_size, generation_mode=mode)
    return commands.cmd_generate(args.docs, args.triples, args.out, config, retrieval=args.retrieval)


def _evaluate(args) -> dict:
    judge = build_llm(_config(args).llm) if args.judge else None
    return commands.cmd_evaluate(args.generated, args.groundtruth, args.out, args.value_scorer, judge)


def _stats(args) -> dict:
    return commands.cmd_stats(args.triples, args.docs)


def _pipeline(args) -> dict:
    return commands.cmd_pipeline(_config(args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doctab", description="Question answering over documents as tables")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="match cells to sentences, filter tables, write triples")
    p.add_argument("--docs", type=Path, required=True)
    p.add_argument("--tables", type=Path, required=True)
    p.add_argument("--reviews", type=Path)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_annotate)

    p = sub.add_parser("retrieve", help="rewrite, embed and rank sentences per question")
    p.add_argument("--docs", type=Path, required=True)
    p.add_argument("--triples", type=Path, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--embedder", choices=("hashing", *PROVIDER_MODES))
    p.add_argument("--rewriter", choices=("identity", "chat", *PROVIDER_MODES))
    p.add_argument("--retriever", choices=("embedding", "llm"))
    p.add_argument("--llm", choices=PROVIDER_MODES, help="llm mode for --retriever llm or --rewriter chat")
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_retrieve)

    p = sub.add_parser("generate", help="generate tables from retrieved sentences")
    p.add_argument("--docs", type=Path, required=True)
    p.add_argument("--triples", type=Path, required=True)
    p.add_argument("--retrieval", type=Path)
    p.add_argument("--llm", choices=PROVIDER_MODES)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--mode", choices=("tabtalk", "direct", "oneshot"))
    p.add_argument("--baseline-oneshot", action="store_true", help="single prompt over the whole document")
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_generate)

    p = sub.add_parser("evaluate", help="score generated tables against ground truth")
    p.add_argument("--generated", type=Path, required=True)
    p.add_argument("--groundtruth", type=Path, required=True)
    p.add_argument("--judge", action="store_true", help="also ask the llm provider for 0-10 scores")
    p.add_argument("--value-scorer", help="module:function replacing chrF for cell values")
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_evaluate)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--triples", type=Path, required=True)
    p.add_argument("--docs", type=Path)
    p.set_defaults(func=_stats)

    p = sub.add_parser("pipeline", help="retrieve, generate and evaluate from one config file")
    p.add_argument("--config", type=Path, required=True)
    p.set_defaults(func=_pipeline)
    return parser


def error_status(error: DocTabError) -> dict:
    status = {"status": "error", "error": type(error).__name__, "message": str(error)}
    if isinstance(error, InputFormatError):
        status.update(path=error.path, line=error.line, field=error.field)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        status = args.func(args)
    except DocTabError as e:
        print(json.dumps(error_status(e)), file=sys.stderr)
        return 1
    print(json.dumps(status, sort_keys=True, default=str))
    return 0
