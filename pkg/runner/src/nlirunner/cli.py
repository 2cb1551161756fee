"""Command line: corpus JSONL in, predictions JSONL out."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .runner import RunnerConfig, predict_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nli-runner",
        description="Run an NLI sequence-classification checkpoint over a "
        "corpus JSONL file and write predictions JSONL.",
    )
    parser.add_argument("--model", required=True,
                        help="HuggingFace hub name or local checkpoint path")
    parser.add_argument("--corpus", required=True, metavar="FILE")
    parser.add_argument("--out", required=True, metavar="FILE")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--join", choices=["space", "newline"], default="space",
                        help="how to merge multi-premise problems into the "
                        "single premise slot (default: space)")
    parser.add_argument("--labels", default=None, metavar="L0,L1,L2",
                        help="NLI label for each model output index, e.g. "
                        "entailment,neutral,contradiction (default: derived "
                        "from the checkpoint's id2label)")
    parser.add_argument("--max-length", type=int, default=256)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    labels = None
    if args.labels:
        labels = tuple(part.strip() for part in args.labels.split(","))
    try:
        config = RunnerConfig(
            model=args.model,
            labels=labels,
            batch_size=args.batch_size,
            join=args.join,
            max_length=args.max_length,
            device=args.device,
        )
        with open(args.corpus, encoding="utf-8") as fh:
            text = predict_corpus(config, fh.read())
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    directory = os.path.dirname(os.path.abspath(args.out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, args.out)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    print(f"wrote {text.count(chr(10))} predictions to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
