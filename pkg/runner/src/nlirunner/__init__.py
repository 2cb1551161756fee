"""Batch NLI inference over corpus JSONL files.

Reads the corpus format produced by the patnli generator, runs a
sequence-classification checkpoint over every (premises, hypothesis)
pair, and writes the predictions JSONL format that `patnli eval`
consumes.  The two packages communicate only through those files.
"""

from .runner import RunnerConfig, load_corpus_records, predict_corpus, predict_records

__version__ = "0.1.0"

__all__ = [
    "RunnerConfig",
    "load_corpus_records",
    "predict_corpus",
    "predict_records",
]
