"""Corpus serialization, dataset statistics, and train/test split construction.

File format: JSON Lines.  The first line is a provenance object prefixed
with ``#`` (world hash, pattern-file hash, master seed, samples per
pattern); every following line is one sample record::

    {"id": ..., "pattern_id": ..., "label": ..., "class": ...,
     "premises": [...], "hypothesis": ..., "assignment": {var: entity}}
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ParseError, ValidationError
from .patterns import InferenceClass, Label
from .sampling import Sample, derived_rng

_RECORD_FIELDS = ("id", "pattern_id", "label", "class", "premises", "hypothesis", "assignment")

# token test for the negation statistic: "not" or a n't contraction
_NEGATION_RE = re.compile(r"\bnot\b|n't\b", re.IGNORECASE)

CLASS_ABBREV = {
    InferenceClass.DIRECTIONAL: "Dir",
    InferenceClass.NON_PROJECTIVE: "NonP",
    InferenceClass.PROJECTIVE: "Proj",
    InferenceClass.ARGUMENT_ORIENTATION: "ArgO",
}

LABEL_ABBREV = {Label.ENTAILMENT: "E", Label.NEUTRAL: "N", Label.CONTRADICTION: "C"}


@dataclass
class Corpus:
    samples: list[Sample]
    provenance: dict = field(default_factory=dict)

    def by_pattern(self) -> dict[str, list[Sample]]:
        groups: dict[str, list[Sample]] = {}
        for s in self.samples:
            groups.setdefault(s.pattern_id, []).append(s)
        return groups

    def pattern_ids(self) -> list[str]:
        return sorted(self.by_pattern())


def corpus_to_jsonl(corpus: Corpus) -> str:
    lines = ["# " + json.dumps(corpus.provenance, sort_keys=True, ensure_ascii=False)]
    for s in corpus.samples:
        record = {
            "id": s.id,
            "pattern_id": s.pattern_id,
            "label": s.label.value,
            "class": s.inference_class.value,
            "premises": list(s.premises),
            "hypothesis": s.hypothesis,
            "assignment": {v: s.assignment[v] for v in sorted(s.assignment)},
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def corpus_from_jsonl(text: str) -> Corpus:
    """Parse corpus JSONL; errors report 1-based line numbers."""
    provenance: dict = {}
    samples: list[Sample] = []
    seen_ids: set[str] = set()
    first_content_line = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if not first_content_line:
                raise ParseError(f"line {lineno}: provenance line only allowed first")
            first_content_line = False
            payload = stripped.lstrip("#").strip() or "{}"
            try:
                provenance = json.loads(payload)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid provenance JSON: {exc}") from exc
            if not isinstance(provenance, dict):
                raise ParseError(f"line {lineno}: provenance must be a JSON object")
            continue
        first_content_line = False
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise ParseError(f"line {lineno}: record must be a JSON object")
        for key in _RECORD_FIELDS:
            if key not in record:
                raise ParseError(f"line {lineno}: missing field '{key}'")
        try:
            label = Label(record["label"])
        except ValueError:
            raise ValidationError(
                f"line {lineno}: unknown label {record['label']!r}"
            ) from None
        try:
            inference_class = InferenceClass(record["class"])
        except ValueError:
            raise ValidationError(
                f"line {lineno}: unknown inference class {record['class']!r}"
            ) from None
        premises = record["premises"]
        if (
            not isinstance(premises, list)
            or not premises
            or not all(isinstance(p, str) for p in premises)
        ):
            raise ParseError(f"line {lineno}: premises must be a non-empty string list")
        if len(premises) > 3:
            raise ValidationError(
                f"line {lineno}: at most 3 premises allowed, got {len(premises)}"
            )
        assignment = record["assignment"]
        if not isinstance(assignment, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in assignment.items()
        ):
            raise ParseError(f"line {lineno}: assignment must map variables to entities")
        sample_id = record["id"]
        if sample_id in seen_ids:
            raise ValidationError(f"line {lineno}: duplicate sample id '{sample_id}'")
        seen_ids.add(sample_id)
        samples.append(
            Sample(
                id=sample_id,
                pattern_id=record["pattern_id"],
                label=label,
                inference_class=inference_class,
                premises=tuple(premises),
                hypothesis=record["hypothesis"],
                assignment=assignment,
            )
        )
    return Corpus(samples, provenance)


def atomic_write(path, text: str) -> None:
    """Write-then-rename so partial output files are never left behind."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_corpus(corpus: Corpus, path) -> None:
    atomic_write(path, corpus_to_jsonl(corpus))


def load_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        return corpus_from_jsonl(fh.read())


def has_negation(sample: Sample) -> bool:
    return any(_NEGATION_RE.search(sentence) for sentence in sample.sentences)


@dataclass(frozen=True)
class StatsRow:
    """One table row: sample count, share of corpus, label mix inside the row."""

    count: int
    share_pct: float
    label_pct: Mapping[Label, float]


@dataclass(frozen=True)
class CorpusStats:
    total: int
    pattern_count: int
    label_counts: Mapping[Label, int]
    label_pct: Mapping[Label, float]
    class_rows: Mapping[InferenceClass, StatsRow]
    negation_row: StatsRow
    premise_rows: Mapping[int, StatsRow]
    # negation measured over patterns instead of samples, for comparison
    negation_pattern_count: int
    negation_pattern_pct: float


def _row(samples: Sequence[Sample], total: int) -> StatsRow:
    count = len(samples)
    label_pct = {}
    for label in Label:
        n = sum(1 for s in samples if s.label is label)
        label_pct[label] = 100.0 * n / count if count else 0.0
    return StatsRow(count, 100.0 * count / total, label_pct)


def compute_stats(corpus: Corpus) -> CorpusStats:
    samples = corpus.samples
    if not samples:
        raise ValidationError("empty corpus")
    total = len(samples)

    label_counts = {label: sum(1 for s in samples if s.label is label) for label in Label}
    label_pct = {label: 100.0 * n / total for label, n in label_counts.items()}

    class_rows = {
        cls: _row([s for s in samples if s.inference_class is cls], total)
        for cls in InferenceClass
    }
    negated = [s for s in samples if has_negation(s)]
    negation_row = _row(negated, total)
    premise_rows = {
        n: _row([s for s in samples if len(s.premises) == n], total) for n in (1, 2, 3)
    }

    patterns = corpus.by_pattern()
    negated_patterns = sum(
        1 for group in patterns.values() if any(has_negation(s) for s in group)
    )
    return CorpusStats(
        total=total,
        pattern_count=len(patterns),
        label_counts=label_counts,
        label_pct=label_pct,
        class_rows=class_rows,
        negation_row=negation_row,
        premise_rows=premise_rows,
        negation_pattern_count=negated_patterns,
        negation_pattern_pct=100.0 * negated_patterns / len(patterns),
    )


def _stats_table_rows(stats: CorpusStats) -> list[tuple[str, StatsRow]]:
    rows: list[tuple[str, StatsRow]] = []
    for cls in InferenceClass:
        rows.append((CLASS_ABBREV[cls], stats.class_rows[cls]))
    rows.append(("+neg", stats.negation_row))
    for n in (1, 2, 3):
        rows.append((f"{n}prem", stats.premise_rows[n]))
    return rows


def format_stats(stats: CorpusStats) -> str:
    """Aligned text table: per-row label mix, corpus share, and count."""
    header = f"{'Property':<10}{'E %':>8}{'N %':>8}{'C %':>8}{'All %':>9}  (#)"
    lines = [header, "-" * len(header)]

    def fmt(name: str, pcts: Mapping[Label, float], share: float, count: int) -> str:
        return (
            f"{name:<10}"
            f"{pcts[Label.ENTAILMENT]:>8.1f}"
            f"{pcts[Label.NEUTRAL]:>8.1f}"
            f"{pcts[Label.CONTRADICTION]:>8.1f}"
            f"{share:>9.1f}  ({count})"
        )

    for name, row in _stats_table_rows(stats):
        lines.append(fmt(name, row.label_pct, row.share_pct, row.count))
    lines.append("-" * len(header))
    lines.append(fmt("All", stats.label_pct, 100.0, stats.total))
    lines.append(
        f"patterns: {stats.pattern_count}; with negation: "
        f"{stats.negation_pattern_count} ({stats.negation_pattern_pct:.1f}%)"
    )
    return "\n".join(lines) + "\n"


def stats_to_csv(stats: CorpusStats) -> str:
    """Machine-readable statistics, one decimal place like the text table."""
    lines = ["property,entailment_pct,neutral_pct,contradiction_pct,share_pct,count"]
    for name, row in _stats_table_rows(stats):
        lines.append(
            f"{name},{row.label_pct[Label.ENTAILMENT]:.1f},"
            f"{row.label_pct[Label.NEUTRAL]:.1f},"
            f"{row.label_pct[Label.CONTRADICTION]:.1f},"
            f"{row.share_pct:.1f},{row.count}"
        )
    lines.append(
        f"All,{stats.label_pct[Label.ENTAILMENT]:.1f},"
        f"{stats.label_pct[Label.NEUTRAL]:.1f},"
        f"{stats.label_pct[Label.CONTRADICTION]:.1f},100.0,{stats.total}"
    )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SplitSpec:
    """Pattern-sharing split parameters.

    Per pattern: test_per_pattern samples go to the test set,
    pool_per_pattern (or the remainder) to a draw pool, and each
    (shot count, repetition) draws k pool samples.  Test and pool are
    disjoint by construction.
    """

    test_per_pattern: int
    shot_counts: tuple[int, ...]
    repetitions: int
    seed: int
    pool_per_pattern: int | None = None

    def __post_init__(self):
        if self.test_per_pattern < 1:
            raise ValueError("test_per_pattern must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        if any(k < 0 for k in self.shot_counts):
            raise ValueError("shot counts must be non-negative")
        if self.pool_per_pattern is not None and self.shot_counts:
            if self.pool_per_pattern < max(self.shot_counts):
                raise ValueError("pool_per_pattern smaller than the largest shot count")


@dataclass
class SplitResult:
    test: Corpus
    shots: dict[tuple[int, int], Corpus]  # (shot count, repetition 1..R) -> corpus


def make_splits(corpus: Corpus, spec: SplitSpec) -> SplitResult:
    """Partition each pattern's samples into test/pool and draw shot sets.

    All patterns appear in the test set and in every shot corpus (when
    k > 0); no sample id is shared between the test set and any shot
    set.  Draws use per-(pattern, k, repetition) PRNG streams.
    """
    groups = corpus.by_pattern()
    max_shot = max(spec.shot_counts, default=0)
    test_samples: list[Sample] = []
    pools: dict[str, list[Sample]] = {}
    for pattern_id in sorted(groups):
        samples = sorted(groups[pattern_id], key=lambda s: s.id)
        needed = spec.test_per_pattern + (
            spec.pool_per_pattern if spec.pool_per_pattern is not None else max_shot
        )
        if len(samples) < needed:
            raise ValidationError(
                f"pattern '{pattern_id}' has {len(samples)} samples, "
                f"needs at least {needed} for this split"
            )
        rng = derived_rng(spec.seed, f"split:{pattern_id}")
        order = rng.permutation(len(samples))
        test_idx = sorted(order[: spec.test_per_pattern])
        pool_end = (
            spec.test_per_pattern + spec.pool_per_pattern
            if spec.pool_per_pattern is not None
            else len(samples)
        )
        pool_idx = sorted(order[spec.test_per_pattern : pool_end])
        test_samples.extend(samples[i] for i in test_idx)
        pools[pattern_id] = [samples[i] for i in pool_idx]

    base = dict(corpus.provenance)
    base["split_seed"] = spec.seed

    shots: dict[tuple[int, int], Corpus] = {}
    for k in spec.shot_counts:
        for rep in range(1, spec.repetitions + 1):
            drawn: list[Sample] = []
            for pattern_id in sorted(pools):
                pool = pools[pattern_id]
                rng = derived_rng(spec.seed, f"shot:{pattern_id}:{k}:{rep}")
                chosen = sorted(rng.choice(len(pool), size=k, replace=False))
                drawn.extend(pool[i] for i in chosen)
            drawn.sort(key=lambda s: (s.pattern_id, s.id))
            shots[(k, rep)] = Corpus(
                drawn, {**base, "split": f"shots_k{k}_rep{rep}"}
            )

    test_samples.sort(key=lambda s: (s.pattern_id, s.id))
    test = Corpus(test_samples, {**base, "split": "test"})
    return SplitResult(test, shots)
