"""Scoring of prediction files: accuracy, pattern accuracy, curves, cartography.

Pattern accuracy at threshold t is the fraction of patterns whose
per-pattern correct ratio c_i/M_i reaches t:

    PA_t = (1/N) * sum_i [ c_i / M_i >= t ]

The comparison is done on exact rationals, never floats: with 200
samples per pattern, a threshold of 0.95 sits exactly on a realizable
boundary and binary floating point would misclassify it.  The step
integral of the curve, (1/N) * sum_i c_i/M_i, equals plain sample
accuracy exactly when all M_i are equal.
"""

from __future__ import annotations

import bisect
import json
import statistics
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import ParseError, ValidationError
from .patterns import Label

PROB_SUM_TOLERANCE = 1e-6
_ARGMAX_TOLERANCE = 1e-9

# the consistency thresholds reported by `patnli eval` by default
DEFAULT_THRESHOLDS = (
    Fraction(1, 2),
    Fraction(67, 100),
    Fraction(9, 10),
    Fraction(95, 100),
    Fraction(1),
)


def as_threshold(value) -> Fraction:
    """Convert a threshold to an exact rational in [0, 1].

    Strings and Decimals convert exactly; floats are read through their
    shortest decimal repr, so 0.95 means 19/20 rather than the nearest
    binary double.
    """
    if isinstance(value, Fraction):
        t = value
    elif isinstance(value, bool):
        raise ValueError("threshold must be a number")
    elif isinstance(value, int):
        t = Fraction(value)
    elif isinstance(value, float):
        t = Fraction(str(value))
    elif isinstance(value, (str, Decimal)):
        t = Fraction(value)
    else:
        raise ValueError(f"cannot interpret threshold {value!r}")
    if not 0 <= t <= 1:
        raise ValueError(f"threshold {value!r} outside [0, 1]")
    return t


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    pattern_id: str
    predicted: Label
    probs: Mapping[Label, float] | None = None


def parse_predictions(text: str) -> list[PredictionRecord]:
    """Parse predictions JSONL: {sample_id, pattern_id, pred, probs?}."""
    records: list[PredictionRecord] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"line {lineno}: record must be a JSON object")
        for key in ("sample_id", "pattern_id", "pred"):
            if key not in obj:
                raise ParseError(f"line {lineno}: missing field '{key}'")
        try:
            predicted = Label(obj["pred"])
        except ValueError:
            raise ValidationError(
                f"line {lineno}: unknown label {obj['pred']!r}"
            ) from None
        probs = None
        if "probs" in obj and obj["probs"] is not None:
            probs = _parse_probs(obj["probs"], predicted, lineno)
        records.append(
            PredictionRecord(obj["sample_id"], obj["pattern_id"], predicted, probs)
        )
    return records


def _parse_probs(raw, predicted: Label, lineno: int) -> Mapping[Label, float]:
    if not isinstance(raw, dict):
        raise ParseError(f"line {lineno}: probs must be an object")
    expected = {label.value for label in Label}
    if set(raw) != expected:
        raise ValidationError(
            f"line {lineno}: probs must have exactly the keys {sorted(expected)}"
        )
    probs: dict[Label, float] = {}
    for key, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValidationError(f"line {lineno}: probability '{key}' is not a number")
        p = float(value)
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"line {lineno}: probability '{key}' outside [0, 1]")
        probs[Label(key)] = p
    total = sum(probs.values())
    if abs(total - 1.0) > PROB_SUM_TOLERANCE:
        raise ValidationError(f"line {lineno}: probabilities sum to {total}, not 1")
    if probs[predicted] < max(probs.values()) - _ARGMAX_TOLERANCE:
        raise ValidationError(
            f"line {lineno}: pred '{predicted.value}' is not the argmax of probs"
        )
    return probs


def predictions_to_jsonl(records: Iterable[PredictionRecord]) -> str:
    lines = []
    for r in records:
        obj: dict = {
            "sample_id": r.sample_id,
            "pattern_id": r.pattern_id,
            "pred": r.predicted.value,
        }
        if r.probs is not None:
            obj["probs"] = {label.value: r.probs[label] for label in Label}
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(lines) + "\n"


class PredictionSet:
    """Predictions grouped per pattern and bound to a reference corpus."""

    def __init__(
        self,
        by_pattern: dict[str, list[PredictionRecord]],
        gold: dict[str, Label],
    ):
        self.by_pattern = by_pattern
        self.gold = gold
        self.counts: dict[str, tuple[int, int]] = {}
        for pattern_id, records in by_pattern.items():
            correct = sum(
                1 for r in records if r.predicted is gold[pattern_id]
            )
            self.counts[pattern_id] = (correct, len(records))

    @classmethod
    def from_records(
        cls, corpus: Corpus, records: Sequence[PredictionRecord]
    ) -> "PredictionSet":
        if not records:
            raise ValidationError("empty prediction set")
        by_id = {s.id: s for s in corpus.samples}
        gold: dict[str, Label] = {}
        for s in corpus.samples:
            previous = gold.setdefault(s.pattern_id, s.label)
            if previous is not s.label:
                raise ValidationError(
                    f"pattern '{s.pattern_id}' has conflicting gold labels in corpus"
                )
        by_pattern: dict[str, list[PredictionRecord]] = {}
        seen: set[str] = set()
        for r in records:
            sample = by_id.get(r.sample_id)
            if sample is None:
                raise ValidationError(f"prediction for unknown sample '{r.sample_id}'")
            if r.pattern_id != sample.pattern_id:
                raise ValidationError(
                    f"prediction for sample '{r.sample_id}' names pattern "
                    f"'{r.pattern_id}', corpus says '{sample.pattern_id}'"
                )
            if r.sample_id in seen:
                raise ValidationError(f"duplicate prediction for sample '{r.sample_id}'")
            seen.add(r.sample_id)
            by_pattern.setdefault(r.pattern_id, []).append(r)
        return cls(by_pattern, {pid: gold[pid] for pid in by_pattern})

    @property
    def pattern_ids(self) -> list[str]:
        return sorted(self.by_pattern)

    @property
    def n_patterns(self) -> int:
        return len(self.by_pattern)

    @property
    def n_records(self) -> int:
        return sum(m for _, m in self.counts.values())

    def ratios(self) -> dict[str, Fraction]:
        """Per-pattern correct ratio c_i / M_i as exact rationals."""
        return {pid: Fraction(c, m) for pid, (c, m) in self.counts.items()}

    def restricted(self, pattern_ids: Iterable[str]) -> "PredictionSet":
        keep = set(pattern_ids)
        return PredictionSet(
            {pid: recs for pid, recs in self.by_pattern.items() if pid in keep},
            {pid: label for pid, label in self.gold.items() if pid in keep},
        )


def sample_accuracy(preds: PredictionSet) -> float:
    """Plain per-sample accuracy over all prediction records."""
    if not preds.counts:
        raise ValidationError("empty prediction set")
    correct = sum(c for c, _ in preds.counts.values())
    total = sum(m for _, m in preds.counts.values())
    return float(Fraction(correct, total))


def pattern_accuracy(preds: PredictionSet, t) -> float:
    """Fraction of patterns with a correct ratio of at least t."""
    if not preds.counts:
        raise ValidationError("empty prediction set")
    threshold = as_threshold(t)
    hits = sum(1 for ratio in preds.ratios().values() if ratio >= threshold)
    return float(Fraction(hits, preds.n_patterns))


@dataclass(frozen=True)
class PACurve:
    """A pattern-accuracy staircase: strictly increasing thresholds with
    nonincreasing PA values, kept as exact rationals."""

    points: tuple[tuple[Fraction, Fraction], ...]

    def as_floats(self) -> list[tuple[float, float]]:
        return [(float(t), float(v)) for t, v in self.points]

    def to_csv(self) -> str:
        lines = ["threshold,pa"]
        lines.extend(f"{float(t)!r},{float(v)!r}" for t, v in self.points)
        return "\n".join(lines) + "\n"


def pa_curve(preds: PredictionSet, thresholds: Iterable | None = None) -> PACurve:
    """PA evaluated at a threshold grid plus every breakpoint c_i/M_i.

    Including the breakpoints reproduces the exact staircase shape of
    the curve no matter how coarse the requested grid is.
    """
    if thresholds is None:
        grid = [Fraction(i, 100) for i in range(101)]
    else:
        grid = [as_threshold(t) for t in thresholds]
        if not grid:
            raise ValueError("empty threshold grid")
    points = set(grid)
    points.update(preds.ratios().values())
    points.update((Fraction(0), Fraction(1)))
    ratios = sorted(preds.ratios().values())
    n = preds.n_patterns
    curve = []
    for t in sorted(points):
        hits = _count_at_least(ratios, t)
        curve.append((t, Fraction(hits, n)))
    return PACurve(tuple(curve))


def _count_at_least(sorted_ratios: list[Fraction], t: Fraction) -> int:
    # sorted_ratios is ascending; count entries >= t
    return len(sorted_ratios) - bisect.bisect_left(sorted_ratios, t)


def pa_auc(preds: PredictionSet) -> float:
    """Exact step integral of the PA curve over t in [0, 1].

    Equals (1/N) * sum_i c_i/M_i, and therefore equals sample accuracy
    whenever all patterns have the same number of records.
    """
    if not preds.counts:
        raise ValidationError("empty prediction set")
    total = sum(preds.ratios().values(), Fraction(0))
    return float(total / preds.n_patterns)


@dataclass(frozen=True)
class GroupMetrics:
    n_patterns: int
    n_records: int
    accuracy: float
    pa: Mapping[Fraction, float]


def breakdown(
    preds: PredictionSet,
    corpus: Corpus,
    by: str = "inference_class",
    thresholds: Iterable = DEFAULT_THRESHOLDS,
) -> dict[str, GroupMetrics]:
    """Metrics restricted to pattern groups (by gold label or inference class)."""
    if by == "label":
        key = {pid: preds.gold[pid].value for pid in preds.by_pattern}
    elif by == "inference_class":
        classes: dict[str, str] = {}
        for s in corpus.samples:
            previous = classes.setdefault(s.pattern_id, s.inference_class.value)
            if previous != s.inference_class.value:
                raise ValidationError(
                    f"pattern '{s.pattern_id}' has conflicting inference classes"
                )
        missing = [pid for pid in preds.by_pattern if pid not in classes]
        if missing:
            raise ValidationError(f"corpus does not cover patterns {missing}")
        key = {pid: classes[pid] for pid in preds.by_pattern}
    else:
        raise ValidationError(f"unknown grouping key '{by}'")

    ts = [as_threshold(t) for t in thresholds]
    groups: dict[str, list[str]] = {}
    for pid, group in key.items():
        groups.setdefault(group, []).append(pid)
    out: dict[str, GroupMetrics] = {}
    for group in sorted(groups):
        sub = preds.restricted(groups[group])
        out[group] = GroupMetrics(
            n_patterns=sub.n_patterns,
            n_records=sub.n_records,
            accuracy=sample_accuracy(sub),
            pa={t: pattern_accuracy(sub, t) for t in ts},
        )
    return out


@dataclass(frozen=True)
class CartographyPoint:
    pattern_id: str
    gold: Label
    confidence: float  # mean of the true-label probabilities
    variability: float  # population standard deviation of the same values


def cartography(preds: PredictionSet) -> list[CartographyPoint]:
    """Per-pattern (confidence, variability) over true-label probabilities.

    Uses the population standard deviation: a pattern's samples are the
    whole evaluation set for that pattern, not a statistical sample.
    """
    points: list[CartographyPoint] = []
    for pattern_id in preds.pattern_ids:
        gold = preds.gold[pattern_id]
        values: list[float] = []
        for r in preds.by_pattern[pattern_id]:
            if r.probs is None:
                raise ValidationError(
                    f"missing probs for sample '{r.sample_id}'; "
                    "cartography needs probability predictions"
                )
            values.append(r.probs[gold])
        mean = statistics.mean(values)
        points.append(
            CartographyPoint(pattern_id, gold, float(mean), statistics.pstdev(values))
        )
    return points


def cartography_to_csv(points: Sequence[CartographyPoint]) -> str:
    lines = ["pattern_id,gold,confidence,variability"]
    lines.extend(
        f"{p.pattern_id},{p.gold.value},{p.confidence!r},{p.variability!r}"
        for p in points
    )
    return "\n".join(lines) + "\n"
