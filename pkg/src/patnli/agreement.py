"""Annotation aggregation: Cohen's kappa, 5-to-3-point label mappings,
and majority filtering.

Items are rated on a 5-point scale from definitely_false to
definitely_true, with two out-of-scale choices (difficult, skip) that
are removed before any agreement computation.  A monotone mapping
collapses the scale into contradiction/neutral/entailment via two cut
points; there are exactly six such mappings, and the best combination
over all annotators is found by exhaustive search maximizing the
average pairwise kappa.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from .patterns import Label

LIKERT_SCALE = (
    "definitely_false",
    "most_likely_false",
    "unknown",
    "most_likely_true",
    "definitely_true",
)
OUT_OF_SCALE = ("difficult", "skip")

_SCALE_INDEX = {name: i + 1 for i, name in enumerate(LIKERT_SCALE)}


def scale_point(value: str) -> int | None:
    """Map an annotation value to its 1..5 scale point; None if out of scale."""
    if value in _SCALE_INDEX:
        return _SCALE_INDEX[value]
    if value in OUT_OF_SCALE:
        return None
    if value in {"1", "2", "3", "4", "5"}:
        return int(value)
    raise ValueError(f"unknown annotation value {value!r}")


def _kappa_exact(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        raise ValueError("empty input")
    observed = Fraction(sum(1 for x, y in zip(a, b) if x == y), n)
    labels = set(a) | set(b)
    expected = Fraction(0)
    for label in labels:
        expected += Fraction(sum(1 for x in a if x == label), n) * Fraction(
            sum(1 for y in b if y == label), n
        )
    if expected == 1:
        # both raters constant on the same label: perfect by convention
        return Fraction(1)
    return (observed - expected) / (1 - expected)


def cohen_kappa(a: Sequence, b: Sequence) -> float:
    """Cohen's kappa (p_o - p_e) / (1 - p_e) between two label sequences."""
    return float(_kappa_exact(a, b))


@dataclass(frozen=True, order=True)
class MonotoneMapping:
    """An order-preserving 5-point -> 3-point mapping given by cuts c1 < c2.

    Scale points up to c1 map to contradiction, points up to c2 to
    neutral, the rest to entailment.
    """

    c1: int
    c2: int

    def __post_init__(self):
        if not 1 <= self.c1 < self.c2 <= 4:
            raise ValueError(f"invalid cut points ({self.c1}, {self.c2})")

    def apply(self, value: str) -> Label | None:
        point = scale_point(value)
        if point is None:
            return None
        if point <= self.c1:
            return Label.CONTRADICTION
        if point <= self.c2:
            return Label.NEUTRAL
        return Label.ENTAILMENT

    @property
    def cuts(self) -> tuple[int, int]:
        return (self.c1, self.c2)


ALL_MONOTONE_MAPPINGS = tuple(
    MonotoneMapping(c1, c2) for c1 in range(1, 4) for c2 in range(c1 + 1, 5)
)


@dataclass
class MappingSearchResult:
    mappings: dict[str, MonotoneMapping]  # annotator -> chosen mapping
    avg_kappa: float
    pair_kappas: dict[tuple[str, str], float]


def best_mappings(
    annotations: Mapping[str, Mapping[str, str]],
    pairwise_deletion: bool = True,
    greedy: bool = False,
) -> MappingSearchResult:
    """Choose a 5-to-3-point mapping per annotator maximizing agreement.

    annotations maps annotator -> item -> 5-point value.  The search is
    exhaustive over the 6^A mapping combinations (or a one-pass greedy
    sweep when greedy=True) and maximizes the unweighted mean of all
    pairwise kappas, computed exactly so ties are broken reproducibly by
    the lexicographically smallest cut-point tuple.

    With pairwise deletion (the default), difficult/skip/missing items
    are dropped per annotator pair; otherwise items lacking a scale
    value from any annotator are dropped for everyone.
    """
    annotators = sorted(annotations)
    if len(annotators) < 2:
        raise ValueError("need at least two annotators")

    points: dict[str, dict[str, int]] = {}
    for name in annotators:
        points[name] = {}
        for item, value in annotations[name].items():
            p = scale_point(value)
            if p is not None:
                points[name][item] = p

    if not pairwise_deletion:
        shared = set.intersection(*(set(p) for p in points.values()))
        points = {
            name: {item: p for item, p in its.items() if item in shared}
            for name, its in points.items()
        }

    pair_items: dict[tuple[str, str], list[str]] = {}
    for a, b in combinations(annotators, 2):
        common = sorted(set(points[a]) & set(points[b]))
        if len(common) < 2:
            raise ValueError(
                f"annotators '{a}' and '{b}' share {len(common)} usable items; "
                "need at least two"
            )
        pair_items[(a, b)] = common

    def mapped(mapping: MonotoneMapping, name: str, items: list[str]) -> list[Label]:
        cut1, cut2 = mapping.cuts
        out = []
        for item in items:
            p = points[name][item]
            out.append(
                Label.CONTRADICTION
                if p <= cut1
                else Label.NEUTRAL
                if p <= cut2
                else Label.ENTAILMENT
            )
        return out

    def objective(choice: dict[str, MonotoneMapping]):
        kappas: dict[tuple[str, str], Fraction] = {}
        for (a, b), items in pair_items.items():
            kappas[(a, b)] = _kappa_exact(
                mapped(choice[a], a, items), mapped(choice[b], b, items)
            )
        avg = sum(kappas.values(), Fraction(0)) / len(kappas)
        return avg, kappas

    best_choice: dict[str, MonotoneMapping] | None = None
    best_avg: Fraction | None = None
    best_pairs: dict[tuple[str, str], Fraction] = {}

    if greedy:
        choice = {name: MonotoneMapping(2, 3) for name in annotators}
        for name in annotators:
            scores = []
            for mapping in ALL_MONOTONE_MAPPINGS:
                trial = {**choice, name: mapping}
                avg, _ = objective(trial)
                scores.append((avg, mapping))
            choice[name] = max(scores, key=lambda s: (s[0], (-s[1].c1, -s[1].c2)))[1]
        best_choice = choice
        best_avg, best_pairs = objective(choice)
    else:
        # combinations iterate in lexicographic cut order, so the first
        # maximum seen is the lexicographically smallest tie
        for combo in product(ALL_MONOTONE_MAPPINGS, repeat=len(annotators)):
            choice = dict(zip(annotators, combo))
            avg, kappas = objective(choice)
            if best_avg is None or avg > best_avg:
                best_choice, best_avg, best_pairs = choice, avg, kappas

    assert best_choice is not None and best_avg is not None
    return MappingSearchResult(
        mappings=best_choice,
        avg_kappa=float(best_avg),
        pair_kappas={pair: float(k) for pair, k in best_pairs.items()},
    )


def majority_filter(
    by_item: Mapping[str, Sequence[Label | str]],
) -> dict[str, Label]:
    """Keep items where some label holds a strict majority; return it.

    by_item maps item -> the 3-point labels it received.  Items without
    a strict majority are dropped.
    """
    kept: dict[str, Label] = {}
    for item, labels in by_item.items():
        votes = [Label(label) for label in labels]
        if not votes:
            continue
        top = max(set(votes), key=votes.count)
        if votes.count(top) * 2 > len(votes):
            kept[item] = top
    return kept


def read_annotations_csv(text: str) -> dict[str, dict[str, str]]:
    """Read item_id,annotator_id,value rows into annotator -> item -> value."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError("empty annotations file")
    start = 0
    if [cell.strip().lower() for cell in rows[0]] == ["item_id", "annotator_id", "value"]:
        start = 1
    table: dict[str, dict[str, str]] = {}
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != 3:
            raise ValueError(f"annotations row {i}: expected 3 columns, got {len(row)}")
        item, annotator, value = (cell.strip() for cell in row)
        scale_point(value)  # raises on unknown values
        if item in table.get(annotator, {}):
            raise ValueError(
                f"annotations row {i}: duplicate value for item '{item}' "
                f"by annotator '{annotator}'"
            )
        table.setdefault(annotator, {})[item] = value
    return table


def kappa_table_csv(result: MappingSearchResult) -> str:
    """CSV with the chosen cuts per annotator and all pairwise kappas."""
    lines = ["annotator,c1,c2"]
    for name in sorted(result.mappings):
        mapping = result.mappings[name]
        lines.append(f"{name},{mapping.c1},{mapping.c2}")
    lines.append("annotator_a,annotator_b,kappa")
    for (a, b), k in sorted(result.pair_kappas.items()):
        lines.append(f"{a},{b},{k!r}")
    lines.append(f"average,,{result.avg_kappa!r}")
    return "\n".join(lines) + "\n"


def map_annotations(
    annotations: Mapping[str, Mapping[str, str]],
    mappings: Mapping[str, MonotoneMapping],
) -> dict[str, list[Label]]:
    """Apply per-annotator mappings; returns item -> received 3-point labels."""
    by_item: dict[str, list[Label]] = {}
    for name in sorted(annotations):
        mapping = mappings[name]
        for item, value in annotations[name].items():
            label = mapping.apply(value)
            if label is not None:
                by_item.setdefault(item, []).append(label)
    return by_item
