"""Deterministic sample generation from patterns.

Assignments are enumerated exhaustively in a canonical order, then each
pattern draws uniformly without replacement from its own PRNG stream.
Streams are keyed by (master seed, pattern id), so adding or removing a
pattern never changes the samples of the others, and generation is
reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .patterns import (
    InferenceClass,
    Label,
    Pattern,
    Slot,
    Template,
    check_seed,
)
from .world import Entity, MiniWorld

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Assignment:
    """A complete placeholder -> entity binding for one pattern."""

    bindings: Mapping[str, Entity]

    def names(self) -> dict[str, str]:
        return {v: e.name for v, e in self.bindings.items()}


@dataclass(frozen=True)
class Sample:
    """One concrete NLI problem instantiated from a pattern."""

    id: str
    pattern_id: str
    label: Label
    inference_class: InferenceClass
    premises: tuple[str, ...]
    hypothesis: str
    assignment: Mapping[str, str]  # placeholder -> entity name

    @property
    def sentences(self) -> tuple[str, ...]:
        return self.premises + (self.hypothesis,)


@dataclass(frozen=True)
class CapNote:
    """Recorded when a pattern has fewer assignments than requested."""

    pattern_id: str
    requested: int
    available: int


@dataclass
class GenerationResult:
    samples: list[Sample]
    capped: list[CapNote]


def derived_rng(master_seed: int, stream: str) -> np.random.Generator:
    """A PRNG stream keyed by the master seed and a stream label."""
    if master_seed < 0 or master_seed > _MASK64:
        raise ValueError("seed must be a 64-bit non-negative integer")
    digest = hashlib.sha256(stream.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([master_seed, *words]))


def realize(template: Template, assignment: "Assignment | Mapping[str, Entity]") -> str:
    """Render a template as a sentence with definite NPs.

    Common nouns become "the <noun>", proper nouns stay bare, and the
    first character of the sentence is capitalized.  Every occurrence of
    one placeholder receives the same NP.
    """
    bindings = assignment.bindings if isinstance(assignment, Assignment) else assignment
    out: list[str] = []
    for part in template.parts:
        if isinstance(part, Slot):
            entity = bindings.get(part.name)
            if entity is None:
                raise ValidationError(f"unbound placeholder '[{part.name}]'")
            out.append(entity.name if entity.noun_kind == "proper" else "the " + entity.name)
        else:
            out.append(part)
    text = "".join(out)
    return text[:1].upper() + text[1:]


def enumerate_assignments(pattern: Pattern, world: MiniWorld) -> list[Assignment]:
    """All restriction-satisfying assignments, in a canonical order.

    The order is lexicographic over entity names, placeholder by
    placeholder in order of first occurrence.  An empty result means the
    pattern is unsatisfiable in this world.
    """
    variables = pattern.placeholders
    index = {v: i for i, v in enumerate(variables)}

    candidates: dict[str, list[Entity]] = {}
    for v in variables:
        names: frozenset[str] | None = None
        for r in pattern.class_restrictions():
            if r.var == v:
                members = world.member_names(r.expr)
                names = members if names is None else names & members
        if names is None:
            candidates[v] = list(world.entities)
        else:
            candidates[v] = [world.entity(n) for n in sorted(names)]

    # each check fires at the position where its last variable gets bound
    checks_at: dict[int, list] = {i: [] for i in range(len(variables))}
    for r in pattern.relation_restrictions():
        pos = max(index[v] for v in r.vars)
        relation = world.relations[r.rel]
        rvars = r.vars
        checks_at[pos].append(
            lambda bound, relation=relation, rvars=rvars: relation.holds(
                tuple(bound[v].name for v in rvars)
            )
        )
    for group in pattern.distinct_groups():
        for i, u in enumerate(group):
            for v in group[i + 1 :]:
                pos = max(index[u], index[v])
                checks_at[pos].append(
                    lambda bound, u=u, v=v: bound[u].name != bound[v].name
                )

    results: list[Assignment] = []
    bound: dict[str, Entity] = {}

    def extend(position: int) -> None:
        if position == len(variables):
            results.append(Assignment(dict(bound)))
            return
        var = variables[position]
        for entity in candidates[var]:
            bound[var] = entity
            if all(check(bound) for check in checks_at[position]):
                extend(position + 1)
        bound.pop(var, None)

    extend(0)
    return results


def generate(
    patterns: Sequence[Pattern],
    world: MiniWorld,
    per_pattern: int,
    seed: int,
    workers: int = 1,
) -> GenerationResult:
    """Draw up to per_pattern samples from each pattern.

    For every pattern the draw is uniform without replacement over its
    full assignment enumeration.  Output is ordered by pattern id, then
    ordinal.  Patterns whose assignment space is smaller than
    per_pattern are capped (all assignments emitted) and recorded in the
    result's capped list.  Generation aborts if any pattern fails its
    seed sanity check.
    """
    if per_pattern < 1:
        raise ValueError("per_pattern must be a positive integer")
    ids = [p.id for p in patterns]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate pattern ids in generation input")
    for p in patterns:
        if not check_seed(p, world):
            raise ValidationError(
                f"pattern '{p.id}' cannot regenerate its seed problem"
            )

    def job(p: Pattern) -> tuple[list[Sample], CapNote | None]:
        assignments = enumerate_assignments(p, world)
        available = len(assignments)
        count = min(per_pattern, available)
        rng = derived_rng(seed, f"pattern:{p.id}")
        chosen = np.sort(rng.choice(available, size=count, replace=False))
        samples = [
            _make_sample(p, assignments[i], ordinal)
            for ordinal, i in enumerate(chosen)
        ]
        note = (
            CapNote(p.id, per_pattern, available) if available < per_pattern else None
        )
        return samples, note

    ordered = sorted(patterns, key=lambda p: p.id)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, ordered))
    else:
        outcomes = [job(p) for p in ordered]

    samples: list[Sample] = []
    capped: list[CapNote] = []
    for pattern_samples, note in outcomes:
        samples.extend(pattern_samples)
        if note is not None:
            capped.append(note)
    return GenerationResult(samples, capped)


def _make_sample(pattern: Pattern, assignment: Assignment, ordinal: int) -> Sample:
    return Sample(
        id=f"{pattern.id}-{ordinal:04d}",
        pattern_id=pattern.id,
        label=pattern.label,
        inference_class=pattern.inference_class,
        premises=tuple(realize(t, assignment) for t in pattern.premises),
        hypothesis=realize(pattern.hypothesis, assignment),
        assignment=assignment.names(),
    )
