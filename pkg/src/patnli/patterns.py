"""NLI patterns: templated premises/hypothesis plus selection restrictions.

Patterns are loaded from an XML file and validated against a world.  A
pattern fixes the gold inference label, so the selection restrictions
must be strong enough to keep every instantiation both felicitous and
label-preserving; the seed assignment records the original problem the
pattern was abstracted from and doubles as a per-pattern sanity check.
"""

from __future__ import annotations

import io
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Union

from .errors import ParseError, ValidationError
from .world import ClassExpr, MiniWorld

MAX_PREMISES = 3


class Label(str, Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"


class InferenceClass(str, Enum):
    DIRECTIONAL = "directional"
    NON_PROJECTIVE = "non_projective"
    PROJECTIVE = "projective"
    ARGUMENT_ORIENTATION = "argument_orientation"


_PLACEHOLDER_RE = re.compile(r"\[([A-Z][A-Z0-9]*)\]")


@dataclass(frozen=True)
class Slot:
    name: str


@dataclass(frozen=True)
class Template:
    """A sentence with NP placeholders written as bracketed variables, e.g. [X]."""

    text: str
    parts: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        parts: list = []
        pos = 0
        for m in _PLACEHOLDER_RE.finditer(self.text):
            if m.start() > pos:
                parts.append(self.text[pos : m.start()])
            parts.append(Slot(m.group(1)))
            pos = m.end()
        if pos < len(self.text):
            parts.append(self.text[pos:])
        object.__setattr__(self, "parts", tuple(parts))

    @property
    def placeholders(self) -> tuple[str, ...]:
        """Placeholder names in order of first occurrence."""
        seen: list[str] = []
        for part in self.parts:
            if isinstance(part, Slot) and part.name not in seen:
                seen.append(part.name)
        return tuple(seen)


@dataclass(frozen=True)
class ClassRestriction:
    var: str
    expr: ClassExpr


@dataclass(frozen=True)
class RelationRestriction:
    rel: str
    vars: tuple[str, ...]


@dataclass(frozen=True)
class DistinctRestriction:
    """Variables in this group must be bound to pairwise distinct entities."""

    vars: tuple[str, ...]


Restriction = Union[ClassRestriction, RelationRestriction, DistinctRestriction]


@dataclass(frozen=True, eq=True)
class Pattern:
    id: str
    label: Label
    inference_class: InferenceClass
    premises: tuple[Template, ...]
    hypothesis: Template
    restrictions: tuple[Restriction, ...]
    seed: Mapping[str, str]  # placeholder -> entity name

    @property
    def templates(self) -> tuple[Template, ...]:
        return self.premises + (self.hypothesis,)

    @property
    def placeholders(self) -> tuple[str, ...]:
        """All placeholders, ordered by first occurrence (premises first)."""
        seen: list[str] = []
        for t in self.templates:
            for v in t.placeholders:
                if v not in seen:
                    seen.append(v)
        return tuple(seen)

    def class_restrictions(self) -> list[ClassRestriction]:
        return [r for r in self.restrictions if isinstance(r, ClassRestriction)]

    def relation_restrictions(self) -> list[RelationRestriction]:
        return [r for r in self.restrictions if isinstance(r, RelationRestriction)]

    def distinct_groups(self) -> list[tuple[str, ...]]:
        """Explicit distinctness groups, or all placeholders when none given.

        Distinctness of all placeholder pairs is the default; a pattern
        opts out (or narrows it) by declaring its own <distinct> groups.
        """
        explicit = [r.vars for r in self.restrictions if isinstance(r, DistinctRestriction)]
        if explicit:
            return explicit
        return [self.placeholders]


def satisfies(pattern: Pattern, world: MiniWorld, bindings: Mapping[str, str]) -> bool:
    """Whether a complete placeholder->entity-name binding meets every restriction."""
    for r in pattern.restrictions:
        if isinstance(r, ClassRestriction):
            if bindings[r.var] not in world.member_names(r.expr):
                return False
        elif isinstance(r, RelationRestriction):
            if not world.relation_holds(r.rel, tuple(bindings[v] for v in r.vars)):
                return False
    for group in pattern.distinct_groups():
        values = [bindings[v] for v in group]
        if len(set(values)) != len(values):
            return False
    return True


def check_seed(pattern: Pattern, world: MiniWorld) -> bool:
    """The per-pattern sanity check: does the seed assignment satisfy the
    restrictions, i.e. can the original problem be regenerated?"""
    return satisfies(pattern, world, pattern.seed)


def load_patterns(text: str, world: MiniWorld) -> list[Pattern]:
    """Parse an XML pattern file and validate every pattern against a world."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"pattern file is not well-formed XML: {exc}") from exc
    if root.tag != "patterns":
        raise ParseError(f"expected root element <patterns>, got <{root.tag}>")
    patterns: list[Pattern] = []
    seen_ids: set[str] = set()
    for elem in root:
        if elem.tag != "pattern":
            raise ParseError(f"unexpected element <{elem.tag}> under <patterns>")
        pattern = _load_pattern(elem, world)
        if pattern.id in seen_ids:
            raise ValidationError(f"duplicate pattern id '{pattern.id}'")
        seen_ids.add(pattern.id)
        patterns.append(pattern)
    if not patterns:
        raise ValidationError("pattern file contains no patterns")
    return patterns


def load_patterns_file(path, world: MiniWorld) -> list[Pattern]:
    with open(path, encoding="utf-8") as fh:
        return load_patterns(fh.read(), world)


def _load_pattern(elem: ET.Element, world: MiniWorld) -> Pattern:
    pid = (elem.get("id") or "").strip()
    if not pid:
        raise ValidationError("pattern without an id")
    where = f"pattern '{pid}'"

    label_text = elem.get("label")
    try:
        label = Label(label_text)
    except ValueError:
        raise ValidationError(f"{where}: unknown label {label_text!r}") from None
    class_text = elem.get("class")
    try:
        inference_class = InferenceClass(class_text)
    except ValueError:
        raise ValidationError(
            f"{where}: unknown inference class {class_text!r}"
        ) from None

    premises: list[Template] = []
    hypothesis: Template | None = None
    restrictions: list[Restriction] = []
    seed: dict[str, str] | None = None
    # restrictions may reference variables from any template, so collect
    # templates first and check restriction/seed variables afterwards
    pending: list[tuple[str, ET.Element]] = []
    for child in elem:
        if child.tag == "premise":
            premises.append(_template(child, where))
        elif child.tag == "hypothesis":
            if hypothesis is not None:
                raise ParseError(f"{where}: more than one <hypothesis>")
            hypothesis = _template(child, where)
        elif child.tag in ("restrict", "distinct", "seed"):
            pending.append((child.tag, child))
        else:
            raise ParseError(f"{where}: unexpected element <{child.tag}>")

    if not premises:
        raise ValidationError(f"{where}: no premises")
    if len(premises) > MAX_PREMISES:
        raise ValidationError(
            f"{where}: at most {MAX_PREMISES} premises allowed, got {len(premises)}"
        )
    if hypothesis is None:
        raise ValidationError(f"{where}: missing <hypothesis>")

    placeholders: list[str] = []
    for t in premises + [hypothesis]:
        for v in t.placeholders:
            if v not in placeholders:
                placeholders.append(v)

    for tag, child in pending:
        if tag == "restrict":
            restrictions.append(_restriction(child, placeholders, world, where))
        elif tag == "distinct":
            restrictions.append(_distinct(child, placeholders, where))
        else:
            if seed is not None:
                raise ParseError(f"{where}: more than one <seed>")
            seed = _seed(child, placeholders, world, where)

    if seed is None:
        raise ValidationError(f"{where}: missing <seed>")

    return Pattern(
        id=pid,
        label=label,
        inference_class=inference_class,
        premises=tuple(premises),
        hypothesis=hypothesis,
        restrictions=tuple(restrictions),
        seed=seed,
    )


def _template(child: ET.Element, where: str) -> Template:
    text = (child.text or "").strip()
    if not text:
        raise ValidationError(f"{where}: empty <{child.tag}>")
    return Template(text)


def _restriction(child, placeholders, world, where) -> Restriction:
    var = child.get("var")
    rel = child.get("rel")
    if (var is None) == (rel is None):
        raise ParseError(
            f"{where}: <restrict> needs either var+class or rel+vars attributes"
        )
    if var is not None:
        if var not in placeholders:
            raise ValidationError(
                f"{where}: restriction references undeclared variable '{var}'"
            )
        expr_text = child.get("class")
        if not expr_text:
            raise ParseError(f"{where}: <restrict var=...> needs a class attribute")
        expr = ClassExpr.parse(expr_text)
        for cid in expr.class_ids():
            if cid not in world.taxonomy:
                raise ValidationError(f"{where}: unknown class '{cid}'")
        return ClassRestriction(var, expr)
    relation = world.relations.get(rel)
    if relation is None:
        raise ValidationError(f"{where}: unknown relation '{rel}'")
    vars_text = child.get("vars")
    if not vars_text:
        raise ParseError(f"{where}: <restrict rel=...> needs a vars attribute")
    rvars = tuple(v.strip() for v in vars_text.split(",") if v.strip())
    for v in rvars:
        if v not in placeholders:
            raise ValidationError(
                f"{where}: restriction references undeclared variable '{v}'"
            )
    if len(rvars) != relation.arity:
        raise ValidationError(
            f"{where}: relation '{rel}' has arity {relation.arity}, "
            f"restriction lists {len(rvars)} variables"
        )
    return RelationRestriction(rel, rvars)


def _distinct(child, placeholders, where) -> DistinctRestriction:
    vars_text = child.get("vars")
    if vars_text is None:
        raise ParseError(f"{where}: <distinct> needs a vars attribute")
    dvars = tuple(v.strip() for v in vars_text.split(",") if v.strip())
    for v in dvars:
        if v not in placeholders:
            raise ValidationError(
                f"{where}: distinct group references undeclared variable '{v}'"
            )
    if len(set(dvars)) != len(dvars):
        raise ValidationError(f"{where}: repeated variable in distinct group")
    return DistinctRestriction(dvars)


def _seed(child, placeholders, world, where) -> dict[str, str]:
    seed = dict(child.attrib)
    for var in seed:
        if var not in placeholders:
            raise ValidationError(f"{where}: seed binds unknown variable '{var}'")
    missing = [v for v in placeholders if v not in seed]
    if missing:
        raise ValidationError(f"{where}: seed incomplete, missing {missing}")
    for var, name in seed.items():
        if name not in world:
            raise ValidationError(f"{where}: seed entity '{name}' not in world")
    return seed


def patterns_to_xml(patterns: list[Pattern]) -> str:
    """Serialize patterns back to the XML format accepted by load_patterns."""
    root = ET.Element("patterns")
    for p in patterns:
        pe = ET.SubElement(
            root,
            "pattern",
            {"id": p.id, "label": p.label.value, "class": p.inference_class.value},
        )
        for t in p.premises:
            ET.SubElement(pe, "premise").text = t.text
        ET.SubElement(pe, "hypothesis").text = p.hypothesis.text
        for r in p.restrictions:
            if isinstance(r, ClassRestriction):
                ET.SubElement(pe, "restrict", {"var": r.var, "class": r.expr.text})
            elif isinstance(r, RelationRestriction):
                ET.SubElement(pe, "restrict", {"rel": r.rel, "vars": ",".join(r.vars)})
            else:
                ET.SubElement(pe, "distinct", {"vars": ",".join(r.vars)})
        ET.SubElement(pe, "seed", {v: p.seed[v] for v in sorted(p.seed)})
    ET.indent(root)
    buf = io.StringIO()
    ET.ElementTree(root).write(buf, encoding="unicode")
    buf.write("\n")
    return buf.getvalue()
