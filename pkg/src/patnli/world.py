"""Mini-world ontology: entities, a class taxonomy, and typed relations.

A world is loaded from a YAML document and is immutable afterwards.  All
constraint queries (class membership, relation membership) are answered
from closures precomputed at load time, so a world can be shared freely
between concurrent readers.

Entities carry a size category (S/M/L).  Size categories are exposed as
implicit taxonomy classes ``size_s``/``size_m``/``size_l`` so that class
expressions and relation definitions can constrain entity sizes the same
way they constrain ordinary classes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import yaml

from .errors import ParseError, ValidationError

NOUN_KINDS = ("common", "proper")
SIZES = ("S", "M", "L")
SIZE_CLASSES = {"S": "size_s", "M": "size_m", "L": "size_l"}

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Entity:
    """A named individual: a common or proper noun with classes and a size."""

    name: str
    noun_kind: str  # "common" or "proper"
    classes: frozenset[str]  # declared classes (size class not included)
    size: str  # "S", "M" or "L"


class ClassExpr:
    """A set expression over taxonomy classes.

    Grammar: ``|`` union, ``&`` intersection, prefix ``!`` complement,
    ``*`` the universal set, parentheses for grouping.  ``!`` binds
    tighter than ``&``, which binds tighter than ``|``.
    """

    __slots__ = ("text", "_ast")

    def __init__(self, text: str, ast: tuple):
        self.text = text
        self._ast = ast

    def __repr__(self) -> str:
        return f"ClassExpr({self.text!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassExpr) and self._ast == other._ast

    def __hash__(self) -> int:
        return hash(self._ast)

    @classmethod
    def parse(cls, text: str) -> "ClassExpr":
        tokens = _tokenize(text)
        if not tokens:
            raise ParseError("empty class expression")
        ast, pos = _parse_union(tokens, 0, text)
        if pos != len(tokens):
            raise ParseError(f"trailing tokens in class expression {text!r}")
        return cls(text, ast)

    def class_ids(self) -> frozenset[str]:
        """All class identifiers referenced by the expression."""
        ids: set[str] = set()
        stack = [self._ast]
        while stack:
            node = stack.pop()
            if node[0] == "class":
                ids.add(node[1])
            elif node[0] == "not":
                stack.append(node[1])
            elif node[0] in ("and", "or"):
                stack.extend(node[1:])
        return frozenset(ids)


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "|&!()*":
            tokens.append(ch)
            i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m is None:
            raise ParseError(f"bad character {ch!r} in class expression {text!r}")
        tokens.append(m.group())
        i = m.end()
    return tokens


def _parse_union(tokens, pos, text):
    node, pos = _parse_intersection(tokens, pos, text)
    while pos < len(tokens) and tokens[pos] == "|":
        rhs, pos = _parse_intersection(tokens, pos + 1, text)
        node = ("or", node, rhs)
    return node, pos


def _parse_intersection(tokens, pos, text):
    node, pos = _parse_atom(tokens, pos, text)
    while pos < len(tokens) and tokens[pos] == "&":
        rhs, pos = _parse_atom(tokens, pos + 1, text)
        node = ("and", node, rhs)
    return node, pos


def _parse_atom(tokens, pos, text):
    if pos >= len(tokens):
        raise ParseError(f"unexpected end of class expression {text!r}")
    tok = tokens[pos]
    if tok == "!":
        node, pos = _parse_atom(tokens, pos + 1, text)
        return ("not", node), pos
    if tok == "(":
        node, pos = _parse_union(tokens, pos + 1, text)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ParseError(f"unbalanced parentheses in class expression {text!r}")
        return node, pos + 1
    if tok == "*":
        return ("all",), pos + 1
    if tok in "|&)":
        raise ParseError(f"misplaced {tok!r} in class expression {text!r}")
    return ("class", tok), pos + 1


class Taxonomy:
    """An acyclic class hierarchy mapping each class to its parent classes."""

    def __init__(self, parents: Mapping[str, Iterable[str]]):
        self._parents = {cid: frozenset(ps) for cid, ps in parents.items()}
        for cid, ps in self._parents.items():
            for p in ps:
                if p not in self._parents:
                    raise ValidationError(
                        f"class '{cid}' refers to undeclared parent class '{p}'"
                    )
        self._closure = self._ancestor_closure()

    def _ancestor_closure(self) -> dict[str, frozenset[str]]:
        closure: dict[str, frozenset[str]] = {}
        visiting: set[str] = set()

        def resolve(cid: str) -> frozenset[str]:
            if cid in closure:
                return closure[cid]
            if cid in visiting:
                raise ValidationError(f"taxonomy cycle through class '{cid}'")
            visiting.add(cid)
            anc: set[str] = set()
            for p in self._parents[cid]:
                anc.add(p)
                anc.update(resolve(p))
            visiting.discard(cid)
            closure[cid] = frozenset(anc)
            return closure[cid]

        for cid in self._parents:
            resolve(cid)
        return closure

    def __contains__(self, class_id: str) -> bool:
        return class_id in self._parents

    @property
    def class_ids(self) -> frozenset[str]:
        return frozenset(self._parents)

    def parents(self, class_id: str) -> frozenset[str]:
        return self._parents[class_id]

    def ancestors(self, class_id: str) -> frozenset[str]:
        """Proper ancestors (transitive parents) of a class."""
        if class_id not in self._closure:
            raise ValidationError(f"unknown class '{class_id}'")
        return self._closure[class_id]

    def superclasses(self, class_id: str) -> frozenset[str]:
        """The class itself plus all ancestors."""
        return self.ancestors(class_id) | {class_id}


@dataclass(frozen=True)
class Relation:
    """An n-ary relation given as a union of products of entity sets.

    Each term is a tuple of ``arity`` factors; a factor is the set of
    entity names matched by one class expression (or a single entity).
    A tuple of entities is in the relation iff some term contains it
    componentwise.
    """

    name: str
    arity: int
    terms: tuple[tuple[frozenset[str], ...], ...]
    term_texts: tuple[tuple[str, ...], ...]

    def holds(self, args: Sequence[str]) -> bool:
        return any(
            all(a in factor for a, factor in zip(args, term)) for term in self.terms
        )


class MiniWorld:
    """Validated, immutable ontology answering constraint queries.

    Use :func:`load_world` to construct one from YAML text; the
    constructor assumes already-validated parts.
    """

    def __init__(
        self,
        entities: Iterable[Entity],
        taxonomy: Taxonomy,
        relations: Mapping[str, Relation],
    ):
        self.entities: tuple[Entity, ...] = tuple(
            sorted(entities, key=lambda e: e.name)
        )
        self.taxonomy = taxonomy
        self.relations: dict[str, Relation] = dict(relations)
        self._by_name: dict[str, Entity] = {e.name: e for e in self.entities}
        # full class closure per entity, including the implicit size class
        self._entity_classes: dict[str, frozenset[str]] = {}
        for e in self.entities:
            closure: set[str] = {SIZE_CLASSES[e.size]}
            for cid in e.classes:
                closure.update(taxonomy.superclasses(cid))
            self._entity_classes[e.name] = frozenset(closure)
        self._members: dict[str, frozenset[str]] = {}
        for cid in taxonomy.class_ids:
            self._members[cid] = frozenset(
                name for name, cls in self._entity_classes.items() if cid in cls
            )
        self._all_names = frozenset(self._by_name)

    def __contains__(self, entity_name: str) -> bool:
        return entity_name in self._by_name

    def entity(self, name: str) -> Entity:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"unknown entity '{name}'") from None

    def entity_classes(self, name: str) -> frozenset[str]:
        """Transitive class closure of an entity, including its size class."""
        if name not in self._entity_classes:
            raise ValidationError(f"unknown entity '{name}'")
        return self._entity_classes[name]

    def member_names(self, class_expr: "str | ClassExpr") -> frozenset[str]:
        """Entity names satisfying a class expression."""
        expr = (
            class_expr
            if isinstance(class_expr, ClassExpr)
            else ClassExpr.parse(class_expr)
        )
        for cid in expr.class_ids():
            if cid not in self.taxonomy:
                raise ValidationError(f"unknown class '{cid}'")
        return self._eval(expr._ast)

    def _eval(self, node: tuple) -> frozenset[str]:
        kind = node[0]
        if kind == "class":
            return self._members[node[1]]
        if kind == "all":
            return self._all_names
        if kind == "not":
            return self._all_names - self._eval(node[1])
        if kind == "and":
            return self._eval(node[1]) & self._eval(node[2])
        if kind == "or":
            return self._eval(node[1]) | self._eval(node[2])
        raise AssertionError(f"bad expression node {node!r}")

    def entities_of(self, class_expr: "str | ClassExpr") -> tuple[Entity, ...]:
        """Entities satisfying a class expression, ordered by name."""
        names = self.member_names(class_expr)
        return tuple(self._by_name[n] for n in sorted(names))

    def relation_holds(self, rel: str, args: Sequence[str]) -> bool:
        """Whether an entity-name tuple is in a relation's extension."""
        relation = self.relations.get(rel)
        if relation is None:
            raise ValidationError(f"unknown relation '{rel}'")
        if len(args) != relation.arity:
            raise ValidationError(
                f"relation '{rel}' has arity {relation.arity}, got {len(args)} arguments"
            )
        return relation.holds(tuple(args))


def load_world(text: str) -> MiniWorld:
    """Parse and validate a YAML world document.

    Raises :class:`ParseError` for malformed YAML and
    :class:`ValidationError` for semantic problems; messages name the
    offending element.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"world file is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("world file must be a mapping with an 'entities' key")
    unknown = set(doc) - {"entities", "classes", "relations"}
    if unknown:
        raise ParseError(f"unknown top-level world keys: {sorted(unknown)}")

    taxonomy = _load_taxonomy(doc.get("classes") or {})
    entities = _load_entities(doc.get("entities"), taxonomy)
    by_name = {e.name: e for e in entities}
    relations = _load_relations(doc.get("relations") or {}, taxonomy, by_name)
    return MiniWorld(entities, taxonomy, relations)


def load_world_file(path) -> MiniWorld:
    with open(path, encoding="utf-8") as fh:
        return load_world(fh.read())


def _load_taxonomy(classes_raw) -> Taxonomy:
    if not isinstance(classes_raw, dict):
        raise ParseError("'classes' must be a mapping of class id to {parents: [...]}")
    parents: dict[str, frozenset[str]] = {c: frozenset() for c in SIZE_CLASSES.values()}
    for cid, spec in classes_raw.items():
        if not isinstance(cid, str) or not _IDENT_RE.fullmatch(cid):
            raise ValidationError(f"invalid class id {cid!r}")
        if cid in SIZE_CLASSES.values():
            raise ValidationError(
                f"class id '{cid}' is reserved for the implicit size classes"
            )
        if spec is None:
            spec = {}
        if not isinstance(spec, dict) or set(spec) - {"parents"}:
            raise ParseError(f"class '{cid}' must be declared as {{parents: [...]}}")
        ps = spec.get("parents") or []
        if not isinstance(ps, list) or not all(isinstance(p, str) for p in ps):
            raise ParseError(f"class '{cid}': parents must be a list of class ids")
        parents[cid] = frozenset(ps)
    return Taxonomy(parents)


def _load_entities(entities_raw, taxonomy: Taxonomy) -> list[Entity]:
    if entities_raw is None or entities_raw == []:
        raise ValidationError("no entities")
    if not isinstance(entities_raw, list):
        raise ParseError("'entities' must be a list")
    entities: list[Entity] = []
    seen: set[str] = set()
    for i, raw in enumerate(entities_raw):
        where = f"entity #{i + 1}"
        if not isinstance(raw, dict):
            raise ParseError(f"{where} must be a mapping")
        unknown = set(raw) - {"name", "noun", "classes", "size"}
        if unknown:
            raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
        name = raw.get("name")
        if not isinstance(name, str) or not name.strip():
            raise ValidationError(f"{where} has no name")
        name = name.strip()
        if name in seen:
            raise ValidationError(f"duplicate entity name '{name}'")
        if name in taxonomy:
            raise ValidationError(f"entity name '{name}' collides with a class id")
        noun = raw.get("noun")
        if noun not in NOUN_KINDS:
            raise ValidationError(
                f"entity '{name}': noun must be one of {NOUN_KINDS}, got {noun!r}"
            )
        classes = raw.get("classes")
        if not isinstance(classes, list) or not classes:
            raise ValidationError(f"entity '{name}': classes must be a non-empty list")
        for cid in classes:
            if cid in SIZE_CLASSES.values():
                raise ValidationError(
                    f"entity '{name}': use the size field instead of class '{cid}'"
                )
            if cid not in taxonomy:
                raise ValidationError(f"entity '{name}': unknown class '{cid}'")
        size = raw.get("size")
        if size not in SIZES:
            raise ValidationError(
                f"entity '{name}': size must be one of {SIZES}, got {size!r}"
            )
        seen.add(name)
        entities.append(Entity(name, noun, frozenset(classes), size))
    return entities


def _load_relations(
    relations_raw, taxonomy: Taxonomy, by_name: Mapping[str, Entity]
) -> dict[str, Relation]:
    if not isinstance(relations_raw, dict):
        raise ParseError("'relations' must be a mapping of relation name to definition")
    relations: dict[str, Relation] = {}
    for rname, spec in relations_raw.items():
        if not isinstance(rname, str) or not rname.strip():
            raise ValidationError(f"invalid relation name {rname!r}")
        if not isinstance(spec, dict) or set(spec) - {"arity", "tuples"}:
            raise ParseError(
                f"relation '{rname}' must be declared as {{arity, tuples}}"
            )
        arity = spec.get("arity")
        if arity not in (2, 3):
            raise ValidationError(
                f"relation '{rname}': arity must be 2 or 3, got {arity!r}"
            )
        tuples = spec.get("tuples")
        if not isinstance(tuples, list) or not tuples:
            raise ValidationError(f"relation '{rname}': tuples must be a non-empty list")
        terms: list[tuple[frozenset[str], ...]] = []
        texts: list[tuple[str, ...]] = []
        for j, term in enumerate(tuples):
            if not isinstance(term, list) or len(term) != arity:
                raise ValidationError(
                    f"relation '{rname}' term #{j + 1} must have exactly "
                    f"{arity} factors"
                )
            factors: list[frozenset[str]] = []
            factor_texts: list[str] = []
            for factor in term:
                factor_text = str(factor)
                factor_texts.append(factor_text)
                if factor_text in by_name:
                    factors.append(frozenset({factor_text}))
                    continue
                expr = ClassExpr.parse(factor_text)
                for cid in expr.class_ids():
                    if cid not in taxonomy:
                        raise ValidationError(
                            f"relation '{rname}': unknown class '{cid}'"
                        )
                members = _eval_static(expr._ast, taxonomy, by_name)
                if not members:
                    raise ValidationError(
                        f"relation '{rname}': factor '{factor_text}' matches no entities"
                    )
                factors.append(members)
            terms.append(tuple(factors))
            texts.append(tuple(factor_texts))
        relations[rname] = Relation(rname, arity, tuple(terms), tuple(texts))
    return relations


def _eval_static(node, taxonomy: Taxonomy, by_name: Mapping[str, Entity]):
    """Expression evaluation during load, before the MiniWorld exists."""
    all_names = frozenset(by_name)

    def closure(e: Entity) -> set[str]:
        cls = {SIZE_CLASSES[e.size]}
        for cid in e.classes:
            cls.update(taxonomy.superclasses(cid))
        return cls

    def ev(n) -> frozenset[str]:
        kind = n[0]
        if kind == "class":
            return frozenset(
                name for name, e in by_name.items() if n[1] in closure(e)
            )
        if kind == "all":
            return all_names
        if kind == "not":
            return all_names - ev(n[1])
        if kind == "and":
            return ev(n[1]) & ev(n[2])
        if kind == "or":
            return ev(n[1]) | ev(n[2])
        raise AssertionError(f"bad expression node {n!r}")

    return ev(node)
