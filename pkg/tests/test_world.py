import random

import pytest

from patnli import ClassExpr, ParseError, ValidationError, load_world
from conftest import TINY_WORLD_YAML


def test_tiny_world_loads_five_entities(tiny_world):
    assert len(tiny_world.entities) == 5
    assert {e.name for e in tiny_world.entities} == {
        "Mary", "John", "Cindi", "garden", "church",
    }


def test_no_entities_is_a_validation_error():
    with pytest.raises(ValidationError, match="no entities"):
        load_world("classes: {person: {}}\nentities: []\n")


def test_relation_with_undeclared_class_names_it():
    text = TINY_WORLD_YAML + """
  rides:
    arity: 2
    tuples:
      - [person, vehicle]
"""
    with pytest.raises(ValidationError, match="vehicle"):
        load_world(text)


def test_yaml_parse_error():
    with pytest.raises(ParseError):
        load_world("entities: [unclosed\n")


def test_non_mapping_document():
    with pytest.raises(ParseError):
        load_world("- just\n- a list\n")


def test_taxonomy_cycle_detected():
    text = """
classes:
  a: {parents: [b]}
  b: {parents: [a]}
entities:
  - {name: x, noun: common, classes: [a], size: S}
"""
    with pytest.raises(ValidationError, match="cycle"):
        load_world(text)


def test_undeclared_parent_detected():
    text = """
classes:
  a: {parents: [ghost]}
entities:
  - {name: x, noun: common, classes: [a], size: S}
"""
    with pytest.raises(ValidationError, match="ghost"):
        load_world(text)


def test_duplicate_entity_name():
    text = """
classes: {thing: {}}
entities:
  - {name: x, noun: common, classes: [thing], size: S}
  - {name: x, noun: common, classes: [thing], size: S}
"""
    with pytest.raises(ValidationError, match="duplicate entity name 'x'"):
        load_world(text)


def test_entity_with_unknown_class():
    text = """
classes: {thing: {}}
entities:
  - {name: x, noun: common, classes: [gadget], size: S}
"""
    with pytest.raises(ValidationError, match="gadget"):
        load_world(text)


def test_entity_bad_size_and_noun():
    base = "classes: {thing: {}}\nentities:\n"
    with pytest.raises(ValidationError, match="size"):
        load_world(base + "  - {name: x, noun: common, classes: [thing], size: XL}\n")
    with pytest.raises(ValidationError, match="noun"):
        load_world(base + "  - {name: x, noun: mass, classes: [thing], size: S}\n")


def test_entity_empty_classes():
    text = """
classes: {thing: {}}
entities:
  - {name: x, noun: common, classes: [], size: S}
"""
    with pytest.raises(ValidationError, match="non-empty"):
        load_world(text)


def test_reserved_size_class_rejected():
    text = """
classes: {size_s: {}}
entities:
  - {name: x, noun: common, classes: [size_s], size: S}
"""
    with pytest.raises(ValidationError, match="reserved"):
        load_world(text)


def test_entity_name_collides_with_class():
    text = """
classes: {person: {}}
entities:
  - {name: person, noun: common, classes: [person], size: M}
"""
    with pytest.raises(ValidationError, match="collides"):
        load_world(text)


def test_relation_bad_arity():
    text = TINY_WORLD_YAML + """
  weird:
    arity: 4
    tuples:
      - [person, person, person, person]
"""
    with pytest.raises(ValidationError, match="arity"):
        load_world(text)


def test_relation_term_length_mismatch():
    text = TINY_WORLD_YAML + """
  weird:
    arity: 2
    tuples:
      - [person]
"""
    with pytest.raises(ValidationError, match="exactly 2 factors"):
        load_world(text)


def test_relation_empty_factor():
    text = """
classes:
  person: {}
  vehicle: {}
entities:
  - {name: Mary, noun: proper, classes: [person], size: M}
relations:
  drives:
    arity: 2
    tuples:
      - [person, vehicle]
"""
    with pytest.raises(ValidationError, match="matches no entities"):
        load_world(text)


def test_entities_of_person(tiny_world):
    names = [e.name for e in tiny_world.entities_of("person")]
    assert names == ["Cindi", "John", "Mary"]


def test_entities_of_disjoint_intersection(tiny_world):
    assert tiny_world.entities_of("person&place") == ()


def test_entities_of_universal(tiny_world):
    assert len(tiny_world.entities_of("*")) == 5


def test_entities_of_union_and_complement(tiny_world):
    names = [e.name for e in tiny_world.entities_of("person|building")]
    assert names == ["Cindi", "John", "Mary", "church"]
    names = [e.name for e in tiny_world.entities_of("!person")]
    assert names == ["church", "garden"]


def test_entities_of_size_class(tiny_world):
    names = [e.name for e in tiny_world.entities_of("size_l")]
    assert names == ["church", "garden"]


def test_entities_of_unknown_class(tiny_world):
    with pytest.raises(ValidationError, match="vehicle"):
        tiny_world.entities_of("vehicle")


def test_class_expr_parse_errors():
    for bad in ("", "a |", "a &", "(a", "a)", "a ^ b", "|a"):
        with pytest.raises(ParseError):
            ClassExpr.parse(bad)


def test_class_expr_precedence(tiny_world):
    # ! binds tighter than &, which binds tighter than |
    a = {e.name for e in tiny_world.entities_of("person|place_small&building")}
    assert a == {"Cindi", "John", "Mary"}
    b = {e.name for e in tiny_world.entities_of("!person&place")}
    assert b == {"garden", "church"}


def test_relation_holds(tiny_world):
    assert tiny_world.relation_holds("fit_in", ("garden", "church")) is True
    assert tiny_world.relation_holds("fit_in", ("church", "garden")) is False


def test_relation_holds_arity_mismatch(tiny_world):
    with pytest.raises(ValidationError, match="arity"):
        tiny_world.relation_holds("fit_in", ("garden", "church", "garden"))


def test_relation_holds_unknown_relation(tiny_world):
    with pytest.raises(ValidationError, match="unknown relation"):
        tiny_world.relation_holds("nearby", ("garden", "church"))


def test_relation_holds_is_pure(tiny_world):
    first = tiny_world.relation_holds("fit_in", ("garden", "church"))
    for _ in range(5):
        assert tiny_world.relation_holds("fit_in", ("garden", "church")) == first


def test_taxonomy_transitivity(demo_world):
    # entity in a class implies entity in every ancestor of that class
    for cls in demo_world.taxonomy.class_ids:
        members = {e.name for e in demo_world.entities_of(cls)}
        for ancestor in demo_world.taxonomy.ancestors(cls):
            assert members <= {e.name for e in demo_world.entities_of(ancestor)}, (
                cls,
                ancestor,
            )


def test_entities_of_monotone_under_union(demo_world):
    rng = random.Random(7)
    classes = sorted(demo_world.taxonomy.class_ids)
    for _ in range(50):
        a, b = rng.choice(classes), rng.choice(classes)
        only_a = {e.name for e in demo_world.entities_of(a)}
        both = {e.name for e in demo_world.entities_of(f"{a}|{b}")}
        assert only_a <= both


def test_entity_classes_include_size(demo_world):
    assert "size_m" in demo_world.entity_classes("Mary")
    assert "person" in demo_world.entity_classes("Mary")
    assert "being" in demo_world.entity_classes("Mary")


def test_demo_world_shape(demo_world):
    assert len(demo_world.entities) == 75
    assert len(demo_world.taxonomy.class_ids) == 20  # includes the 3 size classes
    assert set(demo_world.relations) == {"fit_in", "size_compatible", "between_ok"}
    assert demo_world.relations["between_ok"].arity == 3
