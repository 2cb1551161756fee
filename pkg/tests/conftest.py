import pytest

from patnli import load_demo, load_patterns, load_world

# the 5-entity world used by the docs-level examples
TINY_WORLD_YAML = """
classes:
  person: {}
  place: {}
  place_small: {parents: [place]}
  building: {parents: [place]}
entities:
  - {name: Mary, noun: proper, classes: [person], size: M}
  - {name: John, noun: proper, classes: [person], size: M}
  - {name: Cindi, noun: proper, classes: [person], size: M}
  - {name: garden, noun: common, classes: [place_small], size: L}
  - {name: church, noun: common, classes: [building], size: L}
relations:
  fit_in:
    arity: 2
    tuples:
      - [place_small, building]
"""

# a slightly larger world whose nesting relation is given by entity
# tuples, so the transitivity pattern has exactly two (Y, Z) pairs
ENUM_WORLD_YAML = """
classes:
  person: {}
  place: {}
  place_small: {parents: [place]}
  building: {parents: [place]}
entities:
  - {name: Mary, noun: proper, classes: [person], size: M}
  - {name: John, noun: proper, classes: [person], size: M}
  - {name: Cindi, noun: proper, classes: [person], size: M}
  - {name: garden, noun: common, classes: [place_small], size: L}
  - {name: room, noun: common, classes: [place_small], size: M}
  - {name: church, noun: common, classes: [building], size: L}
  - {name: house, noun: common, classes: [building], size: L}
relations:
  fit_in:
    arity: 2
    tuples:
      - [garden, church]
      - [room, house]
"""

ENUM_PATTERNS_XML = """
<patterns>
  <pattern id="38" label="entailment" class="non_projective">
    <premise>[X] is in [Y].</premise>
    <premise>[Y] is in [Z].</premise>
    <hypothesis>[X] is in [Z].</hypothesis>
    <restrict var="X" class="person"/>
    <restrict rel="fit_in" vars="Y,Z"/>
    <seed X="John" Y="garden" Z="church"/>
  </pattern>
</patterns>
"""


@pytest.fixture(scope="session")
def demo():
    world, patterns = load_demo()
    return world, patterns


@pytest.fixture(scope="session")
def demo_world(demo):
    return demo[0]


@pytest.fixture(scope="session")
def demo_patterns(demo):
    return demo[1]


@pytest.fixture()
def tiny_world():
    return load_world(TINY_WORLD_YAML)


@pytest.fixture()
def enum_world():
    return load_world(ENUM_WORLD_YAML)


@pytest.fixture()
def enum_patterns(enum_world):
    return load_patterns(ENUM_PATTERNS_XML, enum_world)
