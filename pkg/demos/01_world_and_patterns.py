"""Tour of the mini-world ontology and the pattern language.

Loads the bundled demo world (75 entities, 20 classes including the
implicit size categories, 3 relations) and the 16 demo patterns, then
shows the constraint queries the sampler is built on.
"""

from patnli import check_seed, load_demo, realize

world, patterns = load_demo()

print(f"world: {len(world.entities)} entities, "
      f"{len(world.taxonomy.class_ids)} classes, "
      f"{len(world.relations)} relations")

# class expressions support union, intersection, complement, and '*'
for expr in ("person", "building|outdoor", "storage&fronted",
             "(building|outdoor|traversable)&!(city|region)", "size_l&object"):
    names = [e.name for e in world.entities_of(expr)]
    print(f"  entities_of({expr!r}) -> {len(names)}: {', '.join(names[:6])}"
          + (", ..." if len(names) > 6 else ""))

# relations are unions of products of entity sets (binary and ternary)
print("\nrelation queries:")
for rel, args in [
    ("fit_in", ("garden", "church")),
    ("fit_in", ("church", "garden")),
    ("size_compatible", ("fridge", "cup")),
    ("between_ok", ("cat", "house", "fence")),
]:
    print(f"  {rel}{args} -> {world.relation_holds(rel, args)}")

# every pattern carries a seed assignment: the original problem it was
# abstracted from; regenerating it is the per-pattern sanity check
print("\nseed problems:")
for p in patterns:
    assert check_seed(p, world)
    bindings = {v: world.entity(n) for v, n in p.seed.items()}
    premise_text = " ".join(realize(t, bindings) for t in p.premises)
    hypothesis = realize(p.hypothesis, bindings)
    tag = {"entailment": "E", "neutral": "N", "contradiction": "C"}[p.label.value]
    print(f"  [{p.id:>4} {tag}] {premise_text}  =>  {hypothesis}")
