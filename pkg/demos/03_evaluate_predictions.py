"""Scoring a (simulated) model: accuracy, pattern accuracy, curve, cartography.

Pattern accuracy at threshold t is the fraction of patterns whose
samples are classified correctly at a rate of at least t, so it rewards
consistency inside a pattern, not just raw accuracy.  The area under
the PA curve equals plain accuracy when every pattern has the same
number of samples.
"""

import pathlib
import random

from patnli import (
    Corpus,
    Label,
    PredictionRecord,
    PredictionSet,
    breakdown,
    cartography,
    generate,
    load_demo,
    pa_auc,
    pa_curve,
    pattern_accuracy,
    sample_accuracy,
)
from patnli.metrics import cartography_to_csv

OUT_DIR = pathlib.Path(__file__).parent / "demo_output"
OUT_DIR.mkdir(exist_ok=True)

world, patterns = load_demo()
corpus = Corpus(generate(patterns, world, per_pattern=200, seed=20230).samples)

# simulate a model with a per-pattern reliability: the probability mass
# it puts on the true label varies around a pattern-specific level, and
# the predicted label is the argmax of the distribution
rng = random.Random(1)
labels = list(Label)
reliability = {p.id: rng.choice([0.4, 0.6, 0.8, 0.95]) for p in patterns}
records = []
for s in corpus.samples:
    p_true = min(0.98, max(0.02, rng.gauss(reliability[s.pattern_id], 0.15)))
    rest = rng.uniform(0.0, 1.0 - p_true)
    others = [l for l in labels if l is not s.label]
    probs = {s.label: p_true, others[0]: rest, others[1]: 1.0 - p_true - rest}
    predicted = max(probs, key=probs.get)
    records.append(PredictionRecord(s.id, s.pattern_id, predicted, probs))

preds = PredictionSet.from_records(corpus, records)

acc = sample_accuracy(preds)
print(f"sample accuracy: {acc:.3f}")
print("pattern accuracy at the usual consistency thresholds:")
for t in ("0.5", "0.67", "0.9", "0.95", "1.0"):
    print(f"  PA>={t}: {pattern_accuracy(preds, t):.3f}")
print(f"PA-curve area: {pa_auc(preds):.3f} "
      f"(equals accuracy: equal samples per pattern)")

curve = pa_curve(preds)
(OUT_DIR / "pa_curve.csv").write_text(curve.to_csv())
print(f"wrote {OUT_DIR / 'pa_curve.csv'} ({len(curve.points)} staircase points)")

print("\nper inference class:")
for group, gm in breakdown(preds, corpus, by="inference_class",
                           thresholds=("0.95",)).items():
    pa95 = list(gm.pa.values())[0]
    print(f"  {group:<22} acc={gm.accuracy:.3f}  PA>=0.95={pa95:.3f} "
          f"({gm.n_patterns} patterns)")

# cartography: per-pattern mean/stddev of the true-label probability;
# high-confidence low-variability patterns are the easy ones
points = cartography(preds)
(OUT_DIR / "cartography.csv").write_text(cartography_to_csv(points))
print(f"\nwrote {OUT_DIR / 'cartography.csv'}")
for p in sorted(points, key=lambda p: p.confidence)[:5]:
    print(f"  hardest: {p.pattern_id:>4} confidence={p.confidence:.2f} "
          f"variability={p.variability:.2f}")
