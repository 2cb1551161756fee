"""Builders for synthetic corpora and prediction sets used across tests."""

from patnli import Corpus, InferenceClass, Label, PredictionRecord, Sample

LABELS = (Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION)
CLASSES = tuple(InferenceClass)


def synth_corpus(pattern_specs):
    """pattern_specs: iterable of (pattern_id, label, inference_class, n_samples)."""
    samples = []
    for pattern_id, label, cls, n in pattern_specs:
        for k in range(n):
            samples.append(
                Sample(
                    id=f"{pattern_id}-{k:04d}",
                    pattern_id=pattern_id,
                    label=label,
                    inference_class=cls,
                    premises=(f"Premise {pattern_id} {k}.",),
                    hypothesis=f"Hypothesis {pattern_id} {k}.",
                    assignment={"X": f"e{k}"},
                )
            )
    return Corpus(samples, {"origin": "synthetic"})


def wrong_label(label):
    return LABELS[(LABELS.index(label) + 1) % 3]


def preds_with_counts(corpus, correct_counts, probs_for=None):
    """Predictions where pattern p gets correct_counts[p] correct records.

    probs_for, if given, maps (sample_id, predicted) -> probability dict.
    """
    records = []
    seen: dict = {}
    for sample in corpus.samples:
        i = seen.setdefault(sample.pattern_id, 0)
        seen[sample.pattern_id] = i + 1
        predicted = (
            sample.label
            if i < correct_counts[sample.pattern_id]
            else wrong_label(sample.label)
        )
        probs = probs_for(sample.id, predicted) if probs_for else None
        records.append(
            PredictionRecord(sample.id, sample.pattern_id, predicted, probs)
        )
    return records


def peaked_probs(predicted, p=0.8):
    rest = (1.0 - p) / 2.0
    return {label: (p if label is predicted else rest) for label in LABELS}
