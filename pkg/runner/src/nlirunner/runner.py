"""Model loading, label mapping, and batched prediction."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import torch

NLI_LABELS = ("entailment", "neutral", "contradiction")
JOIN_RULES = {"space": " ", "newline": "\n"}


@dataclass
class RunnerConfig:
    """How to run one checkpoint.

    ``labels`` gives the NLI label for each model output index; it must
    be a bijection onto entailment/neutral/contradiction.  When left
    empty it is derived from the checkpoint's id2label map.  Premises of
    multi-premise problems are joined into a single premise string per
    ``join`` ("space" or "newline"); single-premise NLI models have no
    native notion of multiple premises, so the joining rule is explicit
    configuration rather than a hidden convention.
    """

    model: str  # hub name or local path
    labels: tuple[str, str, str] | None = None
    batch_size: int = 16
    join: str = "space"
    max_length: int = 256
    device: str = "cpu"

    def __post_init__(self):
        if self.join not in JOIN_RULES:
            raise ValueError(f"join must be one of {sorted(JOIN_RULES)}, got {self.join!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.labels is not None:
            check_label_bijection(self.labels)


def check_label_bijection(labels: Sequence[str]) -> None:
    if len(labels) != 3 or set(labels) != set(NLI_LABELS):
        raise ValueError(
            f"label mapping must be a bijection onto {NLI_LABELS}, got {tuple(labels)}"
        )


def derive_labels(id2label: dict) -> tuple[str, str, str]:
    """Map a checkpoint's id2label names onto the three NLI labels.

    Accepts the common spellings (ENTAILMENT, entail, neutral, not_entailment
    does not qualify, contradiction, ...); raises when the mapping is not
    a clean bijection.
    """
    resolved: dict[int, str] = {}
    for index, name in id2label.items():
        lowered = str(name).lower()
        matches = [label for label in NLI_LABELS if lowered.startswith(label[:7])]
        if len(matches) != 1:
            raise ValueError(
                f"cannot map model label {name!r} onto {NLI_LABELS}; "
                "pass an explicit label order"
            )
        resolved[int(index)] = matches[0]
    if sorted(resolved) != [0, 1, 2] or set(resolved.values()) != set(NLI_LABELS):
        raise ValueError(
            f"model labels {dict(id2label)} are not a bijection onto {NLI_LABELS}; "
            "pass an explicit label order"
        )
    return (resolved[0], resolved[1], resolved[2])


def join_premises(premises: Sequence[str], rule: str) -> str:
    """Merge a multi-premise problem into the single premise slot."""
    if rule not in JOIN_RULES:
        raise ValueError(f"join must be one of {sorted(JOIN_RULES)}, got {rule!r}")
    return JOIN_RULES[rule].join(premises)


def load_corpus_records(text: str) -> list[dict]:
    """Minimal reader for the corpus JSONL format (provenance line skipped)."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValueError(f"corpus line {lineno}: invalid JSON: {exc}") from exc
        for key in ("id", "pattern_id", "premises", "hypothesis"):
            if key not in record:
                raise ValueError(f"corpus line {lineno}: missing field '{key}'")
        records.append(record)
    if not records:
        raise ValueError("corpus contains no samples")
    return records


def _load_model(config: RunnerConfig):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.model)
        model = AutoModelForSequenceClassification.from_pretrained(config.model)
    except Exception as exc:
        raise RuntimeError(f"cannot load model '{config.model}': {exc}") from exc
    if model.config.num_labels != 3:
        raise ValueError(
            f"model '{config.model}' has {model.config.num_labels} output labels, "
            "expected 3 for NLI"
        )
    labels = config.labels or derive_labels(model.config.id2label)
    check_label_bijection(labels)
    model.to(config.device)
    model.eval()
    return tokenizer, model, labels


def predict_records(config: RunnerConfig, records: Sequence[dict]) -> list[dict]:
    """One prediction dict per corpus record, in corpus order."""
    tokenizer, model, labels = _load_model(config)
    out: list[dict] = []
    with torch.no_grad():
        for start in range(0, len(records), config.batch_size):
            batch = records[start : start + config.batch_size]
            premises = [join_premises(r["premises"], config.join) for r in batch]
            hypotheses = [r["hypothesis"] for r in batch]
            encoded = tokenizer(
                premises,
                hypotheses,
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=config.max_length,
            ).to(config.device)
            probs = torch.softmax(model(**encoded).logits, dim=-1).cpu()
            for record, row in zip(batch, probs):
                dist = {labels[i]: float(row[i]) for i in range(3)}
                out.append(
                    {
                        "sample_id": record["id"],
                        "pattern_id": record["pattern_id"],
                        "pred": max(dist, key=dist.get),
                        "probs": dist,
                    }
                )
    return out


def predict_corpus(config: RunnerConfig, corpus_text: str) -> str:
    """Corpus JSONL text in, predictions JSONL text out."""
    records = load_corpus_records(corpus_text)
    predictions = predict_records(config, records)
    return "\n".join(json.dumps(p, ensure_ascii=False) for p in predictions) + "\n"
