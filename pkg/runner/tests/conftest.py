import json
import subprocess
import sys

import pytest
import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "is", "was", "in", "at", "from", "into", "out", "of",
    "not", "far", "behind", "above", "below", "between", "and",
    "john", "mary", "cindi", "garden", "church", "house", "school",
    "ball", "box", "cup", "cabinet", "tree", "fence", "cat", "market",
    "came", "went", "threw", "met", "walked", "drove", "through",
    "hidden", "taken", "party", ".", ",",
]


def build_checkpoint(directory, num_labels=3, id2label=None, seed=0):
    directory.mkdir(parents=True, exist_ok=True)
    vocab_file = directory / "vocab.txt"
    vocab_file.write_text("\n".join(VOCAB) + "\n")
    tokenizer = BertTokenizer(vocab_file=str(vocab_file), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
        num_labels=num_labels,
    )
    if id2label is not None:
        config.id2label = id2label
        config.label2id = {v: k for k, v in id2label.items()}
    torch.manual_seed(seed)
    model = BertForSequenceClassification(config)
    model.save_pretrained(directory)
    tokenizer.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A local randomly-initialized 3-way classifier (no hub access needed)."""
    return build_checkpoint(
        tmp_path_factory.mktemp("model") / "tiny-nli",
        id2label={0: "ENTAILMENT", 1: "NEUTRAL", 2: "CONTRADICTION"},
    )


@pytest.fixture(scope="session")
def demo_corpus_slice(tmp_path_factory):
    """A 100-sample slice of the demo corpus, produced via the patnli CLI."""
    directory = tmp_path_factory.mktemp("corpus")
    full = directory / "full.jsonl"
    subprocess.run(
        [
            sys.executable, "-m", "patnli.cli", "generate",
            "--per-pattern", "7", "--seed", "5", "--out", str(full),
        ],
        check=True,
        capture_output=True,
    )
    lines = full.read_text().strip().split("\n")
    header, records = lines[0], lines[1:]
    assert len(records) >= 100
    sliced = directory / "slice100.jsonl"
    sliced.write_text("\n".join([header] + records[:100]) + "\n")
    return sliced


@pytest.fixture(scope="session")
def slice_ids(demo_corpus_slice):
    ids = []
    for line in demo_corpus_slice.read_text().strip().split("\n")[1:]:
        ids.append(json.loads(line)["id"])
    return ids
