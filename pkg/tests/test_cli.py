import subprocess
import sys

import pytest

from patnli import load_corpus
from patnli.cli import main
from patnli.metrics import predictions_to_jsonl

from helpers import peaked_probs, preds_with_counts


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_demo_bundle(capsys):
    code, out, err = run(["validate"], capsys)
    assert code == 0
    assert "16" in out
    assert "all patterns regenerate their seed problem" in out


def test_validate_reports_failures(tmp_path, capsys):
    from conftest import ENUM_PATTERNS_XML, ENUM_WORLD_YAML

    world_file = tmp_path / "w.yaml"
    world_file.write_text(ENUM_WORLD_YAML)
    patterns_file = tmp_path / "p.xml"
    patterns_file.write_text(
        ENUM_PATTERNS_XML.replace('Y="garden" Z="church"', 'Y="church" Z="garden"')
    )
    code, out, err = run(
        ["validate", "--world", str(world_file), "--patterns", str(patterns_file)],
        capsys,
    )
    assert code == 1
    assert "38" in err


def test_generate_is_reproducible(tmp_path, capsys):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    for out in (out1, out2):
        code, _, err = run(
            ["generate", "--per-pattern", "5", "--seed", "42", "--out", str(out)],
            capsys,
        )
        assert code == 0
        assert "seed: 42" in err
    assert out1.read_bytes() == out2.read_bytes()
    corpus = load_corpus(out1)
    assert len(corpus.samples) == 16 * 5
    assert corpus.provenance["seed"] == 42
    assert corpus.provenance["per_pattern"] == 5
    assert len(corpus.provenance["world_sha256"]) == 64


def test_generate_missing_flag_is_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "patnli.cli", "generate", "--out", "x.jsonl"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "per-pattern" in proc.stderr


def test_unknown_subcommand_is_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "patnli.cli", "frobnicate"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


def test_bad_input_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json}\n")
    code, out, err = run(["stats", "--corpus", str(bad)], capsys)
    assert code == 1
    assert "error:" in err


@pytest.fixture()
def small_corpus(tmp_path, capsys):
    path = tmp_path / "corpus.jsonl"
    code, _, _ = run(
        ["generate", "--per-pattern", "8", "--seed", "3", "--out", str(path)],
        capsys,
    )
    assert code == 0
    return path


def test_stats_text_and_csv(small_corpus, tmp_path, capsys):
    code, out, _ = run(["stats", "--corpus", str(small_corpus)], capsys)
    assert code == 0
    assert "Property" in out and "All" in out
    csv_path = tmp_path / "stats.csv"
    code, out, _ = run(
        ["stats", "--corpus", str(small_corpus), "--csv", "--out", str(csv_path)],
        capsys,
    )
    assert code == 0
    assert csv_path.read_text().startswith("property,")


def test_split_writes_disjoint_files(small_corpus, tmp_path, capsys):
    out_dir = tmp_path / "splits"
    code, _, err = run(
        [
            "split", "--corpus", str(small_corpus), "--test", "4",
            "--shots", "1,2", "--reps", "2", "--seed", "9",
            "--out-dir", str(out_dir),
        ],
        capsys,
    )
    assert code == 0
    assert "seed: 9" in err
    test_ids = {s.id for s in load_corpus(out_dir / "test.jsonl").samples}
    assert len(test_ids) == 16 * 4
    for k in (1, 2):
        for rep in (1, 2):
            shot = load_corpus(out_dir / f"shots_k{k}_rep{rep}.jsonl")
            ids = {s.id for s in shot.samples}
            assert len(ids) == 16 * k
            assert ids.isdisjoint(test_ids)


def _write_predictions(corpus_path, preds_path, with_probs=True):
    corpus = load_corpus(corpus_path)
    correct = {}
    for i, pid in enumerate(corpus.pattern_ids()):
        correct[pid] = len(corpus.by_pattern()[pid]) if i % 2 == 0 else 1
    records = preds_with_counts(
        corpus,
        correct,
        probs_for=(lambda sid, pred: peaked_probs(pred)) if with_probs else None,
    )
    preds_path.write_text(predictions_to_jsonl(records))


def test_eval_table_mirrors_expected_columns(small_corpus, tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    _write_predictions(small_corpus, preds)
    code, out, _ = run(
        ["eval", "--corpus", str(small_corpus), "--preds", str(preds)],
        capsys,
    )
    assert code == 0
    header = out.splitlines()[0]
    for column in ("Acc", "PA>=0.5", "PA>=0.67", "PA>=0.9", "PA>=0.95", "PA>=1"):
        assert column in header
    assert "all" in out


def test_eval_by_class_csv(small_corpus, tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    _write_predictions(small_corpus, preds)
    code, out, _ = run(
        [
            "eval", "--corpus", str(small_corpus), "--preds", str(preds),
            "--by", "class", "--csv",
        ],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("group,patterns,samples,Acc")
    groups = {line.split(",")[0] for line in lines[1:]}
    assert {"all", "directional", "non_projective", "projective",
            "argument_orientation"} <= groups


def test_curve_and_carto_outputs(small_corpus, tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    _write_predictions(small_corpus, preds)
    curve_path = tmp_path / "curve.csv"
    code, _, _ = run(
        ["curve", "--corpus", str(small_corpus), "--preds", str(preds),
         "--out", str(curve_path)],
        capsys,
    )
    assert code == 0
    lines = curve_path.read_text().strip().splitlines()
    assert lines[0] == "threshold,pa"
    values = [tuple(map(float, line.split(","))) for line in lines[1:]]
    assert values[0][0] == 0.0 and values[-1][0] == 1.0
    assert all(a[1] >= b[1] for a, b in zip(values, values[1:]))

    carto_path = tmp_path / "carto.csv"
    code, _, _ = run(
        ["carto", "--corpus", str(small_corpus), "--preds", str(preds),
         "--out", str(carto_path)],
        capsys,
    )
    assert code == 0
    lines = carto_path.read_text().strip().splitlines()
    assert lines[0] == "pattern_id,gold,confidence,variability"
    assert len(lines) == 1 + 16


def test_carto_without_probs_fails_cleanly(small_corpus, tmp_path, capsys):
    preds = tmp_path / "preds.jsonl"
    _write_predictions(small_corpus, preds, with_probs=False)
    code, _, err = run(
        ["carto", "--corpus", str(small_corpus), "--preds", str(preds),
         "--out", str(tmp_path / "c.csv")],
        capsys,
    )
    assert code == 1
    assert "probs" in err
    assert not (tmp_path / "c.csv").exists()


def test_kappa_cli(tmp_path, capsys):
    annotations = tmp_path / "ann.csv"
    annotations.write_text(
        "item_id,annotator_id,value\n"
        + "".join(
            f"i{k},{ann},{val}\n"
            for k, (a_val, b_val) in enumerate(
                [("1", "2"), ("2", "1"), ("3", "3"), ("4", "5"), ("5", "4")]
            )
            for ann, val in (("a", a_val), ("b", b_val))
        )
    )
    out_csv = tmp_path / "kappa.csv"
    code, out, _ = run(
        ["kappa", "--annotations", str(annotations), "--out", str(out_csv)],
        capsys,
    )
    assert code == 0
    assert "average pairwise kappa: 1.0000" in out
    assert "majority filter" in out
    assert "a,2,3" in out_csv.read_text()


def test_effective_seed_printed_by_default(tmp_path, capsys):
    out = tmp_path / "c.jsonl"
    code, _, err = run(
        ["generate", "--per-pattern", "2", "--out", str(out)], capsys
    )
    assert code == 0
    assert "seed: 20230" in err
