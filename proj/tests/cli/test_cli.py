import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("COHMETA_BIN", "cohmeta")
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "scored"


def run(*args, check=True):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr}")
    return proc


def tree(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def csv_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    run("synth", "--n-systems", 5, "--n-docs", 12, "--seed", 3, "--out", out)
    return out


def write_corpus(path, n_docs=6):
    with open(path, "w") as f:
        for d in range(n_docs):
            sentences = [f"Then Name{d}x{k} and Name{d}x{k + 1} spoke." for k in range(4)]
            f.write(json.dumps({"doc_id": f"doc{d}", "sentences": sentences}) + "\n")


def test_synth_writes_dataset_and_predictions(synth):
    assert (synth / "dataset.jsonl").exists()
    assert (synth / "predictions.jsonl").exists()
    assert (synth / "provenance.txt").exists()
    assert len((synth / "dataset.jsonl").read_text().splitlines()) == 60


def test_evaluate_reruns_are_byte_identical(synth, tmp_path):
    args = ["evaluate", "--dataset", synth / "dataset.jsonl", "--pred", f"synth={synth / 'predictions.jsonl'}",
            "--pred", "rnd=builtin:random", "--n-resamples", 50, "--seed", 9]
    run(*args, "--out", tmp_path / "a")
    run(*args, "--out", tmp_path / "b")
    first = tree(tmp_path / "a")
    assert set(first) == {"evaluate.md", "evaluate.csv"}
    assert first == tree(tmp_path / "b")


def test_human_predictions_score_one_everywhere(synth, tmp_path):
    run("evaluate", "--dataset", synth / "dataset.jsonl", "--pred", "h=builtin:human",
        "--level", "system", "summary", "pairwise", "--n-resamples", 0, "--out", tmp_path)
    (row,) = csv_rows(tmp_path / "evaluate.csv")
    for metric in ("tau_sys", "tau_sum", "tau_pair", "Acc_pair"):
        assert float(row[metric]) == pytest.approx(1.0)


def test_reference_fixture_through_cli(tmp_path):
    run("evaluate", "--dataset", FIXTURES / "dataset.jsonl", "--pred", f"cm_a={FIXTURES / 'cm_a.jsonl'}",
        "--pred", f"cm_b={FIXTURES / 'cm_b.jsonl'}", "--with-hum", "--n-resamples", 0, "--out", tmp_path)
    got = {r["measure"]: r for r in csv_rows(tmp_path / "evaluate.csv")}
    with open(FIXTURES / "reference_rows.csv", newline="") as f:
        for ref in csv.DictReader(f):
            for metric, value in ref.items():
                if metric == "measure":
                    continue
                assert float(got[ref["measure"]][metric]) == pytest.approx(float(value), abs=1e-5)


def test_missing_prediction_fails_without_partial_outputs(synth, tmp_path):
    lines = (synth / "predictions.jsonl").read_text().splitlines()
    short = tmp_path / "short.jsonl"
    short.write_text("\n".join(lines[:-1]) + "\n")
    out = tmp_path / "out"
    proc = run("evaluate", "--dataset", synth / "dataset.jsonl", "--pred", f"p={short}", "--out", out, check=False)
    assert proc.returncode != 0
    assert proc.stderr.strip()
    assert not out.exists() or not any(out.iterdir())


def test_out_of_range_scores_rejected(tmp_path):
    ds = tmp_path / "bad.jsonl"
    rows = [{"doc_id": d, "system_id": s, "summary_text": "x", "coherence": [3]} for d in ("d1", "d2") for s in "AB"]
    rows[-1]["coherence"] = [9]
    ds.write_text("".join(json.dumps(r) + "\n" for r in rows))
    proc = run("evaluate", "--dataset", ds, "--pred", "h=builtin:human", "--out", tmp_path / "o", check=False)
    assert proc.returncode == 2
    assert "9" in proc.stderr
    assert not (tmp_path / "o").exists() or not any((tmp_path / "o").iterdir())


def test_bias_outputs_are_deterministic(synth, tmp_path):
    args = ["bias", "--dataset", synth / "dataset.jsonl", "--pred", f"synth={synth / 'predictions.jsonl'}"]
    run(*args, "--out", tmp_path / "a")
    run(*args, "--out", tmp_path / "b")
    a = tree(tmp_path / "a")
    assert any(name.endswith(".svg") for name in a)
    assert a == tree(tmp_path / "b")


def test_shuffle_make_and_score(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_corpus(corpus)
    for name in ("a", "b"):
        run("shuffle", "make", "--corpus", corpus, "--k", 3, "--seed", 5, "--out", tmp_path / name)
    assert tree(tmp_path / "a") == tree(tmp_path / "b")
    pairs = (tmp_path / "a" / "pairs.jsonl").read_text().splitlines()
    assert len(pairs) == 18

    variants = [json.loads(l) for l in (tmp_path / "a" / "variants.jsonl").read_text().splitlines()]
    scores = tmp_path / "scores.jsonl"
    scores.write_text("".join(
        json.dumps({"variant_id": v["variant_id"], "score": 1.0 if v["variant_id"].startswith("orig:") else 0.0}) + "\n"
        for v in variants))
    run("shuffle", "score", "--pairs-file", tmp_path / "a" / "pairs.jsonl", "--variants-file",
        tmp_path / "a" / "variants.jsonl", "--scores", scores, "--out", tmp_path / "s")
    (row,) = csv_rows(tmp_path / "s" / "shuffle_accuracy.csv")
    assert float(row["accuracy"]) == 1.0

    run("shuffle", "score", "--pairs-file", tmp_path / "a" / "pairs.jsonl", "--variants-file",
        tmp_path / "a" / "variants.jsonl", "--scorer", "egr", "--out", tmp_path / "e")
    (row,) = csv_rows(tmp_path / "e" / "shuffle_accuracy.csv")
    assert 0.0 <= float(row["accuracy"]) <= 1.0


def test_shuffle_score_rejects_incomplete_scores(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_corpus(corpus, 3)
    run("shuffle", "make", "--corpus", corpus, "--out", tmp_path / "m")
    scores = tmp_path / "scores.jsonl"
    scores.write_text(json.dumps({"variant_id": "orig:doc0", "score": 1.0}) + "\n")
    proc = run("shuffle", "score", "--pairs-file", tmp_path / "m" / "pairs.jsonl", "--variants-file",
               tmp_path / "m" / "variants.jsonl", "--scores", scores, "--out", tmp_path / "s", check=False)
    assert proc.returncode == 2
    assert "orig:doc1" in proc.stderr or "shuf:" in proc.stderr
    assert not (tmp_path / "s").exists() or not any((tmp_path / "s").iterdir())
