"""Acceptance gate: one test per criterion, summarized as pass/fail lines.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
each criterion with its outcome (see conftest.py).
"""

import io
import shutil
import time

import numpy as np
import pytest

from _golden import GOLDEN
from _oracles import brute_force_weighted, expand, random_matrix
from _tiny import loss_fn, tiny_model
from lexnet import nn
from lexnet.cli import run
from lexnet.conllu import parse_conllu
from lexnet.datasets import LabeledPair, find_benchmark, generate_switched_pairs, load_benchmark
from lexnet.evaluation import ConfusionMatrix, evaluate_labels, memorization_baseline, weighted_prf
from lexnet.models import DS, DS_H, LEXNET, LEXNET_H, PB, Hyper, RelationModel, fit, predict_batch, train
from lexnet.paths import PathIndex, extract_pair_paths, merge_indexes, save_index
from lexnet.synthetic import complementary_benchmark, memorization_benchmark, overfit_benchmark

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


@criterion(1, "gradient soundness on PB, DS_h, LexNET, LexNET_h (< 1e-4, eps 1e-5)")
def test_c1_gradient_soundness():
    with Timer() as t:
        errors = {}
        for variant in (PB, DS_H, LEXNET, LEXNET_H):
            model, emb, index = tiny_model(variant)
            inp = model.prepare("parrot", "bird", index, emb)
            assert len(inp.paths) == (0 if variant == DS_H else 2)
            assert len(model.relations) == 3
            errors[variant] = nn.grad_check(loss_fn(model, inp, 1), model.params, eps=1e-5)
    print("max relative error:", {k: f"{v:.2e}" for k, v in errors.items()})
    assert max(errors.values()) < 1e-4
    assert t.seconds < 10


@criterion(2, "weighted P/R/F1 equals brute-force oracle on 1000 matrices; weighted R = accuracy")
def test_c2_metric_oracle():
    rng = np.random.default_rng(2024)
    with Timer() as t:
        worst = 0.0
        for _ in range(1000):
            counts = random_matrix(rng, k_max=6, n_max=200)
            k = counts.shape[0]
            got = weighted_prf(ConfusionMatrix([str(i) for i in range(k)], counts))
            want = brute_force_weighted(*expand(counts), k)
            worst = max(worst, max(abs(a - b) for a, b in zip(got, want)))
            assert abs(got[1] - np.trace(counts) / counts.sum()) <= 1e-12
    print(f"largest deviation {worst:.1e}")
    assert worst <= 1e-12
    assert t.seconds < 5


@criterion(3, "witness where weighted F1 is not the harmonic mean of weighted P and R (> 0.01)")
def test_c3_non_harmonic_witness():
    # Found by brute-force search over 2x2 matrices with N <= 20.
    witness = None
    for a in range(11):
        for b in range(11):
            for c in range(11):
                for d in range(11):
                    counts = np.array([[a, b], [c, d]])
                    if counts.sum() == 0 or counts.sum() > 20:
                        continue
                    p, r, f = weighted_prf(ConfusionMatrix(["a", "b"], counts))
                    gap = abs(f - (2 * p * r / (p + r) if p + r else 0.0))
                    if witness is None or gap > witness[0]:
                        witness = (gap, counts)
    gap, counts = witness
    p, r, f = brute_force_weighted(*expand(counts), 2)
    print(f"matrix {counts.tolist()}: wP={p:.4f} wR={r:.4f} wF1={f:.4f} harmonic={2 * p * r / (p + r):.4f}")
    assert abs(f - 2 * p * r / (p + r)) > 0.01


@criterion(4, "golden path strings on 10 fixtures; sharded extraction + merge equals single pass")
def test_c4_path_golden():
    with Timer() as t:
        assert len(GOLDEN) == 10
        assert any(name.startswith("parrot") for name, *_ in GOLDEN)
        for name, text, pairs, expected in GOLDEN:
            buf = io.StringIO()
            save_index(extract_pair_paths(parse_conllu(io.StringIO(text)), pairs), buf)
            assert buf.getvalue() == expected, name
        corpus = parse_conllu(io.StringIO("".join(g[1] for g in GOLDEN)))
        pairs = [p for g in GOLDEN for p in g[2]]
        single = extract_pair_paths(corpus, pairs)
        for shards in (2, 4, len(corpus)):
            merged = PathIndex()
            for k in range(shards):
                merged = merge_indexes(merged, extract_pair_paths(corpus[k::shards], pairs))
            assert merged == single
    assert t.seconds < 1


@criterion(5, "LexNET reaches 100% training accuracy within 50 epochs on the 200-pair overfit set")
def test_c5_overfit():
    with Timer() as t:
        bm = overfit_benchmark(seed=0, n_pairs=200)
        train_set = bm.dataset.train
        assert len(train_set) == 200 and len(bm.dataset.inventory) == 3
        index = extract_pair_paths(bm.sentences, bm.pairs)
        model = RelationModel.build(LEXNET, bm.dataset.inventory, bm.embeddings, index, train_set, Hyper(), 0)
        pos = {r: i for i, r in enumerate(model.relations)}
        hist = fit(model, model.prepare_all(train_set, index, bm.embeddings), [pos[p.relation] for p in train_set],
                   lr=0.01, epochs=50, until_train_accuracy=1.0)
    print(f"train accuracy {hist[-1]['train_accuracy']:.3f} after {len(hist)} epochs")
    assert hist[-1]["train_accuracy"] == 1.0
    assert t.seconds < 120


def _test_f1(variant, bm, index, seed):
    ds = bm.dataset
    model, _ = train(variant, ds.train, ds.val, index, bm.embeddings, seed=seed, relations=ds.inventory,
                     extra_pairs=ds.test)
    pred = [p.relation for p in predict_batch(model, ds.test, index, bm.embeddings)]
    return evaluate_labels([p.relation for p in ds.test], pred, ds.inventory).weighted[2]


@criterion(6, "LexNET test F1 beats PB and DS_h by >= 5 points when signal is split (3 of 3 seeds)")
def test_c6_integration_beats_sources():
    with Timer() as t:
        rows = []
        for seed in (0, 1, 2):
            bm = complementary_benchmark(seed)
            index = extract_pair_paths(bm.sentences, bm.pairs)
            f1 = {v: _test_f1(v, bm, index, seed) for v in (LEXNET, PB, DS_H)}
            rows.append((seed, f1))
            print(f"seed {seed}: " + ", ".join(f"{k} {v:.3f}" for k, v in f1.items()))
    for seed, f1 in rows:
        assert f1[LEXNET] - f1[PB] >= 0.05, seed
        assert f1[LEXNET] - f1[DS_H] >= 0.05, seed
    assert t.seconds < 300


def _accuracy(pred, pairs):
    return float(np.mean([p == q.relation for p, q in zip(pred, pairs)]))


@criterion(7, "memorization: baseline 100%/0%, DS switched-pair drop exceeds LexNET's by >= 10 points")
def test_c7_lexical_memorization():
    with Timer() as t:
        for seed in (0, 1, 2):
            bm = memorization_benchmark(seed)
            ds = bm.dataset
            switched = [p for p in ds.test if (p.x, p.y) in bm.groups["switched"]]
            plain = [p for p in ds.test if (p.x, p.y) not in bm.groups["switched"]]
            assert switched and plain

            base = memorization_baseline(ds.train, ds.test, ds.inventory)
            by_pair = dict(zip([(p.x, p.y) for p in ds.test], base))
            assert _accuracy([by_pair[(p.x, p.y)] for p in plain], plain) == 1.0
            assert _accuracy([by_pair[(p.x, p.y)] for p in switched], switched) == 0.0

            index = extract_pair_paths(bm.sentences, bm.pairs)
            drops = {}
            for variant in (DS, LEXNET):
                model, _ = train(variant, ds.train, ds.val, index, bm.embeddings, seed=seed,
                                 relations=ds.inventory, extra_pairs=ds.test)
                acc = [_accuracy([p.relation for p in predict_batch(model, part, index, bm.embeddings)], part)
                       for part in (plain, switched)]
                drops[variant] = acc[0] - acc[1]
                print(f"seed {seed} {variant}: unswitched {acc[0]:.3f}, switched {acc[1]:.3f}")
            assert drops[DS] - drops[LEXNET] >= 0.10, (seed, drops)
    assert t.seconds < 300


@criterion(8, "switched pairs: worked example, and no emitted pair carries a true label")
def test_c8_switched_pairs():
    out = generate_switched_pairs([LabeledPair("apple", "fruit", "hypernym"), LabeledPair("cat", "animal", "hypernym")])
    assert {(p.x, p.y) for p in out} == {("apple", "animal"), ("cat", "fruit")}
    rng = np.random.default_rng(8)
    for trial in range(200):
        data, seen = [], set()
        for _ in range(int(rng.integers(2, 60))):
            x, y = f"x{rng.integers(15)}", f"y{rng.integers(6)}"
            if (x, y) not in seen:
                seen.add((x, y))
                data.append(LabeledPair(x, y, str(rng.choice(["hypernym", "hypernym", "meronym", "random"]))))
        out = generate_switched_pairs(data, seed=trial, existing=data)
        assert not {(p.x, p.y) for p in out} & seen


@criterion(9, "two train+evaluate CLI runs with the same seed give byte-identical artifacts")
def test_c9_cli_determinism(tmp_path):
    fx = tmp_path / "fx"
    assert run(["make-fixture", "--kind", "complementary", "--seed", "3", "--out", str(fx)]) == 0
    assert run(["extract-paths", "--corpus", str(fx / "corpus.conllu"), "--pairs", str(fx / "pairs.tsv"),
                "--workers", "3", "--out", str(tmp_path / "index.tsv")]) == 0
    common = ["--dataset", str(fx / "dataset.tsv"), "--embeddings", str(fx / "embeddings.txt"),
              "--index", str(tmp_path / "index.tsv"), "--seed", "5"]
    # Same command lines both times: run in one place and snapshot the outputs.
    out = tmp_path / "run"
    snapshots = []
    for _ in range(2):
        if out.exists():
            shutil.rmtree(out)
        for variant in ("lexnet_h", "ds"):
            assert run(["train", *common, "--variant", variant, "--lr", "0.01", "--dropout", "0.2",
                        "--epochs", "4", "--out", str(out / variant)]) == 0
        assert run(["evaluate", *common, "--model", str(out / "lexnet_h" / "model.json"),
                    str(out / "ds" / "model.json"), "--out", str(out / "eval")]) == 0
        snapshots.append({str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    assert len(snapshots[0]) == 8
    assert snapshots[0].keys() == snapshots[1].keys()
    for name in snapshots[0]:
        assert snapshots[0][name] == snapshots[1][name], name


EXPECTED_COUNTS = {"K&H+N": 57509, "BLESS": 26546, "ROOT09": 12762, "EVALution": 7378}


@criterion(10, "benchmark loaders report 57,509 / 26,546 / 12,762 / 7,378 instances")
@pytest.mark.parametrize("name", list(EXPECTED_COUNTS))
def test_c10_dataset_counts(name):
    if find_benchmark(name) is None:
        pytest.skip(f"{name} files not found (set LEXNET_DATASETS to a directory holding "
                    f"{name}/train.tsv, val.tsv, test.tsv); count check not run")
    assert len(load_benchmark(name)) == EXPECTED_COUNTS[name]
