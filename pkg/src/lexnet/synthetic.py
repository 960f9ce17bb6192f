"""Synthetic corpora, embeddings and datasets with a known information layout.

Each builder returns parsed sentences, word vectors and a split dataset in
which the location of the label signal (paths, embeddings, or the identity
of y) is controlled, so model orderings can be checked without the real
benchmarks.
"""

import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .conllu import Sentence, Token, write_conllu
from .datasets import Dataset, LabeledPair, generate_switched_pairs, make_splits, save_dataset
from .embeddings import EmbeddingTable
from .nn import rng_for


@dataclass
class SyntheticBenchmark:
    sentences: List[Sentence]
    embeddings: EmbeddingTable
    dataset: Dataset
    groups: Dict[str, set] = field(default_factory=dict)

    @property
    def pairs(self) -> List[Tuple[str, str]]:
        return [(p.x, p.y) for p in self.dataset.all_pairs()]

    def write(self, directory) -> Dict[str, str]:
        """Write corpus.conllu, embeddings.txt, dataset.tsv and pairs.tsv."""
        os.makedirs(directory, exist_ok=True)
        files = {name: os.path.join(directory, name)
                 for name in ("corpus.conllu", "embeddings.txt", "dataset.tsv", "pairs.tsv")}
        with open(files["corpus.conllu"], "w", encoding="utf-8", newline="\n") as f:
            write_conllu(self.sentences, f)
        with open(files["embeddings.txt"], "w", encoding="utf-8", newline="\n") as f:
            f.write(f"{len(self.embeddings)} {self.embeddings.dim}\n")
            for w, row in zip(self.embeddings.words, self.embeddings.matrix):
                f.write(w + " " + " ".join(repr(float(v)) for v in row) + "\n")
        with open(files["dataset.tsv"], "w", encoding="utf-8", newline="\n") as f:
            save_dataset(self.dataset, f)
        with open(files["pairs.tsv"], "w", encoding="utf-8", newline="\n") as f:
            for x, y in self.pairs:
                f.write(f"{x}\t{y}\n")
        return files


def _sentence(words, sid) -> Sentence:
    return Sentence(tuple(Token(i, lemma, lemma, pos, head, dep)
                          for i, (lemma, pos, head, dep) in enumerate(words, start=1)), sid)


# Sentence shapes. Each places x and y in a fixed syntactic frame around
# one connecting word.

def svo(x, y, verb):
    return [("the", "DET", 2, "det"), (x, "NOUN", 3, "nsubj"), (verb, "VERB", 0, "root"),
            ("a", "DET", 5, "det"), (y, "NOUN", 3, "obj")]


def oblique(x, y, verb):
    return [(x, "NOUN", 2, "nsubj"), (verb, "VERB", 0, "root"), ("with", "ADP", 4, "case"),
            (y, "NOUN", 2, "obl")]


def copula(x, y, _=None):
    return [("the", "DET", 2, "det"), (x, "NOUN", 5, "nsubj"), ("be", "AUX", 5, "cop"),
            ("a", "DET", 5, "det"), (y, "NOUN", 0, "root")]


def such_as(x, y, _=None):
    return [(y, "NOUN", 0, "root"), ("such", "ADJ", 4, "case"), ("as", "ADP", 2, "fixed"),
            (x, "NOUN", 1, "nmod")]


def conj(x, y, _=None):
    return [(x, "NOUN", 0, "root"), ("and", "CCONJ", 3, "cc"), (y, "NOUN", 1, "conj")]


class _Builder:
    def __init__(self, seed: int, dim: int, name: str):
        self.rng = rng_for(seed, name)
        self.dim = dim
        self.vectors: Dict[str, np.ndarray] = {}
        self.sentences: List[Sentence] = []
        self.counter = 0

    def center(self, scale=1.0):
        return self.rng.normal(scale=scale, size=self.dim)

    def word(self, prefix: str, vec=None) -> str:
        self.counter += 1
        w = f"{prefix}{self.counter}"
        if vec is not None:
            self.vectors[w] = vec
        return w

    def near(self, center, noise):
        return center + self.rng.normal(scale=noise, size=self.dim)

    def say(self, shape, x, y, mid=None):
        self.sentences.append(_sentence(shape(x, y, mid), f"s{len(self.sentences) + 1}"))

    def filler_vectors(self, words):
        for w in words:
            self.vectors.setdefault(w, self.center())

    def table(self) -> EmbeddingTable:
        return EmbeddingTable.from_dict(dict(sorted(self.vectors.items())))


def overfit_benchmark(seed: int = 0, n_pairs: int = 200, dim: int = 20) -> SyntheticBenchmark:
    """Three relations determined by (path family, y embedding cluster).

    Families A and B each use their own verbs; y comes from cluster 0 or 1.
    (A,0) -> r0, (A,1) -> r1, (B,0) -> r2, (B,1) -> r1.
    """
    b = _Builder(seed, dim, "overfit")
    verbs = {"A": ["grasp", "hold"], "B": ["eat", "bite"]}
    clusters = [b.center(2.0), b.center(2.0)]
    label = {("A", 0): "r0", ("A", 1): "r1", ("B", 0): "r2", ("B", 1): "r1"}
    pairs = []
    for i in range(n_pairs):
        fam = "AB"[i % 2]
        e = (i // 2) % 2
        x = b.word("x", b.center())
        y = b.word("y", b.near(clusters[e], 0.5))
        for _ in range(1 + int(b.rng.integers(2))):
            b.say(svo, x, y, verbs[fam][int(b.rng.integers(2))])
        if b.rng.random() < 0.3:
            b.say(conj, x, y)
        pairs.append(LabeledPair(x, y, label[(fam, e)]))
    b.filler_vectors([v for vs in verbs.values() for v in vs] + ["the", "a", "and"])
    ds = Dataset("overfit", ["r0", "r1", "r2"], train=pairs)
    return SyntheticBenchmark(b.sentences, b.table(), ds)


def complementary_benchmark(seed: int = 0, n_per_half: int = 200, n_relations: int = 4,
                            dim: int = 20) -> SyntheticBenchmark:
    """Half of the pairs carry their label only in paths, half only in embeddings.

    Path-half pairs: x and y vectors from one shared distribution; the
    connecting verb of every joint sentence is specific to the relation.
    Embedding-half pairs: y's vector sits near a per-relation center; the
    pair only ever co-occurs in uninformative coordination, or not at all.
    """
    b = _Builder(seed, dim, "complementary")
    rels = [f"r{i}" for i in range(n_relations)]
    verbs = {r: [f"verb{r}a", f"verb{r}b"] for r in rels}
    centers = {r: b.center(2.0) for r in rels}
    pairs, path_half, emb_half = [], set(), set()
    for i in range(n_per_half):
        r = rels[i % n_relations]
        x, y = b.word("px", b.center()), b.word("py", b.center())
        for _ in range(1 + int(b.rng.integers(3))):
            shape = svo if b.rng.random() < 0.5 else oblique
            b.say(shape, x, y, verbs[r][int(b.rng.integers(2))])
        if b.rng.random() < 0.3:
            b.say(conj, x, y)
        pairs.append(LabeledPair(x, y, r))
        path_half.add((x, y))
    for i in range(n_per_half):
        r = rels[i % n_relations]
        x, y = b.word("ex", b.center()), b.word("ey", b.near(centers[r], 0.7))
        if b.rng.random() < 0.3:
            b.say(conj, x, y)
        pairs.append(LabeledPair(x, y, r))
        emb_half.add((x, y))
    b.filler_vectors([v for vs in verbs.values() for v in vs] + ["the", "a", "and", "with"])
    ds = make_splits(pairs, (0.6, 0.15, 0.25), seed=seed, name="complementary", inventory=rels)
    return SyntheticBenchmark(b.sentences, b.table(), ds, {"paths": path_half, "embeddings": emb_half})


def memorization_benchmark(seed: int = 0, n_categories: int = 8, train_per_category: int = 12,
                           test_per_category: int = 4, n_random_targets: int = 8,
                           dim: int = 20, spread: float = 0.5, noise: float = 0.7) -> SyntheticBenchmark:
    """Train labels are a pure function of y; the test set adds switched pairs.

    Hyponyms x of category j co-occur with their hypernym y_j in copula and
    "such as" sentences. Random pairs, and switched pairs (x of category j
    with y_i, i != j), only co-occur in coordination or not at all.
    """
    b = _Builder(seed, dim, "memorization")
    hyper_center, random_center = b.center(spread), b.center(spread)
    cat_centers = [b.center(spread) for _ in range(n_categories)]
    hypernyms = [b.word("hyper", b.near(hyper_center, noise)) for _ in range(n_categories)]
    targets = [b.word("target", b.near(random_center, noise)) for _ in range(n_random_targets)]

    def hyponym(j):
        return b.word("hypo", b.near(cat_centers[j], noise))

    def hypernym_evidence(x, y):
        for _ in range(1 + int(b.rng.integers(2))):
            b.say(copula if b.rng.random() < 0.5 else such_as, x, y)

    def weak_evidence(x, y):
        if b.rng.random() < 0.5:
            b.say(conj, x, y)

    splits = {"train": [], "val": [], "test": []}
    switched_source = []
    for j in range(n_categories):
        for split, n in (("train", train_per_category), ("val", 2), ("test", test_per_category)):
            for _ in range(n):
                x = hyponym(j)
                hypernym_evidence(x, hypernyms[j])
                splits[split].append(LabeledPair(x, hypernyms[j], "hypernym"))
                if split == "test":
                    switched_source.append(splits[split][-1])
                t = targets[int(b.rng.integers(n_random_targets))]
                weak_evidence(x, t)
                splits[split].append(LabeledPair(x, t, "random"))
    existing = [p for s in splits.values() for p in s]
    switched = generate_switched_pairs(switched_source, seed=seed, existing=existing)
    for p in switched:
        weak_evidence(p.x, p.y)
    splits["test"].extend(switched)
    b.filler_vectors(["the", "a", "and", "be", "such", "as"])
    ds = Dataset("memorization", ["hypernym", "random"], **splits)
    return SyntheticBenchmark(b.sentences, b.table(), ds, {"switched": {(p.x, p.y) for p in switched}})
