"""Term-pair relation classifiers: path-based, distributional and integrated.

Variants:
  PB        softmax(W v_paths)
  DS        one-vs-rest linear margin classifier on [v_wx, v_wy]
  DS_h      softmax(W2 tanh(W1 [v_wx, v_wy] + b1) + b2)
  LexNET    softmax(W [v_wx, v_paths, v_wy])
  LexNET_h  softmax(W2 tanh(W1 [v_wx, v_paths, v_wy] + b1) + b2)

v_paths is the count-weighted mean of recurrent path encodings, or a learned
no-path vector for pairs that never co-occur.
"""

import itertools
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import nn
from .embeddings import EmbeddingTable, lookup
from .evaluation import evaluate_labels
from .paths import DIRECTIONS, DependencyPath, PathIndex

log = logging.getLogger(__name__)

PB, DS, DS_H, LEXNET, LEXNET_H = "PB", "DS", "DS_h", "LexNET", "LexNET_h"
VARIANTS = (PB, DS, DS_H, LEXNET, LEXNET_H)
CLI_NAMES = {"pb": PB, "ds": DS, "ds_h": DS_H, "lexnet": LEXNET, "lexnet_h": LEXNET_H}

USES_PATHS = {PB, LEXNET, LEXNET_H}
USES_WORDS = {DS, DS_H, LEXNET, LEXNET_H}
HIDDEN_LAYER = {DS_H, LEXNET_H}

UNK = "<unk>"


@dataclass
class Hyper:
    lemma_dim: int = 50
    pos_dim: int = 4
    dep_dim: int = 5
    dir_dim: int = 1
    cell_hidden: int = 60
    hidden: int = 100
    dropout: float = 0.0
    lr: float = 0.001
    epochs: int = 25
    patience: int = 3
    batch_size: int = 8
    # margin classifier (DS)
    C: float = 1.0
    svm_epochs: int = 500


DEFAULT_GRID = {"dropout": (0.0, 0.2, 0.4), "lr": (0.001, 0.01, 0.1)}
DEFAULT_C_GRID = {"C": (0.01, 0.1, 1.0, 10.0)}


def resolve_variant(name: str) -> str:
    if name in VARIANTS:
        return name
    try:
        return CLI_NAMES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(CLI_NAMES)}") from None


class Prediction(NamedTuple):
    distribution: np.ndarray
    index: int
    relation: str


class PairInput(NamedTuple):
    """Model-ready pair: frozen word vectors plus vocabulary ids of each path."""
    wx: np.ndarray
    wy: np.ndarray
    paths: Tuple[Tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray], ...]


@dataclass
class Vocab:
    lemmas: List[str] = field(default_factory=lambda: [UNK])
    pos: List[str] = field(default_factory=lambda: [UNK])
    deps: List[str] = field(default_factory=lambda: [UNK])

    def __post_init__(self):
        self._maps = [{w: i for i, w in enumerate(tab)} for tab in (self.lemmas, self.pos, self.deps)]

    @classmethod
    def from_paths(cls, paths) -> "Vocab":
        lemmas, pos, deps = set(), set(), set()
        for p in paths:
            for e in p.edges:
                lemmas.add(e.lemma)
                pos.add(e.pos)
                deps.add(e.dep)
        return cls([UNK] + sorted(lemmas), [UNK] + sorted(pos), [UNK] + sorted(deps))

    def ids(self, path: DependencyPath):
        lm, pm, dm = self._maps
        return (np.array([lm.get(e.lemma, 0) for e in path.edges]),
                np.array([pm.get(e.pos, 0) for e in path.edges]),
                np.array([dm.get(e.dep, 0) for e in path.edges]),
                np.array([DIRECTIONS.index(e.direction) for e in path.edges]))


def collect_paths(index: Optional[PathIndex], pairs) -> List[DependencyPath]:
    if index is None:
        return []
    out = []
    for p in pairs:
        out.extend(index.paths(p[0], p[1]))
    return out


class RelationModel:
    """Neural relation classifier for the PB, DS_h, LexNET and LexNET_h variants."""

    def __init__(self, variant: str, relations: Sequence[str], hyper: Hyper,
                 vocab: Vocab, word_dim: int, params: nn.ParamSet):
        if variant not in VARIANTS or variant == DS:
            raise ValueError(f"RelationModel does not implement variant {variant!r}")
        self.variant = variant
        self.relations = list(relations)
        self.hyper = hyper
        self.vocab = vocab
        self.word_dim = word_dim
        self.params = params

    # construction

    @classmethod
    def build(cls, variant: str, relations: Sequence[str], embeddings: EmbeddingTable,
              index: Optional[PathIndex] = None, pairs=(), hyper: Optional[Hyper] = None,
              seed: int = 0) -> "RelationModel":
        hyper = hyper or Hyper()
        variant = resolve_variant(variant)
        rng = nn.rng_for(seed, "init")
        params = nn.ParamSet()
        k = len(relations)
        if k < 2:
            raise ValueError("need at least two relations")
        vocab = Vocab()
        if variant in USES_PATHS:
            vocab = Vocab.from_paths(collect_paths(index, pairs))
            if embeddings.dim != hyper.lemma_dim:
                hyper = replace(hyper, lemma_dim=embeddings.dim)
            lemma_tab = np.vstack([nn.glorot(rng, 1, hyper.lemma_dim) for _ in vocab.lemmas])
            for i, lemma in enumerate(vocab.lemmas):
                vec = embeddings.vector(lemma) if i else None
                if vec is not None:
                    lemma_tab[i] = vec
            params.add("lemma", lemma_tab)
            params.add("pos", np.vstack([nn.glorot(rng, 1, hyper.pos_dim) for _ in vocab.pos]))
            params.add("dep", np.vstack([nn.glorot(rng, 1, hyper.dep_dim) for _ in vocab.deps]))
            params.add("dir", np.vstack([nn.glorot(rng, 1, hyper.dir_dim) for _ in DIRECTIONS]))
            edge_dim = hyper.lemma_dim + hyper.pos_dim + hyper.dep_dim + hyper.dir_dim
            nn.init_cell(params, "cell", edge_dim, hyper.cell_hidden, rng)
            params.add("nopath", np.zeros(hyper.cell_hidden))
        model = cls(variant, relations, hyper, vocab, embeddings.dim, params)
        d = model.feature_dim
        if variant in HIDDEN_LAYER:
            params.add("W1", nn.glorot(rng, hyper.hidden, d))
            params.add("b1", np.zeros(hyper.hidden))
            params.add("W2", nn.glorot(rng, k, hyper.hidden))
            params.add("b2", np.zeros(k))
        else:
            params.add("W", nn.glorot(rng, k, d))
        return model

    @property
    def feature_dim(self) -> int:
        d = 0
        if self.variant in USES_WORDS:
            d += 2 * self.word_dim
        if self.variant in USES_PATHS:
            d += self.hyper.cell_hidden
        return d

    # inputs

    def prepare(self, x: str, y: str, index: Optional[PathIndex], embeddings: Optional[EmbeddingTable]) -> PairInput:
        if self.variant in USES_WORDS:
            wx, wy = lookup(embeddings, x)[0], lookup(embeddings, y)[0]
        else:
            wx = wy = np.zeros(0)
        paths = ()
        if self.variant in USES_PATHS and index is not None:
            found = sorted(index.paths(x, y).items(), key=lambda pc: str(pc[0]))
            total = float(sum(c for _, c in found))
            paths = tuple((c / total, *self.vocab.ids(p)) for p, c in found)
        return PairInput(wx, wy, paths)

    def prepare_all(self, pairs, index, embeddings) -> List[PairInput]:
        return [self.prepare(p[0], p[1], index, embeddings) for p in pairs]

    # forward / backward

    def edge_matrix(self, ids) -> np.ndarray:
        lem, pos, dep, dirs = ids
        v = self.params.values
        return np.hstack([v["lemma"][lem], v["pos"][pos], v["dep"][dep], v["dir"][dirs]])

    def encode_paths(self, inp: PairInput):
        """v_paths and what backward needs to reach the path encoder."""
        v = self.params.values
        if not inp.paths:
            return v["nopath"].copy(), None
        out = np.zeros(self.hyper.cell_hidden)
        records = []
        for weight, *ids in inp.paths:
            h, cache = nn.run_sequence(v["cell.Wx"], v["cell.Wh"], v["cell.b"], self.edge_matrix(ids))
            out += weight * h
            records.append((weight, ids, cache))
        return out, records

    def forward(self, inp: PairInput, train: bool = False, dropout: float = 0.0,
                rng: Optional[np.random.Generator] = None):
        """Class distribution and a record for ``backward``."""
        v = self.params.values
        parts, path_rec = [], None
        if self.variant in USES_PATHS:
            v_paths, path_rec = self.encode_paths(inp)
        if self.variant == PB:
            parts = [v_paths]
        elif self.variant == DS_H:
            parts = [inp.wx, inp.wy]
        else:
            parts = [inp.wx, v_paths, inp.wy]
        feats = np.concatenate(parts)
        mask = None
        if train and dropout > 0.0:
            mask = (rng.random(feats.shape[0]) >= dropout) / (1.0 - dropout)
            feats = feats * mask
        if self.variant in HIDDEN_LAYER:
            hid = np.tanh(nn.affine(v["W1"], v["b1"], feats))
            c = nn.softmax(nn.affine(v["W2"], v["b2"], hid))
        else:
            hid = None
            c = nn.softmax(nn.affine(v["W"], None, feats))
        return c, (feats, mask, hid, path_rec)

    def backward(self, record, dz: np.ndarray) -> None:
        """Accumulate parameter gradients given d(loss)/d(logits)."""
        feats, mask, hid, path_rec = record
        v, g = self.params.values, self.params.grads
        if hid is not None:
            g["W2"] += np.outer(dz, hid)
            g["b2"] += dz
            da = (v["W2"].T @ dz) * (1.0 - hid * hid)
            g["W1"] += np.outer(da, feats)
            g["b1"] += da
            dfeats = v["W1"].T @ da
        else:
            g["W"] += np.outer(dz, feats)
            dfeats = v["W"].T @ dz
        if self.variant not in USES_PATHS:
            return  # distributional vectors are frozen
        if mask is not None:
            dfeats = dfeats * mask
        off = 0 if self.variant == PB else self.word_dim
        dpaths = dfeats[off:off + self.hyper.cell_hidden]
        if path_rec is None:
            g["nopath"] += dpaths
            return
        cell_grads = (g["cell.Wx"], g["cell.Wh"], g["cell.b"])
        h = self.hyper
        cuts = np.cumsum([h.lemma_dim, h.pos_dim, h.dep_dim])
        for weight, ids, cache in path_rec:
            dX = nn.sequence_backward(v["cell.Wx"], v["cell.Wh"], weight * dpaths, cache, cell_grads)
            for name, rows, block in zip(("lemma", "pos", "dep", "dir"), ids, np.split(dX, cuts, axis=1)):
                np.add.at(g[name], rows, block)

    def loss_and_backward(self, inp: PairInput, gold: int, scale: float = 1.0,
                          dropout: float = 0.0, rng=None) -> float:
        c, rec = self.forward(inp, train=dropout > 0.0, dropout=dropout, rng=rng)
        self.backward(rec, scale * nn.softmax_xent_grad(c, gold))
        return nn.cross_entropy(c, gold)

    # prediction

    def distribution(self, inp: PairInput) -> np.ndarray:
        return self.forward(inp)[0]

    def predict_inputs(self, inputs: Sequence[PairInput]) -> List[Prediction]:
        out = []
        for inp in inputs:
            c = self.distribution(inp)
            r = int(np.argmax(c))
            out.append(Prediction(c, r, self.relations[r]))
        return out

    def predict_pairs(self, pairs, index, embeddings) -> List[Prediction]:
        return self.predict_inputs(self.prepare_all(pairs, index, embeddings))

    # persistence

    def meta(self) -> dict:
        return {"variant": self.variant, "relations": self.relations, "hyper": asdict(self.hyper),
                "word_dim": self.word_dim,
                "vocab": {"lemmas": self.vocab.lemmas, "pos": self.vocab.pos, "deps": self.vocab.deps}}

    def save(self, stream, extra: Optional[dict] = None) -> None:
        meta = self.meta()
        if extra:
            meta["run"] = extra
        nn.save_checkpoint(stream, self.params.values, meta)

    @classmethod
    def from_checkpoint(cls, tensors, meta) -> "RelationModel":
        params = nn.ParamSet()
        for name, t in tensors.items():
            params.add(name, t)
        vocab = Vocab(meta["vocab"]["lemmas"], meta["vocab"]["pos"], meta["vocab"]["deps"])
        return cls(meta["variant"], meta["relations"], Hyper(**meta["hyper"]), vocab, meta["word_dim"], params)


# Margin classifier (DS)

class MarginClassifier:
    """One-vs-rest linear classifiers with L2-regularized hinge loss.

    Each class minimizes 0.5 * ||w||^2 + C * mean_i hinge(y_i (w.x_i + b))
    (the bias is treated as the weight of a constant feature) by full-batch
    subgradient descent with step 1 / (lambda t), lambda = 1 / C, keeping the
    iterate with the lowest objective.
    """

    variant = DS

    def __init__(self, relations: Sequence[str], W: np.ndarray, b: np.ndarray, word_dim: int, C: float):
        self.relations = list(relations)
        self.W, self.b = W, b
        self.word_dim = word_dim
        self.C = C

    @staticmethod
    def features(x: str, y: str, embeddings: EmbeddingTable) -> np.ndarray:
        return np.concatenate([lookup(embeddings, x)[0], lookup(embeddings, y)[0]])

    @classmethod
    def fit(cls, X: np.ndarray, labels: Sequence[int], relations: Sequence[str], C: float = 1.0,
            epochs: int = 500, word_dim: Optional[int] = None) -> "MarginClassifier":
        X = np.asarray(X, dtype=np.float64)
        labels = np.asarray(labels)
        k = len(relations)
        if len(set(labels.tolist())) < 2:
            raise ValueError("margin classifier needs at least two classes in the training data")
        n, d = X.shape
        Xb = np.hstack([X, np.ones((n, 1))])
        Y = -np.ones((n, k))
        Y[np.arange(n), labels] = 1.0
        lam = 1.0 / C
        Wb = np.zeros((k, d + 1))

        def objective(Wb):
            margins = Y * (Xb @ Wb.T)
            return 0.5 * lam * np.sum(Wb * Wb, axis=1) + np.maximum(0.0, 1.0 - margins).mean(axis=0)

        best, best_obj = Wb.copy(), objective(Wb)
        radius = 1.0 / np.sqrt(lam)
        for t in range(1, epochs + 1):
            margins = Y * (Xb @ Wb.T)
            active = (margins < 1.0) * Y
            grad = lam * Wb - (active.T @ Xb) / n
            Wb = Wb - grad / (lam * t)
            norms = np.linalg.norm(Wb, axis=1, keepdims=True)
            Wb = Wb * np.minimum(1.0, radius / np.maximum(norms, 1e-300))
            obj = objective(Wb)
            better = obj < best_obj
            best[better] = Wb[better]
            best_obj = np.where(better, obj, best_obj)
        return cls(relations, best[:, :d].copy(), best[:, d].copy(), word_dim or d // 2, C)

    def decision(self, feats: np.ndarray) -> np.ndarray:
        return self.W @ feats + self.b

    def predict_features(self, feats: np.ndarray) -> Prediction:
        scores = self.decision(feats)
        r = int(np.argmax(scores))
        return Prediction(nn.softmax(scores), r, self.relations[r])

    def predict_pairs(self, pairs, index, embeddings) -> List[Prediction]:
        return [self.predict_features(self.features(p[0], p[1], embeddings)) for p in pairs]

    def meta(self) -> dict:
        return {"variant": DS, "relations": self.relations, "word_dim": self.word_dim, "C": self.C}

    def save(self, stream, extra: Optional[dict] = None) -> None:
        meta = self.meta()
        if extra:
            meta["run"] = extra
        nn.save_checkpoint(stream, {"W": self.W, "b": self.b}, meta)

    @classmethod
    def from_checkpoint(cls, tensors, meta) -> "MarginClassifier":
        return cls(meta["relations"], tensors["W"], tensors["b"], meta["word_dim"], meta["C"])


def margin_train(train, embeddings: EmbeddingTable, C_grid=DEFAULT_C_GRID["C"], seed: int = 0,
                 val=None, relations: Optional[Sequence[str]] = None, epochs: int = 500):
    """Fit a margin classifier per C and keep the best by validation weighted F1.

    Training is deterministic; ``seed`` is accepted for interface symmetry.
    """
    relations = list(relations or dict.fromkeys(p[2] for p in train))
    pos = {r: i for i, r in enumerate(relations)}
    X = np.array([MarginClassifier.features(p[0], p[1], embeddings) for p in train])
    labels = [pos[p[2]] for p in train]
    report = TuningReport(DS)
    best = None
    for C in C_grid:
        clf = MarginClassifier.fit(X, labels, relations, C, epochs, embeddings.dim)
        scored = val if val else train
        preds = [p.relation for p in clf.predict_pairs(scored, None, embeddings)]
        m = evaluate_labels([p[2] for p in scored], preds, relations)
        report.add({"C": C}, m.weighted, epochs)
        if best is None or m.weighted[2] > best[0]:
            best = (m.weighted[2], clf)
    report.best = int(np.argmax([r["f1"] for r in report.rows]))
    return best[1], report


def margin_predict(clf: MarginClassifier, x: str, y: str, embeddings: EmbeddingTable) -> str:
    return clf.predict_pairs([(x, y)], None, embeddings)[0].relation


# Training

@dataclass
class TuningReport:
    variant: str
    rows: List[dict] = field(default_factory=list)
    best: int = -1

    def add(self, point: dict, weighted, epochs: int):
        p, r, f = weighted
        self.rows.append({**point, "precision": p, "recall": r, "f1": f, "epochs": epochs})

    @property
    def best_point(self) -> dict:
        return self.rows[self.best]

    def to_tsv(self, config: Optional[dict] = None) -> str:
        lines = []
        if config is not None:
            lines.append("# config: " + json.dumps(config, sort_keys=True))
        if not self.rows:
            return "\n".join(lines) + "\n"
        keys = [k for k in self.rows[0] if k not in ("precision", "recall", "f1", "epochs")]
        lines.append("\t".join(keys + ["val_P", "val_R", "val_F1", "epochs", "best"]))
        for i, row in enumerate(self.rows):
            cells = [repr(row[k]) for k in keys]
            cells += [f"{row['precision']:.6f}", f"{row['recall']:.6f}", f"{row['f1']:.6f}",
                      str(row["epochs"]), "*" if i == self.best else ""]
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"


def fit(model: RelationModel, train_inputs: Sequence[PairInput], train_gold: Sequence[int],
        val_inputs: Sequence[PairInput] = (), val_gold: Sequence[int] = (),
        lr: Optional[float] = None, dropout: Optional[float] = None, epochs: Optional[int] = None,
        patience: Optional[int] = None, batch_size: Optional[int] = None, seed: int = 0,
        until_train_accuracy: Optional[float] = None) -> List[dict]:
    """Minimize mean cross-entropy with Adam over shuffled mini-batches.

    With a validation set, keeps the epoch with the best validation weighted
    F1 and stops after ``patience`` epochs without improvement. Returns
    per-epoch history.
    """
    h = model.hyper
    lr = h.lr if lr is None else lr
    dropout = h.dropout if dropout is None else dropout
    epochs = h.epochs if epochs is None else epochs
    patience = h.patience if patience is None else patience
    batch_size = h.batch_size if batch_size is None else batch_size
    n = len(train_inputs)
    if n == 0:
        raise ValueError("empty training set")
    opt = nn.Adam(lr)
    order_rng = nn.rng_for(seed, "shuffle")
    drop_rng = nn.rng_for(seed, "dropout")
    model.params.zero_grad()
    history = []
    best_f1, best_snap, stale = -1.0, None, 0
    for epoch in range(1, epochs + 1):
        order = order_rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            scale = 1.0 / len(batch)
            for i in batch:
                total += model.loss_and_backward(train_inputs[i], train_gold[i], scale, dropout, drop_rng)
            opt.step(model.params)
        model.params.assert_finite()
        entry = {"epoch": epoch, "loss": total / n}
        if until_train_accuracy is not None:
            preds = [p.index for p in model.predict_inputs(train_inputs)]
            entry["train_accuracy"] = float(np.mean(np.array(preds) == np.array(train_gold)))
        if len(val_inputs):
            preds = [p.relation for p in model.predict_inputs(val_inputs)]
            entry["val_f1"] = evaluate_labels([model.relations[g] for g in val_gold], preds,
                                              model.relations).weighted[2]
        history.append(entry)
        if until_train_accuracy is not None and entry["train_accuracy"] >= until_train_accuracy:
            break
        if len(val_inputs):
            if entry["val_f1"] > best_f1:
                best_f1, best_snap, stale = entry["val_f1"], model.params.snapshot(), 0
            else:
                stale += 1
                if stale >= patience:
                    break
    if best_snap is not None:
        model.params.restore(best_snap)
    return history


def _check_training_data(train, val, relations):
    if not train:
        raise ValueError("empty training set")
    counts = {r: 0 for r in relations}
    for p in train:
        if p[2] not in counts:
            raise ValueError(f"training relation {p[2]!r} outside the inventory")
        counts[p[2]] += 1
    missing = [r for r, c in counts.items() if c == 0]
    if missing:
        raise ValueError(f"relations with no training instances: {missing}")
    train_keys = {(p[0], p[1]) for p in train}
    if any((p[0], p[1]) in train_keys for p in val or ()):
        raise ValueError("train and validation sets overlap")


def train(variant: str, train_set, val_set, index: Optional[PathIndex], embeddings: EmbeddingTable,
          grid: Optional[Dict[str, Sequence]] = None, seed: int = 0, hyper: Optional[Hyper] = None,
          relations: Optional[Sequence[str]] = None, extra_pairs=()):
    """Train ``variant`` at each grid point and keep the best by validation weighted F1.

    Returns (model, TuningReport). ``extra_pairs`` (e.g. the test split) only
    widen the path-encoder vocabulary; their labels are never read.
    """
    variant = resolve_variant(variant)
    hyper = hyper or Hyper()
    relations = list(relations or dict.fromkeys(p[2] for p in train_set))
    _check_training_data(train_set, val_set, relations)
    if variant == DS:
        cgrid = (grid or {}).get("C", DEFAULT_C_GRID["C"])
        return margin_train(train_set, embeddings, cgrid, seed, val_set, relations, hyper.svm_epochs)

    grid = dict(grid if grid is not None else DEFAULT_GRID)
    keys = sorted(grid)
    pos = {r: i for i, r in enumerate(relations)}
    vocab_pairs = list(train_set) + list(val_set or ()) + list(extra_pairs)
    report = TuningReport(variant)
    best = None
    for values in itertools.product(*(grid[k] for k in keys)):
        point = dict(zip(keys, values))
        hp = replace(hyper, **point)
        model = RelationModel.build(variant, relations, embeddings, index, vocab_pairs, hp, seed)
        tr_in = model.prepare_all(train_set, index, embeddings)
        va_in = model.prepare_all(val_set or (), index, embeddings)
        tr_gold = [pos[p[2]] for p in train_set]
        va_gold = [pos[p[2]] for p in val_set or ()]
        history = fit(model, tr_in, tr_gold, va_in, va_gold, seed=seed)
        scored_in, scored = (va_in, val_set) if val_set else (tr_in, train_set)
        preds = [p.relation for p in model.predict_inputs(scored_in)]
        m = evaluate_labels([p[2] for p in scored], preds, relations)
        report.add(point, m.weighted, len(history))
        log.info("%s %s: val F1 %.4f after %d epochs", variant, point, m.weighted[2], len(history))
        if best is None or m.weighted[2] > best[0]:
            best = (m.weighted[2], model)
    report.best = int(np.argmax([r["f1"] for r in report.rows]))
    return best[1], report


def predict_batch(model, pairs, index: Optional[PathIndex], embeddings: EmbeddingTable) -> List[Prediction]:
    """Order-preserving predictions; pairs missing from the index use the no-path vector."""
    return model.predict_pairs(list(pairs), index, embeddings)


def save_model(model, path, extra: Optional[dict] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        model.save(f, extra)


def load_model(path):
    with open(path, encoding="utf-8") as f:
        tensors, meta = nn.load_checkpoint(f)
    if meta.get("variant") == DS:
        return MarginClassifier.from_checkpoint(tensors, meta)
    return RelationModel.from_checkpoint(tensors, meta)
