"""Support-weighted P/R/F1, paired t-test, and lexical-memorization analyses."""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


@dataclass
class ConfusionMatrix:
    inventory: List[str]
    counts: np.ndarray  # rows gold, columns predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(gold: Sequence[str], pred: Sequence[str], inventory: Optional[Sequence[str]] = None) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} labels but pred has {len(pred)}")
    if inventory is None:
        inventory = sorted(set(gold) | set(pred))
    inventory = list(inventory)
    pos = {r: i for i, r in enumerate(inventory)}
    unknown = sorted((set(gold) | set(pred)) - set(pos))
    if unknown:
        raise ValueError(f"labels not in inventory: {unknown}")
    counts = np.zeros((len(inventory), len(inventory)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[pos[g], pos[p]] += 1
    return ConfusionMatrix(inventory, counts)


def _safe_div(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def per_relation_prf(cm: ConfusionMatrix) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-relation precision, recall, F1 and support (zero where undefined)."""
    counts = cm.counts
    tp = np.diag(counts).astype(np.float64)
    support = counts.sum(axis=1)
    precision = _safe_div(tp, counts.sum(axis=0))
    recall = _safe_div(tp, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return precision, recall, f1, support


def weighted_prf(cm: ConfusionMatrix) -> Tuple[float, float, float]:
    """Per-relation metrics averaged with weights support_r / N.

    The weighted F1 is not in general the harmonic mean of the weighted
    precision and recall.
    """
    n = cm.total
    if n == 0:
        raise ValueError("cannot average metrics over an empty confusion matrix")
    p, r, f, support = per_relation_prf(cm)
    w = support / n
    return float(w @ p), float(w @ r), float(w @ f)


@dataclass
class Metrics:
    inventory: List[str]
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted: Tuple[float, float, float]

    @classmethod
    def from_confusion(cls, cm: ConfusionMatrix) -> "Metrics":
        p, r, f, s = per_relation_prf(cm)
        return cls(list(cm.inventory), p, r, f, s, weighted_prf(cm))

    def to_dict(self) -> dict:
        return {
            "weighted": dict(zip(("precision", "recall", "f1"), self.weighted)),
            "relations": {
                rel: {"precision": float(self.precision[i]), "recall": float(self.recall[i]),
                      "f1": float(self.f1[i]), "support": int(self.support[i])}
                for i, rel in enumerate(self.inventory)
            },
        }


def evaluate_labels(gold, pred, inventory=None) -> Metrics:
    return Metrics.from_confusion(confusion(gold, pred, inventory))


# t distribution

def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta function (modified Lentz).
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = tiny if abs(d) < tiny else d
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def paired_ttest(scores_a: Sequence[float], scores_b: Sequence[float]) -> Tuple[float, float]:
    """Paired t statistic and two-sided p-value with n - 1 degrees of freedom."""
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be 1-d and of equal length")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = a - b
    if np.all(d == d[0]):
        raise ValueError("degenerate input: all paired differences are identical")
    sd = float(np.std(d, ddof=1))
    t = float(np.mean(d)) / (sd / math.sqrt(n))
    return t, t_two_sided_p(t, n - 1)


# Lexical memorization

def _majority(counter: Counter, order: Dict[str, int]) -> str:
    return min(counter, key=lambda r: (-counter[r], order.get(r, len(order))))


def frequent_labels(train, inventory: Optional[Sequence[str]] = None):
    """Most frequent train relation per term, as (by_y, by_x, global, order)."""
    if not train:
        raise ValueError("memorization baseline needs a non-empty train set")
    if inventory is None:
        inventory = list(dict.fromkeys(p[2] for p in train))
    order = {r: i for i, r in enumerate(inventory)}
    by_y, by_x = defaultdict(Counter), defaultdict(Counter)
    overall = Counter()
    for x, y, rel in (tuple(p[:3]) for p in train):
        by_y[y][rel] += 1
        by_x[x][rel] += 1
        overall[rel] += 1
    return ({t: _majority(c, order) for t, c in by_y.items()},
            {t: _majority(c, order) for t, c in by_x.items()},
            _majority(overall, order))


def memorization_baseline(train, test, inventory: Optional[Sequence[str]] = None) -> List[str]:
    """Label each test pair with the most frequent train relation of its y.

    Falls back to x's most frequent relation, then the global majority.
    Ties go to the relation listed first in ``inventory`` (default: order of
    first appearance in train).
    """
    by_y, by_x, overall = frequent_labels(train, inventory)
    out = []
    for pair in test:
        x, y = pair[0], pair[1]
        out.append(by_y.get(y) or by_x.get(x) or overall)
    return out


@dataclass
class DisagreementRow:
    x: str
    y: str
    gold: str
    pred_a: str
    pred_b: str
    y_frequent: Optional[str]

    @property
    def memorized(self) -> bool:
        return self.y_frequent is not None and self.pred_b == self.y_frequent


@dataclass
class DisagreementReport:
    """Pairs that model A gets right and model B gets wrong."""
    rows: List[DisagreementRow] = field(default_factory=list)
    total: int = 0

    def __len__(self):
        return len(self.rows)

    @property
    def by_relation(self) -> Dict[str, int]:
        return dict(sorted(Counter(r.gold for r in self.rows).items()))

    @property
    def memorized(self) -> int:
        return sum(r.memorized for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "evaluated": self.total,
            "pairs": len(self.rows),
            "memorized": self.memorized,
            "by_relation": self.by_relation,
            "rows": [{"x": r.x, "y": r.y, "gold": r.gold, "pred_a": r.pred_a, "pred_b": r.pred_b,
                      "y_frequent_label": r.y_frequent, "memorized": r.memorized} for r in self.rows],
        }

    def to_tsv(self) -> str:
        lines = ["x\ty\tgold\tpred_a\tpred_b\ty_frequent_label\tmemorized"]
        for r in self.rows:
            lines.append("\t".join([r.x, r.y, r.gold, r.pred_a, r.pred_b, r.y_frequent or "-",
                                    "yes" if r.memorized else "no"]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        n = len(self.rows)
        share = f" ({100.0 * self.memorized / n:.0f}%)" if n else ""
        head = [f"pairs right under A, wrong under B: {n} of {self.total}",
                f"B prediction equals y's most frequent train label: {self.memorized}/{n}{share}"]
        rel_rows = [[rel, str(c)] for rel, c in self.by_relation.items()]
        out = "\n".join(head) + "\n\n" + format_table(["gold", "#pairs"], rel_rows)
        if self.rows:
            out += "\n" + format_table(
                ["x", "y", "gold", "B prediction", "y frequent label"],
                [[r.x, r.y, r.gold, r.pred_b, r.y_frequent or "-"] for r in self.rows])
        return out


def disagreement_report(pred_a, pred_b, gold, pairs, train=None) -> DisagreementReport:
    if not (len(pred_a) == len(pred_b) == len(gold) == len(pairs)):
        raise ValueError("pred_a, pred_b, gold and pairs must be aligned")
    by_y = frequent_labels(train)[0] if train else {}
    report = DisagreementReport(total=len(gold))
    for a, b, g, pair in zip(pred_a, pred_b, gold, pairs):
        if a == g and b != g:
            report.rows.append(DisagreementRow(pair[0], pair[1], g, a, b, by_y.get(pair[1])))
    return report


# Reporting

def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    fmt = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines) + "\n"


def results_table(results: Dict[str, Metrics]) -> str:
    """Method rows with weighted P, R, F1 columns."""
    rows = [[method, *(f"{v:.3f}" for v in m.weighted)] for method, m in results.items()]
    return format_table(["method", "P", "R", "F1"], rows)


def results_tsv(results: Dict[str, Metrics]) -> str:
    lines = ["method\tP\tR\tF1"]
    for method, m in results.items():
        lines.append("\t".join([method, *(f"{v:.6f}" for v in m.weighted)]))
    return "\n".join(lines) + "\n"


def relation_table(m: Metrics) -> str:
    rows = [[rel, f"{m.precision[i]:.3f}", f"{m.recall[i]:.3f}", f"{m.f1[i]:.3f}", str(int(m.support[i]))]
            for i, rel in enumerate(m.inventory)]
    return format_table(["relation", "P", "R", "F1", "support"], rows)
