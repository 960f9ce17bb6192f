"""Labeled term-pair datasets: loading, relation filtering, splits, switched pairs."""

import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, TextIO, Tuple

from .nn import rng_for

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")


class LabeledPair(NamedTuple):
    x: str
    y: str
    relation: str


class DatasetError(ValueError):
    pass


# Surface relation names of the published benchmark files, mapped to one
# lowercase inventory.
ALIASES: Dict[str, Dict[str, str]] = {
    "K&H+N": {"hypo": "hypernym", "mero": "meronym", "sibl": "co-hyponym", "false": "random"},
    "BLESS": {"hyper": "hypernym", "mero": "meronym", "coord": "co-hyponym", "event": "event",
              "attri": "attribute", "random": "random"},
    "ROOT09": {"hyper": "hypernym", "coord": "co-hyponym", "random": "random"},
    "EVALution": {"isa": "hypernym", "partof": "meronym", "hasproperty": "attribute",
                  "synonym": "synonym", "antonym": "antonym", "hasa": "holonym",
                  "madeof": "substance_meronym", "entails": "entails", "memberof": "memberof"},
}

INVENTORIES: Dict[str, Tuple[str, ...]] = {
    "K&H+N": ("hypernym", "meronym", "co-hyponym", "random"),
    "BLESS": ("hypernym", "meronym", "co-hyponym", "event", "attribute", "random"),
    "ROOT09": ("hypernym", "co-hyponym", "random"),
    "EVALution": ("hypernym", "meronym", "attribute", "synonym", "antonym", "holonym", "substance_meronym"),
}

DROPPED: Dict[str, Tuple[str, ...]] = {"EVALution": ("entails", "memberof")}

DIR_NAMES = {
    "K&H+N": ("K&H+N", "KHN", "kh+n", "khn"),
    "BLESS": ("BLESS", "bless"),
    "ROOT09": ("ROOT09", "root09"),
    "EVALution": ("EVALution", "evalution", "EVALUTION"),
}


@dataclass
class Dataset:
    name: str
    inventory: List[str]
    train: List[LabeledPair] = field(default_factory=list)
    val: List[LabeledPair] = field(default_factory=list)
    test: List[LabeledPair] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def split(self, name: str) -> List[LabeledPair]:
        if name not in SPLITS:
            raise KeyError(f"unknown split {name!r}")
        return getattr(self, name)

    def all_pairs(self) -> List[LabeledPair]:
        return self.train + self.val + self.test

    def __len__(self):
        return len(self.train) + len(self.val) + len(self.test)

    def validate(self):
        keys = [{(p.x, p.y) for p in self.split(s)} for s in SPLITS]
        for i in range(3):
            for j in range(i + 1, 3):
                overlap = keys[i] & keys[j]
                if overlap:
                    raise DatasetError(f"{SPLITS[i]} and {SPLITS[j]} share pairs, e.g. {sorted(overlap)[0]}")
        train_rels = {p.relation for p in self.train}
        for s in ("val", "test"):
            missing = sorted({p.relation for p in self.split(s)} - train_rels)
            if missing:
                raise DatasetError(f"relations in {s} but not in train: {missing}")
        unknown = sorted({p.relation for p in self.all_pairs()} - set(self.inventory))
        if unknown:
            raise DatasetError(f"relations outside the inventory: {unknown}")


def normalize_relation(rel: str, aliases: Optional[Dict[str, str]] = None) -> str:
    key = rel.strip().lower()
    if aliases:
        key = aliases.get(key, key)
    return key


def _read_rows(source: Iterable[str], schema, aliases) -> Tuple[List[LabeledPair], List[Optional[str]]]:
    pairs, splits = [], []
    index: Dict[Tuple[str, str], int] = {}
    offenders = Counter()
    duplicates = 0
    for line_no, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise DatasetError(f"line {line_no}: expected x<TAB>y<TAB>relation[<TAB>split], found {len(cols)} columns")
        x, y = cols[0].strip().lower(), cols[1].strip().lower()
        rel = normalize_relation(cols[2], aliases)
        if not (x and y and rel):
            raise DatasetError(f"line {line_no}: empty field")
        split = cols[3].strip() if len(cols) == 4 else None
        if split is not None and split not in SPLITS:
            raise DatasetError(f"line {line_no}: unknown split {split!r}")
        if schema is not None and rel not in schema:
            offenders[rel] += 1
            continue
        prev = index.get((x, y))
        if prev is not None:
            if pairs[prev].relation != rel:
                raise DatasetError(f"line {line_no}: ({x}, {y}) labeled both {pairs[prev].relation!r} and {rel!r}")
            duplicates += 1
            continue
        index[(x, y)] = len(pairs)
        pairs.append(LabeledPair(x, y, rel))
        splits.append(split)
    if offenders:
        raise DatasetError("relations outside the expected inventory: "
                           + ", ".join(f"{r} ({n})" for r, n in sorted(offenders.items())))
    if duplicates:
        log.warning("dropped %d duplicate pairs", duplicates)
    return pairs, splits


def load_dataset(source: Iterable[str], schema: Optional[Sequence[str]] = None,
                 aliases: Optional[Dict[str, str]] = None, name: str = ""):
    """Parse ``x<TAB>y<TAB>relation[<TAB>split]`` lines.

    Returns a Dataset when every line carries a split column, otherwise the
    plain list of LabeledPair. With ``schema`` given, relations outside it
    are an error.
    """
    pairs, splits = _read_rows(source, schema, aliases)
    if pairs and all(s is not None for s in splits):
        by_split = {s: [p for p, t in zip(pairs, splits) if t == s] for s in SPLITS}
        inventory = list(schema) if schema is not None else list(dict.fromkeys(p.relation for p in pairs))
        return Dataset(name, inventory, **by_split)
    if any(s is not None for s in splits):
        raise DatasetError("split column must be present on every line or on none")
    return pairs


def read_dataset(path, schema=None, aliases=None, name=None):
    with open(path, encoding="utf-8") as f:
        return load_dataset(f, schema, aliases, name or Path(path).stem)


def save_dataset(ds: Dataset, sink: TextIO) -> None:
    for s in SPLITS:
        for p in ds.split(s):
            sink.write(f"{p.x}\t{p.y}\t{p.relation}\t{s}\n")


def filter_relations(pairs: Sequence[LabeledPair], drop: Iterable[str]) -> Tuple[List[LabeledPair], Dict[str, int]]:
    """Remove pairs labeled with any relation in ``drop``; also return removed counts."""
    drop = set(drop)
    removed = {r: 0 for r in sorted(drop)}
    kept = []
    for p in pairs:
        if p.relation in drop:
            removed[p.relation] += 1
        else:
            kept.append(p)
    return kept, removed


def _split_sizes(n: int, ratios: Sequence[float]) -> List[int]:
    exact = [n * r for r in ratios]
    sizes = [int(e) for e in exact]
    by_remainder = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in by_remainder[:n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def make_splits(pairs: Sequence[LabeledPair], ratios: Sequence[float] = (0.7, 0.05, 0.25),
                seed: int = 0, name: str = "", inventory: Optional[Sequence[str]] = None) -> Dataset:
    """Stratified train/val/test split, deterministic in ``seed``."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be three positive numbers summing to 1, got {ratios}")
    if inventory is None:
        inventory = list(dict.fromkeys(p.relation for p in pairs))
    by_rel: Dict[str, List[LabeledPair]] = {}
    for p in pairs:
        by_rel.setdefault(p.relation, []).append(p)
    rng = rng_for(seed, "splits")
    out = {s: [] for s in SPLITS}
    for rel in inventory:
        group = by_rel.get(rel, [])
        if not group:
            continue
        if len(group) < len(SPLITS):
            raise DatasetError(f"relation {rel!r} has {len(group)} pairs, fewer than the {len(SPLITS)} splits")
        order = rng.permutation(len(group))
        start = 0
        for s, size in zip(SPLITS, _split_sizes(len(group), ratios)):
            out[s].extend(group[i] for i in order[start:start + size])
            start += size
    return Dataset(name, list(inventory), **out)


def generate_switched_pairs(pairs: Sequence[LabeledPair], seed: int = 0,
                            existing: Optional[Iterable] = None,
                            hypernym: str = "hypernym", label: str = "random") -> List[LabeledPair]:
    """Cross hyponyms with mismatched hypernyms to make negative pairs.

    Hypernym pairs are matched at random (seeded); each matched couple
    (x1, y1), (x2, y2) with y1 != y2 yields (x1, y2) and (x2, y1). Pairs
    already present in ``existing`` (default: the input) are never emitted.
    """
    hyp = list(dict.fromkeys(p for p in pairs if p.relation == hypernym))
    if len({p.y for p in hyp}) < 2:
        return []
    taken = {(p[0], p[1]) for p in (existing if existing is not None else pairs)}
    rng = rng_for(seed, "switched")
    pending: List[LabeledPair] = []
    out: List[LabeledPair] = []
    for k in rng.permutation(len(hyp)):
        p = hyp[k]
        for j, q in enumerate(pending):
            if q.y != p.y and q.x != p.x:
                del pending[j]
                for x, y in ((q.x, p.y), (p.x, q.y)):
                    if x != y and (x, y) not in taken:
                        taken.add((x, y))
                        out.append(LabeledPair(x, y, label))
                break
        else:
            pending.append(p)
    return out


def find_benchmark(name: str, root=None) -> Optional[Path]:
    """Directory holding train/val/test.tsv for a named benchmark, if present."""
    root = Path(root or os.environ.get("LEXNET_DATASETS", "datasets"))
    for d in DIR_NAMES[name]:
        cand = root / d
        if all((cand / f"{s}.tsv").is_file() for s in SPLITS):
            return cand
    return None


def load_benchmark(name: str, root=None) -> Dataset:
    """Load one of the four published benchmarks from its split files."""
    if name not in INVENTORIES:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(INVENTORIES)}")
    directory = find_benchmark(name, root)
    if directory is None:
        raise FileNotFoundError(f"benchmark {name} not found under {root or os.environ.get('LEXNET_DATASETS', 'datasets')}")
    schema = INVENTORIES[name] + DROPPED.get(name, ())
    splits = {}
    for s in SPLITS:
        with open(directory / f"{s}.tsv", encoding="utf-8") as f:
            pairs, _ = _read_rows(f, schema, ALIASES[name])
        splits[s], removed = filter_relations(pairs, DROPPED.get(name, ()))
        if any(removed.values()):
            log.info("%s/%s: dropped %s", name, s, removed)
    return Dataset(name, list(INVENTORIES[name]), **splits)
