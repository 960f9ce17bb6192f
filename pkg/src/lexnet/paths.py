"""Dependency paths between term pairs, and the on-disk path index."""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, TextIO, Tuple
from urllib.parse import unquote

from .conllu import Sentence, lemma_occurrences

log = logging.getLogger(__name__)

UP, ROOT, DOWN = "UP", "ROOT", "DOWN"
DIRECTIONS = (UP, ROOT, DOWN)

INDEX_HEADER = "#relpath-index v1"


def _escape(component: str) -> str:
    out = []
    for ch in component:
        if ch in "%/" or ch.isspace():
            out.append("".join(f"%{b:02X}" for b in ch.encode("utf-8")))
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True, order=True)
class PathEdge:
    lemma: str
    pos: str
    dep: str
    direction: str

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"bad direction {self.direction!r}")
        if not (self.lemma and self.pos and self.dep):
            raise ValueError(f"empty component in edge {self!r}")

    def __str__(self):
        return "/".join(_escape(c) for c in (self.lemma, self.pos, self.dep, self.direction))

    @classmethod
    def parse(cls, text: str) -> "PathEdge":
        parts = text.split("/")
        if len(parts) != 4:
            raise ValueError(f"edge {text!r} does not have 4 components")
        return cls(*(unquote(p) for p in parts))


@dataclass(frozen=True)
class DependencyPath:
    edges: Tuple[PathEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.edges) < 2:
            raise ValueError("a path needs at least two nodes")
        if self.edges[0].lemma != "X" or self.edges[-1].lemma != "Y":
            raise ValueError(f"path must run from X to Y: {self}")
        seen = [DIRECTIONS.index(e.direction) for e in self.edges]
        if seen != sorted(seen) or seen.count(1) > 1:
            raise ValueError(f"directions must read UP* ROOT? DOWN*: {self}")

    def __str__(self):
        return " ".join(str(e) for e in self.edges)

    def __len__(self):
        return len(self.edges)

    def __lt__(self, other):
        return str(self) < str(other)

    @classmethod
    def parse(cls, text: str) -> "DependencyPath":
        return cls(tuple(PathEdge.parse(t) for t in text.split(" ")))


def tree_path(sentence: Sentence, x_idx: int, y_idx: int, max_path_len: int = 4) -> Optional[List[int]]:
    """Node sequence from x_idx to y_idx through their lowest common ancestor.

    Returns None when the path has more than ``max_path_len`` arcs.
    """
    n = len(sentence)
    for i in (x_idx, y_idx):
        if not 1 <= i <= n:
            raise IndexError(f"token index {i} out of range 1..{n}")
    if x_idx == y_idx:
        raise ValueError("x and y must be different tokens")

    def chain(i):
        out = []
        while i:
            out.append(i)
            i = sentence.tokens[i - 1].head
        return out

    up = chain(x_idx)
    up_pos = {node: k for k, node in enumerate(up)}
    down = []
    for node in chain(y_idx):
        if node in up_pos:
            nodes = up[:up_pos[node] + 1] + down[::-1]
            break
        down.append(node)
    if len(nodes) - 1 > max_path_len:
        return None
    return nodes


def encode_path(sentence: Sentence, node_path: List[int], x_idx: int, y_idx: int) -> DependencyPath:
    # The apex is the first node whose successor is not its head.
    apex = len(node_path) - 1
    for k in range(len(node_path) - 1):
        if sentence.tokens[node_path[k] - 1].head != node_path[k + 1]:
            apex = k
            break
    edges = []
    for k, i in enumerate(node_path):
        tok = sentence.tokens[i - 1]
        lemma = "X" if i == x_idx else "Y" if i == y_idx else tok.lemma
        direction = UP if k < apex else ROOT if k == apex else DOWN
        edges.append(PathEdge(lemma, tok.pos, tok.deprel, direction))
    return DependencyPath(tuple(edges))


class PathIndex:
    """Multiset of dependency paths per (x, y) term pair."""

    def __init__(self, entries: Optional[Dict[Tuple[str, str], Dict[DependencyPath, int]]] = None):
        self._entries: Dict[Tuple[str, str], Dict[DependencyPath, int]] = {}
        for pair, paths in (entries or {}).items():
            for path, count in paths.items():
                self.add(pair[0], pair[1], path, count)

    def add(self, x: str, y: str, path: DependencyPath, count: int = 1) -> None:
        if count < 1:
            raise ValueError(f"path counts must be positive, got {count}")
        bucket = self._entries.setdefault((x.lower(), y.lower()), {})
        bucket[path] = bucket.get(path, 0) + count

    def paths(self, x: str, y: str) -> Dict[DependencyPath, int]:
        return dict(self._entries.get((x.lower(), y.lower()), {}))

    def pairs(self) -> List[Tuple[str, str]]:
        return sorted(self._entries)

    def items(self):
        for pair in sorted(self._entries):
            paths = self._entries[pair]
            yield pair, sorted(paths.items(), key=lambda kv: str(kv[0]))

    def total_paths(self) -> int:
        return sum(len(p) for p in self._entries.values())

    def __contains__(self, pair):
        return (pair[0].lower(), pair[1].lower()) in self._entries

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return isinstance(other, PathIndex) and self._entries == other._entries

    def __repr__(self):
        return f"PathIndex({len(self)} pairs, {self.total_paths()} paths)"


def merge_indexes(a: PathIndex, b: PathIndex) -> PathIndex:
    out = PathIndex()
    for index in (a, b):
        for (x, y), paths in index.items():
            for path, count in paths:
                out.add(x, y, path, count)
    return out


def prune_index(index: PathIndex, min_count: int = 1, max_paths_per_pair: Optional[int] = None) -> PathIndex:
    """Drop rare paths and keep at most the N most frequent paths of each pair."""
    out = PathIndex()
    for (x, y), paths in index.items():
        kept = [(p, c) for p, c in paths if c >= min_count]
        if max_paths_per_pair is not None:
            kept = sorted(kept, key=lambda pc: (-pc[1], str(pc[0])))[:max_paths_per_pair]
        for p, c in kept:
            out.add(x, y, p, c)
    return out


@dataclass
class ExtractionConfig:
    max_path_len: int = 4
    max_sentence_len: int = 80
    max_paths_per_pair: Optional[int] = None
    min_path_count: int = 1


@dataclass
class ExtractionStats:
    sentences: int = 0
    skipped_long: int = 0
    cooccurrences: int = 0
    too_long_paths: int = 0

    def update(self, other: "ExtractionStats") -> None:
        self.sentences += other.sentences
        self.skipped_long += other.skipped_long
        self.cooccurrences += other.cooccurrences
        self.too_long_paths += other.too_long_paths


def extract_pair_paths(corpus: Iterable[Sentence], pairs: Iterable[Tuple[str, str]],
                       cfg: Optional[ExtractionConfig] = None,
                       stats: Optional[ExtractionStats] = None) -> PathIndex:
    """Index every dependency path linking an occurrence of x to one of y.

    All occurrence combinations in a sentence are counted. Pruning in ``cfg``
    (min count, per-pair cap) is applied after the whole corpus is read, so
    extracting shards without pruning and merging gives the same index as
    one pass.
    """
    cfg = cfg or ExtractionConfig()
    stats = stats if stats is not None else ExtractionStats()
    partners: Dict[str, Set[str]] = defaultdict(set)
    by_first: Dict[str, Set[str]] = defaultdict(set)
    for x, y in pairs:
        x, y = x.lower(), y.lower()
        partners[x].add(y)
        for term in (x, y):
            by_first[term.split()[0]].add(term)

    index = PathIndex()
    for sentence in corpus:
        stats.sentences += 1
        if len(sentence) > cfg.max_sentence_len:
            stats.skipped_long += 1
            continue
        candidates = set()
        for lemma in set(sentence.lemmas):
            candidates |= by_first.get(lemma, set())
        if len(candidates) < 2:
            continue
        where = {t: lemma_occurrences(sentence, t) for t in candidates}
        where = {t: occ for t, occ in where.items() if occ}
        for x in sorted(where):
            for y in sorted(partners.get(x, ())):
                if y not in where:
                    continue
                for xi in where[x]:
                    for yi in where[y]:
                        if xi == yi:
                            continue
                        stats.cooccurrences += 1
                        nodes = tree_path(sentence, xi, yi, cfg.max_path_len)
                        if nodes is None:
                            stats.too_long_paths += 1
                            continue
                        index.add(x, y, encode_path(sentence, nodes, xi, yi))
    if cfg.min_path_count > 1 or cfg.max_paths_per_pair is not None:
        index = prune_index(index, cfg.min_path_count, cfg.max_paths_per_pair)
    return index


class IndexFormatError(ValueError):
    pass


def save_index(index: PathIndex, sink: TextIO) -> None:
    sink.write(INDEX_HEADER + "\n")
    for (x, y), paths in index.items():
        for path, count in paths:
            sink.write(f"{x}\t{y}\t{path}\t{count}\n")


def load_index(source: Iterable[str]) -> PathIndex:
    lines = iter(source)
    header = next(lines, "").rstrip("\r\n")
    if header != INDEX_HEADER:
        raise IndexFormatError(f"line 1: expected header {INDEX_HEADER!r}, found {header!r}")
    index = PathIndex()
    for line_no, line in enumerate(lines, start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise IndexFormatError(f"line {line_no}: expected 4 tab-separated fields, found {len(cols)}")
        x, y, path_str, count = cols
        try:
            index.add(x, y, DependencyPath.parse(path_str), int(count))
        except ValueError as e:
            raise IndexFormatError(f"line {line_no}: {e}") from None
    return index


def read_index(path) -> PathIndex:
    with open(path, encoding="utf-8") as f:
        return load_index(f)


def write_index(index: PathIndex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        save_index(index, f)
