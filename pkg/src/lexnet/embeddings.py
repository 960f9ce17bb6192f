"""Pretrained word vectors in whitespace-separated text format."""

from typing import Dict, Iterable, Optional, Tuple

import numpy as np


class EmbeddingFormatError(ValueError):
    pass


class EmbeddingTable:
    """Frozen word vectors with a mean-vector fallback for unknown words."""

    def __init__(self, words, matrix: np.ndarray, unk: Optional[np.ndarray] = None):
        self.matrix = np.asarray(matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("embedding matrix must be 2-d")
        self.words = list(words)
        if len(self.words) != self.matrix.shape[0]:
            raise ValueError("one row per word required")
        self.vocab: Dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if unk is None:
            unk = self.matrix.mean(axis=0) if len(self.words) else np.zeros(self.dim)
        self.unk = np.asarray(unk, dtype=np.float64)
        if self.unk.shape != (self.dim,):
            raise ValueError(f"unk vector must have length {self.dim}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word.lower() in self.vocab

    def vector(self, word: str) -> Optional[np.ndarray]:
        i = self.vocab.get(word.lower())
        return None if i is None else self.matrix[i]

    @classmethod
    def from_dict(cls, vectors: Dict[str, np.ndarray]) -> "EmbeddingTable":
        words = list(vectors)
        return cls(words, np.array([vectors[w] for w in words], dtype=np.float64))


def load_text_embeddings(stream: Iterable[str], expected_dim: Optional[int] = None) -> EmbeddingTable:
    """Read ``word v1 ... vd`` lines; an optional ``count dim`` header is skipped.

    Duplicate words keep their first vector.
    """
    words, rows = [], []
    seen = set()
    dim = expected_dim
    for line_no, line in enumerate(stream, start=1):
        parts = line.split()
        if not parts:
            continue
        if line_no == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            if expected_dim is not None and int(parts[1]) != expected_dim:
                raise EmbeddingFormatError(
                    f"line 1: header declares dim {parts[1]}, expected {expected_dim}")
            continue
        word, values = parts[0].lower(), parts[1:]
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise EmbeddingFormatError(f"line {line_no}: no vector values")
        if len(values) != dim:
            raise EmbeddingFormatError(f"line {line_no}: vector has {len(values)} values, expected {dim}")
        if word in seen:
            continue
        try:
            rows.append([float(v) for v in values])
        except ValueError:
            raise EmbeddingFormatError(f"line {line_no}: non-numeric vector value") from None
        seen.add(word)
        words.append(word)
    if dim is None:
        raise EmbeddingFormatError("no vectors found")
    return EmbeddingTable(words, np.array(rows, dtype=np.float64).reshape(len(rows), dim))


def read_embeddings(path, expected_dim: Optional[int] = None) -> EmbeddingTable:
    with open(path, encoding="utf-8") as f:
        return load_text_embeddings(f, expected_dim)


def lookup(table: EmbeddingTable, term: str) -> Tuple[np.ndarray, bool]:
    """Vector for ``term`` and whether it was out of vocabulary.

    A multiword term found as a whole is returned directly; otherwise it is
    the mean of its word vectors, flagged OOV if any word was missing.
    """
    vec = table.vector(term)
    if vec is not None:
        return vec.copy(), False
    words = term.lower().split()
    if len(words) < 2:
        return table.unk.copy(), True
    parts = [lookup(table, w) for w in words]
    return np.mean([v for v, _ in parts], axis=0), any(oov for _, oov in parts)
