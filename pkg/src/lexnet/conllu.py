"""Reading dependency-parsed corpora in CoNLL-U format."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple

log = logging.getLogger(__name__)

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)


class ConllError(ValueError):
    """A sentence block that could not be turned into a Sentence."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise ValueError(f"token {self.index}: negative head {self.head}")
        if self.head == self.index:
            raise ValueError(f"token {self.index} is its own head")
        if not self.deprel:
            raise ValueError(f"token {self.index}: empty deprel")


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]
    id: Optional[str] = None
    _children: Tuple[Tuple[int, ...], ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        check_tree(self.tokens)
        children: List[List[int]] = [[] for _ in range(len(self.tokens) + 1)]
        for tok in self.tokens:
            children[tok.head].append(tok.index)
        object.__setattr__(self, "_children", tuple(tuple(c) for c in children))

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        """1-based token access."""
        if not 1 <= index <= len(self.tokens):
            raise IndexError(f"token index {index} out of range 1..{len(self.tokens)}")
        return self.tokens[index - 1]

    def children(self, index: int) -> Tuple[int, ...]:
        return self._children[index]

    @property
    def root(self) -> int:
        return self._children[0][0]

    @property
    def lemmas(self) -> List[str]:
        return [t.lemma for t in self.tokens]


def check_tree(tokens: Tuple[Token, ...]) -> None:
    """Raise ValueError unless the head arcs form a single rooted tree."""
    n = len(tokens)
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise ValueError(f"token ids must run 1..n in order; found {tok.index} at position {pos}")
        if tok.head > n:
            raise ValueError(f"token {tok.index}: head {tok.head} outside sentence of length {n}")
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise ValueError(f"expected exactly one root, found {len(roots)}")
    # Every token must reach the root without revisiting a node.
    state = [0] * (n + 1)  # 0 unvisited, 1 on stack, 2 known to reach root
    state[0] = 2
    for start in range(1, n + 1):
        trail = []
        node = start
        while state[node] == 0:
            state[node] = 1
            trail.append(node)
            node = tokens[node - 1].head
        if state[node] == 1:
            raise ValueError(f"cycle through token {node}")
        for t in trail:
            state[t] = 2


def _block_to_sentence(lines: List[Tuple[int, str]], sent_id: Optional[str]) -> Sentence:
    tokens = []
    for line_no, line in lines:
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConllError(line_no, f"expected 10 tab-separated columns, found {len(cols)}")
        if "-" in cols[ID] or "." in cols[ID]:
            continue
        try:
            index = int(cols[ID])
            head = int(cols[HEAD])
        except ValueError:
            raise ConllError(line_no, f"non-integer ID or HEAD: {cols[ID]!r}, {cols[HEAD]!r}") from None
        try:
            tokens.append(Token(index, cols[FORM], cols[LEMMA].lower(), cols[UPOS], head, cols[DEPREL]))
        except ValueError as e:
            raise ConllError(line_no, str(e)) from None
    if not tokens:
        raise ConllError(lines[0][0], "block contains no word tokens")
    try:
        return Sentence(tuple(tokens), sent_id)
    except ValueError as e:
        raise ConllError(lines[0][0], f"not a dependency tree: {e}") from None


def iter_conllu(stream: Iterable[str], errors: Optional[list] = None) -> Iterator[Sentence]:
    """Yield sentences from CoNLL-U text.

    Malformed blocks are skipped; each one produces a ConllError that is
    appended to ``errors`` when given and logged otherwise.
    """
    block: List[Tuple[int, str]] = []
    sent_id = None

    def flush():
        try:
            return _block_to_sentence(block, sent_id)
        except ConllError as e:
            if errors is not None:
                errors.append(e)
            else:
                log.warning("skipping sentence: %s", e)
            return None

    line_no = 0
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if block:
                sent = flush()
                if sent is not None:
                    yield sent
            block, sent_id = [], None
            continue
        if line.startswith("#"):
            if line.startswith("# sent_id") and "=" in line:
                sent_id = line.split("=", 1)[1].strip()
            continue
        block.append((line_no, line))
    if block:
        sent = flush()
        if sent is not None:
            yield sent


def parse_conllu(stream: Iterable[str], errors: Optional[list] = None) -> List[Sentence]:
    return list(iter_conllu(stream, errors))


def read_conllu(path, errors: Optional[list] = None) -> List[Sentence]:
    with open(path, encoding="utf-8") as f:
        return parse_conllu(f, errors)


def format_sentence(sentence: Sentence) -> str:
    """CoNLL-U block for ``sentence`` (unused columns are '_'), no trailing blank line."""
    lines = []
    if sentence.id is not None:
        lines.append(f"# sent_id = {sentence.id}")
    for t in sentence.tokens:
        lines.append("\t".join([str(t.index), t.surface, t.lemma, t.pos, "_", "_",
                                str(t.head), t.deprel, "_", "_"]))
    return "\n".join(lines) + "\n"


def write_conllu(sentences: Iterable[Sentence], out: TextIO) -> None:
    for s in sentences:
        out.write(format_sentence(s))
        out.write("\n")


def _depth(sentence: Sentence, index: int) -> int:
    d = 0
    while index:
        index = sentence.tokens[index - 1].head
        d += 1
    return d


def lemma_occurrences(sentence: Sentence, term: str) -> List[int]:
    """Token indices where ``term`` occurs, in ascending order.

    A multiword term (space-separated lemmas) matches contiguous tokens and
    resolves to the span token whose head lies outside the span. If several
    do, the one closest to the root wins.
    """
    words = term.lower().split()
    if not words:
        return []
    lemmas = sentence.lemmas
    if len(words) == 1:
        return [i for i, lemma in enumerate(lemmas, start=1) if lemma == words[0]]
    n = len(words)
    found = []
    for start in range(len(lemmas) - n + 1):
        if lemmas[start:start + n] != words:
            continue
        lo, hi = start + 1, start + n
        heads = [i for i in range(lo, hi + 1) if not lo <= sentence.tokens[i - 1].head <= hi]
        found.append(min(heads, key=lambda i: (_depth(sentence, i), i)))
    return sorted(set(found))
