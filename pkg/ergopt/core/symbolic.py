"""Subshifts of finite type, words, cycles and Birkhoff sums.

An SFT is a directed graph on its alphabet: symbol a may be followed by b iff
(a, b) is allowed. Every vertex carries a label, the block of base symbols it
stands for (length 1 for a base SFT, length k for a k-block recoding), so
paths in any presentation can be projected back to base words.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ergopt.config import Settings, get_settings
from ergopt.core.errors import (
    BudgetExceeded,
    EmptyAlphabet,
    InvalidWord,
    StrandedSymbol,
    SystemSpecError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Block = Tuple[int, ...]


@dataclass(frozen=True)
class SFT:
    """A subshift of finite type given by its allowed transitions."""

    alphabet_size: int
    allowed: FrozenSet[Edge]
    mixing_time: Optional[int] = None
    labels: Tuple[Block, ...] = ()
    base: Optional["SFT"] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.labels:
            object.__setattr__(self, "labels", tuple((s,) for s in range(self.alphabet_size)))

    @property
    def is_mixing(self) -> bool:
        return self.mixing_time is not None

    @property
    def root(self) -> "SFT":
        """The base SFT whose symbols the labels are written in."""
        return self.base if self.base is not None else self

    @property
    def block_length(self) -> int:
        return len(self.labels[0])

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.allowed))

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def successors(self) -> Tuple[Tuple[int, ...], ...]:
        out: List[List[int]] = [[] for _ in range(self.alphabet_size)]
        for a, b in self.edges:
            out[a].append(b)
        return tuple(tuple(s) for s in out)

    @cached_property
    def predecessors(self) -> Tuple[Tuple[int, ...], ...]:
        inc: List[List[int]] = [[] for _ in range(self.alphabet_size)]
        for a, b in self.edges:
            inc[b].append(a)
        return tuple(tuple(sorted(p)) for p in inc)

    @cached_property
    def vertex_of_label(self) -> Dict[Block, int]:
        return {label: v for v, label in enumerate(self.labels)}

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.alphabet_size, self.alphabet_size), dtype=np.int64)
        for a, b in self.allowed:
            A[a, b] = 1
        return A

    def edge_block(self, edge: Edge) -> Block:
        """Base-symbol block spanned by an edge (label of source plus one symbol)."""
        u, v = edge
        return self.labels[u] + (self.labels[v][-1],)

    def path_word(self, path: Sequence[int]) -> Block:
        """Base word traced by a vertex path."""
        if not path:
            return ()
        return self.labels[path[0]] + tuple(self.labels[v][-1] for v in path[1:])

    def is_path(self, path: Sequence[int]) -> bool:
        return all((a, b) in self.allowed for a, b in zip(path, path[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alphabet_size": self.alphabet_size,
            "edges": [list(e) for e in self.edges],
            "mixing_time": self.mixing_time,
            "block_length": self.block_length,
        }


@dataclass(frozen=True)
class Word:
    """A finite word over the alphabet of an SFT."""

    symbols: Block

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def block_at(self, i: int, k: int) -> Block:
        """The length-k block starting at i under periodic extension."""
        n = len(self.symbols)
        if i + k <= n:
            return self.symbols[i:i + k]
        return tuple(self.symbols[(i + j) % n] for j in range(k))


@dataclass(frozen=True)
class Cycle:
    """A closed path, stored in its lexicographically least rotation."""

    symbols: Block

    @classmethod
    def of(cls, symbols: Iterable[int]) -> "Cycle":
        seq = tuple(symbols)
        if not seq:
            raise InvalidWord("a cycle must be nonempty")
        rotations = [seq[i:] + seq[:i] for i in range(len(seq))]
        return cls(min(rotations))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def is_simple(self) -> bool:
        return len(set(self.symbols)) == len(self.symbols)

    @property
    def edges(self) -> Tuple[Edge, ...]:
        s = self.symbols
        return tuple((s[i], s[(i + 1) % len(s)]) for i in range(len(s)))

    def is_closed_in(self, sft: SFT) -> bool:
        return all(e in sft.allowed for e in self.edges)

    def as_word(self, repeats: int = 1) -> Word:
        return Word(self.symbols * repeats)

    def project(self, sft: SFT) -> "Cycle":
        """Base-symbol cycle traced by this vertex cycle of sft."""
        return Cycle.of(sft.labels[v][0] for v in self.symbols)

    def to_list(self) -> List[int]:
        return list(self.symbols)


def primitivity_exponent(adjacency: np.ndarray) -> Optional[int]:
    """Least p with all entries of the Boolean p-th power positive, or None.

    Wielandt's bound (n-1)^2 + 1 caps the search for primitive matrices.
    """
    n = adjacency.shape[0]
    A = (adjacency > 0).astype(np.int64)
    P = A.copy()
    for p in range(1, (n - 1) ** 2 + 2):
        if P.all():
            return p
        P = ((P @ A) > 0).astype(np.int64)
    return None


def validate_sft(
    alphabet_size: int,
    allowed: Iterable[Edge],
    labels: Sequence[Block] = (),
    base: Optional[SFT] = None,
) -> SFT:
    """Build an SFT, rejecting stranded symbols and computing its mixing time."""
    pairs = frozenset((int(a), int(b)) for a, b in allowed)
    if alphabet_size < 1 or not pairs:
        raise EmptyAlphabet()
    for a, b in pairs:
        if not (0 <= a < alphabet_size and 0 <= b < alphabet_size):
            raise SystemSpecError(f"transition {a}->{b} outside alphabet of size {alphabet_size}")

    has_out = {a for a, _ in pairs}
    has_in = {b for _, b in pairs}
    for s in range(alphabet_size):
        if s not in has_out:
            raise StrandedSymbol(s, "outgoing")
        if s not in has_in:
            raise StrandedSymbol(s, "incoming")

    sft = SFT(alphabet_size, pairs, None, tuple(labels), base)
    mixing_time = primitivity_exponent(sft.adjacency_matrix())
    if mixing_time is None:
        logger.info(f"SFT on {alphabet_size} symbols is not mixing")
    return SFT(alphabet_size, pairs, mixing_time, sft.labels, base)


def full_shift(n: int) -> SFT:
    return validate_sft(n, [(a, b) for a in range(n) for b in range(n)])


def golden_mean_shift() -> SFT:
    """Two symbols, the block 11 forbidden."""
    return validate_sft(2, [(0, 0), (0, 1), (1, 0)])


def make_word(sft: SFT, symbols: Iterable[int]) -> Word:
    """Word over the base alphabet of sft, checked for allowed transitions."""
    root = sft.root
    seq = tuple(int(s) for s in symbols)
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        if (a, b) not in root.allowed:
            raise InvalidWord(f"transition {a}->{b} at position {i} is not allowed", position=i)
    return Word(seq)


def allowed_blocks(sft: SFT, k: int) -> List[Block]:
    """All vertex paths with k vertices, in lexicographic order."""
    if k < 1:
        raise ValueError("block length must be at least 1")
    blocks: List[Block] = [(s,) for s in range(sft.alphabet_size)]
    for _ in range(k - 1):
        blocks = [b + (s,) for b in blocks for s in sft.successors[b[-1]]]
    return sorted(blocks)


@dataclass(frozen=True)
class BlockRecoding:
    """Higher-block presentation of an SFT and the projection back to it."""

    source: SFT
    k: int
    sft: SFT
    blocks: Tuple[Block, ...]
    projection: Tuple[int, ...]

    def lift_path(self, path: Sequence[int]) -> Tuple[int, ...]:
        """Recoded vertex path of a source path with at least k vertices."""
        if len(path) < self.k:
            raise InvalidWord(f"path of length {len(path)} shorter than block length {self.k}")
        index = {b: i for i, b in enumerate(self.blocks)}
        return tuple(index[tuple(path[i:i + self.k])] for i in range(len(path) - self.k + 1))

    def project(self, path: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.projection[v] for v in path)


def recode_k_blocks(sft: SFT, k: int) -> BlockRecoding:
    """Vertices become allowed k-blocks, edges allowed (k+1)-blocks."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return BlockRecoding(sft, 1, sft, tuple((v,) for v in range(sft.alphabet_size)),
                             tuple(range(sft.alphabet_size)))

    blocks = tuple(allowed_blocks(sft, k))
    index = {b: i for i, b in enumerate(blocks)}
    edges = [
        (index[b], index[b[1:] + (s,)])
        for b in blocks
        for s in sft.successors[b[-1]]
    ]
    labels = [sft.path_word(b) for b in blocks]
    recoded = validate_sft(len(blocks), edges, labels=labels, base=sft.root)
    logger.debug(f"recoded {sft.alphabet_size}-vertex SFT to {len(blocks)} {k}-blocks, {len(edges)} edges")
    return BlockRecoding(sft, k, recoded, blocks, tuple(b[0] for b in blocks))


def enumerate_simple_cycles(
    sft: SFT, max_len: int, settings: Optional[Settings] = None
) -> List[Cycle]:
    """All simple cycles of length <= max_len, canonical rotation, sorted by (length, symbols)."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    cap = (settings or get_settings()).budgets.cycle_cap
    found: List[Cycle] = []
    succ = sft.successors

    def extend(start: int, path: List[int], on_path: set) -> None:
        for w in succ[path[-1]]:
            if w == start:
                # start is the least vertex on the path, so this is the canonical rotation
                found.append(Cycle(tuple(path)))
                if len(found) > cap:
                    raise BudgetExceeded(f"more than {cap} simple cycles", cap=cap)
            elif w > start and w not in on_path and len(path) < max_len:
                path.append(w)
                on_path.add(w)
                extend(start, path, on_path)
                on_path.discard(w)
                path.pop()

    for start in range(sft.alphabet_size):
        extend(start, [start], {start})

    return sorted(found, key=lambda c: (len(c), c.symbols))


def birkhoff_sum(potential: Any, word: Word) -> Any:
    """f_n(x) for n = len(word), with the word extended periodically."""
    return potential.birkhoff_sum(word)


def shortest_connector(sft: SFT, a: int, b: int) -> Tuple[int, ...]:
    """Shortest symbols c with a, c..., b an allowed word (empty if a->b allowed)."""
    if (a, b) in sft.allowed:
        return ()
    parent: Dict[int, int] = {}
    queue = deque([a])
    seen = {a}
    while queue:
        v = queue.popleft()
        for w in sft.successors[v]:
            if w == b:
                path = []
                while v != a:
                    path.append(v)
                    v = parent[v]
                return tuple(reversed(path))
            if w not in seen:
                seen.add(w)
                parent[w] = v
                queue.append(w)
    raise InvalidWord(f"symbol {b} is not reachable from {a}")
