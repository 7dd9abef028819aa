"""Transition matrices, one-sided shifts of finite type and their points.

Symbols are dense integer indices ``0..n-1`` internally; user-facing labels
live on :class:`Sft`.  Words are tuples of indices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

Word = tuple  # tuple[int, ...]


class SftError(ValueError):
    """Base class for structured rejections of a transition matrix."""


class NotSquare(SftError):
    pass


class NotZeroOne(SftError):
    pass


class ZeroRowOrColumn(SftError):
    pass


class NotIrreducible(SftError):
    pass


class ConditionIFails(SftError):
    pass


@dataclass(frozen=True)
class TransitionMatrix:
    """Square matrix of nonnegative integers."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise NotSquare(f"matrix is not square: row lengths {[len(r) for r in rows]}")
        if any(v < 0 for r in rows for v in r):
            raise SftError("matrix has negative entries")

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def zero_one(self) -> bool:
        return all(v in (0, 1) for r in self.rows for v in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> TransitionMatrix:
        return TransitionMatrix(tuple(zip(*self.rows)))

    def permuted(self, perm: Sequence[int]) -> TransitionMatrix:
        """Return ``P M P^t`` where state ``i`` moves to position ``perm[i]``."""
        n = self.n
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        return TransitionMatrix(tuple(tuple(self.rows[inv[a]][inv[b]] for b in range(n)) for a in range(n)))

    def tolist(self) -> list:
        return [list(r) for r in self.rows]


def _strongly_connected(adj: Sequence[Sequence[int]]) -> bool:
    n = len(adj)
    if n == 0:
        return True
    radj = [[] for _ in range(n)]
    for a in range(n):
        for b in adj[a]:
            radj[b].append(a)
    for graph in (adj, radj):
        seen = {0}
        stack = [0]
        while stack:
            a = stack.pop()
            for b in graph[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        if len(seen) != n:
            return False
    return True


@dataclass(frozen=True, eq=False)
class Sft:
    """A validated one-sided topological Markov shift.

    Build instances with :func:`validate_sft`; the constructor itself does not
    check irreducibility or condition (I).
    """

    matrix: TransitionMatrix
    labels: tuple
    _succ: tuple = field(init=False, repr=False)
    _pred: tuple = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != self.matrix.n:
            raise SftError(f"{len(labels)} labels for a {self.matrix.n}-state matrix")
        if len(set(labels)) != len(labels):
            raise SftError("duplicate symbol labels")
        n = self.matrix.n
        succ = tuple(tuple(b for b in range(n) if self.matrix.rows[a][b]) for a in range(n))
        pred = tuple(tuple(a for a in range(n) if self.matrix.rows[a][b]) for b in range(n))
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __eq__(self, other):
        if not isinstance(other, Sft):
            return NotImplemented
        return self.matrix == other.matrix and self.labels == other.labels

    def __hash__(self):
        return hash((self.matrix, self.labels))

    @property
    def n(self) -> int:
        return self.matrix.n

    def successors(self, a: int) -> tuple:
        return self._succ[a]

    def predecessors(self, b: int) -> tuple:
        return self._pred[b]

    def allowed(self, a: int, b: int) -> bool:
        return self.matrix.rows[a][b] != 0

    def is_admissible(self, word: Sequence[int]) -> bool:
        if any(not 0 <= a < self.n for a in word):
            return False
        return all(self.allowed(word[i], word[i + 1]) for i in range(len(word) - 1))

    # label conversion
    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise SftError(f"unknown symbol {label!r}; alphabet is {list(self.labels)}") from None

    def encode(self, labels: Iterable) -> Word:
        return tuple(self.index(x) for x in labels)

    def decode(self, word: Sequence[int]) -> list:
        return [self.labels[a] for a in word]

    def spell(self, word: Sequence[int]) -> str:
        """Compact string form of a word (labels concatenated, or space-joined)."""
        if all(len(lab) == 1 for lab in self.labels):
            return "".join(self.labels[a] for a in word)
        return " ".join(self.labels[a] for a in word)

    def parse_word(self, text: str) -> Word:
        if isinstance(text, (list, tuple)):
            return self.encode(text)
        if all(len(lab) == 1 for lab in self.labels) and " " not in text:
            return self.encode(list(text))
        return self.encode(text.split())

    # words
    def words(self, k: int) -> list:
        return admissible_words(self, k)

    def extensions(self, word: Word, length: int) -> list:
        """All admissible words of the given length having ``word`` as prefix."""
        word = tuple(word)
        if len(word) >= length:
            return [word[:length]] if len(word) == length else []
        if not word:
            return admissible_words(self, length)
        out = [word]
        for _ in range(length - len(word)):
            out = [w + (b,) for w in out for b in self._succ[w[-1]]]
        return out

    def check_point(self, x: EpPoint) -> None:
        probe = x.transient + x.cycle + x.cycle
        if not self.is_admissible(probe):
            raise SftError(f"point {self.format_point(x)} is not admissible")

    def point(self, transient: Iterable, cycle: Iterable) -> EpPoint:
        x = EpPoint(self.encode(transient), self.encode(cycle))
        self.check_point(x)
        return x

    def format_point(self, x: EpPoint) -> str:
        return f"{self.spell(x.transient)}({self.spell(x.cycle)})^inf"


def validate_sft(m, labels: Sequence | None = None) -> Sft:
    """Validate a zero-one transition matrix and wrap it as an :class:`Sft`.

    Raises one of :class:`NotSquare`, :class:`NotZeroOne`,
    :class:`ZeroRowOrColumn`, :class:`NotIrreducible`,
    :class:`ConditionIFails`.
    """
    if not isinstance(m, TransitionMatrix):
        rows = [list(r) for r in m]
        if not rows or any(len(r) != len(rows) for r in rows):
            raise NotSquare("matrix is not square")
        m = TransitionMatrix(tuple(tuple(r) for r in rows))
    if not m.zero_one:
        raise NotZeroOne("shift spaces need a zero-one matrix")
    n = m.n
    for i in range(n):
        if not any(m.rows[i]):
            raise ZeroRowOrColumn(f"row {i} is zero")
        if not any(m.rows[a][i] for a in range(n)):
            raise ZeroRowOrColumn(f"column {i} is zero")
    adj = [[b for b in range(n) if m.rows[a][b]] for a in range(n)]
    if not _strongly_connected(adj):
        raise NotIrreducible("state graph is not strongly connected")
    # irreducible zero-one: condition (I) fails exactly for permutation matrices
    if all(sum(r) == 1 for r in m.rows):
        raise ConditionIFails("matrix is a permutation matrix")
    if labels is None:
        labels = [str(i + 1) for i in range(n)]
    return Sft(m, tuple(labels))


@lru_cache(maxsize=512)
def _words_cached(s: Sft, k: int) -> tuple:
    if k == 0:
        return ((),)
    if k == 1:
        return tuple((a,) for a in range(s.n))
    prev = _words_cached(s, k - 1)
    return tuple(w + (b,) for w in prev for b in s.successors(w[-1]))


def admissible_words(s: Sft, k: int) -> list:
    """Length-``k`` admissible words in lexicographic (alphabet index) order."""
    if k < 0:
        raise ValueError("word length must be nonnegative")
    return list(_words_cached(s, k))


@dataclass(frozen=True, eq=False)
class HigherBlockGraph:
    """Vertices ``B_D``, edges ``B_{D+1}``; edge ``u`` runs ``u[:-1] -> u[1:]``."""

    sft: Sft
    depth: int
    vertices: tuple
    edges: tuple
    index: dict

    def source(self, e: Word) -> int:
        return self.index[e[:-1]]

    def target(self, e: Word) -> int:
        return self.index[e[1:]]

    def adjacency(self) -> list:
        out = [[] for _ in self.vertices]
        for e in self.edges:
            out[self.source(e)].append((self.target(e), e))
        return out


def higher_block_graph(s: Sft, depth: int) -> HigherBlockGraph:
    if depth < 1:
        raise ValueError("higher block depth must be >= 1")
    vertices = tuple(admissible_words(s, depth))
    edges = tuple(admissible_words(s, depth + 1))
    index = {v: i for i, v in enumerate(vertices)}
    g = HigherBlockGraph(s, depth, vertices, edges, index)
    adj = [[index[e[1:]] for e in edges if e[:-1] == v] for v in vertices]
    assert _strongly_connected(adj), "higher block graph of an irreducible shift must be strongly connected"
    return g


def primitive_root(w: Word) -> Word:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@dataclass(frozen=True)
class EpPoint:
    """Eventually periodic point ``transient . cycle^inf`` in canonical form.

    Canonical form: the cycle is primitive and the transient is as short as
    possible, so two instances are equal iff the sequences are equal.
    """

    transient: tuple
    cycle: tuple

    def __post_init__(self):
        u = tuple(self.transient)
        w = primitive_root(tuple(self.cycle))
        if not w:
            raise ValueError("cycle must be nonempty")
        while u and u[-1] == w[-1]:
            u = u[:-1]
            w = (w[-1],) + w[:-1]
        object.__setattr__(self, "transient", u)
        object.__setattr__(self, "cycle", w)

    @property
    def preperiod(self) -> int:
        return len(self.transient)

    @property
    def period(self) -> int:
        return len(self.cycle)

    def __getitem__(self, i: int) -> int:
        u, w = self.transient, self.cycle
        if i < len(u):
            return u[i]
        return w[(i - len(u)) % len(w)]

    def prefix(self, n: int) -> Word:
        u, w = self.transient, self.cycle
        if n <= len(u):
            return u[:n]
        reps = (n - len(u)) // len(w) + 1
        return (u + w * reps)[:n]

    def shift(self, n: int = 1) -> EpPoint:
        return shift_ep(self, n)


def shift_ep(x: EpPoint, n: int) -> EpPoint:
    """``sigma^n(x)`` in canonical form."""
    if n < 0:
        raise ValueError("shift count must be nonnegative")
    u, w = x.transient, x.cycle
    if n <= len(u):
        return EpPoint(u[n:], w)
    r = (n - len(u)) % len(w)
    return EpPoint((), w[r:] + w[:r])


def ep_equal(x: EpPoint, y: EpPoint) -> bool:
    return x == y


def eventually_periodic_points(s: Sft, max_transient: int, max_cycle: int) -> list:
    """All distinct admissible points with canonical transient/cycle within the bounds."""
    seen = set()
    out = []
    cycles = []
    for p in range(1, max_cycle + 1):
        for w in admissible_words(s, p):
            if s.allowed(w[-1], w[0]) and primitive_root(w) == w:
                cycles.append(w)
    for t in range(max_transient + 1):
        for u in admissible_words(s, t):
            for w in cycles:
                if u and not s.allowed(u[-1], w[0]):
                    continue
                x = EpPoint(u, w)
                if len(x.transient) != t or x in seen:
                    continue
                seen.add(x)
                out.append(x)
    return out


def periodic_cycle_words(s: Sft, max_len: int) -> list:
    """Words ``w`` with ``w^inf`` admissible, ``1 <= |w| <= max_len``."""
    return [w for p in range(1, max_len + 1) for w in admissible_words(s, p) if s.allowed(w[-1], w[0])]


def reachable_in(s: Sft, a: int, b: int) -> int | None:
    """Length of a shortest nonempty path from ``a`` to ``b``."""
    dist = {a: 0}
    q = deque([a])
    while q:
        c = q.popleft()
        for d in s.successors(c):
            if d == b:
                return dist[c] + 1
            if d not in dist:
                dist[d] = dist[c] + 1
                q.append(d)
    return None
