"""Locally constant integer functions, cocycle sums and cohomology classes."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping

from .sft import EpPoint, Sft, Word, admissible_words, higher_block_graph, shift_ep
from .snf import cokernel_class, invariant_factors


class WordTooShort(ValueError):
    pass


class DepthDecrease(ValueError):
    pass


class MixedSft(ValueError):
    pass


class NotPeriodicPair(ValueError):
    pass


class LocFun:
    """Integer function on a shift space depending on the first ``depth`` symbols.

    ``table`` maps every admissible word of length ``depth`` to an integer.
    Equality is semantic: two functions are equal when they agree at every
    point, whatever their depths.
    """

    __slots__ = ("sft", "depth", "table")

    def __init__(self, sft: Sft, depth: int, table: Mapping):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        words = admissible_words(sft, depth)
        tab = {}
        for w in words:
            try:
                tab[w] = int(table[w])
            except KeyError:
                raise ValueError(f"table missing word {sft.spell(w)!r} at depth {depth}") from None
        if len(table) != len(words):
            extra = [w for w in table if w not in tab]
            raise ValueError(f"table has non-admissible or wrong-length keys: {extra[:3]}")
        self.sft = sft
        self.depth = depth
        self.table = tab

    @classmethod
    def constant(cls, sft: Sft, c: int) -> LocFun:
        return cls(sft, 0, {(): c})

    @classmethod
    def from_function(cls, sft: Sft, depth: int, fn: Callable[[Word], int]) -> LocFun:
        return cls(sft, depth, {w: fn(w) for w in admissible_words(sft, depth)})

    @classmethod
    def indicator(cls, sft: Sft, word: Word) -> LocFun:
        word = tuple(word)
        return cls.from_function(sft, len(word), lambda w: int(w == word))

    def __repr__(self):
        body = ", ".join(f"{self.sft.spell(w) or 'ε'}: {v}" for w, v in self.table.items())
        return f"LocFun(depth={self.depth}, {{{body}}})"

    def eval_word(self, w: Word) -> int:
        if len(w) < self.depth:
            raise WordTooShort(f"need {self.depth} symbols, got {len(w)}")
        return self.table[tuple(w[: self.depth])]

    def __call__(self, x: EpPoint) -> int:
        return self.table[x.prefix(self.depth)]

    def values(self) -> set:
        return set(self.table.values())

    def min(self) -> int:
        return min(self.table.values())

    def max(self) -> int:
        return max(self.table.values())

    def refine(self, depth: int) -> LocFun:
        if depth < self.depth:
            raise DepthDecrease(f"cannot refine depth {self.depth} down to {depth}")
        if depth == self.depth:
            return self
        d = self.depth
        return LocFun(self.sft, depth, {w: self.table[w[:d]] for w in admissible_words(self.sft, depth)})

    def simplify(self) -> LocFun:
        """Same function at the least depth that determines it."""
        for d in range(self.depth):
            coarse = {}
            ok = True
            for w, v in self.table.items():
                if coarse.setdefault(w[:d], v) != v:
                    ok = False
                    break
            if ok:
                return LocFun(self.sft, d, coarse)
        return self

    def _binary(self, other, op) -> LocFun:
        if isinstance(other, int):
            other = LocFun.constant(self.sft, other)
        if other.sft != self.sft:
            raise MixedSft("functions live on different shift spaces")
        d = max(self.depth, other.depth)
        a, b = self.refine(d), other.refine(d)
        return LocFun(self.sft, d, {w: op(a.table[w], b.table[w]) for w in a.table})

    def __add__(self, other):
        return self._binary(other, lambda p, q: p + q)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda p, q: p - q)

    def __rsub__(self, other):
        return self._binary(other, lambda p, q: q - p)

    def __neg__(self):
        return LocFun(self.sft, self.depth, {w: -v for w, v in self.table.items()})

    def __mul__(self, c: int):
        if not isinstance(c, int):
            return NotImplemented
        return LocFun(self.sft, self.depth, {w: c * v for w, v in self.table.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return all(v == other for v in self.table.values())
        if not isinstance(other, LocFun):
            return NotImplemented
        if other.sft != self.sft:
            return False
        d = max(self.depth, other.depth)
        return self.refine(d).table == other.refine(d).table

    __hash__ = None


def scalar_mul(c: int, f: LocFun) -> LocFun:
    return c * f


def compose_shift(f: LocFun, i: int) -> LocFun:
    """``f o sigma^i`` as a depth ``depth(f) + i`` function."""
    if i < 0:
        raise ValueError("shift count must be nonnegative")
    if i == 0 or f.depth == 0:
        return f
    d = f.depth
    return LocFun.from_function(f.sft, d + i, lambda w: f.table[w[i : i + d]])


def cocycle_sum(f: LocFun, n: int) -> LocFun:
    """Birkhoff sum ``f^n = sum_{i<n} f o sigma^i``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return LocFun.constant(f.sft, 0)
    d = f.depth
    if d == 0:
        return LocFun.constant(f.sft, n * f.table[()])
    return LocFun.from_function(f.sft, d + n - 1, lambda w: sum(f.table[w[i : i + d]] for i in range(n)))


def word_sum(f: LocFun, y: Word, n: int) -> int | None:
    """``f^n`` at any point with prefix ``y``; ``None`` when ``y`` is too short."""
    if n <= 0:
        return 0
    d = f.depth
    if len(y) < n - 1 + d:
        return None
    return sum(f.table[tuple(y[i : i + d])] for i in range(n))


def point_sum(f: LocFun, x: EpPoint, n: int) -> int:
    """``f^n(x)`` evaluated by walking the orbit."""
    total = 0
    for _ in range(n):
        total += f(x)
        x = shift_ep(x, 1)
    return total


def omega(f: LocFun, x: EpPoint, r: int, s: int) -> int:
    """``sum_{i<r} f(sigma^i x) - sum_{j<s} f(sigma^j x)`` for ``sigma^r x = sigma^s x``."""
    if shift_ep(x, r) != shift_ep(x, s):
        raise NotPeriodicPair(f"sigma^{r}(x) != sigma^{s}(x)")
    return point_sum(f, x, r) - point_sum(f, x, s)


# ---------------------------------------------------------------------------
# coboundaries

def _edge_graph(f: LocFun):
    D = max(f.depth - 1, 1)
    g = higher_block_graph(f.sft, D)
    weights = f.refine(D + 1).table
    return g, weights


def _shortest_path(adj, a, b):
    """Edge list of a shortest path a -> b (BFS); empty when a == b."""
    if a == b:
        return []
    prev = {a: None}
    q = deque([a])
    while q:
        c = q.popleft()
        for d, e in adj[c]:
            if d not in prev:
                prev[d] = (c, e)
                if d == b:
                    path = []
                    while prev[d] is not None:
                        c2, e2 = prev[d]
                        path.append(e2)
                        d = c2
                    return path[::-1]
                q.append(d)
    raise AssertionError("graph is not strongly connected")


def _split_simple(g, walk, weights):
    """Split a closed edge walk into simple cycles."""
    cycles = []
    stack = []
    pos = {}
    for e in walk:
        a = g.source(e)
        if a in pos:
            start = pos[a]
            cyc = stack[start:]
            del stack[start:]
            for e2 in cyc:
                pos.pop(g.source(e2), None)
            cycles.append(cyc)
        pos[a] = len(stack)
        stack.append(e)
    if stack:
        cycles.append(stack)
    return cycles


def _cycle_word(cyc) -> Word:
    return tuple(e[0] for e in cyc)


@dataclass
class CoboundaryResult:
    """Outcome of :func:`is_coboundary`.

    Truthy when ``f = xi - xi o sigma`` for the returned ``witness``;
    otherwise ``cycle`` is a word ``w`` with ``w^inf`` periodic and
    ``cycle_sum`` the nonzero sum of ``f`` around it.
    """

    witness: LocFun | None = None
    cycle: Word | None = None
    cycle_sum: int | None = None

    def __bool__(self):
        return self.witness is not None


def is_coboundary(f: LocFun) -> CoboundaryResult:
    g, w = _edge_graph(f)
    adj = g.adjacency()
    pot = {0: 0}
    tree = {0: None}
    q = deque([0])
    while q:
        a = q.popleft()
        for b, e in adj[a]:
            if b not in pot:
                pot[b] = pot[a] - w[e]
                tree[b] = e
                q.append(b)
    for e in g.edges:
        a, b = g.source(e), g.target(e)
        if pot[a] - pot[b] != w[e]:
            back = _shortest_path(adj, b, 0)
            to_a = _shortest_path(adj, 0, a)
            to_b = _shortest_path(adj, 0, b)
            for walk in (to_a + [e] + back, to_b + back):
                for cyc in _split_simple(g, walk, w):
                    total = sum(w[x] for x in cyc)
                    if total:
                        return CoboundaryResult(cycle=_cycle_word(cyc), cycle_sum=total)
            raise AssertionError("potential mismatch without a nonzero cycle")
    xi = LocFun(f.sft, g.depth, {v: pot[i] for i, v in enumerate(g.vertices)})
    assert xi - compose_shift(xi, 1) == f
    return CoboundaryResult(witness=xi)


def class_equal(f: LocFun, g: LocFun) -> bool:
    return bool(is_coboundary(f - g))


class Positivity(enum.Enum):
    STRICTLY_POSITIVE = "StrictlyPositive"
    NONNEGATIVE_BOUNDARY = "NonnegativeBoundary"
    NO = "No"


@dataclass
class PositivityResult:
    verdict: Positivity
    representative: LocFun | None = None
    cycle: Word | None = None
    cycle_sum: int | None = None


def class_in_positive_cone(f: LocFun) -> PositivityResult:
    """Classify ``[f]`` by the sign of its minimum cycle sum.

    When no cycle is negative the result carries a nonnegative function
    cohomologous to ``f``; otherwise it carries a negative cycle.
    """
    g, w = _edge_graph(f)
    nv = len(g.vertices)
    dist = [0] * nv
    pred = [None] * nv
    changed_at = None
    for _ in range(nv):
        changed_at = None
        for e in g.edges:
            a, b = g.source(e), g.target(e)
            if dist[a] + w[e] < dist[b]:
                dist[b] = dist[a] + w[e]
                pred[b] = e
                changed_at = b
        if changed_at is None:
            break
    if changed_at is not None:
        v = changed_at
        for _ in range(nv):
            v = g.source(pred[v])
        cyc = []
        u = v
        while True:
            e = pred[u]
            cyc.append(e)
            u = g.source(e)
            if u == v:
                break
        cyc.reverse()
        return PositivityResult(Positivity.NO, cycle=_cycle_word(cyc), cycle_sum=sum(w[e] for e in cyc))
    xi = LocFun(f.sft, g.depth, {v: dist[i] for i, v in enumerate(g.vertices)})
    rep = f + xi - compose_shift(xi, 1)
    assert rep.min() >= 0
    zero_edges = [[] for _ in range(nv)]
    for e in g.edges:
        if rep.eval_word(e) == 0:
            zero_edges[g.source(e)].append(g.target(e))
    zero_cycle = _find_cycle(zero_edges)
    if zero_cycle is None:
        return PositivityResult(Positivity.STRICTLY_POSITIVE, representative=rep)
    word = tuple(g.vertices[v][0] for v in zero_cycle)
    return PositivityResult(Positivity.NONNEGATIVE_BOUNDARY, representative=rep, cycle=word, cycle_sum=0)


def _find_cycle(adj):
    """Vertex list of some directed cycle, or ``None``."""
    color = [0] * len(adj)
    for root in range(len(adj)):
        if color[root]:
            continue
        stack = [(root, iter(adj[root]))]
        path = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):]
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(adj[nxt])))
                path.append(nxt)
    return None


@dataclass(frozen=True)
class CohomologyGroup:
    invariant_factors: tuple
    order_unit: tuple


def cohomology_group(s: Sft) -> CohomologyGroup:
    """``coker(id - A^t)`` and the class of the all-ones vector in it."""
    n = s.n
    rows = s.matrix.rows
    m = [[int(i == j) - rows[j][i] for j in range(n)] for i in range(n)]
    return CohomologyGroup(tuple(invariant_factors(m)), tuple(cokernel_class(m, [1] * n)))
