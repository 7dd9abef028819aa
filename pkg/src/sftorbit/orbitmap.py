"""Continuous orbit maps in prefix-rule normal form.

A :class:`PrefixRuleMap` sends ``x`` in the cylinder of a rule's match word
``u`` to ``v_u . code_inf(sigma^{s_u} x)``, where ``code_inf`` applies a global
sliding block code.  The class is closed under pre-composition with the
shift, post-composition with locally constant shift powers and composition,
and equality within it is decidable (:func:`map_equal`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .cocycle import LocFun, WordTooShort, word_sum
from .sft import EpPoint, Sft, SftError, Word, admissible_words, shift_ep


class IncompatibleSpaces(ValueError):
    pass


class NoRuleMatch(ValueError):
    pass


class MalformedMap(ValueError):
    pass


class NotShiftCommuting(ValueError):
    def __init__(self, message, word=None):
        super().__init__(message)
        self.word = word


# ---------------------------------------------------------------------------
# sliding block codes

@dataclass(frozen=True, eq=False)
class SlidingBlockCode:
    """``x -> (table[x[i:i+window]])_i`` from ``source`` into ``target``."""

    source: Sft
    target: Sft
    window: int
    table: dict

    def __post_init__(self):
        if self.window < 1:
            raise MalformedMap("window must be >= 1")
        words = admissible_words(self.source, self.window)
        missing = [w for w in words if w not in self.table]
        if missing:
            raise MalformedMap(f"block map undefined on {self.source.spell(missing[0])!r}")
        for w in admissible_words(self.source, self.window + 1):
            a, b = self.table[w[:-1]], self.table[w[1:]]
            if not self.target.allowed(a, b):
                raise MalformedMap(
                    f"image of {self.source.spell(w)!r} is not admissible: "
                    f"{self.target.spell((a, b))!r}"
                )

    def apply_word(self, w: Word) -> Word:
        W = self.window
        return tuple(self.table[tuple(w[i : i + W])] for i in range(len(w) - W + 1))

    def apply_point(self, x: EpPoint) -> EpPoint:
        u, c = x.transient, x.cycle
        z = x.prefix(len(u) + len(c) + self.window - 1)
        out = self.apply_word(z)
        return EpPoint(out[: len(u)], out[len(u) : len(u) + len(c)])

    def padded(self, window: int) -> dict:
        """The same code's table read on windows of a larger size."""
        W = self.window
        return {w: self.table[w[:W]] for w in admissible_words(self.source, window)}


def identity_code(s: Sft) -> SlidingBlockCode:
    return SlidingBlockCode(s, s, 1, {(a,): a for a in range(s.n)})


def compose_codes(outer: SlidingBlockCode, inner: SlidingBlockCode) -> SlidingBlockCode:
    """``outer o inner`` with window ``W_inner + W_outer - 1``."""
    if inner.target != outer.source:
        raise IncompatibleSpaces("inner code target differs from outer code source")
    W = inner.window + outer.window - 1
    table = {w: outer.apply_word(inner.apply_word(w))[0] for w in admissible_words(inner.source, W)}
    return SlidingBlockCode(inner.source, outer.target, W, table)


def minimize_code(code: SlidingBlockCode) -> SlidingBlockCode:
    """Shrink the window while the table only depends on a shorter prefix."""
    best = code
    for W in range(code.window - 1, 0, -1):
        small = {}
        ok = True
        for w, v in code.table.items():
            if small.setdefault(w[:W], v) != v:
                ok = False
                break
        if not ok:
            break
        best = SlidingBlockCode(code.source, code.target, W, small)
    return best


# ---------------------------------------------------------------------------
# prefix-rule maps

@dataclass(frozen=True)
class Rule:
    match: tuple
    output: tuple
    offset: int


@dataclass(frozen=True, eq=False)
class PrefixRuleMap:
    source: Sft
    target: Sft
    rules: tuple
    code: SlidingBlockCode
    _lookup: dict = field(init=False, repr=False)
    _lengths: tuple = field(init=False, repr=False)

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        if self.code.source != self.source or self.code.target != self.target:
            raise IncompatibleSpaces("tail code spaces differ from the map's spaces")
        lookup = {}
        for r in rules:
            if r.offset < 0:
                raise MalformedMap("negative offset")
            if r.match in lookup:
                raise MalformedMap(f"duplicate rule for {self.source.spell(r.match)!r}")
            lookup[r.match] = r
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_lengths", tuple(sorted({len(r.match) for r in rules})))

    @property
    def max_match(self) -> int:
        return self._lengths[-1] if self._lengths else 0

    @property
    def max_offset(self) -> int:
        return max(r.offset for r in self.rules)

    def rule_for(self, w: Word) -> Rule:
        w = tuple(w)
        for k in self._lengths:
            if k > len(w):
                break
            r = self._lookup.get(w[:k])
            if r is not None:
                return r
        if len(w) < self.max_match:
            raise WordTooShort(f"no rule decided by {self.source.spell(w)!r}")
        raise NoRuleMatch(f"no rule matches {self.source.spell(w)!r}")

    def validate(self) -> PrefixRuleMap:
        """Check the prefix cover and output admissibility exhaustively."""
        M = self.max_match
        for w in admissible_words(self.source, M):
            hits = [r for r in self.rules if w[: len(r.match)] == r.match]
            if len(hits) != 1:
                raise MalformedMap(f"{len(hits)} rules match {self.source.spell(w)!r}")
        for r in self.rules:
            if not self.source.is_admissible(r.match):
                raise MalformedMap(f"match word {r.match} is not admissible")
            if not self.target.is_admissible(r.output):
                raise MalformedMap(f"output {self.target.spell(r.output)!r} is not admissible")
            L = max(len(r.match), r.offset + self.code.window + 1)
            for w in self.source.extensions(r.match, L):
                y = eval_prefix(self, w)
                if not self.target.is_admissible(y):
                    raise MalformedMap(
                        f"image prefix {self.target.spell(y)!r} of {self.source.spell(w)!r} not admissible"
                    )
        return self


def eval_prefix(h: PrefixRuleMap, w: Word) -> Word:
    """Longest prefix of ``h(x)`` that is the same for every ``x`` starting with ``w``."""
    r = h.rule_for(w)
    W = h.code.window
    tail = h.code.apply_word(w[r.offset :]) if len(w) >= r.offset + W else ()
    return r.output + tail


def eval_ep(h: PrefixRuleMap, x: EpPoint) -> EpPoint:
    r = h.rule_for(x.prefix(h.max_match))
    z = h.code.apply_point(shift_ep(x, r.offset))
    return EpPoint(r.output + z.transient, z.cycle)


def _refined(h: PrefixRuleMap, depth: int):
    """Rules re-indexed by every admissible word of the given depth."""
    out = []
    for r in h.rules:
        for w in h.source.extensions(r.match, max(depth, len(r.match))):
            out.append((w, r))
    return out


def from_rules(source, target, rules, code) -> PrefixRuleMap:
    return PrefixRuleMap(source, target, tuple(Rule(tuple(m), tuple(v), s) for m, v, s in rules), code)


def from_block_code(c: SlidingBlockCode) -> PrefixRuleMap:
    rules = [Rule(u, (c.table[u],), 1) for u in admissible_words(c.source, c.window)]
    return PrefixRuleMap(c.source, c.target, tuple(rules), c)


def identity_map(s: Sft) -> PrefixRuleMap:
    return from_block_code(identity_code(s))


def shift_map(s: Sft, power: int = 1) -> PrefixRuleMap:
    """``sigma^power`` on ``X_s``."""
    rules = [Rule((a,), (), power) for a in range(s.n)]
    return PrefixRuleMap(s, s, tuple(rules), identity_code(s))


def normalize(h: PrefixRuleMap) -> PrefixRuleMap:
    """Refine to a common match depth and lift every offset to the maximum.

    Tail symbols that a rule's match word already determines are moved into
    the rule output; rules come out sorted by match word.
    """
    s_max = h.max_offset
    W = h.code.window
    D = max(h.max_match, s_max + W - 1)
    rules = []
    for w, r in _refined(h, D):
        extra = tuple(h.code.table[w[r.offset + j : r.offset + j + W]] for j in range(s_max - r.offset))
        rules.append(Rule(w, r.output + extra, s_max))
    rules.sort(key=lambda r: r.match)
    return PrefixRuleMap(h.source, h.target, tuple(rules), h.code)


def pre_shift(h: PrefixRuleMap) -> PrefixRuleMap:
    """``x -> h(sigma(x))``."""
    rules = []
    for r in h.rules:
        if r.match:
            preds = h.source.predecessors(r.match[0])
            rules.extend(Rule((a,) + r.match, r.output, r.offset + 1) for a in preds)
        else:
            rules.extend(Rule((a,), r.output, r.offset + 1) for a in range(h.source.n))
    return PrefixRuleMap(h.source, h.target, tuple(rules), h.code)


def post_shift(h: PrefixRuleMap, k) -> PrefixRuleMap:
    """``x -> sigma^{k(x)}(h(x))`` for a nonnegative ``LocFun`` (or int) ``k``."""
    if isinstance(k, int):
        k = LocFun.constant(h.source, k)
    if k.sft != h.source:
        raise IncompatibleSpaces("shift function lives on another space")
    if k.min() < 0:
        raise ValueError("shift amounts must be nonnegative")
    D = max(h.max_match, k.depth)
    rules = []
    for w, r in _refined(h, D):
        c = k.eval_word(w)
        drop = min(c, len(r.output))
        rules.append(Rule(w, r.output[drop:], r.offset + c - drop))
    return PrefixRuleMap(h.source, h.target, tuple(rules), h.code)


def _tabulate(s: Sft, start: int, fn: Callable, limit: int = 40) -> LocFun:
    """Build a LocFun from ``fn(word)``, deepening until ``fn`` never returns ``None``."""
    for depth in range(start, limit + 1):
        table = {}
        for w in admissible_words(s, depth):
            try:
                v = fn(w)
            except WordTooShort:
                v = None
            if v is None:
                break
            table[w] = v
        else:
            return LocFun(s, depth, table).simplify()
    raise RuntimeError(f"value not determined by words of length <= {limit}")


def compose_maps(g: PrefixRuleMap, h: PrefixRuleMap) -> PrefixRuleMap:
    """``g o h`` with tail code ``g.code o h.code``."""
    if h.target != g.source:
        raise IncompatibleSpaces("h's target is not g's source")
    chi = compose_codes(g.code, h.code)
    Wg = g.code.window

    def need(w):
        r = h.rule_for(w)
        y = eval_prefix(h, w)
        try:
            rg = g.rule_for(y)
        except (WordTooShort, NoRuleMatch):
            return None
        if len(y) < max(rg.offset, len(r.output)) + Wg - 1:
            return None
        return r, y, rg

    depth = max(h.max_match, 1)
    while True:
        words = admissible_words(h.source, depth)
        got = [need(w) for w in words]
        if all(got):
            break
        depth += 1
        if depth > 60:
            raise RuntimeError("composition did not stabilise")
    rules = []
    for w, (r, y, rg) in zip(words, got):
        v = r.output
        m = max(0, len(v) - rg.offset)
        head = tuple(g.code.table[y[rg.offset + n : rg.offset + n + Wg]] for n in range(m))
        rules.append(Rule(w, rg.output + head, r.offset + max(rg.offset - len(v), 0)))
    return PrefixRuleMap(h.source, g.target, tuple(rules), chi)


# ---------------------------------------------------------------------------
# equality

def _lag(r: Rule) -> int:
    return r.offset - len(r.output)


def _tail_agree(h1, h2, d1, d2) -> bool:
    c1, c2 = h1.code, h2.code
    lo = min(d1, d2)
    hi = max(d1 + c1.window, d2 + c2.window)
    for z in admissible_words(h1.source, hi - lo):
        a = c1.table[z[d1 - lo : d1 - lo + c1.window]]
        b = c2.table[z[d2 - lo : d2 - lo + c2.window]]
        if a != b:
            return False
    return True


def _check_spaces(h1, h2):
    if h1.source != h2.source or h1.target != h2.target:
        raise IncompatibleSpaces("maps have different source or target spaces")


def map_equal(h1: PrefixRuleMap, h2: PrefixRuleMap) -> bool:
    """Exact decision of ``h1(x) == h2(x)`` for every ``x``.

    On each common cylinder the finitely many explicit output symbols are
    compared directly; beyond them both maps are sliding codes with fixed
    lags, which agree iff the two windows agree on every admissible word.
    """
    _check_spaces(h1, h2)
    D = max(h1.max_match, h2.max_match)
    tail_cache = {}
    for w in admissible_words(h1.source, D):
        r1, r2 = h1.rule_for(w), h2.rule_for(w)
        d1, d2 = _lag(r1), _lag(r2)
        key = (d1, d2)
        if key not in tail_cache:
            tail_cache[key] = _tail_agree(h1, h2, d1, d2)
        if not tail_cache[key]:
            return False
        T = max(len(r1.output), len(r2.output))
        L = max(D, T + d1 + h1.code.window - 1, T + d2 + h2.code.window - 1)
        for e in h1.source.extensions(w, L):
            if eval_prefix(h1, e)[:T] != eval_prefix(h2, e)[:T]:
                return False
    return True


def separating_word(h1: PrefixRuleMap, h2: PrefixRuleMap, max_length: int = 64):
    """Shortest word whose cylinder forces different images, or ``None`` if equal."""
    _check_spaces(h1, h2)
    if map_equal(h1, h2):
        return None
    for L in range(0, max_length + 1):
        for w in admissible_words(h1.source, L):
            try:
                y1, y2 = eval_prefix(h1, w), eval_prefix(h2, w)
            except WordTooShort:
                continue
            n = min(len(y1), len(y2))
            if y1[:n] != y2[:n]:
                return w
    raise RuntimeError("maps differ but no separating word found within the search bound")


# ---------------------------------------------------------------------------
# orbit-map data

@dataclass(frozen=True, eq=False)
class OrbitMapData:
    """A map with cocycles ``k``, ``l`` meant to satisfy
    ``sigma^{k(x)}(h(sigma x)) = sigma^{l(x)}(h(x))``."""

    map: PrefixRuleMap
    k: LocFun
    l: LocFun

    def __post_init__(self):
        for f in (self.k, self.l):
            if f.sft != self.map.source:
                raise IncompatibleSpaces("cocycle lives on another space")
            if f.min() < 0:
                raise ValueError("cocycles must be nonnegative")

    @property
    def source(self) -> Sft:
        return self.map.source

    @property
    def target(self) -> Sft:
        return self.map.target

    @property
    def c(self) -> LocFun:
        """The cocycle function ``l - k``."""
        return (self.l - self.k).simplify()


@dataclass
class Verified:
    def __bool__(self):
        return True


@dataclass
class Counterexample:
    word: Word
    left: Word
    right: Word

    def __bool__(self):
        return False


def verify_orbit_map(d: OrbitMapData):
    """Return :class:`Verified` or a :class:`Counterexample` with the shortest separating word."""
    left = post_shift(pre_shift(d.map), d.k)
    right = post_shift(d.map, d.l)
    if map_equal(left, right):
        return Verified()
    w = separating_word(left, right)
    return Counterexample(w, eval_prefix(left, w), eval_prefix(right, w))


def identity_data(s: Sft) -> OrbitMapData:
    return OrbitMapData(identity_map(s), LocFun.constant(s, 0), LocFun.constant(s, 1))


def shift_data(s: Sft) -> OrbitMapData:
    """``sigma`` itself as a continuous orbit map."""
    return OrbitMapData(shift_map(s), LocFun.constant(s, 0), LocFun.constant(s, 1))


def conjugacy_data(c: SlidingBlockCode) -> OrbitMapData:
    return OrbitMapData(from_block_code(c), LocFun.constant(c.source, 0), LocFun.constant(c.source, 1))


def _pair_prefixes(h: PrefixRuleMap, w: Word):
    """Determined prefixes of ``h(x)`` and ``h(sigma x)`` on the cylinder of ``w``."""
    if len(w) < 1:
        raise WordTooShort("empty word")
    return eval_prefix(h, w), eval_prefix(h, w[1:])


def compose(g: OrbitMapData, h: OrbitMapData) -> OrbitMapData:
    """``g o h`` with cocycles

    ``k3(x) = k2^{l1(x)}(h(x)) + l2^{k1(x)}(h(sigma x))`` and
    ``l3(x) = l2^{l1(x)}(h(x)) + k2^{k1(x)}(h(sigma x))``.
    """
    if h.target != g.source:
        raise IncompatibleSpaces("h's target is not g's source")
    hm = h.map
    start = max(h.k.depth, h.l.depth, hm.max_match + 1)

    def cocycles(w):
        y, y1 = _pair_prefixes(hm, w)
        n, m = h.l.eval_word(w), h.k.eval_word(w)
        parts = (word_sum(g.k, y, n), word_sum(g.l, y1, m), word_sum(g.l, y, n), word_sum(g.k, y1, m))
        if None in parts:
            return None
        return parts

    k3 = _tabulate(h.source, start, lambda w: _sum_or_none(cocycles(w), 0, 1))
    l3 = _tabulate(h.source, start, lambda w: _sum_or_none(cocycles(w), 2, 3))
    return OrbitMapData(compose_maps(g.map, hm), k3, l3)


def _sum_or_none(parts, i, j):
    if parts is None:
        return None
    return parts[i] + parts[j]


def psi_transfer(d: OrbitMapData, f: LocFun) -> LocFun:
    """``x -> f^{l(x)}(h(x)) - f^{k(x)}(h(sigma x))`` as a function on the source."""
    if f.sft != d.target:
        raise IncompatibleSpaces("f must live on the target space")
    hm = d.map
    start = max(d.k.depth, d.l.depth, hm.max_match + 1)

    def value(w):
        y, y1 = _pair_prefixes(hm, w)
        a = word_sum(f, y, d.l.eval_word(w))
        b = word_sum(f, y1, d.k.eval_word(w))
        if a is None or b is None:
            return None
        return a - b

    return _tabulate(d.source, start, value)


def compose_with_map(f: LocFun, h: PrefixRuleMap) -> LocFun:
    """``f o h`` on the source of ``h``."""
    if f.sft != h.target:
        raise IncompatibleSpaces("f must live on h's target")

    def value(w):
        y = eval_prefix(h, w)
        return f.table[y[: f.depth]] if len(y) >= f.depth else None

    return _tabulate(h.source, max(h.max_match, 0), value)


def to_block_code(h: PrefixRuleMap) -> SlidingBlockCode:
    """The block code presenting a shift-commuting ``h``.

    Raises :class:`NotShiftCommuting` (carrying a separating word) when
    ``h o sigma != sigma o h``.
    """
    left, right = pre_shift(h), post_shift(h, 1)
    if not map_equal(left, right):
        w = separating_word(left, right)
        raise NotShiftCommuting(f"h o sigma != sigma o h on {h.source.spell(w)!r}", word=w)
    L = max(h.max_match, 1)
    while True:
        words = admissible_words(h.source, L)
        if all(eval_prefix(h, w) for w in words):
            break
        L += 1
    code = minimize_code(SlidingBlockCode(h.source, h.target, L, {w: eval_prefix(h, w)[0] for w in words}))
    assert map_equal(from_block_code(code), h)
    return code


def image_word(h: PrefixRuleMap, labels) -> list:
    """Convenience: determined image prefix of a labelled word, as labels."""
    w = h.source.encode(labels)
    if not h.source.is_admissible(w):
        raise SftError(f"{labels} is not admissible")
    return h.target.decode(eval_prefix(h, w))
