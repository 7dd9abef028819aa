"""Random irreducible shifts and random conjugacies between them, for
property suites and the functoriality checks."""
from __future__ import annotations

import random

from .cocycle import LocFun
from .orbitmap import OrbitMapData, SlidingBlockCode, compose_codes, from_block_code
from .sft import Sft, SftError, admissible_words, validate_sft


def random_sft(rng: random.Random, max_states: int = 4, min_states: int = 1) -> Sft:
    """A uniformly drawn 0/1 matrix, redrawn until it is irreducible and satisfies (I)."""
    while True:
        n = rng.randint(min_states, max_states)
        rows = tuple(tuple(rng.randint(0, 1) for _ in range(n)) for _ in range(n))
        try:
            return validate_sft(rows)
        except SftError:
            continue


def relabel_pair(s: Sft, perm) -> tuple:
    """Codes ``s -> P s P^t`` and back, both of window 1."""
    n = s.n
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    rows = tuple(tuple(s.matrix.rows[inv[i]][inv[j]] for j in range(n)) for i in range(n))
    t = validate_sft(rows)
    fwd = SlidingBlockCode(s, t, 1, {(a,): perm[a] for a in range(n)})
    bwd = SlidingBlockCode(t, s, 1, {(a,): inv[a] for a in range(n)})
    return fwd, bwd


def two_block_pair(s: Sft) -> tuple:
    """The 2-block presentation: ``ab -> [ab]`` of window 2 and ``[ab] -> a`` of window 1."""
    edges = admissible_words(s, 2)
    idx = {e: i for i, e in enumerate(edges)}
    rows = tuple(tuple(int(e[1] == f[0]) for f in edges) for e in edges)
    t = validate_sft(rows)
    fwd = SlidingBlockCode(s, t, 2, {e: idx[e] for e in edges})
    bwd = SlidingBlockCode(t, s, 1, {(i,): e[0] for e, i in idx.items()})
    return fwd, bwd


def random_conjugacy(rng: random.Random, max_states: int = 4) -> tuple:
    """``(forward, backward)`` mutually inverse block codes from a random source.

    The 2-block step is only taken from shifts small enough to keep the
    target at most 9 states.
    """
    s = random_sft(rng, max_states)
    fwd, bwd = None, None
    cur = s
    for _ in range(rng.randint(1, 2)):
        if cur.n <= 3 and rng.random() < 0.6:
            f, b = two_block_pair(cur)
        else:
            perm = list(range(cur.n))
            rng.shuffle(perm)
            f, b = relabel_pair(cur, perm)
        fwd = f if fwd is None else compose_codes(f, fwd)
        bwd = b if bwd is None else compose_codes(bwd, b)
        cur = f.target
    return fwd, bwd


def random_locfun(rng: random.Random, s: Sft, depth: int, lo: int = 0, hi: int = 2) -> LocFun:
    return LocFun(s, depth, {w: rng.randint(lo, hi) for w in admissible_words(s, depth)})


def random_conjugacy_data(rng: random.Random, code: SlidingBlockCode, max_k: int = 1) -> OrbitMapData:
    """Orbit data for a conjugacy with a random ``k`` and ``l = k + 1``.

    Any such pair works because the map commutes with the shift.  Large
    ``max_k`` makes composed cocycles, and so transfer depths, grow fast.
    """
    k = random_locfun(rng, code.source, rng.randint(1, 2), 0, max_k)
    return OrbitMapData(from_block_code(code), k, k + 1)
