"""Integer matrix invariants: determinants, zeta polynomial, Bowen-Franks
groups and total amalgamations."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .sft import Sft, TransitionMatrix
from .snf import invariant_factors


class SizeLimit(ValueError):
    pass


def _rows(m):
    if isinstance(m, Sft):
        m = m.matrix
    if isinstance(m, TransitionMatrix):
        return [list(r) for r in m.rows]
    return [list(r) for r in m]


def bareiss_det(rows) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_id_minus(m) -> int:
    """``det(id - A)``."""
    a = _rows(m)
    n = len(a)
    return bareiss_det([[int(i == j) - a[i][j] for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class ZetaPolynomial:
    """``det(id - tA)`` as integer coefficients, lowest degree first."""

    coefficients: tuple

    def __call__(self, t):
        return sum(c * t**k for k, c in enumerate(self.coefficients))

    def trimmed(self) -> tuple:
        c = list(self.coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return tuple(c)

    def __eq__(self, other):
        if not isinstance(other, ZetaPolynomial):
            return NotImplemented
        return self.trimmed() == other.trimmed()

    def __hash__(self):
        return hash(self.trimmed())

    def __str__(self):
        terms = []
        for k, c in enumerate(self.trimmed()):
            if c == 0 and k:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if k and abs(c) == 1:
                coef = "-" if c < 0 else "+"
                terms.append(f"{coef} {mono}")
            else:
                terms.append(f"{'-' if c < 0 else '+'} {abs(c)}{mono}")
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def zeta_polynomial(m) -> ZetaPolynomial:
    """Coefficients of ``det(id - tA)`` via the Faddeev-LeVerrier recurrence."""
    a = _rows(m)
    n = len(a)
    # characteristic polynomial det(lambda I - A) = sum c[k] lambda^k
    c = [0] * (n + 1)
    c[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        am = [[sum(a[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        mk = [[am[i][j] + (c[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        amk = [[sum(a[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(amk[i][i] for i in range(n))
        assert tr % k == 0
        c[n - k] = -tr // k
    return ZetaPolynomial(tuple(c[n - j] for j in range(n + 1)))


def bowen_franks(m) -> list:
    """Invariant factors of ``coker(id - A)``, units dropped."""
    a = _rows(m)
    n = len(a)
    return invariant_factors([[int(i == j) - a[i][j] for j in range(n)] for i in range(n)])


class Side(enum.Enum):
    ROW = "row"
    COLUMN = "column"


@dataclass(frozen=True)
class AmalgamationResult:
    matrix: TransitionMatrix
    history: tuple  # merged original-state sets, in merge order

    @property
    def groups(self):
        return self.history


def _merge_columns(a, groups):
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if all(a[r][i] == a[r][j] for r in range(n)):
                keep = [k for k in range(n) if k != j]
                merged_row = [a[i][k] + a[j][k] for k in range(n)]
                out = []
                for r in keep:
                    row = merged_row if r == i else a[r]
                    out.append([row[k] for k in keep])
                new_groups = [groups[k] if k != i else groups[i] | groups[j] for k in keep]
                return out, new_groups, groups[i] | groups[j]
    return None


def total_amalgamation(m, side: Side | str = Side.COLUMN) -> AmalgamationResult:
    """Merge states with identical columns (or rows) until none remain.

    Column side: states ``i < j`` with equal columns merge into ``i``; the
    merged row is ``row i + row j``.  The row side is the transpose dual.
    The lexicographically least eligible pair is merged first.
    """
    side = Side(side)
    a = _rows(m)
    if side is Side.ROW:
        a = [list(r) for r in zip(*a)]
    groups = [frozenset([i]) for i in range(len(a))]
    history = []
    while True:
        step = _merge_columns(a, groups)
        if step is None:
            break
        a, groups, merged = step
        history.append(tuple(sorted(merged)))
    if side is Side.ROW:
        a = [list(r) for r in zip(*a)]
    return AmalgamationResult(TransitionMatrix(tuple(tuple(r) for r in a)), tuple(history))


def permutation_equivalent(m1, m2, cap: int = 8) -> bool:
    """True iff some permutation ``P`` has ``P m1 P^t == m2``."""
    a, b = _rows(m1), _rows(m2)
    if len(a) != len(b):
        return False
    n = len(a)
    if n > cap:
        raise SizeLimit(f"permutation search capped at n={cap}, got n={n}")

    def signature(rows, i):
        col = sorted(rows[r][i] for r in range(n))
        return (sorted(rows[i]), col, rows[i][i])

    sa = [signature(a, i) for i in range(n)]
    sb = [signature(b, i) for i in range(n)]
    if sorted(map(repr, sa)) != sorted(map(repr, sb)):
        return False
    options = [[j for j in range(n) if sb[j] == sa[i]] for i in range(n)]
    for choice in itertools.product(*options):
        if len(set(choice)) != n:
            continue
        if all(a[i][j] == b[choice[i]][choice[j]] for i in range(n) for j in range(n)):
            return True
    return False


class Obstruction(enum.Enum):
    OBSTRUCTED = "Obstructed"
    INCONCLUSIVE = "Inconclusive"


def one_sided_conjugacy_obstruction(s1, s2, cap: int = 8) -> Obstruction:
    """Compare total column amalgamations; differing ones rule out one-sided conjugacy."""
    c1 = total_amalgamation(s1, Side.COLUMN).matrix
    c2 = total_amalgamation(s2, Side.COLUMN).matrix
    if permutation_equivalent(c1, c2, cap=cap):
        return Obstruction.INCONCLUSIVE
    return Obstruction.OBSTRUCTED
