"""Exact Smith normal form over the integers."""
from __future__ import annotations


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix):
    """Return ``(D, U, V)`` with ``U @ M @ V == D`` and ``U, V`` unimodular.

    ``D`` is diagonal with nonnegative entries, each dividing the next
    (zeros last).  Pivots are chosen by least absolute value.
    """
    A = [list(map(int, r)) for r in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        cand = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not cand:
            break
        _, i, j = min(cand)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
            rest = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, k, kind = min(rest)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V


def invariant_factors(matrix) -> list:
    """Invariant factors of ``coker(matrix)`` with units dropped (``0`` = free summand)."""
    D, _, _ = smith_normal_form(matrix)
    m = len(D)
    n = len(D[0]) if m else 0
    diag = [D[i][i] if i < n else 0 for i in range(m)]
    return [d for d in diag if d != 1]


def cokernel_class(matrix, vector) -> list:
    """Coordinates of ``vector`` in ``coker(matrix)`` matching :func:`invariant_factors`."""
    D, U, _ = smith_normal_form(matrix)
    m = len(D)
    n = len(D[0]) if m else 0
    image = [sum(U[i][k] * vector[k] for k in range(m)) for i in range(m)]
    out = []
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 1:
            continue
        out.append(image[i] % d if d else image[i])
    return out
