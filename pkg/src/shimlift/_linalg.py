"""Small exact linear algebra over Q and Z."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Matrix = List[List[Fraction]]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> Tuple[Matrix, List[int], List[List[Fraction]]]:
    """Reduced row echelon form.

    Returns (reduced rows, pivot columns, transform) where ``transform[i]``
    expresses reduced row i as a combination of the input rows.
    """
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    t = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, n) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        t[r], t[p] = t[p], t[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        t[r] = [x * inv for x in t[r]]
        for i in range(n):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
                t[i] = [a - f * b for a, b in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return m[:r], pivots, t[:r]


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def solve(rows: Sequence[Sequence], rhs: Sequence) -> List[Fraction] | None:
    """Solve A x = b exactly; None if inconsistent.  Free variables are set to 0."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv, _ = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for r, c in zip(red, piv):
        x[c] = r[ncols]
    return x


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    """A Z-basis of {x in Z^n : A x = 0} via unimodular column reduction."""
    a = [list(map(int, r)) for r in rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]  # columns of u track operations

    def colop(i: int, j: int, q: int) -> None:  # col_j -= q col_i
        for r in a:
            r[j] -= q * r[i]
        for r in u:
            r[j] -= q * r[i]

    def swap(i: int, j: int) -> None:
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in u:
            r[i], r[j] = r[j], r[i]

    col = 0
    for r in range(len(a)):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if a[r][j]]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(a[r][j]))
            swap(col, piv)
            done = True
            for j in range(col + 1, n):
                if a[r][j]:
                    colop(col, j, a[r][j] // a[r][col])
                    if a[r][j]:
                        done = False
            if done:
                col += 1
                break
    return [[u[i][j] for i in range(n)] for j in range(col, n)]
