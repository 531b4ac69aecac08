"""Integer lattice utilities: Hermite and Smith normal forms, lattice indices.

All routines work on plain Python integers so results are exact regardless of
entry size. Matrices are lists of rows.
"""
from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

IntMatrix = list[list[int]]


def _copy(rows: Iterable[Sequence[int]]) -> IntMatrix:
    return [[int(x) for x in row] for row in rows]


def hermite_rows(rows: Iterable[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form; returns only the nonzero rows.

    The returned rows form a basis of the integer row lattice spanned by the
    input, in echelon form with positive pivots.
    """
    a = _copy(rows)
    if not a:
        return []
    ncols = len(a[0])
    basis: IntMatrix = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col] != 0]
        zero = [r for r in a if r[col] == 0]
        if not nz:
            col += 1
            continue
        # Euclid on column `col` until a single nonzero entry remains
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            pivot = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // pivot[col]
                r = [x - q * y for x, y in zip(r, pivot)]
                if r[col] != 0:
                    rest.append(r)
                elif any(r):
                    zero.append(r)
            nz = [pivot] + rest
        pivot = nz[0]
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        a = [r for r in zero if any(r)]
        col += 1
    # reduce entries above pivots
    for i in range(len(basis)):
        pc = next(c for c, x in enumerate(basis[i]) if x != 0)
        for k in range(i):
            q = basis[k][pc] // basis[i][pc]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return basis


def smith_diagonal(rows: Iterable[Sequence[int]]) -> list[int]:
    """Invariant factors (nonzero diagonal of the Smith normal form)."""
    a = _copy(rows)
    if not a or not a[0]:
        return []
    m, n = len(a), len(a[0])
    diag: list[int] = []
    for t in range(min(m, n)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not entries:
                return diag
            _, i, j = min(entries)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(p))
    return diag


def rank(rows: Iterable[Sequence[int]]) -> int:
    return len(hermite_rows(rows))


def spans_full_lattice(vectors: Iterable[Sequence[int]], dim: int) -> bool:
    """True iff the integer span of `vectors` is all of Z^dim."""
    diag = smith_diagonal(vectors)
    return len(diag) == dim and all(x == 1 for x in diag)


def difference_rows(points: Sequence[Sequence[int]]) -> IntMatrix:
    p0 = points[0]
    return [[int(x) - int(y) for x, y in zip(p, p0)] for p in points[1:]]


def lattice_index(points: Iterable[Sequence[int]]) -> int | None:
    """Index of the lattice generated by pairwise differences of `points`.

    Returns None when the difference lattice has rank below the ambient
    dimension (the index is infinite).
    """
    pts = [tuple(int(x) for x in p) for p in points]
    if not pts:
        return None
    n = len(pts[0])
    diag = smith_diagonal(difference_rows(pts)) if len(pts) > 1 else []
    if len(diag) < n:
        return None
    out = 1
    for x in diag:
        out *= x
    return out


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in vec:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in vec)
    return tuple(int(x) // g for x in vec)


def integer_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = _copy(rows)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def integer_kernel_vector(rows: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    """Primitive integer normal to n-1 independent vectors in Z^n (generalized cross product)."""
    out = []
    for c in range(n):
        minor = [[r[j] for j in range(n) if j != c] for r in rows]
        out.append((-1) ** c * integer_det(minor))
    return primitive(out)
