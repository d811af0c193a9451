"""Exact Gaussian elimination over any field whose elements support + - * /
and truth-testing for nonzero (Fraction, CyclotomicElement), plus integer
Smith invariants for abelian-group computations."""

from __future__ import annotations

from fractions import Fraction

from typing import Sequence


def determinant(rows: Sequence[Sequence], one=Fraction(1)):
    n = len(rows)
    if n == 0:
        return one
    m = [list(r) for r in rows]
    det = one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return one * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        inv = 1 / p
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                row_c = m[c]
                row_i = m[i]
                for j in range(c + 1, n):
                    if row_c[j]:
                        row_i[j] = row_i[j] - f * row_c[j]
    return det


def pivot_columns(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent set of columns (row echelon pivots)."""
    if not rows:
        return []
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        for i in range(r + 1, nrows):
            if m[i][c]:
                f = m[i][c] * inv
                for j in range(c + 1, ncols):
                    if m[r][j]:
                        m[i][j] = m[i][j] - f * m[r][j]
                m[i][c] = m[i][c] * 0
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(pivot_columns(rows))


def smith_invariants(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.

    The number of returned factors is the rank; the cokernel of the map
    Z^nrows -> Z^ncols given by the rows is Z^(ncols - rank) + sum Z/d_i.
    """
    m = [list(map(int, r)) for r in rows if any(r)]
    diag = []
    while m and ncols:
        # locate the smallest nonzero entry as pivot
        best = None
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                if x and (best is None or abs(x) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        m[0], m[i0] = m[i0], m[0]
        for row in m:
            row[0], row[j0] = row[j0], row[0]
        while True:
            p = m[0][0]
            done = True
            for i in range(1, len(m)):
                q = m[i][0] // p
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[0])]
                if m[i][0]:
                    done = False
            for j in range(1, ncols):
                q = m[0][j] // p
                if q:
                    for row in m:
                        row[j] -= q * row[0]
                if m[0][j]:
                    done = False
            if done:
                # divisibility condition on the remaining block
                bad = next(((i, j) for i in range(1, len(m)) for j in range(1, ncols)
                            if m[i][j] % p), None)
                if bad is None:
                    break
                m[0] = [a + b for a, b in zip(m[0], m[bad[0]])]
                continue
            # move the smallest nonzero entry of first row/col to the corner
            cand = [(abs(m[i][0]), i, 0) for i in range(len(m)) if m[i][0]]
            cand += [(abs(m[0][j]), 0, j) for j in range(ncols) if m[0][j]]
            _, bi, bj = min(cand)
            if bi:
                m[0], m[bi] = m[bi], m[0]
            if bj:
                for row in m:
                    row[0], row[bj] = row[bj], row[0]
        diag.append(abs(m[0][0]))
        m = [row[1:] for row in m[1:]]
        m = [r for r in m if any(r)]
        ncols -= 1
    return diag


