"""Exact rank, null space and linear solves over Q.

Elimination is fraction-free (Bareiss) on integer-scaled rows; only the
final back-substitution divides.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


def _integer_rows(rows: Matrix, ncols: int) -> list[list[int]]:
    out = []
    for row in rows:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        row = [Fraction(x) for x in row]
        den = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * den) for x in row])
    return out


def echelon(rows: Matrix, ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form; returns (integer rows, pivot columns)."""
    m = _integer_rows(rows, ncols)
    nrows = len(m)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, nrows):
            lead = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for j in range(c + 1, ncols):
                q, rem = divmod(piv * row_i[j] - lead * row_r[j], prev)
                assert rem == 0, "Bareiss division must be exact"
                row_i[j] = q
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Matrix, ncols: int | None = None) -> int:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows or ncols == 0:
        return 0
    return len(echelon(rows, ncols)[1])


def _reduced(rows: Matrix, ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    ech, pivots = echelon(rows, ncols)
    red = [[Fraction(x) for x in row] for row in ech]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        piv = red[r][c]
        red[r] = [x / piv for x in red[r]]
        for i in range(r):
            f = red[i][c]
            if f:
                red[i] = [a - f * b for a, b in zip(red[i], red[r])]
    return red, pivots


def nullspace(rows: Matrix, ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : rows . x = 0}, one vector per free column (RREF basis)."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    red, pivots = _reduced(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, c in enumerate(pivots):
            x[c] = -red[r][f]
        basis.append(tuple(x))
    return basis


def solve(rows: Matrix, rhs: Sequence[Fraction], ncols: int) -> tuple[Fraction, ...] | None:
    """One solution of rows . x = rhs (free variables zero), or None."""
    aug = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    if len(aug) != len(rows):
        raise ValueError("rhs length mismatch")
    if not aug:
        return tuple(Fraction(0) for _ in range(ncols))
    red, pivots = _reduced(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return tuple(x)


def in_span(vectors: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    if not vectors:
        return all(x == 0 for x in v)
    n = len(v)
    return rank(list(vectors) + [v], n) == rank(vectors, n)
