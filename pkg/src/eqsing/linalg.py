"""Exact linear algebra over Q: fraction-free rank/determinant and a sparse echelon."""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import lcm


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        scale = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * scale) for x in row])
    return out


def rank(matrix) -> int:
    """Rank by Bareiss fraction-free elimination."""
    a = _integer_rows(matrix)
    if not a or not a[0]:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nrows):
            ai = a[i]
            f = ai[c]
            ar = a[r]
            for j in range(c + 1, ncols):
                ai[j] = (p * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def determinant(matrix) -> Fraction:
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows = [[Fraction(x) for x in row] for row in matrix]
    scales = [lcm(*(x.denominator for x in row)) for row in rows]
    a = [[int(x * s) for x in row] for row, s in zip(rows, scales)]
    sign = 1
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        p = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (p * a[i][j] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = p
    total = 1
    for s in scales:
        total *= s
    return Fraction(sign * a[n - 1][n - 1], total)


def solve(matrix, rhs):
    """One solution of ``matrix @ x = rhs`` or None when inconsistent."""
    m = len(matrix)
    ncols = len(matrix[0]) if m else 0
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in a[r:]):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = a[i][-1]
    return x


def inverse(matrix):
    """Exact inverse of a square matrix, or None when singular."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def feasible(a_eq, b_eq) -> bool:
    """Is there x >= 0 with ``a_eq @ x = b_eq``?  Exact phase-one simplex, Bland's rule."""
    m = len(a_eq)
    if m == 0:
        return True
    k = len(a_eq[0])
    rows = []
    for row, b in zip(a_eq, b_eq):
        row = [Fraction(x) for x in row]
        b = Fraction(b)
        if b < 0:
            row, b = [-x for x in row], -b
        rows.append(row + [Fraction(int(i == len(rows))) for i in range(m)] + [b])
    basis = [k + i for i in range(m)]
    width = k + m
    # objective: minimize the sum of artificials, reduced costs kept in ``obj``
    obj = [-sum(r[j] for r in rows) for j in range(width + 1)]
    for j in range(k, width):
        obj[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break
        i = best[1]
        piv = rows[i][enter]
        rows[i] = [x / piv for x in rows[i]]
        for t in range(m):
            if t != i and rows[t][enter]:
                f = rows[t][enter]
                rows[t] = [x - f * y for x, y in zip(rows[t], rows[i])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, rows[i])]
        basis[i] = enter
    return obj[-1] == 0


class SparseEchelon:
    """Incremental row echelon form of sparse rows ``{column: Fraction}``.

    Each stored row is normalized so its leading column (the one with the
    largest ``column_key``) has coefficient 1, and leading columns are
    distinct.
    """

    def __init__(self, column_key=None):
        self.key = column_key or (lambda c: c)
        self.pivots: dict = {}

    def __len__(self):
        return len(self.pivots)

    def _lead(self, row):
        return max(row, key=self.key)

    def reduce_lead(self, row: dict) -> dict:
        row = dict(row)
        while row:
            c = self._lead(row)
            prow = self.pivots.get(c)
            if prow is None:
                return row
            f = row[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce_lead({k: Fraction(v) for k, v in row.items() if v})
        if not row:
            return False
        c = self._lead(row)
        inv = 1 / row[c]
        self.pivots[c] = {k: v * inv for k, v in row.items()}
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce_lead({k: Fraction(v) for k, v in row.items() if v})

    def reduce_full(self, row: dict) -> dict:
        """Remove every pivot column from ``row``; the rest is its normal form."""
        row = {k: Fraction(v) for k, v in row.items() if v}
        heap = [(_neg(self.key(c)), i, c) for i, c in enumerate(row)]
        heapq.heapify(heap)
        seen = set(row)
        counter = len(heap)
        done = set()
        while heap:
            _, _, c = heapq.heappop(heap)
            if c in done:
                continue
            done.add(c)
            f = row.get(c)
            if not f or c not in self.pivots:
                continue
            for k, v in self.pivots[c].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
                if k not in seen:
                    seen.add(k)
                    counter += 1
                    heapq.heappush(heap, (_neg(self.key(k)), counter, k))
        return row


def _neg(key):
    # invert a (possibly nested) tuple key of integers for a max-heap
    if isinstance(key, tuple):
        return tuple(_neg(k) for k in key)
    return -key
