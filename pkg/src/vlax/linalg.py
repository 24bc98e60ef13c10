"""Exact linear algebra over the rationals on lists of ``Fraction`` rows."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

Matrix = List[List[Fraction]]


def to_fractions(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def add(a: Matrix, b: Matrix, scale=1) -> Matrix:
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def rref(a: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of {x : a x = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    red, pivots = rref(a) if a else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    return basis


def sparse_nullspace(rows: List[Dict[int, Fraction]], ncols: int) -> Matrix:
    """Nullspace for a system given as sparse rows {column: coefficient}."""
    red: Dict[int, Dict[int, Fraction]] = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        for pc, prow in red.items():
            if pc in row:
                f = row[pc]
                for c, v in prow.items():
                    nv = row.get(c, 0) - f * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
        if not row:
            continue
        pc = min(row)
        inv = 1 / row[pc]
        row = {c: v * inv for c, v in row.items()}
        for qc, qrow in red.items():
            if pc in qrow:
                f = qrow[pc]
                for c, v in row.items():
                    nv = qrow.get(c, 0) - f * v
                    if nv:
                        qrow[c] = nv
                    else:
                        qrow.pop(c, None)
        red[pc] = row
    free = [c for c in range(ncols) if c not in red]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for pc, prow in red.items():
            if fcol in prow:
                v[pc] = -prow[fcol]
        basis.append(v)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def solve(a: Matrix, b: Sequence[Fraction]) -> List[Fraction] | None:
    """One solution of a x = b, or None when inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(red, pivots):
        x[pc] = row[n]
    return x


def column_space(a: Matrix) -> Matrix:
    """Basis (as vectors) of the span of the columns of a, in RREF."""
    red, _ = rref(transpose(a))
    return red


def span_basis(vectors: Sequence[Sequence[Fraction]]) -> Matrix:
    vs = [list(v) for v in vectors]
    if not vs:
        return []
    return rref(vs)[0]


def in_span(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank([list(b) for b in basis] + [list(v)]) == rank([list(b) for b in basis])


def is_subspace(inner: Sequence[Sequence[Fraction]], outer: Sequence[Sequence[Fraction]]) -> bool:
    return all(in_span(v, outer) for v in inner)


def fmt_matrix(a: Matrix) -> str:
    cells = [[str(x) for x in row] for row in a]
    w = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)
