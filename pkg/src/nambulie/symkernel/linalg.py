"""Exact linear algebra over Q(i) and over the exp-polynomial ring.

Matrices are lists of rows.  Field routines accept any entries supporting
``+ - * /`` exactly (Gaussian rationals, backend rationals).
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence

from .exppoly import ONE_POLY, ZERO_POLY, ExpPoly
from .numbers import ONE, ZERO, Q, gr


class SingularMatrix(ZeroDivisionError):
    """Matrix has no inverse in the requested ring."""


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(matrix, pivots)`` where ``pivots`` lists pivot column indices.
    """
    m = [[gr(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        row = m[r]
        if inv != ONE:
            m[r] = row = [x * inv if x else x for x in row]
        nz = [j for j in range(c, len(row)) if row[j]]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f:
                    ri = m[i]
                    for j in nz:
                        ri[j] = ri[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def sparse_rref(rows: Iterable[Mapping[int, object]]) -> Dict[int, Dict[int, object]]:
    """Reduced row echelon form of sparse rows over an exact field.

    Rows map column index to a nonzero entry (rationals or Gaussian
    rationals).  Returns ``{pivot column: reduced row}``; each row has a 1 at
    its pivot and zeros at every other pivot column.
    """
    piv: Dict[int, Dict[int, object]] = {}
    for src in rows:
        r = {c: v for c, v in src.items() if v}
        for p in sorted(c for c in r if c in piv):
            f = r.get(p)
            if f:
                for c, v in piv[p].items():
                    x = r.get(c, 0) - f * v
                    if x:
                        r[c] = x
                    else:
                        r.pop(c, None)
        if not r:
            continue
        p = min(r)
        inv = Q(1) / r[p]
        r = {c: v * inv for c, v in r.items()}
        for q, row in piv.items():
            f = row.get(p)
            if f:
                for c, v in r.items():
                    x = row.get(c, 0) - f * v
                    if x:
                        row[c] = x
                    else:
                        row.pop(c, None)
        piv[p] = r
    return piv


def sparse_nullspace(rows: Iterable[Mapping[int, object]], ncols: int) -> List[Dict[int, object]]:
    """Basis of the nullspace of sparse rows, one free column set to 1 per vector."""
    piv = sparse_rref(rows)
    out = []
    for f in range(ncols):
        if f in piv:
            continue
        v = {f: Q(1)}
        for p, row in piv.items():
            x = row.get(f)
            if x:
                v[p] = -x
        out.append(v)
    return out


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> List[list]:
    """Basis of ``{v : A v = 0}`` with one free variable set to 1 per vector."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence):
    """One exact solution of ``a x = b`` or ``None`` if inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(r) + [y] for r, y in zip(a, b)]
    m, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [ZERO] * n
    for i, p in enumerate(pivots):
        x[p] = m[i][n]
    return x


def matmul(a, b):
    nb = len(b[0])
    out = []
    for row in a:
        new = []
        for j in range(nb):
            acc = None
            for k, x in enumerate(row):
                y = b[k][j]
                if x and y:
                    t = x * y
                    acc = t if acc is None else acc + t
            new.append(acc if acc is not None else _zero_like(row[0] if row else ZERO))
        out.append(new)
    return out


def _zero_like(x):
    return ZERO_POLY if type(x) is ExpPoly else ZERO


def identity(n: int, poly: bool = False):
    one, zero = (ONE_POLY, ZERO_POLY) if poly else (ONE, ZERO)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def field_inverse(a):
    n = len(a)
    aug = [list(map(gr, r)) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a)]
    m, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in m]


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def det(a):
    """Determinant by cofactor expansion (exact in any commutative ring)."""
    n = len(a)
    if n == 0:
        return ONE_POLY
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = None
    for j in range(n):
        x = a[0][j]
        if not x:
            continue
        minor = [row[:j] + row[j + 1 :] for row in a[1:]]
        t = x * det(minor)
        if j % 2:
            t = -t
        total = t if total is None else total + t
    return total if total is not None else _zero_like(a[0][0])


def adjugate(a):
    n = len(a)
    if n == 1:
        return [[ONE_POLY if type(a[0][0]) is ExpPoly else ONE]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1 :] for k, row in enumerate(a) if k != i]
            c = det(minor)
            out[j][i] = -c if (i + j) % 2 else c
    return out


def poly_inverse(a):
    """Inverse of an exp-polynomial matrix whose determinant is a unit.

    Raises :class:`SingularMatrix` when the determinant is not of the form
    ``c * exp(lambda.x)``, since the inverse then leaves the function class.
    """
    d = det(a)
    if not d.is_unit():
        raise SingularMatrix(f"determinant {d} is not an exponential unit")
    dinv = d.unit_inverse()
    return [[x * dinv for x in row] for row in adjugate(a)]


__all__ = [
    "SingularMatrix",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "matmul",
    "identity",
    "field_inverse",
    "det",
    "adjugate",
    "poly_inverse",
]
