"""Left-invariant vector fields as exp-polynomial frames.

A frame is the matrix ``V`` with ``X_i = V_i^mu d/dx^mu``.  Frames can be read
from the registry or derived from structure constants in coordinates of the
second kind ``g = exp(x1 T1) ... exp(xn Tn)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .liealg.core import LieAlgebraSpec, structure_constants
from .symkernel import ONE_POLY, ZERO_POLY, ExpPoly, GaussianRational, parse
from .symkernel.linalg import SingularMatrix, det, field_inverse, matmul, nullspace, poly_inverse
from .symkernel.numbers import ONE, ZERO, gr


class NonClosedExponential(ValueError):
    """An ad-matrix eigenvalue is not a Gaussian rational."""


class SingularFrame(ValueError):
    """Frame determinant is not a unit, so the inverse leaves the class."""


@dataclass(frozen=True)
class VectorField:
    """``X = sum_mu components[mu-1] * d/dx^mu``."""

    components: Tuple[ExpPoly, ...]

    @classmethod
    def of(cls, comps: Sequence) -> "VectorField":
        return cls(tuple(c if isinstance(c, ExpPoly) else ExpPoly.const(c) for c in comps))

    @classmethod
    def coordinate(cls, axis: int, dim: int = 4) -> "VectorField":
        return cls(tuple(ONE_POLY if m == axis else ZERO_POLY for m in range(1, dim + 1)))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, f) -> "VectorField":
        if not isinstance(f, ExpPoly):
            f = ExpPoly.const(f)
        return VectorField(tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def substitute(self, env) -> "VectorField":
        return VectorField(tuple(c.substitute(env) for c in self.components))

    def __str__(self) -> str:
        parts = []
        for mu, c in enumerate(self.components, 1):
            if not c.is_zero():
                parts.append(f"({c})*d{mu}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Frame:
    """Square matrix of exp-polynomials; row ``i`` holds the components of ``X_i``."""

    rows: Tuple[Tuple[ExpPoly, ...], ...]

    @classmethod
    def from_strings(cls, entries: Sequence[str], dim: int, env: Mapping[str, object] | None = None) -> "Frame":
        if len(entries) != dim * dim:
            raise ValueError(f"frame needs {dim * dim} entries, got {len(entries)}")
        vals = [parse(s, env) for s in entries]
        return cls(tuple(tuple(vals[i * dim : (i + 1) * dim]) for i in range(dim)))

    @classmethod
    def identity(cls, dim: int = 4) -> "Frame":
        return cls(tuple(VectorField.coordinate(i, dim).components for i in range(1, dim + 1)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def field(self, i: int) -> VectorField:
        """``X_i`` (1-based)."""
        return VectorField(self.rows[i - 1])

    def fields(self) -> List[VectorField]:
        return [VectorField(r) for r in self.rows]

    def combination(self, coeffs: Sequence) -> VectorField:
        """``sum_i coeffs[i] X_i``."""
        out = [ZERO_POLY] * self.dim
        for c, row in zip(coeffs, self.rows):
            if c:
                out = [o + r.scale(gr(c)) for o, r in zip(out, row)]
        return VectorField(tuple(out))

    def determinant(self) -> ExpPoly:
        return det([list(r) for r in self.rows])

    def at_origin(self):
        return [[e.value_at_origin() for e in r] for r in self.rows]

    def strings(self) -> List[str]:
        return [str(e) for r in self.rows for e in r]

    def substitute(self, env) -> "Frame":
        return Frame(tuple(tuple(e.substitute(env) for e in r) for r in self.rows))


def apply(X: VectorField, f: ExpPoly) -> ExpPoly:
    """``X(f) = sum_mu X^mu d_mu f``."""
    out = ZERO_POLY
    for mu, c in enumerate(X.components, 1):
        if not c.is_zero():
            d = f.diff(mu)
            if not d.is_zero():
                out = out + c * d
    return out


def field_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X,Y]^mu = X(Y^mu) - Y(X^mu)``."""
    return VectorField(tuple(apply(X, y) - apply(Y, x) for x, y in zip(X.components, Y.components)))


@dataclass
class FrameReport:
    ok: bool
    mismatches: List[Tuple[int, int, VectorField]]

    def __bool__(self) -> bool:
        return self.ok


def verify_frame_constants(frame: Frame, consts: Mapping, dim: Optional[int] = None) -> FrameReport:
    """Check ``[X_i,X_j] = C_ij^k X_k`` exactly for all ``i < j``."""
    n = frame.dim if dim is None else dim
    fields = frame.fields()
    bad = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs = field_bracket(fields[i - 1], fields[j - 1])
            rhs = frame.combination([consts.get((i, j, k), ZERO) for k in range(1, n + 1)])
            diff = lhs - rhs
            if not diff.is_zero():
                bad.append((i, j, diff))
    return FrameReport(not bad, bad)


def verify_frame(frame: Frame, alg: LieAlgebraSpec, env: Mapping[str, object] | None = None) -> FrameReport:
    return verify_frame_constants(frame, structure_constants(alg, env), alg.dim)


def invert_frame(frame: Frame) -> Frame:
    """Exact inverse matrix; raises :class:`SingularFrame` for non-unit determinants."""
    try:
        inv = poly_inverse([list(r) for r in frame.rows])
    except SingularMatrix as exc:
        raise SingularFrame(str(exc)) from None
    return Frame(tuple(tuple(r) for r in inv))


# matrix exponentials of constant matrices


def _charpoly(m):
    """Coefficients ``[1, c1, ..., cn]`` of ``det(tI - M)`` (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [ONE]
    mk = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        prod = matmul(m, mk)
        c = -sum((prod[i][i] for i in range(n)), ZERO) / k
        coeffs.append(c)
        mk = [[prod[i][j] + (c if i == j else ZERO) for j in range(n)] for i in range(n)]
    return coeffs


def _poly_eval(coeffs, z):
    acc = ZERO
    for c in coeffs:
        acc = acc * z + c
    return acc


def _poly_div_linear(coeffs, z):
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * z)
    return out


def _rationalize(x: float, limit: int = 10**4) -> Fraction:
    return Fraction(x).limit_denominator(limit)


def eigenvalues(m) -> List[Tuple[GaussianRational, int]]:
    """Exact eigenvalues with algebraic multiplicities.

    Numeric roots of the characteristic polynomial are rationalized and then
    confirmed exactly by synthetic division, so no floating value survives.
    """
    coeffs = _charpoly(m)
    found: List[Tuple[GaussianRational, int]] = []
    while len(coeffs) > 1:
        numeric = np.roots([complex(c) for c in coeffs])
        hit = None
        for r in sorted(numeric, key=lambda z: (abs(z.imag), z.real)):
            cand = GaussianRational(_rationalize(r.real), _rationalize(r.imag))
            if not _poly_eval(coeffs, cand):
                hit = cand
                break
        if hit is None:
            raise NonClosedExponential("characteristic polynomial has eigenvalues outside Q(i)")
        coeffs = _poly_div_linear(coeffs, hit)
        for idx, (lam, mult) in enumerate(found):
            if lam == hit:
                found[idx] = (lam, mult + 1)
                break
        else:
            found.append((hit, 1))
    return found


def _matpow(m, k):
    n = len(m)
    out = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = matmul(out, m)
    return out


def jordan_chevalley(m):
    """Split ``M = S + N`` with ``S`` diagonalizable over Q(i), ``N`` nilpotent.

    Returns ``(B, lams, N)`` where the columns of ``B`` are a basis of
    generalized eigenvectors and ``lams[c]`` is the eigenvalue of column ``c``.
    """
    n = len(m)
    cols, lams = [], []
    for lam, mult in eigenvalues(m):
        shifted = [[m[i][j] - (lam if i == j else ZERO) for j in range(n)] for i in range(n)]
        ns = nullspace(_matpow(shifted, mult), n)
        if len(ns) != mult:
            raise NonClosedExponential("generalized eigenspace has unexpected dimension")
        cols.extend(ns)
        lams.extend([lam] * mult)
    b = [[cols[c][r] for c in range(n)] for r in range(n)]
    binv = field_inverse(b)
    s = matmul(matmul(b, [[lams[i] if i == j else ZERO for j in range(n)] for i in range(n)]), binv)
    nil = [[m[i][j] - s[i][j] for j in range(n)] for i in range(n)]
    return b, lams, binv, nil


def exp_matrix(m, axis: int, sign: int = 1):
    """``exp(sign * x_axis * M)`` as a matrix of exp-polynomials."""
    n = len(m)
    if all(not x for row in m for x in row):
        return [[ONE_POLY if i == j else ZERO_POLY for j in range(n)] for i in range(n)]
    sm = [[x * sign for x in row] for row in m]
    b, lams, binv, nil = jordan_chevalley(sm)
    units = [ExpPoly.exp_linear({axis: lam}) if lam else ONE_POLY for lam in lams]
    es = [
        [
            sum((units[c].scale(b[i][c] * binv[c][j]) for c in range(n) if b[i][c] and binv[c][j]), ZERO_POLY)
            for j in range(n)
        ]
        for i in range(n)
    ]
    # finite series for the nilpotent part
    x = ExpPoly.coord(axis)
    series = [[ONE_POLY if i == j else ZERO_POLY for j in range(n)] for i in range(n)]
    power = [row[:] for row in nil]
    k = 1
    while any(v for row in power for v in row):
        coef = x**k * ExpPoly.const(GaussianRational(1, 0) / factorial(k))
        series = [[series[i][j] + coef.scale(power[i][j]) if power[i][j] else series[i][j] for j in range(n)] for i in range(n)]
        power = matmul(power, nil)
        k += 1
        if k > n:
            break
    return matmul(es, series)


def ad_matrix(consts: Mapping, j: int, dim: int):
    """``(ad T_j)_{k i} = C_{j i}^k``."""
    return [[consts.get((j, i, k), ZERO) for i in range(1, dim + 1)] for k in range(1, dim + 1)]


def maurer_cartan(consts: Mapping, dim: int, order: str = "forward"):
    """Matrix ``E[i][mu] = e^i_mu`` of ``g^{-1} dg`` in second-kind coordinates.

    ``order="forward"`` uses ``g = exp(x1 T1) ... exp(xn Tn)``; ``"reverse"``
    uses ``g = exp(xn Tn) ... exp(x1 T1)``.
    """
    if order not in ("forward", "reverse"):
        raise ValueError("order must be 'forward' or 'reverse'")
    exps = {j: exp_matrix(ad_matrix(consts, j, dim), j, -1) for j in range(1, dim + 1)}
    cols = []
    for mu in range(1, dim + 1):
        chain = range(dim, mu, -1) if order == "forward" else range(1, mu)
        vec = [[ONE_POLY if r == mu - 1 else ZERO_POLY] for r in range(dim)]
        # apply the rightmost factor first
        for j in reversed(list(chain)):
            vec = matmul(exps[j], vec)
        cols.append([v[0] for v in vec])
    return [[cols[mu][i] for mu in range(dim)] for i in range(dim)]


def derive_frame(alg: LieAlgebraSpec, env: Mapping[str, object] | None = None, order: str = "forward") -> Frame:
    """Left-invariant frame from structure constants.

    ``V = (E^T)^{-1}`` where ``E`` is the Maurer-Cartan matrix.  Raises
    :class:`NonClosedExponential` or :class:`SingularFrame` when the frame
    leaves the exp-polynomial class.
    """
    consts = structure_constants(alg, env)
    e = maurer_cartan(consts, alg.dim, order)
    et = [[e[j][i] for j in range(alg.dim)] for i in range(alg.dim)]
    try:
        v = poly_inverse(et)
    except SingularMatrix as exc:
        raise SingularFrame(str(exc)) from None
    return Frame(tuple(tuple(r) for r in v))


__all__ = [
    "Frame",
    "FrameReport",
    "NonClosedExponential",
    "SingularFrame",
    "VectorField",
    "ad_matrix",
    "apply",
    "derive_frame",
    "eigenvalues",
    "exp_matrix",
    "field_bracket",
    "invert_frame",
    "maurer_cartan",
    "verify_frame",
    "verify_frame_constants",
]
