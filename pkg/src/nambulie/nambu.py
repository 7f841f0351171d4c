"""Multivectors, n-brackets and the multiplicativity equation for top-order tensors.

For ``eta = f X_1 ^ ... ^ X_n`` built from a left-invariant frame, ``eta`` is
multiplicative exactly when ``f(e) = 0`` and ``X_i f + t_i f = q_i`` for
constants ``q_i`` with ``t_i = sum_k C_ik^k``.  :func:`solve_multiplicative`
solves that linear system over an explicit finite ansatz.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .invfields import Frame, VectorField, apply, field_bracket
from .symkernel import ONE_POLY, ZERO_POLY, ExpPoly, GaussianRational
from .symkernel.linalg import det, rref, sparse_nullspace, sparse_rref
from .symkernel.numbers import IUNIT, ONE, ZERO, ParamPoly, gr


class AnsatzNotClosed(ValueError):
    """An ansatz function is mapped outside the ansatz span by some ``X_i``."""

    def __init__(self, function: ExpPoly, field_index: int):
        super().__init__(f"X_{field_index} maps {function} outside the ansatz span")
        self.function = function
        self.field_index = field_index


def _perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (0 if there is a repeat)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Multivector:
    """Antisymmetric contravariant tensor stored on increasing index tuples.

    ``prefactor`` and ``factors`` record the decomposable form when the tensor
    was built with :func:`wedge`.
    """

    order: int
    dim: int
    components: Dict[Tuple[int, ...], ExpPoly]
    prefactor: Optional[ExpPoly] = None
    factors: Optional[Tuple[VectorField, ...]] = None

    def component(self, idx: Sequence[int]) -> ExpPoly:
        """Component for any index tuple, with the alternating sign."""
        s = _perm_sign(idx)
        if not s:
            return ZERO_POLY
        c = self.components.get(tuple(sorted(idx)), ZERO_POLY)
        return c if s > 0 else -c

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def nonzero(self) -> Dict[Tuple[int, ...], ExpPoly]:
        return {k: v for k, v in sorted(self.components.items()) if not v.is_zero()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.order == other.order and self.dim == other.dim and self.nonzero() == other.nonzero()

    def __hash__(self) -> int:
        return hash((self.order, self.dim, tuple(self.nonzero().items())))

    def __str__(self) -> str:
        parts = [f"eta^{''.join(map(str, k))} = {v}" for k, v in self.nonzero().items()]
        return "; ".join(parts) if parts else "0"


def multivector(components: Mapping[Sequence[int], ExpPoly], order: int, dim: int = 4) -> Multivector:
    """Build from components given on arbitrary index tuples."""
    out: Dict[Tuple[int, ...], ExpPoly] = {}
    for idx, v in components.items():
        s = _perm_sign(idx)
        if not s or len(idx) != order:
            raise ValueError(f"invalid component label {idx}")
        key = tuple(sorted(idx))
        v = v if s > 0 else -v
        out[key] = out[key] + v if key in out else v
    return Multivector(order, dim, {k: v for k, v in out.items() if not v.is_zero()})


def _det(rows):
    return det([list(r) for r in rows])


def wedge(f, fields: Sequence[VectorField]) -> Multivector:
    """``f * X_1 ^ ... ^ X_n`` in components."""
    if not isinstance(f, ExpPoly):
        f = ExpPoly.const(f)
    n = len(fields)
    dim = fields[0].dim
    comps = {}
    for idx in combinations(range(1, dim + 1), n):
        d = _det([[X.components[m - 1] for m in idx] for X in fields])
        if not d.is_zero():
            v = f * d
            if not v.is_zero():
                comps[idx] = v
    return Multivector(n, dim, comps, f, tuple(fields))


def top(f: ExpPoly, dim: int = 4) -> Multivector:
    """``f * d_1 ^ ... ^ d_dim``."""
    return Multivector(dim, dim, {tuple(range(1, dim + 1)): f} if not f.is_zero() else {})


def nbracket(eta: Multivector, fs: Sequence[ExpPoly]) -> ExpPoly:
    """``{f_1, ..., f_n} = eta(df_1, ..., df_n)``."""
    if len(fs) != eta.order:
        raise ValueError(f"bracket of order {eta.order} needs {eta.order} functions")
    grads = [[f.diff(m) for m in range(1, eta.dim + 1)] for f in fs]
    out = ZERO_POLY
    for idx, c in eta.components.items():
        if c.is_zero():
            continue
        d = _det([[g[m - 1] for m in idx] for g in grads])
        if not d.is_zero():
            out = out + c * d
    return out


def hamiltonian_field(eta: Multivector, fs: Sequence[ExpPoly]) -> VectorField:
    """``X_{f_1..f_{n-1}}``, components read off from the coordinate functions."""
    if len(fs) != eta.order - 1:
        raise ValueError(f"Hamiltonian field of order {eta.order} needs {eta.order - 1} functions")
    return VectorField(tuple(nbracket(eta, list(fs) + [ExpPoly.coord(m)]) for m in range(1, eta.dim + 1)))


def lie_derivative(X: VectorField, eta: Multivector) -> Multivector:
    """``(L_X eta)^{mu..} = X(eta^{mu..}) - sum_a (d_nu X^{mu_a}) eta^{mu..nu..}``."""
    dim, n = eta.dim, eta.order
    dX = [[X.components[m].diff(nu) for nu in range(1, dim + 1)] for m in range(dim)]
    out = {}
    for idx in combinations(range(1, dim + 1), n):
        v = apply(X, eta.components.get(idx, ZERO_POLY))
        for a, mu in enumerate(idx):
            for nu in range(1, dim + 1):
                g = dX[mu - 1][nu - 1]
                if g.is_zero():
                    continue
                swapped = idx[:a] + (nu,) + idx[a + 1 :]
                c = eta.component(swapped)
                if not c.is_zero():
                    v = v - g * c
        if not v.is_zero():
            out[idx] = v
    return Multivector(n, dim, out)


def random_polynomial(rng: random.Random, dim: int = 4, degree: int = 2, coeff: int = 3) -> ExpPoly:
    """Polynomial of total degree at most ``degree`` with small integer coefficients."""
    out = ZERO_POLY
    for m in _monomials(dim, degree):
        c = rng.randint(-coeff, coeff)
        if c:
            out = out + ExpPoly.monomial(m, c)
    if out.is_zero():
        out = ExpPoly.coord(rng.randint(1, dim))
    return out


def _monomials(dim: int, degree: int, axes: Optional[Sequence[int]] = None) -> List[Dict[int, int]]:
    axes = list(range(1, dim + 1)) if axes is None else list(axes)
    out: List[Dict[int, int]] = [{}]
    frontier: List[Dict[int, int]] = [{}]
    for _ in range(degree):
        nxt = []
        seen = set()
        for m in frontier:
            for ax in axes:
                if m and ax < max(m):
                    continue
                mm = dict(m)
                mm[ax] = mm.get(ax, 0) + 1
                key = tuple(sorted(mm.items()))
                if key not in seen:
                    seen.add(key)
                    nxt.append(mm)
        out.extend(nxt)
        frontier = nxt
    return out


@dataclass
class IdentityReport:
    ok: bool
    functions: Optional[Tuple[ExpPoly, ...]] = None
    component: Optional[Tuple[Tuple[int, ...], ExpPoly]] = None

    def __bool__(self) -> bool:
        return self.ok


def fundamental_identity_check(eta: Multivector, trials: int = 5, seed: int = 0) -> IdentityReport:
    """Check ``L_{X_fs} eta = 0`` for seeded random polynomial tuples ``fs``."""
    rng = random.Random(seed)
    for _ in range(trials):
        fs = tuple(random_polynomial(rng, eta.dim) for _ in range(eta.order - 1))
        L = lie_derivative(hamiltonian_field(eta, fs), eta)
        nz = L.nonzero()
        if nz:
            key = next(iter(nz))
            return IdentityReport(False, fs, (key, nz[key]))
    return IdentityReport(True)


# multiplicativity solver


@dataclass
class MultiplicativityProblem:
    """``X_i f + t_i f = q_i`` for the given fields and traces, ``f`` in ``span(ansatz)``."""

    fields: Sequence[VectorField]
    trace: Sequence[GaussianRational]
    ansatz: Sequence[ExpPoly]


@dataclass
class SolutionSpace:
    """Solutions of the multiplicativity system.

    ``particular`` maps each free ``q`` index (1-based) to ``(qvec, f)``, the
    solution with that ``q`` set to one and the other free ``q`` set to zero;
    ``qvec`` shows how dependent ``q`` follow.  ``homogeneous`` spans the
    solutions with all ``q_i = 0``.  ``forced_zero`` lists the ``q`` that must
    vanish.
    """

    n: int
    particular: Dict[int, Tuple[Tuple[GaussianRational, ...], ExpPoly]] = field(default_factory=dict)
    homogeneous: List[ExpPoly] = field(default_factory=list)
    forced_zero: List[int] = field(default_factory=list)

    def functions(self) -> List[ExpPoly]:
        return [f for _, f in self.particular.values()] + list(self.homogeneous)

    def general(self) -> ExpPoly:
        """``sum_i q_i * f_i`` over the free ``q`` (homogeneous part omitted)."""
        out = ZERO_POLY
        for i, (_, f) in sorted(self.particular.items()):
            out = out + f * ExpPoly.const(ParamPoly.symbol(f"q{i}"))
        return out

    def contains(self, f: ExpPoly) -> bool:
        """Exact test that ``f`` is in the span of the solution functions."""
        return in_span(f, self.functions())

    def dependent_q(self) -> Dict[int, Dict[int, GaussianRational]]:
        """For each non-free, non-forced ``q_j``: its expression in the free ``q``."""
        out: Dict[int, Dict[int, GaussianRational]] = {}
        for i, (qvec, _) in self.particular.items():
            for j, v in enumerate(qvec, 1):
                if j != i and v:
                    out.setdefault(j, {})[i] = v
        return out


def in_span(f: ExpPoly, funcs: Sequence[ExpPoly]) -> bool:
    """Exact linear-span membership over the rationals."""
    if f.is_zero():
        return True
    keys = set(k for k, _ in f.items())
    for g in funcs:
        keys.update(k for k, _ in g.items())
    keys = sorted(keys, key=repr)
    fd = dict(f.items())
    gds = [dict(g.items()) for g in funcs]
    rows = []
    for k in keys:
        for part in ("re", "im"):
            row = [_part(gd.get(k, ZERO), part) for gd in gds]
            row.append(_part(fd.get(k, ZERO), part))
            rows.append(row)
    if not funcs:
        return False
    _, pivots = rref(rows, len(funcs) + 1)
    return len(funcs) not in pivots


def _part(c, part):
    if type(c) is ParamPoly:
        raise ValueError("unbound parameter in exact solve")
    return GaussianRational._raw(c.re if part == "re" else c.im, ZERO.re)


def multiplicativity_residual(f: ExpPoly, fields: Sequence[VectorField], trace: Sequence) -> Optional[Tuple[GaussianRational, ...]]:
    """The constants ``q_i`` if ``X_i f + t_i f`` are all constant and ``f(0)=0``.

    Returns ``None`` otherwise.  This checks a candidate directly, without the
    linear solver.
    """
    if f.value_at_origin():
        return None
    qs = []
    for X, t in zip(fields, trace):
        g = apply(X, f) + f.scale(gr(t)) if t else apply(X, f)
        if not g.is_constant():
            return None
        qs.append(g.constant_value())
    return tuple(qs)


def check_closed(problem: MultiplicativityProblem, images=None) -> None:
    """Raise :class:`AnsatzNotClosed` if some ``X_i b`` leaves the ansatz span."""
    keys = set()
    for b in problem.ansatz:
        keys.update(k for k, _ in b.items())
    keys.add(((), ()))
    span = list(problem.ansatz) + [ONE_POLY]
    for i, X in enumerate(problem.fields, 1):
        for j, b in enumerate(problem.ansatz):
            img = images[i - 1][j] if images is not None else apply(X, b)
            if any(k not in keys for k, _ in img.items()) and not in_span(img, span):
                raise AnsatzNotClosed(b, i)


def solve_multiplicative(problem: MultiplicativityProblem, check: bool = True) -> SolutionSpace:
    """Exact affine solution space of ``X_i f + t_i f = q_i``, ``f(0) = 0``.

    Unknowns are real coefficients of the ansatz functions and the ``q_i``.
    Complex coefficients of the exp-polynomial identities are split into real
    and imaginary equations, which are solved over the rationals.
    """
    n = len(problem.fields)
    basis = list(problem.ansatz)
    m = len(basis)
    images = [[apply(X, b) for b in basis] for X in problem.fields]
    if check:
        check_closed(problem, images)
    # column layout: q_1..q_n first, then ansatz coefficients
    rows_by_key: Dict[Tuple, Dict[int, GaussianRational]] = {}
    const_key = ((), ())
    for i, t in enumerate(problem.trace):
        t = gr(t)
        for j, b in enumerate(basis):
            img = images[i][j]
            if t:
                img = img + b.scale(t)
            for k, c in img.items():
                r = rows_by_key.setdefault((i, k), {})
                r[n + j] = r[n + j] + c if n + j in r else c
        r = rows_by_key.setdefault((i, const_key), {})
        r[i] = r[i] - ONE if i in r else -ONE
    origin = {n + j: b.value_at_origin() for j, b in enumerate(basis)}
    rows = []
    for r in list(rows_by_key.values()) + [origin]:
        re = {c: x.re for c, x in r.items() if x.re}
        im = {c: x.im for c, x in r.items() if x.im}
        if re:
            rows.append(re)
        if im:
            rows.append(im)
    ns = sparse_nullspace(rows, n + m)
    space = SolutionSpace(n)
    if not ns:
        space.forced_zero = list(range(1, n + 1))
        return space
    red = sparse_rref(ns)
    for p in sorted(red):
        row = red[p]
        f = ZERO_POLY
        for j in range(m):
            v = row.get(n + j)
            if v:
                f = f + basis[j].scale(gr(v))
        if p < n:
            space.particular[p + 1] = (tuple(gr(row.get(i, 0)) for i in range(n)), f)
        else:
            space.homogeneous.append(f)
    for i in range(n):
        if all(not row.get(i) for row in red.values()):
            space.forced_zero.append(i + 1)
    return space


# ansatz construction


def _freq_key(freq_tuple) -> Tuple:
    return tuple(freq_tuple)


def _freq_add(a, b):
    d = dict(a)
    for ax, lam in b:
        s = d.get(ax, ZERO) + lam
        if s:
            d[ax] = s
        else:
            d.pop(ax, None)
    return tuple(sorted(d.items()))


def _neg(f):
    return tuple((ax, -lam) for ax, lam in f)


def frame_frequencies(frame: Frame) -> set:
    """Frequencies of the frame entries, of the determinant and of its inverse."""
    freqs = set()
    for row in frame.rows:
        for e in row:
            freqs |= e.frequencies()
    d = frame.determinant()
    for fr in d.frequencies():
        freqs.add(fr)
        freqs.add(_neg(fr))
    return freqs


def _real_functions(powers: Dict[int, int], freq) -> List[ExpPoly]:
    """Real basis functions for ``x^powers`` times the frequency and its conjugate."""
    mono = ExpPoly.monomial(powers)
    if all(lam.is_real() for _, lam in freq):
        return [mono * ExpPoly.exp_linear(dict(freq))]
    conj = {ax: lam.conjugate() for ax, lam in freq}
    e1 = ExpPoly.exp_linear(dict(freq))
    e2 = ExpPoly.exp_linear(conj)
    half = GaussianRational(1, 0) / 2
    cos_part = (e1 + e2).scale(half)
    sin_part = (e1 - e2).scale(half * IUNIT.conjugate())
    return [mono * cos_part, mono * sin_part]


def _canonical_pair(freq):
    """Representative of ``{freq, conj(freq)}``."""
    conj = tuple((ax, lam.conjugate()) for ax, lam in freq)
    return min(freq, conj, key=lambda f: tuple((ax, lam.sort_key()) for ax, lam in f))


def default_ansatz(
    fields: Sequence[VectorField],
    trace: Sequence,
    frame: Optional[Frame] = None,
    axes: Optional[Sequence[int]] = None,
    degree: int = 2,
    extra: Iterable = (),
) -> List[ExpPoly]:
    """Heuristic finite ansatz that is closed under the given fields.

    Monomials of degree at most ``degree`` in ``axes`` times exponentials whose
    frequencies are sums of at most two frequencies read from the fields, from
    the frame determinant and its inverse, ``-t_i x^mu`` for the traces and
    the ``extra`` frequencies.  Functions whose images leave the span are
    pruned until the set is closed.
    """
    dim = fields[0].dim
    axes = list(range(1, dim + 1)) if axes is None else list(axes)
    base = set()
    for X in fields:
        for e in X.components:
            base |= e.frequencies()
    if frame is not None:
        base |= frame_frequencies(frame)
    # e^{-t_i x^mu} solves X_i f + t_i f = 0 when X_i is close to d_mu
    for t in trace:
        if t:
            for mu in axes:
                base.add(((mu, -gr(t)),))
                base.add(((mu, gr(t)),))
    base |= set(extra)
    base = {f for f in base if all(ax in axes for ax, _ in f)}
    freqs = {()}
    for a in base:
        freqs.add(a)
        for b in base:
            freqs.add(_freq_add(a, b))
    pairs = sorted({_canonical_pair(f) for f in freqs}, key=lambda f: tuple((ax, lam.sort_key()) for ax, lam in f))
    funcs: List[ExpPoly] = []
    for mono in _monomials(dim, degree, axes):
        for fr in pairs:
            funcs.extend(_real_functions(mono, fr))
    return prune_ansatz(funcs, fields)


def prune_ansatz(funcs: Sequence[ExpPoly], fields: Sequence[VectorField]) -> List[ExpPoly]:
    """Drop functions whose images under the fields escape the key span."""
    funcs = list(funcs)
    images = {id(b): [apply(X, b) for X in fields] for b in funcs}
    while True:
        keys = {((), ())}
        for b in funcs:
            keys.update(k for k, _ in b.items())
        keep = [b for b in funcs if all(all(k in keys for k, _ in img.items()) for img in images[id(b)])]
        if len(keep) == len(funcs):
            return keep
        funcs = keep


# subalgebra correspondence


@dataclass
class WedgeClosureReport:
    closed: bool
    nambu: bool
    asserted: bool
    witness: Optional[Tuple[int, int]] = None

    @property
    def ok(self) -> bool:
        return (not self.asserted) or (self.closed == self.nambu) or (not self.closed)


def fields_closed(fields: Sequence[VectorField]) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Whether the field brackets stay in the constant-coefficient span of the fields."""
    n = len(fields)
    for a in range(n):
        for b in range(a + 1, n):
            br = field_bracket(fields[a], fields[b])
            if not _const_combination(br, fields):
                return False, (a + 1, b + 1)
    return True, None


def _const_combination(v: VectorField, fields: Sequence[VectorField]) -> bool:
    rows = []
    keys = set()
    for X in list(fields) + [v]:
        for c in X.components:
            keys.update(k for k, _ in c.items())
    for mu in range(v.dim):
        for k in keys:
            for part in ("re", "im"):
                row = [_part(dict(X.components[mu].items()).get(k, ZERO), part) for X in fields]
                row.append(_part(dict(v.components[mu].items()).get(k, ZERO), part))
                rows.append(row)
    if not rows:
        return True
    _, piv = rref(rows, len(fields) + 1)
    return len(fields) not in piv


def theorem1_check(basis_coeffs: Sequence[Sequence], frame: Frame, closure_ok: bool, trials: int = 3, seed: int = 0) -> WedgeClosureReport:
    """Compare subalgebra closure with the Nambu property of ``Y_1 ^ Y_2 ^ Y_3``.

    ``Y_a = sum_i basis_coeffs[a][i] X_i`` for the frame ``X``.  Closure implies
    the Nambu property; the converse is only compared, not asserted.
    """
    ys = [frame.combination(c) for c in basis_coeffs]
    eta = wedge(ONE_POLY, ys)
    nambu = bool(fundamental_identity_check(eta, trials, seed))
    return WedgeClosureReport(closure_ok, nambu, closure_ok)


__all__ = [
    "AnsatzNotClosed",
    "IdentityReport",
    "MultiplicativityProblem",
    "Multivector",
    "SolutionSpace",
    "WedgeClosureReport",
    "check_closed",
    "default_ansatz",
    "fields_closed",
    "frame_frequencies",
    "fundamental_identity_check",
    "hamiltonian_field",
    "in_span",
    "lie_derivative",
    "multiplicativity_residual",
    "multivector",
    "nbracket",
    "prune_ansatz",
    "random_polynomial",
    "solve_multiplicative",
    "theorem1_check",
    "top",
    "wedge",
]
