"""Structure constants, Jacobi checks, trace vectors and subalgebra closure."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..symkernel import ExpPoly, GaussianRational, ParamPoly, UnboundParameter, parse
from ..symkernel.linalg import rank, solve
from ..symkernel.numbers import ZERO, as_rational, gr

AbstractVector = Tuple[GaussianRational, ...]

DEFAULT_SWEEP = ("-2", "-1", "-1/2", "1/2", "1", "2")
# rational points on the unit circle used for mixing angles
PYTHAGOREAN_PAIRS = (("3/5", "4/5"), ("4/5", "3/5"), ("-3/5", "4/5"), ("5/13", "12/13"))


class DegenerateBasis(ValueError):
    """Subalgebra basis is linearly dependent after parameter substitution."""


class JacobiViolation(ValueError):
    """Structure constants fail the Jacobi identity."""


@dataclass(frozen=True)
class ParamSpec:
    """A classification parameter.

    ``kind="angle"`` stands for a mixing angle ``phi`` and is bound through the
    two names ``c<phi>`` and ``s<phi>`` (its cosine and sine).  ``sweep``
    overrides the global sweep values for this parameter, e.g. to stay inside
    the classification range of the family.
    """

    name: str
    exclude: Tuple[str, ...] = ()
    kind: str = "real"
    sweep: Tuple[str, ...] = ()

    def names(self) -> Tuple[str, ...]:
        if self.kind == "angle":
            return (f"c{self.name}", f"s{self.name}")
        return (self.name,)


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Real Lie algebra given by sparse structure constants ``C_ij^k`` (i < j).

    Indices are 1-based.  ``constants`` holds ``(i, j, k, expr)`` with ``expr``
    a constant expression in the parameters.  ``excluded_points`` lists joint
    parameter bindings (as ``{"a": "1", "b": "0"}``) that leave the family.
    """

    name: str
    dim: int
    constants: Tuple[Tuple[int, int, int, str], ...]
    params: Tuple[ParamSpec, ...] = ()
    typeset: str = ""
    excluded_points: Tuple[Tuple[Tuple[str, str], ...], ...] = ()

    def param_names(self) -> List[str]:
        return [n for p in self.params for n in p.names()]

    def structure_constants(self, env: Mapping[str, object] | None = None) -> Dict[Tuple[int, int, int], GaussianRational]:
        """Exact ``C_ij^k`` for all ordered pairs, antisymmetry filled in."""
        return structure_constants(self, env)


@dataclass(frozen=True)
class SubalgebraSpec:
    """A listed three-dimensional subalgebra with basis in terms of ``X1..Xn``.

    Basis vectors are expression strings such as ``"X1+a*X4"`` or
    ``"cphi*X2+sphi*X3"``; parameters not belonging to the parent live in
    ``params``.
    """

    parent: str
    basis: Tuple[str, ...]
    claimed_type: str = ""
    id: str = ""
    params: Tuple[ParamSpec, ...] = ()


def _constant_scalar(src: str, env: Mapping[str, object] | None):
    e = parse(src, env)
    if not e.is_constant():
        raise ValueError(f"structure constant {src!r} is not a constant")
    return e.constant_value()


def structure_constants(alg: LieAlgebraSpec, env: Mapping[str, object] | None = None):
    env = env or {}
    out: Dict[Tuple[int, int, int], GaussianRational] = {}
    for i, j, k, src in alg.constants:
        v = _constant_scalar(src, env)
        if type(v) is ParamPoly:
            raise UnboundParameter(sorted(v.params())[0])
        if not v:
            continue
        if i == j:
            raise ValueError(f"C_{i}{i}^{k} must vanish")
        a, b, s = (i, j, v) if i < j else (j, i, -v)
        out[(a, b, k)] = out.get((a, b, k), ZERO) + s
        out[(b, a, k)] = -out[(a, b, k)]
    return {key: v for key, v in out.items() if v}


def _basis_vector(i: int, dim: int) -> AbstractVector:
    return tuple(gr(1) if m == i else ZERO for m in range(1, dim + 1))


def bracket(u: Sequence, v: Sequence, alg: LieAlgebraSpec, env: Mapping[str, object] | None = None, consts=None) -> AbstractVector:
    """``[u, v]^k = sum_ij u^i v^j C_ij^k``."""
    if len(u) != alg.dim or len(v) != alg.dim:
        raise ValueError("vector dimension does not match the algebra")
    c = consts if consts is not None else structure_constants(alg, env)
    w = [ZERO] * alg.dim
    for (i, j, k), val in c.items():
        a, b = u[i - 1], v[j - 1]
        if a and b:
            w[k - 1] = w[k - 1] + gr(a) * gr(b) * val
    return tuple(w)


def _bracket_consts(u, v, c, dim):
    w = [ZERO] * dim
    for (i, j, k), val in c.items():
        a, b = u[i - 1], v[j - 1]
        if a and b:
            w[k - 1] = w[k - 1] + a * b * val
    return w


@dataclass
class JacobiReport:
    ok: bool
    triple: Optional[Tuple[int, int, int]] = None
    residual: Optional[AbstractVector] = None

    def __bool__(self) -> bool:
        return self.ok


def jacobi_from_constants(c: Mapping, dim: int) -> JacobiReport:
    """Exact Jacobi check ``sum_cyclic [X_i,[X_j,X_k]] = 0`` for ``i<j<k``."""
    e = [_basis_vector(i, dim) for i in range(1, dim + 1)]
    for i, j, k in combinations(range(1, dim + 1), 3):
        total = [ZERO] * dim
        for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
            inner = _bracket_consts(e[b - 1], e[d - 1], c, dim)
            outer = _bracket_consts(e[a - 1], inner, c, dim)
            total = [x + y for x, y in zip(total, outer)]
        if any(total):
            return JacobiReport(False, (i, j, k), tuple(total))
    return JacobiReport(True)


def jacobi_check(alg: LieAlgebraSpec, env: Mapping[str, object] | None = None) -> JacobiReport:
    return jacobi_from_constants(structure_constants(alg, env), alg.dim)


def trace_vector(alg: LieAlgebraSpec, env: Mapping[str, object] | None = None) -> AbstractVector:
    """``t_i = sum_k C_ik^k``."""
    return trace_from_constants(structure_constants(alg, env), alg.dim)


def trace_from_constants(c: Mapping, dim: int) -> AbstractVector:
    t = [ZERO] * dim
    for (i, k, k2), v in c.items():
        if k == k2:
            t[i - 1] = t[i - 1] + v
    return tuple(t)


def parse_vector(src: str, dim: int, env: Mapping[str, object] | None = None) -> AbstractVector:
    """Coefficients of an abstract vector written like ``"X1+a*X4"``."""
    env = dict(env or {})
    names = [f"X{i}" for i in range(1, dim + 1)]
    e = parse(src, {k: v for k, v in env.items() if k not in names})
    if not e.is_constant():
        raise ValueError(f"basis vector {src!r} must not depend on coordinates")
    s = e.constant_value()
    if type(s) is not ParamPoly:
        if s:
            raise ValueError(f"basis vector {src!r} has a constant part")
        return tuple(ZERO for _ in names)
    coeffs = [ZERO] * dim
    for mono, c in s.terms.items():
        xs = [(n, k) for n, k in mono if n in names]
        rest = [(n, k) for n, k in mono if n not in names]
        if rest:
            raise UnboundParameter(rest[0][0])
        if len(xs) != 1 or xs[0][1] != 1:
            raise ValueError(f"basis vector {src!r} is not linear in {', '.join(names)}")
        i = names.index(xs[0][0])
        coeffs[i] = coeffs[i] + c
    return tuple(coeffs)


@dataclass
class ClosureReport:
    ok: bool
    induced: Dict[Tuple[int, int, int], GaussianRational] = field(default_factory=dict)
    witness: Optional[Tuple[int, int]] = None
    bracket: Optional[AbstractVector] = None

    def __bool__(self) -> bool:
        return self.ok


def basis_vectors(sub: SubalgebraSpec, dim: int, env: Mapping[str, object] | None = None) -> List[AbstractVector]:
    vecs = [parse_vector(b, dim, env) for b in sub.basis]
    if rank([list(v) for v in vecs]) < len(vecs):
        raise DegenerateBasis(f"basis {sub.basis} is dependent at {dict(env or {})}")
    return vecs


def closure_from_vectors(vecs: Sequence[AbstractVector], c: Mapping, dim: int) -> ClosureReport:
    n = len(vecs)
    cols = [[vecs[a][m] for a in range(n)] for m in range(dim)]
    induced: Dict[Tuple[int, int, int], GaussianRational] = {}
    for a, b in combinations(range(n), 2):
        w = _bracket_consts(vecs[a], vecs[b], c, dim)
        coef = solve(cols, w)
        if coef is None:
            return ClosureReport(False, witness=(a + 1, b + 1), bracket=tuple(w))
        for k, v in enumerate(coef):
            if v:
                induced[(a + 1, b + 1, k + 1)] = v
                induced[(b + 1, a + 1, k + 1)] = -v
    return ClosureReport(True, induced=induced)


def subalgebra_closure_check(sub: SubalgebraSpec, alg: LieAlgebraSpec, env: Mapping[str, object] | None = None) -> ClosureReport:
    """Check that the basis spans a subalgebra; return induced constants on success.

    Raises :class:`DegenerateBasis` when the basis is dependent at ``env``.
    """
    vecs = basis_vectors(sub, alg.dim, env)
    return closure_from_vectors(vecs, structure_constants(alg, env), alg.dim)


def coordinate_subalgebras(alg: LieAlgebraSpec, env: Mapping[str, object] | None = None, size: int = 3) -> List[Tuple[int, ...]]:
    """Index sets ``I`` with ``span{X_i : i in I}`` closed under the bracket."""
    c = structure_constants(alg, env)
    out = []
    for idx in combinations(range(1, alg.dim + 1), size):
        vecs = [_basis_vector(i, alg.dim) for i in idx]
        if closure_from_vectors(vecs, c, alg.dim):
            out.append(idx)
    return out


def constants_text(c: Mapping, names: Sequence[str] | None = None) -> str:
    """``[T2,T4]=T2, [T3,T4]=-T3, ...`` listing for ``i < j``."""
    per_pair: Dict[Tuple[int, int], List[Tuple[int, GaussianRational]]] = {}
    for (i, j, k), v in sorted(c.items()):
        if i < j:
            per_pair.setdefault((i, j), []).append((k, v))
    parts = []
    for (i, j), terms in per_pair.items():
        rhs = ""
        for k, v in terms:
            sym = f"T{k}" if names is None else names[k - 1]
            if v == 1:
                piece = sym
            elif v == -1:
                piece = "-" + sym
            else:
                piece = f"({v})*{sym}" if (v.re and v.im) else f"{v}*{sym}"
            if rhs and not piece.startswith("-"):
                rhs += "+"
            rhs += piece
        li = f"T{i}" if names is None else names[i - 1]
        lj = f"T{j}" if names is None else names[j - 1]
        parts.append(f"[{li},{lj}]={rhs}")
    return ", ".join(parts)


def _excluded(p: ParamSpec, value: str) -> bool:
    return any(as_rational(value) == as_rational(x) for x in p.exclude)


def sweep_bindings(
    params: Sequence[ParamSpec],
    values: Sequence[str] = DEFAULT_SWEEP,
    excluded_points: Iterable = (),
    require: Sequence[str] = (),
    use_overrides: bool = True,
) -> Tuple[List[Dict[str, str]], List[Dict[str, str]]]:
    """Admissible and skipped parameter bindings for a sweep.

    Real parameters range over their own ``sweep`` when set (and
    ``use_overrides``), else over ``values``; angle parameters range over
    :data:`PYTHAGOREAN_PAIRS`.  Bindings violating an exclusion, an excluded
    joint point or a ``require`` condition are skipped.  Returns
    ``(bindings, skipped)``.
    """
    axes = []
    for p in params:
        if p.kind == "angle":
            axes.append([{f"c{p.name}": c, f"s{p.name}": s} for c, s in PYTHAGOREAN_PAIRS])
        else:
            vals = p.sweep if (p.sweep and use_overrides) else values
            axes.append([{p.name: v} for v in vals])
    points = [dict(pt) for pt in excluded_points]
    good, skipped = [], []
    for combo in product(*axes):
        env: Dict[str, str] = {}
        for d in combo:
            env.update(d)
        bad = any(p.kind != "angle" and _excluded(p, env[p.name]) for p in params)
        bad = bad or any(
            all(k in env and as_rational(env[k]) == as_rational(v) for k, v in pt.items()) for pt in points
        )
        bad = bad or not all(condition_holds(c, env) for c in require)
        (skipped if bad else good).append(env)
    return good, skipped


_COMPARATORS = (
    ("<=", lambda x, y: x <= y),
    (">=", lambda x, y: x >= y),
    ("!=", lambda x, y: x != y),
    ("=", lambda x, y: x == y),
    ("<", lambda x, y: x < y),
    (">", lambda x, y: x > y),
)


def condition_holds(cond: str, env: Mapping[str, object]) -> bool:
    """Evaluate a parameter condition such as ``"a=-1"``, ``"b!=1/2"`` or ``"a<b"``."""
    for op, fn in _COMPARATORS:
        if op in cond:
            lhs, rhs = cond.split(op, 1)
            x = _constant_scalar(lhs.strip(), exact_env(env))
            y = _constant_scalar(rhs.strip(), exact_env(env))
            for v in (x, y):
                if type(v) is ParamPoly:
                    raise UnboundParameter(sorted(v.params())[0])
                if v.im:
                    raise ValueError(f"condition {cond!r} compares non-real values")
            return bool(fn(x.re, y.re))
    raise ValueError(f"condition {cond!r} has no comparison operator")


def exact_env(env: Mapping[str, object]) -> Dict[str, object]:
    return {k: as_rational(v) for k, v in env.items()}


__all__ = [
    "AbstractVector",
    "ClosureReport",
    "DEFAULT_SWEEP",
    "DegenerateBasis",
    "JacobiReport",
    "JacobiViolation",
    "LieAlgebraSpec",
    "PYTHAGOREAN_PAIRS",
    "ParamSpec",
    "SubalgebraSpec",
    "basis_vectors",
    "bracket",
    "closure_from_vectors",
    "condition_holds",
    "constants_text",
    "coordinate_subalgebras",
    "exact_env",
    "jacobi_check",
    "jacobi_from_constants",
    "parse_vector",
    "structure_constants",
    "subalgebra_closure_check",
    "sweep_bindings",
    "trace_from_constants",
    "trace_vector",
]
