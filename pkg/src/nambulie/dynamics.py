"""Nambu dynamics on the group of ``A_{4,8}``.

The group coordinates ``x1..x4`` carry the constant Poisson structure
``{x1,x4} = alpha``, ``{x2,x3} = -alpha``.  The chart

    x_1 = x1,  P_1 = x4/alpha,  x_2 = x2,  P_2 = -x3/alpha

makes it canonical, and the quantities ``Q_1 = -P_1``, ``Q_2 = -P_2``,
``Q_3 = -x_2 P_1``, ``Q_4 = -x_2 P_2`` realize the ``A_{4,8}`` brackets.  The
order-four structure ``eta * d1^d2^d3^d4`` with the ``A^0_{4,9}`` scalar
``q4*(exp(-2*x4)-1)`` drives the weighted evolution, integrated here with
fixed-step RK4.

All symbolic functions are :class:`~nambulie.symkernel.ExpPoly` in the group
coordinates; chart variables are expressed through them.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .nambu import nbracket, random_polynomial, top
from .symkernel import ONE_POLY, ZERO_POLY, ExpPoly, GaussianRational, as_rational, gr, parse
from .symkernel.linalg import field_inverse
from .symkernel.numbers import ZERO

# [T2,T3]=T1, [T2,T4]=T2, [T3,T4]=-T3; hand copy used to cross-check the registry
A48_CONSTANTS = {(2, 3, 1): gr(1), (3, 2, 1): gr(-1), (2, 4, 2): gr(1), (4, 2, 2): gr(-1), (3, 4, 3): gr(-1), (4, 3, 3): gr(1)}
DEFAULT_ETA = "q4*(exp(-2*x4)-1)"


@lru_cache(maxsize=1)
def registry_constants(ident: str = "A_4_8") -> Dict[Tuple[int, int, int], GaussianRational]:
    """Structure constants of ``ident`` from the bundled registry."""
    from .liealg import load

    return load().algebra(ident).spec.structure_constants()


def _consts(constants):
    return registry_constants() if constants is None else constants


class StepSizeInvalid(ValueError):
    """Integration step or horizon is not a positive finite number."""


class NotProportional(ValueError):
    """The contracted Casimir expression is not a multiple of ``Q_1^2``."""


@dataclass(frozen=True)
class PoissonStructure:
    """``{x1,x4} = alpha``, ``{x2,x3} = -alpha`` on the group coordinates."""

    alpha: object = 1

    def __post_init__(self):
        a = as_rational(self.alpha)
        if not a:
            raise ValueError("alpha must be nonzero")
        object.__setattr__(self, "alpha", a)

    def tensor(self) -> Dict[Tuple[int, int], GaussianRational]:
        al = gr(self.alpha)
        return {(1, 4): al, (4, 1): -al, (2, 3): -al, (3, 2): al}


def poisson_bracket(F: ExpPoly, G: ExpPoly, ps: PoissonStructure) -> ExpPoly:
    """``alpha (F_1 G_4 - F_4 G_1) - alpha (F_2 G_3 - F_3 G_2)``, exact."""
    d = lambda e, m: e.diff(m)
    out = d(F, 1) * d(G, 4) - d(F, 4) * d(G, 1) - (d(F, 2) * d(G, 3) - d(F, 3) * d(G, 2))
    return out.scale(gr(ps.alpha))


@dataclass(frozen=True)
class CanonicalChart:
    """Chart variables ``x_1, x_2, P_1, P_2`` as functions of the group coordinates."""

    ps: PoissonStructure

    @property
    def x1(self) -> ExpPoly:
        return ExpPoly.coord(1)

    @property
    def x2(self) -> ExpPoly:
        return ExpPoly.coord(2)

    @property
    def P1(self) -> ExpPoly:
        return ExpPoly.coord(4).scale(gr(1) / gr(self.ps.alpha))

    @property
    def P2(self) -> ExpPoly:
        return ExpPoly.coord(3).scale(gr(-1) / gr(self.ps.alpha))

    def variables(self) -> Dict[str, ExpPoly]:
        return {"x1": self.x1, "x2": self.x2, "P1": self.P1, "P2": self.P2}

    def to_group(self, x1: float, x2: float, P1: float, P2: float) -> Tuple[float, float, float, float]:
        a = float(self.ps.alpha)
        return (x1, x2, -a * P2, a * P1)

    def from_group(self, point: Sequence[float]) -> Tuple[float, float, float, float]:
        a = float(self.ps.alpha)
        return (point[0], point[1], point[3] / a, -point[2] / a)

    def canonical_check(self) -> bool:
        """``{x_i, P_j} = delta_ij`` and the other chart brackets vanish, exact."""
        v = self.variables()
        pos, mom = (v["x1"], v["x2"]), (v["P1"], v["P2"])
        for i in range(2):
            for j in range(2):
                want = ONE_POLY if i == j else ZERO_POLY
                if poisson_bracket(pos[i], mom[j], self.ps) != want:
                    return False
        return poisson_bracket(pos[0], pos[1], self.ps).is_zero() and poisson_bracket(mom[0], mom[1], self.ps).is_zero()


def dynamical_quantities(chart: CanonicalChart) -> Dict[int, ExpPoly]:
    """``Q_1 = -P_1``, ``Q_2 = -P_2``, ``Q_3 = -x_2 P_1``, ``Q_4 = -x_2 P_2``."""
    return {1: -chart.P1, 2: -chart.P2, 3: -(chart.x2 * chart.P1), 4: -(chart.x2 * chart.P2)}


@dataclass
class ClosureResult:
    ok: bool
    mismatches: List[Tuple[int, int, ExpPoly]] = field(default_factory=list)
    checked: int = 0


def check_Q_closure(ps: PoissonStructure, chart: Optional[CanonicalChart] = None, constants: Optional[Mapping] = None) -> ClosureResult:
    """``{Q_a, Q_b} = f^c_ab Q_c`` for all six pairs, exact."""
    chart = chart or CanonicalChart(ps)
    consts = _consts(constants)
    Q = dynamical_quantities(chart)
    bad = []
    n = 0
    for a in range(1, 5):
        for b in range(a + 1, 5):
            lhs = poisson_bracket(Q[a], Q[b], ps)
            rhs = ZERO_POLY
            for c in range(1, 5):
                f = consts.get((a, b, c), ZERO)
                if f:
                    rhs = rhs + Q[c].scale(gr(f))
            n += 1
            if lhs != rhs:
                bad.append((a, b, lhs - rhs))
    return ClosureResult(not bad, bad, n)


@dataclass(frozen=True)
class InvariantMetric:
    """Anti-diagonal metric ``g_14 = g_41 = a``, ``g_23 = g_32 = -a``."""

    a: object = 1

    def __post_init__(self):
        v = as_rational(self.a)
        if not v:
            raise ValueError("metric parameter must be nonzero")
        object.__setattr__(self, "a", v)

    def matrix(self) -> List[List[GaussianRational]]:
        a = gr(self.a)
        g = [[ZERO] * 4 for _ in range(4)]
        g[0][3] = g[3][0] = a
        g[1][2] = g[2][1] = -a
        return g

    def inverse(self) -> List[List[GaussianRational]]:
        return field_inverse(self.matrix())


def metric_identity_check(metric: InvariantMetric) -> bool:
    g, gi = metric.matrix(), metric.inverse()
    for i in range(4):
        for j in range(4):
            s = sum((g[i][k] * gi[k][j] for k in range(4)), ZERO)
            if s != (1 if i == j else 0):
                return False
    return True


def ad_invariance_check(metric: InvariantMetric, constants: Optional[Mapping] = None) -> bool:
    """``sum_d f^d_ca g_db + f^d_cb g_ad = 0`` for all ``a, b, c``, exact."""
    consts = _consts(constants)
    g = metric.matrix()
    for a, b, c in product(range(1, 5), repeat=3):
        s = ZERO
        for d in range(1, 5):
            s = s + consts.get((c, a, d), ZERO) * g[d - 1][b - 1] + consts.get((c, b, d), ZERO) * g[a - 1][d - 1]
        if s:
            return False
    return True


def casimir_identity(metric: InvariantMetric, ps: PoissonStructure, chart: Optional[CanonicalChart] = None, constants: Optional[Mapping] = None) -> GaussianRational:
    """Coefficient ``c`` with ``g^ac g^bd f^e_cd f^f_be Q_a Q_f = c Q_1^2``.

    The index sum is carried out in full; raises :class:`NotProportional` if
    the result is not a multiple of ``Q_1^2``.
    """
    chart = chart or CanonicalChart(ps)
    consts = _consts(constants)
    gi = metric.inverse()
    Q = dynamical_quantities(chart)
    # M_af = sum g^ac g^bd f^e_cd f^f_be
    M = [[ZERO] * 4 for _ in range(4)]
    for a, b, c, d, e in product(range(1, 5), repeat=5):
        w = gi[a - 1][c - 1] * gi[b - 1][d - 1]
        if not w:
            continue
        f1 = consts.get((c, d, e), ZERO)
        if not f1:
            continue
        for f in range(1, 5):
            f2 = consts.get((b, e, f), ZERO)
            if f2:
                M[a - 1][f - 1] = M[a - 1][f - 1] + w * f1 * f2
    lhs = ZERO_POLY
    for a in range(1, 5):
        for f in range(1, 5):
            if M[a - 1][f - 1]:
                lhs = lhs + (Q[a] * Q[f]).scale(M[a - 1][f - 1])
    q11 = Q[1] * Q[1]
    key, ref = next(iter(q11.items()))
    coef = dict(lhs.items()).get(key, ZERO) / ref
    if (lhs - q11.scale(coef)).is_zero():
        return coef
    raise NotProportional(f"residual {lhs - q11.scale(coef)} after removing {coef}*Q1^2")


def eta_scalar(text: str = DEFAULT_ETA, q4: object = 1) -> ExpPoly:
    """The order-four scalar with ``q4`` bound (exact)."""
    return parse(text, {"q4": as_rational(q4)})


def four_bracket(eta: ExpPoly, fs: Sequence[ExpPoly]) -> ExpPoly:
    """``eta`` times the Jacobian determinant of ``fs`` in ``x1..x4``."""
    return nbracket(top(eta, 4), list(fs))


def pfaffian_form(eta: ExpPoly, fs: Sequence[ExpPoly], ps: PoissonStructure) -> ExpPoly:
    """``(eta/alpha^2)({A,B}{C,D} - {A,C}{B,D} + {A,D}{B,C})``."""
    A, B, C, D = fs
    pb = lambda x, y: poisson_bracket(x, y, ps)
    s = pb(A, B) * pb(C, D) - pb(A, C) * pb(B, D) + pb(A, D) * pb(B, C)
    return (eta * s).scale(gr(1) / gr(ps.alpha * ps.alpha))


@dataclass
class PfaffianResult:
    constant: Optional[GaussianRational]
    ok: bool
    trials: int
    witness: Optional[Tuple[ExpPoly, ...]] = None


def pfaffian_check(ps: PoissonStructure, eta: Optional[ExpPoly] = None, trials: int = 50, seed: int = 0) -> PfaffianResult:
    """Find ``k`` with ``{A,B,C,D} = k * pfaffian_form`` on seeded random quadruples.

    The constant is read off the first quadruple with a nonzero Pfaffian and
    must hold exactly on all of them.
    """
    eta = eta_scalar() if eta is None else eta
    rng = random.Random(seed)
    k = None
    for _ in range(trials):
        fs = tuple(random_polynomial(rng, 4, 2) for _ in range(4))
        lhs = four_bracket(eta, fs)
        rhs = pfaffian_form(eta, fs, ps)
        if k is None:
            if rhs.is_zero():
                if not lhs.is_zero():
                    return PfaffianResult(None, False, trials, fs)
                continue
            key, ref = next(iter(rhs.items()))
            k = dict(lhs.items()).get(key, ZERO) / ref
        if lhs != rhs.scale(k):
            return PfaffianResult(k, False, trials, fs)
    return PfaffianResult(k, k is not None, trials)


@dataclass
class Evolution:
    lhs: ExpPoly
    rhs: ExpPoly
    difference: ExpPoly

    @property
    def equal(self) -> bool:
        return self.difference.is_zero()

    def ratio(self) -> Optional[GaussianRational]:
        """Constant ``r`` with ``lhs = r * rhs``; None if no such constant or both vanish."""
        if self.rhs.is_zero():
            return None
        key, ref = next(iter(self.rhs.items()))
        r = dict(self.lhs.items()).get(key, ZERO) / ref
        return r if self.lhs == self.rhs.scale(r) else None


def hamiltonian(chart: CanonicalChart) -> ExpPoly:
    """``H = Q_1^2 = P_1^2``."""
    return chart.P1 * chart.P1


def prefactor(eta: ExpPoly, metric: InvariantMetric, ps: PoissonStructure) -> ExpPoly:
    """``-4 eta / (alpha^2 a^2)``."""
    return eta.scale(gr(-4) / gr(ps.alpha * ps.alpha * metric.a * metric.a))


def weighted_evolution(A: ExpPoly, metric: InvariantMetric, ps: PoissonStructure, eta: ExpPoly, chart: Optional[CanonicalChart] = None, constants: Optional[Mapping] = None) -> Evolution:
    """Direct sum ``g^ac g^bd f^e_cd {A, Q_a, Q_b, Q_e}`` against ``-4 eta/(alpha^2 a^2) {A, H}``."""
    chart = chart or CanonicalChart(ps)
    consts = _consts(constants)
    gi = metric.inverse()
    Q = dynamical_quantities(chart)
    lhs = ZERO_POLY
    for a, b, c, d, e in product(range(1, 5), repeat=5):
        w = gi[a - 1][c - 1] * gi[b - 1][d - 1]
        if not w:
            continue
        f = consts.get((c, d, e), ZERO)
        if f:
            lhs = lhs + four_bracket(eta, (A, Q[a], Q[b], Q[e])).scale(w * f)
    rhs = prefactor(eta, metric, ps) * poisson_bracket(A, hamiltonian(chart), ps)
    return Evolution(lhs, rhs, lhs - rhs)


# ---------------------------------------------------------------- numerics


def compile_numeric(e: ExpPoly) -> Callable[[Sequence[float]], float]:
    """Fast float evaluator for a parameter-free exp-polynomial (real part)."""
    terms = []
    for (powers, freq), c in e.items():
        terms.append((complex(c), tuple(powers), tuple((ax, complex(lam)) for ax, lam in freq)))

    def f(x: Sequence[float]) -> float:
        total = 0j
        for c, powers, freq in terms:
            v = c
            for ax, k in powers:
                v *= x[ax - 1] ** k
            if freq:
                v *= cmath.exp(sum(lam * x[ax - 1] for ax, lam in freq))
            total += v
        return total.real

    return f


@dataclass
class Trajectory:
    """Samples ``(t, x1, x2, P1, P2, H)``; row 0 is the initial point."""

    rows: List[Tuple[float, float, float, float, float, float]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "P1", "P2", "H"])
        for r in self.rows:
            w.writerow([format(v, ".17g") for v in r])
        return buf.getvalue()

    def energy_drift(self) -> float:
        return abs(self.rows[-1][5] - self.rows[0][5])


def integrate_flow(
    start: Sequence[float],
    t_end: float,
    dt: float,
    ps: Optional[PoissonStructure] = None,
    metric: Optional[InvariantMetric] = None,
    eta: Optional[ExpPoly] = None,
    freeze_eta: bool = False,
) -> Trajectory:
    """RK4 for ``dA/dt = k {A, H}`` with ``H = P_1^2`` and ``k = -4 eta/(alpha^2 a^2)``.

    ``start`` is ``(x1, x2, P1, P2)``.  ``k`` is evaluated along the
    trajectory, or frozen at the initial point with ``freeze_eta``.  The last
    step is shortened so the final sample lands on ``t_end``.
    """
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise StepSizeInvalid(f"step size must be positive and finite, got {dt!r}")
    if not (isinstance(t_end, (int, float)) and math.isfinite(t_end) and t_end >= 0):
        raise StepSizeInvalid(f"end time must be nonnegative and finite, got {t_end!r}")
    ps = ps or PoissonStructure(1)
    metric = metric or InvariantMetric(1)
    eta = eta_scalar() if eta is None else eta
    chart = CanonicalChart(ps)
    H = hamiltonian(chart)
    k = compile_numeric(prefactor(eta, metric, ps))
    # Hamiltonian field of H in group coordinates
    fields = [compile_numeric(poisson_bracket(ExpPoly.coord(m), H, ps)) for m in range(1, 5)]
    h_num = compile_numeric(H)
    y = list(chart.to_group(*start))
    k0 = k(y)

    def rhs(p):
        s = k0 if freeze_eta else k(p)
        return [s * f(p) for f in fields]

    def sample(t, p):
        return (t,) + tuple(chart.from_group(p)) + (h_num(p),)

    rows = [sample(0.0, y)]
    n = math.ceil(t_end / dt - 1e-9) if t_end > 0 else 0
    for i in range(n):
        h = min(dt, t_end - i * dt)
        k1 = rhs(y)
        k2 = rhs([a + h / 2 * b for a, b in zip(y, k1)])
        k3 = rhs([a + h / 2 * b for a, b in zip(y, k2)])
        k4 = rhs([a + h * b for a, b in zip(y, k3)])
        y = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
        rows.append(sample(t_end if i == n - 1 else (i + 1) * dt, y))
    return Trajectory(rows)


@dataclass
class DynamicsReport:
    alpha: object
    metric_a: object
    canonical: bool
    closure: ClosureResult
    metric_inverse: bool
    ad_invariant: bool
    casimir: Optional[GaussianRational]
    casimir_expected: GaussianRational
    pfaffian: PfaffianResult
    evolution_samples: Dict[str, Evolution]

    @property
    def ok(self) -> bool:
        return (
            self.canonical
            and self.closure.ok
            and self.metric_inverse
            and self.ad_invariant
            and self.casimir == self.casimir_expected
            and self.pfaffian.ok
        )


def run_checks(alpha=1, metric_a=1, q4=1, seed: int = 0, trials: int = 50) -> DynamicsReport:
    """Every exact check of the dynamics module at one ``(alpha, a)``."""
    ps = PoissonStructure(alpha)
    metric = InvariantMetric(metric_a)
    chart = CanonicalChart(ps)
    try:
        cas = casimir_identity(metric, ps, chart)
    except NotProportional:
        cas = None
    eta = eta_scalar(q4=q4)
    Q = dynamical_quantities(chart)
    samples = {}
    for name, A in (("Q1", Q[1]), ("x1", chart.x1), ("P2", chart.P2)):
        samples[name] = weighted_evolution(A, metric, ps, eta, chart)
    return DynamicsReport(
        ps.alpha,
        metric.a,
        chart.canonical_check(),
        check_Q_closure(ps, chart),
        metric_identity_check(metric),
        ad_invariance_check(metric),
        cas,
        gr(-2) / gr(metric.a * metric.a),
        pfaffian_check(ps, eta, trials, seed),
        samples,
    )


__all__ = [
    "A48_CONSTANTS",
    "CanonicalChart",
    "ClosureResult",
    "DEFAULT_ETA",
    "DynamicsReport",
    "Evolution",
    "InvariantMetric",
    "NotProportional",
    "PfaffianResult",
    "PoissonStructure",
    "StepSizeInvalid",
    "Trajectory",
    "ad_invariance_check",
    "casimir_identity",
    "check_Q_closure",
    "compile_numeric",
    "dynamical_quantities",
    "eta_scalar",
    "four_bracket",
    "hamiltonian",
    "integrate_flow",
    "metric_identity_check",
    "pfaffian_check",
    "pfaffian_form",
    "registry_constants",
    "poisson_bracket",
    "prefactor",
    "run_checks",
    "weighted_evolution",
]
