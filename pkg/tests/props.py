"""Exact kernel properties shared by the hypothesis tests and the seeded acceptance count.

Every property returns ``True`` or ``False`` and is checked exactly on normal
forms; no tolerances are involved.
"""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from nambulie.symkernel import ONE_POLY, ZERO_POLY, ExpPoly, GaussianRational, parse, to_text
from nambulie.symkernel.linalg import det, matmul, nullspace, rank, rref, sparse_nullspace, sparse_rref

AXES = (1, 2, 3)
FREQ_RE = (0, 0, 1, -1, 2, Fraction(1, 2))
FREQ_IM = (0, 0, 0, 1, -1)


# ---------------------------------------------------------------- generators


def term(powers, freq, c_re, c_im) -> ExpPoly:
    fr = {ax: GaussianRational(re, im) for ax, (re, im) in freq.items()}
    return ExpPoly.monomial(powers, GaussianRational(c_re, c_im)) * ExpPoly.exp_linear(fr)


def random_exppoly(rng: random.Random, max_terms: int = 3) -> ExpPoly:
    e = ZERO_POLY
    for _ in range(rng.randint(0, max_terms)):
        powers = {ax: rng.randint(0, 2) for ax in AXES}
        freq = {ax: (rng.choice(FREQ_RE), rng.choice(FREQ_IM)) for ax in AXES}
        e = e + term(powers, freq, rng.randint(-3, 3), rng.randint(-2, 2))
    return e


def random_scalar(rng: random.Random) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5)))


_terms = st.tuples(
    st.fixed_dictionaries({ax: st.integers(0, 2) for ax in AXES}),
    st.fixed_dictionaries({ax: st.tuples(st.sampled_from(FREQ_RE), st.sampled_from(FREQ_IM)) for ax in AXES}),
    st.integers(-3, 3),
    st.integers(-2, 2),
)
exppolys = st.lists(_terms, max_size=3).map(lambda ts: sum((term(*t) for t in ts), ZERO_POLY))
real_exppolys = exppolys.map(lambda e: e.real_part())
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(GaussianRational, rationals, rationals)
axes = st.sampled_from(AXES)


# ---------------------------------------------------------------- properties


def ring_properties(a: ExpPoly, b: ExpPoly, c: ExpPoly) -> dict:
    return {
        "add commutes": a + b == b + a,
        "add associates": (a + b) + c == a + (b + c),
        "mul commutes": a * b == b * a,
        "mul associates": (a * b) * c == a * (b * c),
        "distributes": a * (b + c) == a * b + a * c,
        "additive inverse": (a - a).is_zero() and a + (-a) == ZERO_POLY,
        "one is neutral": a * ONE_POLY == a,
        "zero annihilates": (a * ZERO_POLY).is_zero(),
    }


def calculus_properties(a: ExpPoly, b: ExpPoly, i: int, j: int) -> dict:
    return {
        "derivative is linear": (a + b).diff(i) == a.diff(i) + b.diff(i),
        "product rule": (a * b).diff(i) == a.diff(i) * b + a * b.diff(i),
        "partials commute": a.diff(i).diff(j) == a.diff(j).diff(i),
        "constants differentiate to zero": ExpPoly.const(3).diff(i).is_zero(),
    }


def conjugation_properties(a: ExpPoly, b: ExpPoly) -> dict:
    r = a.real_part()
    return {
        "conjugation is an involution": a.conjugate().conjugate() == a,
        "conjugation is multiplicative": (a * b).conjugate() == a.conjugate() * b.conjugate(),
        "real part is real": r.is_real() and r.conjugate() == r,
        "print and parse round trip": parse(to_text(r)) == r,
    }


def evaluation_properties(a: ExpPoly, b: ExpPoly, point) -> dict:
    a0, b0 = a.value_at_origin(), b.value_at_origin()
    ev = lambda e: e.evaluate_complex(point)
    va, vb = ev(a), ev(b)
    scale = max(1.0, abs(va) * abs(vb), abs(va) + abs(vb))
    return {
        "origin value is additive": (a + b).value_at_origin() == a0 + b0,
        "origin value is multiplicative": (a * b).value_at_origin() == a0 * b0,
        "evaluation is additive": abs(ev(a + b) - (va + vb)) <= 1e-9 * scale,
        "evaluation is multiplicative": abs(ev(a * b) - va * vb) <= 1e-9 * scale,
    }


def scalar_properties(x: GaussianRational, y: GaussianRational) -> dict:
    out = {
        "scalar add commutes": x + y == y + x,
        "scalar mul commutes": x * y == y * x,
        "conjugate product is real": (x * x.conjugate()).is_real(),
    }
    if y:
        out["division inverts multiplication"] = (x / y) * y == x
    return out


def linalg_properties(rng: random.Random) -> dict:
    n = rng.randint(2, 4)
    m = [[GaussianRational(rng.randint(-3, 3)) for _ in range(n + 1)] for _ in range(n)]
    ns = nullspace(m, n + 1)
    sparse = sparse_nullspace([{k: v for k, v in enumerate(r) if v} for r in m], n + 1)
    a = [row[:n] for row in m]
    b = [[GaussianRational(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
    zero = GaussianRational(0)
    return {
        "nullspace vectors are annihilated": all(
            sum((r[k] * v[k] for k in range(n + 1)), zero) == 0 for v in ns for r in m
        ),
        "rank plus nullity": rank(m) + len(ns) == n + 1,
        "sparse and dense nullity agree": len(sparse) == len(ns),
        "sparse pivots match dense rank": len(sparse_rref([{k: v for k, v in enumerate(r) if v} for r in m])) == rank(m),
        "determinant is multiplicative": det(matmul(a, b)) == det(a) * det(b),
        "rref is idempotent": rref(rref(m, n + 1)[0], n + 1)[0] == rref(m, n + 1)[0],
    }


def kernel_property_round(rng: random.Random) -> dict:
    """One randomized round of every kernel property."""
    a, b, c = (random_exppoly(rng) for _ in range(3))
    i, j = rng.choice(AXES), rng.choice(AXES)
    out = {}
    out.update(ring_properties(a, b, c))
    out.update(calculus_properties(a, b, i, j))
    out.update(conjugation_properties(a, b))
    out.update(evaluation_properties(a, b, [rng.uniform(-1, 1) for _ in AXES]))
    out.update(scalar_properties(random_scalar(rng), random_scalar(rng)))
    out.update(linalg_properties(rng))
    return out


def run_kernel_suite(seed: int, rounds: int):
    """``(assertions, failures)`` over ``rounds`` seeded rounds."""
    rng = random.Random(seed)
    count, failures = 0, []
    for r in range(rounds):
        for name, ok in kernel_property_round(rng).items():
            count += 1
            if not ok:
                failures.append((r, name))
    return count, failures
