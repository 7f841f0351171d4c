import csv
import io
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nambulie.dynamics import (
    A48_CONSTANTS,
    CanonicalChart,
    InvariantMetric,
    NotProportional,
    PoissonStructure,
    StepSizeInvalid,
    ad_invariance_check,
    casimir_identity,
    check_Q_closure,
    dynamical_quantities,
    eta_scalar,
    four_bracket,
    integrate_flow,
    metric_identity_check,
    pfaffian_check,
    poisson_bracket,
    registry_constants,
    weighted_evolution,
)
from nambulie.nambu import random_polynomial
from nambulie.symkernel import ONE_POLY, ExpPoly, gr, parse

PS = PoissonStructure(1)
CHART = CanonicalChart(PS)
x = [None] + [ExpPoly.coord(i) for i in range(1, 5)]


def perturbed(key, delta):
    c = dict(A48_CONSTANTS)
    i, j, k = key
    c[(i, j, k)] = c.get((i, j, k), gr(0)) + gr(delta)
    c[(j, i, k)] = -c[(i, j, k)]
    return c


# ---------------------------------------------------------------- brackets


def test_coordinate_brackets():
    ps = PoissonStructure(Fraction(3, 2))
    assert poisson_bracket(x[1], x[4], ps) == parse("3/2")
    assert poisson_bracket(x[2], x[3], ps) == parse("-3/2")
    assert poisson_bracket(x[1], x[2], ps).is_zero()


polys = st.integers(0, 2**31).map(lambda s: random_polynomial(random.Random(s), 4, 2))


@seed(41)
@settings(max_examples=40, deadline=None, derandomize=True)
@given(polys, polys, polys)
def test_poisson_bracket_is_a_lie_bracket_and_derivation(f, g, h):
    pb = lambda a, b: poisson_bracket(a, b, PS)
    assert pb(f, f).is_zero()
    assert pb(f, g) == -pb(g, f)
    assert pb(f, g * h) == pb(f, g) * h + g * pb(f, h)
    assert (pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))).is_zero()


def test_chart_is_canonical():
    for a in (Fraction(1, 2), 1, 3):
        assert CanonicalChart(PoissonStructure(a)).canonical_check()


def test_chart_round_trip():
    ch = CanonicalChart(PoissonStructure(Fraction(3, 2)))
    pt = (0.1, -0.2, 0.3, 0.7)
    assert ch.from_group(ch.to_group(*pt)) == pytest.approx(pt)


# ---------------------------------------------------------------- closure and metric


def test_registry_constants_match_the_hand_copy():
    assert registry_constants() == A48_CONSTANTS


@pytest.mark.parametrize("alpha", [Fraction(1, 2), 1, 2, Fraction(-3, 4)])
def test_q_closure_six_pairs(alpha):
    res = check_Q_closure(PoissonStructure(alpha))
    assert res.ok and res.checked == 6


def test_q_closure_examples():
    Q = dynamical_quantities(CHART)
    pb = lambda a, b: poisson_bracket(a, b, PS)
    assert pb(Q[2], Q[3]) == Q[1]
    assert pb(Q[2], Q[4]) == Q[2]
    assert pb(Q[3], Q[4]) == -Q[3]
    assert all(pb(Q[1], Q[b]).is_zero() for b in range(1, 5))


def test_q_closure_detects_wrong_constants():
    res = check_Q_closure(PS, constants=perturbed((2, 4, 2), -2))
    assert not res.ok and [(a, b) for a, b, _ in res.mismatches] == [(2, 4)]


@pytest.mark.parametrize("a", [Fraction(1, 2), 1, 2, 3])
def test_metric_inverse_and_ad_invariance(a):
    g = InvariantMetric(a)
    assert metric_identity_check(g)
    assert ad_invariance_check(g)


def test_diagonal_metric_is_not_invariant():
    class Diag(InvariantMetric):
        def matrix(self):
            return [[gr(1 if i == j else 0) for j in range(4)] for i in range(4)]

    assert not ad_invariance_check(Diag(1))


# ---------------------------------------------------------------- Casimir


@pytest.mark.parametrize("a", [Fraction(1, 2), 1, 2, 3])
def test_casimir_coefficient(a):
    assert casimir_identity(InvariantMetric(a), PS) == gr(-2) / gr(a * a)


def test_casimir_coefficient_does_not_depend_on_alpha():
    assert casimir_identity(InvariantMetric(2), PoissonStructure(5)) == Fraction(-1, 2)


def test_casimir_detects_cross_terms():
    with pytest.raises(NotProportional):
        casimir_identity(InvariantMetric(1), PS, constants=perturbed((3, 4, 4), 1))


def test_single_sign_flips_stay_proportional():
    # each flip keeps a multiple of Q1^2; only the coefficient moves
    assert casimir_identity(InvariantMetric(1), PS, constants=perturbed((2, 3, 1), -2)) == 2
    assert casimir_identity(InvariantMetric(1), PS, constants=perturbed((2, 4, 2), -2)) == 0


# ---------------------------------------------------------------- four-bracket


def test_four_bracket_examples():
    assert four_bracket(ONE_POLY, x[1:]) == ONE_POLY
    assert four_bracket(parse("x4"), [x[1], x[1], x[2], x[3]]).is_zero()


@pytest.mark.parametrize("alpha", [1, Fraction(1, 2), 3])
def test_pfaffian_expansion_on_fifty_quadruples(alpha):
    res = pfaffian_check(PoissonStructure(alpha), eta_scalar(), trials=50, seed=5)
    assert res.ok and res.constant == -1


def test_weighted_evolution_of_the_casimir_vanishes():
    Q = dynamical_quantities(CHART)
    ev = weighted_evolution(Q[1], InvariantMetric(1), PS, eta_scalar())
    assert ev.lhs.is_zero() and ev.rhs.is_zero()


@pytest.mark.parametrize("alpha,a", [(1, 1), (2, 1), (1, 3), (Fraction(1, 2), 2)])
def test_weighted_evolution_ratio_is_fixed(alpha, a):
    ps = PoissonStructure(alpha)
    ev = weighted_evolution(CanonicalChart(ps).x1, InvariantMetric(a), ps, eta_scalar())
    assert not ev.rhs.is_zero()
    assert ev.ratio() == Fraction(-3, 4)


# ---------------------------------------------------------------- integration


def test_energy_is_conserved():
    tr = integrate_flow((0.0, 1.0, 1.0, 0.5), 10, 1e-3)
    h0 = tr.rows[0][5]
    assert len(tr.rows) == 10001
    assert tr.energy_drift() < 1e-9 * max(1, h0)


def test_frozen_prefactor_gives_affine_motion():
    tr = integrate_flow((0.0, 1.0, 0.5, 0.25), 1, 0.01, freeze_eta=True)
    ts, xs = [r[0] for r in tr.rows], [r[1] for r in tr.rows]
    v = (xs[-1] - xs[0]) / ts[-1]
    assert all(abs(xx - v * t) < 1e-12 for t, xx in zip(ts, xs))
    k = -4 * 1 * (math.exp(-2 * 0.5) - 1)
    assert v == pytest.approx(2 * k * 0.5, rel=1e-12)
    assert all(r[3] == 0.5 and r[4] == 0.25 for r in tr.rows)


def test_zero_momentum_is_stationary():
    tr = integrate_flow((0.3, -1.0, 0.0, 0.0), 1, 0.1)
    assert all(r[1:5] == (0.3, -1.0, 0.0, 0.0) for r in tr.rows)


@pytest.mark.parametrize("dt,t_end", [(0, 1), (-0.1, 1), (math.nan, 1), (math.inf, 1), (0.1, -1), (0.1, math.inf)])
def test_invalid_steps_are_rejected(dt, t_end):
    with pytest.raises(StepSizeInvalid):
        integrate_flow((0, 0, 1, 0), t_end, dt)


def test_last_step_lands_on_t_end():
    tr = integrate_flow((0, 0, 1, 0), 1, 0.3)
    assert [r[0] for r in tr.rows] == pytest.approx([0, 0.3, 0.6, 0.9, 1.0])


def test_csv_format():
    tr = integrate_flow((0.1, 0.2, 0.3, 0.4), 0.002, 0.001)
    text = tr.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "x1", "x2", "P1", "P2", "H"]
    assert len(rows) == 4
    assert rows[1][1] == "0.10000000000000001"
    assert [float(v) for v in rows[2]] == list(tr.rows[1])
