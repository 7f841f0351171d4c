from fractions import Fraction

import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nambulie.liealg import (
    DegenerateBasis,
    LieAlgebraSpec,
    ParamSpec,
    SubalgebraSpec,
    bracket,
    coordinate_subalgebras,
    exact_env,
    jacobi_check,
    load,
    parse_vector,
    structure_constants,
    subalgebra_closure_check,
    sweep_bindings,
    trace_vector,
)
from nambulie.symkernel import UnboundParameter, gr

A48 = LieAlgebraSpec("A_4_8", 4, ((2, 3, 1, "1"), (2, 4, 2, "1"), (3, 4, 3, "-1")))
ABELIAN = LieAlgebraSpec("4A_1", 4, ())
SL2 = LieAlgebraSpec("A_3_8+A_1", 4, ((1, 3, 2, "-2"), (1, 2, 1, "1"), (2, 3, 3, "1")))


def X(i, dim=4):
    return tuple(gr(1 if m == i else 0) for m in range(1, dim + 1))


def test_bracket_reproduces_commutation_relations():
    assert bracket(X(2), X(3), A48) == X(1)
    assert bracket(X(3), X(4), A48) == tuple(-c for c in X(3))
    assert bracket(X(2), X(4), A48) == X(2)


vectors = st.lists(st.integers(-4, 4), min_size=4, max_size=4).map(lambda v: tuple(gr(x) for x in v))


@seed(11)
@settings(max_examples=80, deadline=None, derandomize=True)
@given(vectors, vectors, vectors)
def test_bracket_is_bilinear_and_alternating(u, v, w):
    assert not any(bracket(u, u, A48))
    assert bracket(u, v, A48) == tuple(-c for c in bracket(v, u, A48))
    uv = tuple(a + b for a, b in zip(u, v))
    assert bracket(uv, w, A48) == tuple(a + b for a, b in zip(bracket(u, w, A48), bracket(v, w, A48)))


@seed(12)
@settings(max_examples=40, deadline=None, derandomize=True)
@given(vectors, vectors, vectors)
def test_jacobi_on_random_vectors(u, v, w):
    def br(a, b):
        return bracket(a, b, A48)

    total = [x + y + z for x, y, z in zip(br(u, br(v, w)), br(v, br(w, u)), br(w, br(u, v)))]
    assert not any(total)


def test_jacobi_passes_and_detects_a_sign_flip():
    assert jacobi_check(ABELIAN)
    assert jacobi_check(A48)
    # flipping C_23^1 only rescales X1 by -1, still a Lie algebra
    assert jacobi_check(LieAlgebraSpec("x1-flip", 4, ((2, 3, 1, "-1"), (2, 4, 2, "1"), (3, 4, 3, "-1"))))
    # flipping C_24^2 breaks it: the (2,3,4) cyclic sum is -2*X1
    rep = jacobi_check(LieAlgebraSpec("bad", 4, ((2, 3, 1, "1"), (2, 4, 2, "-1"), (3, 4, 3, "-1"))))
    assert not rep and rep.triple == (2, 3, 4)
    assert rep.residual == (-2, 0, 0, 0)


def test_sl2_plus_line_presentation_is_a_lie_algebra():
    assert jacobi_check(SL2)


def test_trace_vectors():
    assert trace_vector(ABELIAN) == (0, 0, 0, 0)
    assert trace_vector(A48) == (0, 0, 0, 0)
    a2 = LieAlgebraSpec("A_2+2A_1", 4, ((1, 2, 2, "1"),))
    assert trace_vector(a2) == (1, 0, 0, 0)


def test_parameters_must_be_bound():
    fam = LieAlgebraSpec("fam", 4, ((1, 4, 1, "a"),), (ParamSpec("a"),))
    with pytest.raises(UnboundParameter):
        structure_constants(fam)
    assert structure_constants(fam, {"a": Fraction(1, 2)})[(1, 4, 1)] == Fraction(1, 2)


def test_subalgebra_closure():
    ok = subalgebra_closure_check(SubalgebraSpec("A_4_8", ("X2", "X3", "X1")), A48)
    assert ok and ok.induced[(1, 2, 3)] == 1
    bad = subalgebra_closure_check(SubalgebraSpec("A_4_8", ("X2", "X3", "X4")), A48)
    assert not bad and bad.witness == (1, 2)
    assert subalgebra_closure_check(SubalgebraSpec("4A_1", ("X1+X2", "X3-2*X4", "X2")), ABELIAN)


def test_degenerate_basis_is_reported():
    sub = SubalgebraSpec("A_4_8", ("X1+a*X2", "X2", "X1"))
    with pytest.raises(DegenerateBasis):
        subalgebra_closure_check(sub, A48, {"a": 0})


def test_parse_vector():
    assert parse_vector("X1+1/2*X4", 4) == (1, 0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_vector("X1+1", 4)
    with pytest.raises(ValueError):
        parse_vector("x1*X1", 4)


def test_coordinate_subalgebras_of_a48():
    assert (1, 2, 3) in coordinate_subalgebras(A48)
    assert (2, 3, 4) not in coordinate_subalgebras(A48)


def test_sweep_respects_exclusions_and_angles():
    good, skipped = sweep_bindings((ParamSpec("a", ("0", "1")),), ("0", "1", "2"))
    assert good == [{"a": "2"}] and len(skipped) == 2
    good, _ = sweep_bindings((ParamSpec("phi", kind="angle"),))
    for b in good:
        e = exact_env(b)
        assert e["cphi"] ** 2 + e["sphi"] ** 2 == 1


def test_every_bundled_algebra_satisfies_jacobi_across_its_sweep():
    from nambulie.liealg import algebra_bindings, apply_errata

    reg = load()
    checked = 0
    for a in reg.algebras:
        eff, _ = apply_errata(a, reg.errata_for(a.id))
        for b in algebra_bindings(eff)[0]:
            assert jacobi_check(eff.spec, exact_env(b)), (a.id, b)
            checked += 1
    assert checked >= len(reg.algebras)
