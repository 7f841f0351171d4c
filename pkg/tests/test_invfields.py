import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

import props
from nambulie.invfields import (
    Frame,
    NonClosedExponential,
    SingularFrame,
    VectorField,
    apply,
    derive_frame,
    field_bracket,
    invert_frame,
    verify_frame,
)
from nambulie.liealg import LieAlgebraSpec, apply_errata, load
from nambulie.symkernel import ExpPoly, parse
from nambulie.symkernel.linalg import matmul

A48 = LieAlgebraSpec("A_4_8", 4, ((2, 3, 1, "1"), (2, 4, 2, "1"), (3, 4, 3, "-1")))
A48_FRAME = Frame.from_strings(
    ["1", "0", "0", "0", "-x3*exp(-x4)", "exp(-x4)", "0", "0", "0", "0", "exp(x4)", "0", "0", "0", "0", "1"], 4
)


def test_apply():
    X = A48_FRAME.fields()
    assert apply(X[3], parse("q4*x4")) == parse("q4")
    assert apply(X[1], parse("x1")) == parse("-x3*exp(-x4)")
    assert all(apply(x, parse("7")).is_zero() for x in X)


def test_field_bracket_reproduces_a48():
    X = A48_FRAME.fields()
    assert field_bracket(X[1], X[2]) == VectorField.coordinate(1)
    assert field_bracket(X[1], X[1]).is_zero()
    assert verify_frame(A48_FRAME, A48)


def test_printed_a48_frame_fails_at_the_stray_factor():
    reg = load()
    printed = reg.algebra("A_4_8")
    fixed, _ = apply_errata(printed, [e for e in reg.errata_for("A_4_8") if e.path != "frame[3,3]"])
    rep = verify_frame(Frame.from_strings(fixed.frame, 4), A48)
    assert not rep and (3, 4) in [(i, j) for i, j, _ in rep.mismatches]


fields = st.lists(props.real_exppolys, min_size=4, max_size=4).map(lambda c: VectorField(tuple(c)))


@seed(21)
@settings(max_examples=25, deadline=None, derandomize=True)
@given(fields, fields, props.real_exppolys)
def test_bracket_is_the_commutator(X, Y, f):
    assert apply(field_bracket(X, Y), f) == apply(X, apply(Y, f)) - apply(Y, apply(X, f))
    assert field_bracket(X, Y) == VectorField(tuple(-c for c in field_bracket(Y, X).components))


def test_derive_frame_abelian_is_identity():
    assert derive_frame(LieAlgebraSpec("4A_1", 4, ())) == Frame.identity(4)


def test_derive_frame_a48_verifies():
    F = derive_frame(A48)
    assert verify_frame(F, A48)
    assert F.determinant().is_unit()


def test_derive_frame_rotation_family_has_trig_entries():
    reg = load()
    a = reg.algebra("A_3_6+A_1")
    F = derive_frame(a.spec)
    assert verify_frame(F, a.spec)
    text = " ".join(F.strings())
    assert "cos(x3)" in text and "sin(x3)" in text


def test_irrational_eigenvalues_are_reported():
    # ad(X3) has eigenvalues +-sqrt(2)
    alg = LieAlgebraSpec("irr", 4, ((1, 3, 2, "1"), (2, 3, 1, "2")))
    with pytest.raises(NonClosedExponential):
        derive_frame(alg)


def test_invert_frame():
    inv = invert_frame(A48_FRAME)
    prod = matmul([list(r) for r in A48_FRAME.rows], [list(r) for r in inv.rows])
    assert prod == [[ExpPoly.const(1 if i == j else 0) for j in range(4)] for i in range(4)]
    assert invert_frame(Frame.identity(4)) == Frame.identity(4)
    singular = Frame.from_strings(["x1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"], 4)
    with pytest.raises(SingularFrame):
        invert_frame(singular)


def test_stored_frames_are_identity_at_origin():
    reg = load()
    for a in reg.algebras:
        if a.frame is None or a.spec.params:
            continue
        eff, unv = apply_errata(a, reg.errata_for(a.id))
        if "frame" in unv:
            continue
        F = Frame.from_strings(eff.frame, 4)
        assert F.at_origin() == [[1 if i == j else 0 for j in range(4)] for i in range(4)], a.id
