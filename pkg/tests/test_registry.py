import pytest

from nambulie.liealg import (
    FormatError,
    JacobiViolation,
    apply_errata,
    default_registry_text,
    dumps,
    load,
    loads,
    read_path,
    save,
    write_path,
)

BROKEN = """
[[algebra]]
id = "X"
typeset = "X"
dim = 4
constants = [[2, 3, 1, "1"], [2, 4, 2, "-1"], [3, 4, 3, "-1"]]
"""

FIX = """
[[erratum]]
entry = "X"
path = "constants[2,4,2]"
printed = "-1"
corrected = "1"
check = "jacobi"
reason = "sign"
"""


@pytest.fixture(scope="module")
def reg():
    return load()


def test_bundled_counts(reg):
    assert len(reg.algebras) == 30
    assert len(reg.subalgebras) == 87
    assert len({a.id for a in reg.algebras}) == 30


def test_round_trip_is_lossless(reg, tmp_path):
    assert loads(dumps(reg)) == reg
    path = tmp_path / "r.toml"
    save(reg, path)
    assert load(path) == reg


def test_empty_registry():
    r = loads("")
    assert r.algebras == () and r.subalgebras == () and r.errata == ()


@pytest.mark.parametrize(
    "text,needle",
    [
        ("garbage = [", "not valid TOML"),
        ('[[algebra]]\nid = "x"', "missing key 'dim'"),
        ("format = 7", "unsupported registry format"),
    ],
)
def test_malformed_registry_raises_format_error(text, needle):
    with pytest.raises(FormatError, match=needle):
        loads(text)


def test_missing_file_raises_format_error(tmp_path):
    with pytest.raises(FormatError, match="cannot read registry"):
        load(tmp_path / "absent.toml")


def test_jacobi_gate_is_strict_by_default():
    with pytest.raises(JacobiViolation, match="triple \\(2, 3, 4\\)"):
        loads(BROKEN)
    lax = loads(BROKEN, strict=False)
    assert lax.algebras == () and lax.rejected[0][0] == "X"


def test_erratum_restores_jacobi():
    r = loads(BROKEN + FIX)
    eff, unverified = apply_errata(r.algebra("X"), r.errata_for("X"))
    assert read_path(eff, "constants[2,4,2]") == "1" and not unverified


def test_erratum_must_quote_the_stored_text():
    with pytest.raises(FormatError, match="does not match"):
        loads(BROKEN + FIX.replace('printed = "-1"', 'printed = "2"'))


def test_bad_erratum_kind_and_check():
    with pytest.raises(FormatError):
        loads(BROKEN + FIX + 'kind = "maybe"\n')
    with pytest.raises(FormatError):
        loads(BROKEN + FIX.replace('check = "jacobi"', 'check = "vibes"'))


def test_paths_read_and_write(reg):
    a = reg.algebra("A_4_8")
    assert read_path(a, "eta") == "q4*x4"
    b = write_path(a, "eta", "q4*x4+q1")
    assert read_path(b, "eta") == "q4*x4+q1" and read_path(a, "eta") == "q4*x4"


def test_typeset_names(reg):
    assert reg.typeset("A0_4_9") == "A^0_{4,9}"
    assert reg.typeset("A_4_8/A_3_1").startswith("A_{3,1} in")


def test_every_erratum_targets_a_known_entry(reg):
    ids = {a.id for a in reg.algebras} | {s.id for s in reg.subalgebras}
    assert all(e.entry in ids for e in reg.errata)
    assert all(e.reason for e in reg.errata)


def test_default_text_is_the_bundled_file(reg):
    assert loads(default_registry_text()) == reg
