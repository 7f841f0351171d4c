import json
from pathlib import Path

import pytest

from nambulie.liealg import algebra_bindings, apply_errata, loads
from nambulie.tables import (
    STATUSES,
    emit_report,
    justify_erratum,
    report_from_dict,
    report_text,
    report_to_dict,
    run_all,
    solve_algebra,
    verify_entry,
)
from nambulie.symkernel import to_text

GOLDEN = Path(__file__).parent / "golden" / "report.txt"


def test_no_unexplained_failures(full_report):
    rep, _ = full_report
    assert rep.unexplained() == 0, report_text(rep)
    assert all(r.status in STATUSES for r in rep.rows)


def test_every_entry_is_covered(full_report, registry):
    rep, _ = full_report
    seen = {(r.table, r.entry) for r in rep.rows}
    assert {a.id for a in registry.algebras} == {e for t, e in seen if t == "I"}
    assert {s.id for s in registry.subalgebras} == {e for t, e in seen if t == "II"}


def test_parameterized_table_i_rows_use_at_least_four_values(full_report, registry):
    rep, _ = full_report
    for a in registry.algebras:
        if a.spec.params:
            assert len([r for r in rep.rows if r.table == "I" and r.entry == a.id]) >= 4, a.id


def test_every_erratum_is_justified(full_report, registry):
    rep, _ = full_report
    assert len(rep.errata) == len(registry.errata)
    bad = [e.erratum for e in rep.errata if not e.ok]
    assert not bad


def test_erratum_checks_fail_on_the_printed_text(registry):
    e = next(e for e in registry.errata if e.id == "A_4_8:frame[3,3]")
    res = justify_erratum(registry, e)
    assert res.printed_fails and res.corrected_passes


def test_trivial_rows_are_certified(full_report, registry):
    rep, _ = full_report
    trivial = {s.id for s in registry.subalgebras if s.trivial}
    rows = [r for r in rep.rows if r.entry in trivial]
    assert rows and all(r.checks["membership"].detail.startswith("solution space is {0}") for r in rows)


def test_a48_order_three_rows():
    from nambulie.liealg import load

    reg = load()
    rows = [r for s in reg.subalgebras_of("A_4_8") for r in verify_entry(reg, s.id)[0]]
    assert len(rows) == 3 and all(r.status == "pass" for r in rows)


def test_golden_report_snapshot(full_report):
    rep, _ = full_report
    assert report_text(rep) == GOLDEN.read_text(encoding="utf-8")


def test_report_is_deterministic(registry):
    a = run_all(registry, sweep=False, check_errata=False)
    b = run_all(registry, sweep=False, check_errata=False)
    assert emit_report(a, "json") == emit_report(b, "json")
    assert emit_report(a, "text") == emit_report(b, "text")


def test_json_round_trip(full_report):
    rep, _ = full_report
    d = json.loads(emit_report(rep, "json"))
    back = report_from_dict(d)
    assert report_to_dict(back) == report_to_dict(rep)
    assert report_text(back) == report_text(rep)


def test_unknown_format_is_rejected(full_report):
    with pytest.raises(ValueError):
        emit_report(full_report[0], "yaml")


def test_injected_typo_is_caught(registry):
    from nambulie.liealg import dumps

    text = dumps(registry).replace('eta = "q4*x4"', 'eta = "q4*x4^2"', 1)
    rep = run_all(loads(text), tables=("I",), algebra="A_4_8", check_errata=False)
    assert rep.summary()["fail"] == 1
    assert "membership" in {k for r in rep.rows for k, c in r.checks.items() if c.status == "fail"}


def test_solve_algebra_degenerate_parameter(registry):
    generic = solve_algebra(registry, "A_a_4_2", {"a": "1/3"})
    special = solve_algebra(registry, "A_a_4_2", {"a": "-2"})
    assert to_text(special.eta) == "q4*x4"
    assert to_text(generic.eta) != to_text(special.eta)
    with pytest.raises(ValueError):
        solve_algebra(registry, "A_a_4_2", {"a": "0"})
    with pytest.raises(ValueError):
        solve_algebra(registry, "A_a_4_2", {})
