"""Registry of algebras, subalgebras and errata stored as TOML.

Schema (``format = 1``)::

    [[algebra]]
    id = "A_4_8"              # ASCII id
    typeset = "A_{4,8}"       # name as printed
    dim = 4
    constants = [[2, 3, 1, "1"], ...]   # C_ij^k: [X_i, X_j] = C_ij^k X_k
    f = [[1, 2, 3, "1"], ...]           # alternative spelling f^k_ij = [k, i, j]
    frame = ["...", ...]      # row-major V_i^mu, optional
    frame_order = "forward"   # second-kind ordering for derived frames
    eta = "..."               # claimed eta^{1234}, optional
    require = ["a<b"]         # joint parameter conditions
    [[algebra.param]]         # name, exclude, sweep, kind ("real" | "angle")
    [[algebra.case]]          # piecewise claim: when = "a=-1", eta = "..."

    [[subalgebra]]
    parent, id, type, basis = [...], fields = [...] (3 x dim, row-major),
    eta = [["123", "..."], ...], when = "...", trivial = true|false
    [[subalgebra.param]]

    [[erratum]]
    entry, path, printed, corrected, check, kind ("correction" | "unverified"),
    reason

Entries hold the printed text.  :func:`effective_algebra` and
:func:`effective_subalgebra` apply the errata.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import tomli
import tomli_w

from .core import (
    DEFAULT_SWEEP,
    JacobiViolation,
    LieAlgebraSpec,
    ParamSpec,
    SubalgebraSpec,
    exact_env,
    jacobi_check,
    sweep_bindings,
)

FORMAT_VERSION = 1
# verification checks, in report column order
CHECK_NAMES = (
    "parse", "jacobi", "frame", "derive", "closure", "wedge", "origin",
    "fields", "coverage", "components", "membership", "vanish", "identity",
)
ERRATUM_KINDS = ("correction", "unverified")
ENV_VAR = "NAMBULIE_REGISTRY"

Text = Union[str, Tuple[str, ...]]


class FormatError(ValueError):
    """Registry file does not follow the documented schema."""


@dataclass(frozen=True)
class EtaCase:
    """Claim valid where the parameter condition ``when`` holds."""

    when: str
    eta: str


@dataclass(frozen=True)
class AlgebraEntry:
    """A Table I row: algebra, printed frame and printed ``eta^{1234}``."""

    spec: LieAlgebraSpec
    frame: Optional[Tuple[str, ...]] = None
    eta: Optional[str] = None
    cases: Tuple[EtaCase, ...] = ()
    require: Tuple[str, ...] = ()
    frame_order: str = "forward"

    @property
    def id(self) -> str:
        return self.spec.name

    def claims(self) -> List[Tuple[str, str]]:
        """``(condition, eta)`` pairs; the unconditional claim has condition ``""``."""
        if self.eta is not None:
            return [("", self.eta)]
        return [(c.when, c.eta) for c in self.cases]


@dataclass(frozen=True)
class SubalgebraEntry:
    """A Table II row: subalgebra basis, printed fields and printed components."""

    spec: SubalgebraSpec
    fields: Tuple[str, ...] = ()
    eta: Tuple[Tuple[str, str], ...] = ()
    when: str = ""
    trivial: bool = False

    @property
    def id(self) -> str:
        return self.spec.id

    @property
    def parent(self) -> str:
        return self.spec.parent


@dataclass(frozen=True)
class Erratum:
    """A deviation from the printed text with the check that motivates it.

    ``kind="correction"`` replaces ``printed`` by ``corrected``;
    ``kind="unverified"`` keeps the printed claim but removes it from the pass
    requirement, because no single-token fix reconciles it.
    """

    entry: str
    path: str
    printed: Text
    corrected: Optional[Text]
    check: str
    kind: str = "correction"
    reason: str = ""

    @property
    def id(self) -> str:
        return f"{self.entry}:{self.path}"


@dataclass(frozen=True)
class Registry:
    algebras: Tuple[AlgebraEntry, ...] = ()
    subalgebras: Tuple[SubalgebraEntry, ...] = ()
    errata: Tuple[Erratum, ...] = ()
    format: int = FORMAT_VERSION
    rejected: Tuple[Tuple[str, str], ...] = field(default=(), compare=False)

    def algebra(self, ident: str) -> AlgebraEntry:
        for a in self.algebras:
            if a.id == ident:
                return a
        raise KeyError(f"unknown algebra {ident!r}")

    def subalgebra(self, ident: str) -> SubalgebraEntry:
        for s in self.subalgebras:
            if s.id == ident:
                return s
        raise KeyError(f"unknown subalgebra {ident!r}")

    def subalgebras_of(self, parent: str) -> List[SubalgebraEntry]:
        return [s for s in self.subalgebras if s.parent == parent]

    def errata_for(self, entry: str) -> List[Erratum]:
        return [e for e in self.errata if e.entry == entry]

    def typeset(self, ident: str) -> str:
        """Printed name of an algebra or subalgebra row."""
        for a in self.algebras:
            if a.id == ident:
                return a.spec.typeset or a.id
        for s in self.subalgebras:
            if s.id == ident:
                return f"{s.spec.claimed_type} in {self.typeset(s.parent)}"
        raise KeyError(f"unknown entry {ident!r}")


# ---------------------------------------------------------------- reading


def _require(d: dict, key: str, kind, where: str):
    if key not in d:
        raise FormatError(f"{where}: missing key {key!r}")
    v = d[key]
    if not isinstance(v, kind):
        raise FormatError(f"{where}: key {key!r} has the wrong type")
    return v


def _strings(v, where: str, key: str) -> Tuple[str, ...]:
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise FormatError(f"{where}: {key!r} must be a list of strings")
    return tuple(v)


def _read_params(items, where: str) -> Tuple[ParamSpec, ...]:
    out = []
    for p in items or []:
        name = _require(p, "name", str, where)
        kind = p.get("kind", "real")
        if kind not in ("real", "angle"):
            raise FormatError(f"{where}: parameter {name!r} has unknown kind {kind!r}")
        out.append(
            ParamSpec(
                name,
                _strings(p.get("exclude", []), where, "exclude"),
                kind,
                _strings(p.get("sweep", []), where, "sweep"),
            )
        )
    return tuple(out)


def _read_constants(d: dict, where: str) -> Tuple[Tuple[int, int, int, str], ...]:
    rows = []
    for key, upper_first in (("constants", False), ("f", True)):
        for c in d.get(key, []):
            if not (isinstance(c, list) and len(c) == 4 and all(isinstance(x, int) for x in c[:3]) and isinstance(c[3], str)):
                raise FormatError(f"{where}: bad structure constant {c!r}")
            k, i, j = (c[0], c[1], c[2]) if upper_first else (c[2], c[0], c[1])
            rows.append((i, j, k, c[3]))
    return tuple(rows)


def _read_algebra(d: dict) -> AlgebraEntry:
    ident = _require(d, "id", str, "algebra")
    where = f"algebra {ident}"
    dim = _require(d, "dim", int, where)
    frame = _strings(d["frame"], where, "frame") if "frame" in d else None
    if frame is not None and len(frame) != dim * dim:
        raise FormatError(f"{where}: frame needs {dim * dim} entries")
    cases = tuple(EtaCase(_require(c, "when", str, where), _require(c, "eta", str, where)) for c in d.get("case", []))
    eta = d.get("eta")
    if eta is not None and not isinstance(eta, str):
        raise FormatError(f"{where}: eta must be a string")
    if eta is not None and cases:
        raise FormatError(f"{where}: give either eta or cases, not both")
    order = d.get("frame_order", "forward")
    if order not in ("forward", "reverse"):
        raise FormatError(f"{where}: frame_order must be 'forward' or 'reverse'")
    spec = LieAlgebraSpec(
        ident,
        dim,
        _read_constants(d, where),
        _read_params(d.get("param"), where),
        d.get("typeset", ""),
    )
    return AlgebraEntry(spec, frame, eta, cases, _strings(d.get("require", []), where, "require"), order)


def _read_subalgebra(d: dict) -> SubalgebraEntry:
    ident = _require(d, "id", str, "subalgebra")
    where = f"subalgebra {ident}"
    basis = _strings(_require(d, "basis", list, where), where, "basis")
    fields_ = _strings(d.get("fields", []), where, "fields")
    if fields_ and len(fields_) % len(basis):
        raise FormatError(f"{where}: fields must have one row per basis vector")
    eta = []
    for pair in d.get("eta", []):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise FormatError(f"{where}: eta entries are [label, expr] pairs")
        eta.append((pair[0], pair[1]))
    spec = SubalgebraSpec(
        _require(d, "parent", str, where),
        basis,
        d.get("type", ""),
        ident,
        _read_params(d.get("param"), where),
    )
    return SubalgebraEntry(spec, fields_, tuple(eta), d.get("when", ""), bool(d.get("trivial", False)))


def _text(v, where: str) -> Text:
    if isinstance(v, str):
        return v
    if isinstance(v, list) and all(isinstance(x, str) for x in v):
        return tuple(v)
    raise FormatError(f"{where}: erratum text must be a string or a list of strings")


def _read_erratum(d: dict) -> Erratum:
    entry = _require(d, "entry", str, "erratum")
    where = f"erratum for {entry}"
    kind = d.get("kind", "correction")
    if kind not in ERRATUM_KINDS:
        raise FormatError(f"{where}: unknown kind {kind!r}")
    check = _require(d, "check", str, where)
    if check not in CHECK_NAMES:
        raise FormatError(f"{where}: unknown check {check!r}")
    corrected = d.get("corrected")
    if kind == "correction" and corrected is None:
        raise FormatError(f"{where}: a correction needs 'corrected'")
    if kind == "unverified" and corrected is not None:
        raise FormatError(f"{where}: an unverified claim has no 'corrected' text")
    return Erratum(
        entry,
        _require(d, "path", str, where),
        _text(_require(d, "printed", (str, list), where), where),
        None if corrected is None else _text(corrected, where),
        check,
        kind,
        d.get("reason", ""),
    )


def loads(text: str, strict: bool = True) -> Registry:
    """Parse registry text.

    With ``strict`` every algebra must pass the Jacobi check (after errata) on
    its parameter sweep, else :class:`JacobiViolation` names the entry.  With
    ``strict=False`` such entries are dropped and listed in ``rejected``.
    """
    try:
        d = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise FormatError(f"not valid TOML: {exc}") from None
    if not d:
        return Registry()
    fmt = d.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise FormatError(f"unsupported registry format {fmt!r}")
    unknown = set(d) - {"format", "algebra", "subalgebra", "erratum"}
    if unknown:
        raise FormatError(f"unknown top-level keys {sorted(unknown)}")
    reg = Registry(
        tuple(_read_algebra(a) for a in d.get("algebra", [])),
        tuple(_read_subalgebra(s) for s in d.get("subalgebra", [])),
        tuple(_read_erratum(e) for e in d.get("erratum", [])),
        fmt,
    )
    _check_ids(reg)
    _check_errata_targets(reg)
    return jacobi_gate(reg, strict)


def load(path: Union[str, Path, None] = None, strict: bool = True) -> Registry:
    """Load a registry file; ``None`` means the bundled registry."""
    if path is None:
        return loads(default_registry_text(), strict)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read registry {path}: {exc.strerror}") from None
    return loads(text, strict)


def default_registry_text() -> str:
    return resources.files("nambulie").joinpath("data/registry.toml").read_text(encoding="utf-8")


def _check_ids(reg: Registry) -> None:
    seen = set()
    for ident in [a.id for a in reg.algebras] + [s.id for s in reg.subalgebras]:
        if ident in seen:
            raise FormatError(f"duplicate entry id {ident!r}")
        seen.add(ident)
    parents = {a.id for a in reg.algebras}
    for s in reg.subalgebras:
        if s.parent not in parents:
            raise FormatError(f"subalgebra {s.id}: unknown parent {s.parent!r}")
    for e in reg.errata:
        if e.entry not in seen:
            raise FormatError(f"erratum for unknown entry {e.entry!r}")
    ids = [e.id for e in reg.errata]
    if len(ids) != len(set(ids)):
        raise FormatError("two errata share an entry and path")


def _check_errata_targets(reg: Registry) -> None:
    """Each erratum's printed text must be what the entry actually holds."""
    for e in reg.errata:
        entry = _entry(reg, e.entry)
        current = read_path(entry, e.path)
        if current != e.printed:
            raise FormatError(f"erratum {e.id}: printed text {e.printed!r} does not match registry text {current!r}")


def _entry(reg: Registry, ident: str):
    for a in reg.algebras:
        if a.id == ident:
            return a
    return reg.subalgebra(ident)


# ---------------------------------------------------------------- paths

_INDEXED = re.compile(r"^(\w+)\[(\d+(?:,\d+)*)\](?:\.(\w+))?$")


def _parse_path(path: str):
    m = _INDEXED.match(path)
    if not m:
        return path, (), None
    return m.group(1), tuple(int(x) for x in m.group(2).split(",")), m.group(3)


def read_path(entry, path: str) -> Text:
    """Text stored at an erratum path (missing items read as ``""``)."""
    head, idx, attr = _parse_path(path)
    if isinstance(entry, AlgebraEntry):
        if head == "constants" and len(idx) == 3:
            vals = [c[3] for c in entry.spec.constants if c[:3] == idx]
            return vals[0] if vals else ""
        if head == "frame" and not idx:
            return entry.frame or ()
        if head == "frame" and len(idx) == 2:
            return entry.frame[(idx[0] - 1) * entry.spec.dim + idx[1] - 1]
        if head == "eta" and not idx:
            return entry.eta or ""
        if head == "case" and len(idx) == 1 and attr in ("eta", "when"):
            return getattr(entry.cases[idx[0] - 1], attr)
    else:
        if head == "basis" and not idx:
            return entry.spec.basis
        if head == "basis" and len(idx) == 1:
            return entry.spec.basis[idx[0] - 1]
        if head == "fields" and not idx:
            return entry.fields
        if head == "eta" and not idx:
            return tuple(expr for _, expr in entry.eta)
        if head == "fields" and len(idx) == 2:
            dim = len(entry.fields) // len(entry.spec.basis)
            return entry.fields[(idx[0] - 1) * dim + idx[1] - 1]
        if head == "eta" and len(idx) == 1:
            label, expr = entry.eta[idx[0] - 1]
            return label if attr == "label" else expr
        if head == "when" and not idx:
            return entry.when
    raise FormatError(f"unsupported erratum path {path!r} for {entry.id}")


def write_path(entry, path: str, text: Text):
    """Copy of ``entry`` with ``text`` stored at ``path``."""
    head, idx, attr = _parse_path(path)
    read_path(entry, path)
    if isinstance(entry, AlgebraEntry):
        if head == "constants":
            rows = [c for c in entry.spec.constants if c[:3] != idx]
            if text not in ("", "0"):
                rows.append(idx + (text,))
            return replace(entry, spec=replace(entry.spec, constants=tuple(rows)))
        if head == "frame" and not idx:
            return replace(entry, frame=tuple(text))
        if head == "frame":
            frame = list(entry.frame)
            frame[(idx[0] - 1) * entry.spec.dim + idx[1] - 1] = text
            return replace(entry, frame=tuple(frame))
        if head == "eta":
            return replace(entry, eta=text)
        cases = list(entry.cases)
        cases[idx[0] - 1] = replace(cases[idx[0] - 1], **{attr: text})
        return replace(entry, cases=tuple(cases))
    if head == "basis" and not idx:
        return replace(entry, spec=replace(entry.spec, basis=tuple(text)))
    if head == "basis":
        basis = list(entry.spec.basis)
        basis[idx[0] - 1] = text
        return replace(entry, spec=replace(entry.spec, basis=tuple(basis)))
    if head == "fields" and not idx:
        return replace(entry, fields=tuple(text))
    if head == "fields":
        dim = len(entry.fields) // len(entry.spec.basis)
        fields_ = list(entry.fields)
        fields_[(idx[0] - 1) * dim + idx[1] - 1] = text
        return replace(entry, fields=tuple(fields_))
    if head == "eta":
        eta = list(entry.eta)
        label, expr = eta[idx[0] - 1]
        eta[idx[0] - 1] = (text, expr) if attr == "label" else (label, text)
        return replace(entry, eta=tuple(eta))
    return replace(entry, when=text)


def apply_errata(entry, errata: Sequence[Erratum], skip: Optional[Erratum] = None):
    """Entry with every correction applied, except ``skip``.

    Returns ``(entry, unverified_paths)``; unverified paths keep their printed
    text and are excluded from the pass requirement.
    """
    unverified = set()
    for e in errata:
        if e.entry != entry.id or e is skip:
            continue
        if e.kind == "correction":
            entry = write_path(entry, e.path, e.corrected)
        else:
            unverified.add(e.path)
    return entry, frozenset(unverified)


def effective_algebra(reg: Registry, ident: str, skip: Optional[Erratum] = None):
    return apply_errata(reg.algebra(ident), reg.errata_for(ident), skip)


def effective_subalgebra(reg: Registry, ident: str, skip: Optional[Erratum] = None):
    return apply_errata(reg.subalgebra(ident), reg.errata_for(ident), skip)


# ---------------------------------------------------------------- Jacobi gate


def algebra_bindings(entry: AlgebraEntry, values: Sequence[str] = DEFAULT_SWEEP, use_overrides: bool = True):
    """Admissible and skipped bindings of an algebra's parameters."""
    if not entry.spec.params:
        return [{}], []
    return sweep_bindings(entry.spec.params, values, entry.spec.excluded_points, entry.require, use_overrides)


def jacobi_gate(reg: Registry, strict: bool = True) -> Registry:
    keep, rejected = [], []
    for a in reg.algebras:
        eff, _ = apply_errata(a, reg.errata_for(a.id))
        problem = None
        for env in algebra_bindings(eff)[0]:
            try:
                rep = jacobi_check(eff.spec, exact_env(env))
            except Exception as exc:  # unbound or malformed constant
                problem = f"constants do not evaluate at {env}: {exc}"
                break
            if not rep:
                problem = f"Jacobi identity fails for triple {rep.triple} at {env}"
                break
        if problem is None:
            keep.append(a)
            continue
        msg = f"{a.id}: {problem}; record the fix as an [[erratum]] with entry = {a.id!r}, path = 'constants[i,j,k]'"
        if strict:
            raise JacobiViolation(msg)
        rejected.append((a.id, msg))
    if not rejected:
        return reg
    gone = {r[0] for r in rejected}
    return Registry(
        tuple(keep),
        tuple(s for s in reg.subalgebras if s.parent not in gone),
        tuple(e for e in reg.errata if e.entry not in gone and _parent_of(reg, e.entry) not in gone),
        reg.format,
        tuple(rejected),
    )


def _parent_of(reg: Registry, ident: str) -> str:
    for s in reg.subalgebras:
        if s.id == ident:
            return s.parent
    return ident


# ---------------------------------------------------------------- writing


def _params_dict(params: Sequence[ParamSpec]) -> List[dict]:
    out = []
    for p in params:
        d: dict = {"name": p.name}
        if p.exclude:
            d["exclude"] = list(p.exclude)
        if p.sweep:
            d["sweep"] = list(p.sweep)
        if p.kind != "real":
            d["kind"] = p.kind
        out.append(d)
    return out


def to_dict(reg: Registry) -> dict:
    out: dict = {"format": reg.format}
    algs = []
    for a in reg.algebras:
        d: dict = {"id": a.id, "typeset": a.spec.typeset, "dim": a.spec.dim}
        d["constants"] = [[i, j, k, e] for i, j, k, e in a.spec.constants]
        if a.frame is not None:
            d["frame"] = list(a.frame)
        if a.frame_order != "forward":
            d["frame_order"] = a.frame_order
        if a.eta is not None:
            d["eta"] = a.eta
        if a.require:
            d["require"] = list(a.require)
        if a.spec.params:
            d["param"] = _params_dict(a.spec.params)
        if a.cases:
            d["case"] = [{"when": c.when, "eta": c.eta} for c in a.cases]
        algs.append(d)
    if algs:
        out["algebra"] = algs
    subs = []
    for s in reg.subalgebras:
        d = {"parent": s.parent, "id": s.id, "type": s.spec.claimed_type, "basis": list(s.spec.basis)}
        d["fields"] = list(s.fields)
        d["eta"] = [[lab, e] for lab, e in s.eta]
        if s.when:
            d["when"] = s.when
        if s.trivial:
            d["trivial"] = True
        if s.spec.params:
            d["param"] = _params_dict(s.spec.params)
        subs.append(d)
    if subs:
        out["subalgebra"] = subs
    errs = []
    for e in reg.errata:
        d = {"entry": e.entry, "path": e.path, "printed": _plain(e.printed)}
        if e.corrected is not None:
            d["corrected"] = _plain(e.corrected)
        d.update({"check": e.check, "kind": e.kind, "reason": e.reason})
        errs.append(d)
    if errs:
        out["erratum"] = errs
    return out


def _plain(t: Text):
    return list(t) if isinstance(t, tuple) else t


def dumps(reg: Registry) -> str:
    return tomli_w.dumps(to_dict(reg))


def save(reg: Registry, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(reg), encoding="utf-8")


__all__ = [
    "AlgebraEntry",
    "CHECK_NAMES",
    "ENV_VAR",
    "ERRATUM_KINDS",
    "EtaCase",
    "Erratum",
    "FORMAT_VERSION",
    "FormatError",
    "Registry",
    "SubalgebraEntry",
    "algebra_bindings",
    "apply_errata",
    "default_registry_text",
    "dumps",
    "effective_algebra",
    "effective_subalgebra",
    "jacobi_gate",
    "load",
    "loads",
    "read_path",
    "save",
    "to_dict",
    "write_path",
]
