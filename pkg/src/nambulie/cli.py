"""Command-line front end.

Subcommands: ``list``, ``solve``, ``verify``, ``bracket``, ``dynamics`` and
``derive-frame``.  Parameters are exact rationals ``p/q``; only ``--dt`` and
``--t-end`` accept floats.  Every command ends stdout with one status line

    status: ok|fail key=value ...

and exits 0 exactly when that line says ``ok``.  Input errors exit 2 with a
message on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .dynamics import (
    DEFAULT_ETA,
    InvariantMetric,
    PoissonStructure,
    StepSizeInvalid,
    eta_scalar,
    integrate_flow,
    run_checks,
)
from .invfields import NonClosedExponential, SingularFrame, derive_frame, verify_frame
from .liealg import DEFAULT_SWEEP, ENV_VAR, FormatError, Registry, exact_env, load
from .nambu import multivector, nbracket
from .symkernel import UnknownSymbol, parse, to_text
from .symkernel.numbers import format_rational
from .tables import DEFAULT_SEED, emit_report, run_all, solve_algebra, verify_subalgebra_entry

REGISTRY_ENV = ENV_VAR
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_RATIONAL = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


class UsageError(Exception):
    """Bad command-line input; reported on stderr with exit code 2."""


# ---------------------------------------------------------------- helpers


def exact_value(text: str, what: str = "value") -> str:
    """Validate an exact rational ``p`` or ``p/q``; floats are rejected."""
    t = text.strip()
    if not _RATIONAL.match(t):
        raise UsageError(f"{what} must be an exact rational p or p/q, got {text!r}")
    return t


def parse_params(items: Optional[Sequence[str]]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects name=p/q, got {item!r}")
        name, value = (s.strip() for s in item.split("=", 1))
        if not name.isidentifier():
            raise UsageError(f"bad parameter name {name!r}")
        out[name] = exact_value(value, f"parameter {name}")
    return out


def registry_path(arg: Optional[str]) -> Optional[str]:
    return arg or os.environ.get(REGISTRY_ENV) or None


def open_registry(args) -> Registry:
    return load(registry_path(args.registry))


def status_line(ok: bool, **fields) -> str:
    parts = [f"{k}={v}" for k, v in fields.items()]
    return " ".join(["status:", "ok" if ok else "fail"] + parts)


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


# ---------------------------------------------------------------- commands


def cmd_list(args) -> int:
    reg = open_registry(args)
    algs = [a for a in reg.algebras if args.algebra in (None, a.id)]
    if args.algebra and not algs:
        raise UsageError(f"unknown algebra {args.algebra!r}")
    if args.format == "json":
        data = []
        for a in algs:
            data.append(
                {
                    "id": a.id,
                    "typeset": a.spec.typeset,
                    "params": a.spec.param_names(),
                    "constants": constants_listing(a),
                    "claims": [{"when": w, "eta": e} for w, e in a.claims()],
                    "subalgebras": [
                        {"id": s.id, "type": s.spec.claimed_type, "basis": list(s.spec.basis), "eta": dict(s.eta)}
                        for s in reg.subalgebras_of(a.id)
                    ],
                }
            )
        print(json.dumps(data, indent=2))
    else:
        for a in algs:
            print(f"{a.id}  ({a.spec.typeset or a.id})")
            if a.spec.params:
                print(f"  params: {', '.join(a.spec.param_names())}")
            print(f"  constants: {constants_listing(a)}")
            for when, eta in a.claims():
                print(f"  eta1234{' [' + when + ']' if when else ''}: {eta}")
            for s in reg.subalgebras_of(a.id):
                comps = ", ".join(f"eta^{k}={v}" for k, v in s.eta) or ("trivial" if s.trivial else "-")
                print(f"  sub {s.id}: {s.spec.claimed_type} = <{', '.join(s.spec.basis)}>  {comps}")
    print(status_line(True, algebras=len(algs), subalgebras=sum(len(reg.subalgebras_of(a.id)) for a in algs)))
    return EXIT_OK


def constants_listing(a) -> str:
    """``[T2,T4]=T2, [T3,T4]=-T3, ...`` from the source text, parameters unbound."""
    pairs: Dict = {}
    for i, j, k, src in a.spec.constants:
        pairs.setdefault((i, j), []).append((k, src.replace(" ", "")))
    parts = []
    for (i, j), terms in pairs.items():
        rhs = ""
        for k, src in terms:
            piece = {"1": "", "-1": "-"}.get(src, src if src.isalnum() or src.startswith("-") else f"({src})")
            piece = f"{piece}T{k}" if piece in ("", "-") else f"{piece}*T{k}"
            rhs += piece if not rhs or piece.startswith("-") else "+" + piece
        parts.append(f"[T{i},T{j}]={rhs}")
    return ", ".join(parts)


def cmd_solve(args) -> int:
    reg = open_registry(args)
    binding = parse_params(args.param)
    if args.order == 4:
        try:
            sol = solve_algebra(reg, args.algebra, binding)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        except (ValueError, NonClosedExponential, SingularFrame) as exc:
            raise UsageError(str(exc)) from None
        sp = sol.space
        print(f"algebra: {args.algebra} ({reg.typeset(args.algebra)})  binding: {_btext(binding)}")
        print(f"frame: {sol.frame_source}, det = {to_text(sol.det)}")
        print(f"f = {to_text(sol.f)}")
        print(f"eta1234 = {to_text(sol.eta)}")
        for i, (qvec, f) in sorted(sp.particular.items()):
            dep = ", ".join(f"q{j}={format_rational(v.re) if not v.im else v}*q{i}" for j, v in enumerate(qvec, 1) if j != i and v)
            print(f"  q{i}: {to_text(f)}" + (f"  ({dep})" if dep else ""))
        if sp.forced_zero:
            print("forced zero: " + ", ".join(f"q{i}" for i in sp.forced_zero))
        for n, h in enumerate(sp.homogeneous, 1):
            print(f"  homogeneous {n}: {to_text(h)}")
        print(status_line(True, free=len(sp.particular), forced_zero=len(sp.forced_zero), homogeneous=len(sp.homogeneous)))
        return EXIT_OK
    # order three: every listed subalgebra of the algebra at this binding
    subs = reg.subalgebras_of(args.algebra)
    if not subs:
        raise UsageError(f"no order-three rows listed for {args.algebra!r}")
    fixed = exact_env(binding)
    shown = 0
    for s in subs:
        rows, _ = verify_subalgebra_entry(reg, s.id, DEFAULT_SWEEP, args.seed)
        for r in rows:
            env = exact_env(r.binding)
            if any(k in env and env[k] != v for k, v in fixed.items()):
                continue
            print(f"{s.id} [{r.binding_text()}]: {r.solution or 'no solve'}")
            shown += 1
    print(status_line(True, rows=shown))
    return EXIT_OK


def _btext(b: Dict[str, str]) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(b.items())) or "-"


def cmd_verify(args) -> int:
    reg = open_registry(args)
    if not (args.all or args.table or args.algebra):
        raise UsageError("choose --all, --table or --algebra")
    if args.algebra and not any(a.id == args.algebra for a in reg.algebras):
        raise UsageError(f"unknown algebra {args.algebra!r}")
    values = DEFAULT_SWEEP
    if args.sweep_values:
        values = tuple(exact_value(v, "sweep value") for v in args.sweep_values.split(","))
    tables = tuple(args.table) if args.table else ("I", "II")
    report = run_all(
        reg,
        values,
        args.seed,
        tables=tables,
        algebra=args.algebra,
        sweep=args.param_sweep != "none",
        check_errata=not args.no_errata,
    )
    text = emit_report(report, args.format)
    if args.output:
        _write(args.output, text)
    else:
        _write(None, text)
    s = report.summary()
    bad = report.unexplained()
    print(status_line(bad == 0, unexplained=bad, **{k.replace("-", "_"): v for k, v in s.items()}))
    return EXIT_OK if bad == 0 else EXIT_FAIL


def cmd_bracket(args) -> int:
    binding = parse_params(args.param)
    env = exact_env(binding)
    if args.component:
        comps = {}
        order = None
        for item in args.component:
            if "=" not in item:
                raise UsageError(f"--component expects IJK=expr, got {item!r}")
            idx, expr = item.split("=", 1)
            if not idx.isdigit():
                raise UsageError(f"bad component label {idx!r}")
            key = tuple(int(c) for c in idx)
            order = order or len(key)
            comps[key] = _expr(expr, env)
        eta = multivector(comps, order, args.dim)
        source = "components"
    elif args.eta is not None:
        eta = multivector({tuple(range(1, args.dim + 1)): _expr(args.eta, env)}, args.dim, args.dim)
        source = "eta"
    elif args.algebra:
        reg = open_registry(args)
        try:
            sol = solve_algebra(reg, args.algebra, binding)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        eta = multivector({tuple(range(1, args.dim + 1)): sol.eta}, args.dim, args.dim)
        source = f"solver for {args.algebra}"
    else:
        raise UsageError("give --algebra, --eta or --component")
    if len(args.functions) != eta.order:
        raise UsageError(f"an order-{eta.order} bracket takes {eta.order} functions, got {len(args.functions)}")
    fs = [_expr(f, env) for f in args.functions]
    print(to_text(nbracket(eta, fs)))
    print(status_line(True, order=eta.order, source=source.replace(" ", "_")))
    return EXIT_OK


def _expr(text: str, env):
    try:
        return parse(text, env)
    except (UnknownSymbol, ValueError) as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None


def cmd_derive_frame(args) -> int:
    reg = open_registry(args)
    try:
        entry = reg.algebra(args.algebra)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    binding = parse_params(args.param)
    missing = [n for n in entry.spec.param_names() if n not in binding]
    if missing:
        raise UsageError(f"{args.algebra} needs parameter values for {', '.join(missing)}")
    env = exact_env(binding)
    order = args.order or entry.frame_order
    try:
        frame = derive_frame(entry.spec, env, order)
    except (NonClosedExponential, SingularFrame) as exc:
        print(f"derive-frame: {type(exc).__name__}: {exc}")
        print(status_line(False, algebra=args.algebra, reason=type(exc).__name__))
        return EXIT_FAIL
    rep = verify_frame(frame, entry.spec, env)
    print(f"algebra: {args.algebra} ({reg.typeset(args.algebra)})  binding: {_btext(binding)}  order: {order}")
    for i, X in enumerate(frame.fields(), 1):
        print(f"X{i} = {X}")
    print(f"det = {to_text(frame.determinant())}")
    print(f"verify_frame: {'pass' if rep else 'fail'}")
    print(status_line(bool(rep), algebra=args.algebra))
    return EXIT_OK if rep else EXIT_FAIL


def cmd_dynamics(args) -> int:
    alpha = exact_value(args.alpha, "--alpha")
    # "alpha" ties the metric parameter to the bracket scale
    a = alpha if args.metric_a.strip() == "alpha" else exact_value(args.metric_a, "--metric-a")
    q4 = exact_value(args.q4, "--q4")
    try:
        ps, metric = PoissonStructure(alpha), InvariantMetric(a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "check":
        rep = run_checks(alpha, a, q4, seed=args.seed, trials=args.trials)
        fr = lambda v: "none" if v is None else str(v)
        print(f"alpha = {fr(rep.alpha)}  metric a = {fr(rep.metric_a)}")
        print(f"canonical chart: {'pass' if rep.canonical else 'fail'}")
        print(f"Q closure: {'pass' if rep.closure.ok else 'fail'} ({rep.closure.checked - len(rep.closure.mismatches)}/{rep.closure.checked})")
        print(f"metric inverse: {'pass' if rep.metric_inverse else 'fail'}")
        print(f"ad invariance: {'pass' if rep.ad_invariant else 'fail'}")
        print(f"casimir coefficient: {fr(rep.casimir)} (expected -2/a^2 = {fr(rep.casimir_expected)})")
        pf = rep.pfaffian
        print(f"pfaffian check: {'pass' if pf.ok else 'fail'} (constant {fr(pf.constant)}, {pf.trials} quadruples)")
        for name, ev in rep.evolution_samples.items():
            r = ev.ratio()
            rel = "equal" if ev.equal else (f"lhs = {r} * rhs" if r is not None else "not proportional")
            print(f"weighted evolution A={name}: {rel}")
        print(status_line(rep.ok, casimir=fr(rep.casimir), pfaffian=fr(pf.constant)))
        return EXIT_OK if rep.ok else EXIT_FAIL
    # evolve
    start = [float(Fraction(exact_value(v, "start coordinate"))) for v in args.start.split(",")]
    if len(start) != 4:
        raise UsageError("--start takes four values x1,x2,P1,P2")
    dt, t_end = _float(args.dt, "--dt"), _float(args.t_end, "--t-end")
    try:
        eta = eta_scalar(args.eta, q4)
    except (UnknownSymbol, ValueError) as exc:
        raise UsageError(f"cannot parse eta: {exc}") from None
    traj = integrate_flow(start, t_end, dt, ps, metric, eta, args.freeze_eta)
    _write(args.output, traj.to_csv())
    drift = traj.energy_drift()
    ok = drift < 1e-9 * max(1.0, abs(traj.rows[0][5]))
    print(status_line(ok, steps=len(traj.rows) - 1, drift=format(drift, ".3g")))
    return EXIT_OK if ok else EXIT_FAIL


def _float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what} must be a number, got {text!r}") from None


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", help=f"registry TOML (default: ${REGISTRY_ENV} or the bundled file)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--param", action="append", metavar="NAME=P/Q", help="exact parameter value, repeatable")

    p = argparse.ArgumentParser(prog="nambulie", description="Exact multiplicative Nambu structures on 4D Lie groups.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", parents=[common], help="list registry entries")
    s.add_argument("--algebra")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("solve", parents=[common, params], help="solve the multiplicativity system")
    s.add_argument("--algebra", required=True)
    s.add_argument("--order", type=int, choices=(3, 4), default=4)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="verify the printed tables")
    s.add_argument("--all", action="store_true")
    s.add_argument("--table", action="append", choices=("I", "II"))
    s.add_argument("--algebra")
    s.add_argument("--param-sweep", choices=("default", "none"), default="default")
    s.add_argument("--sweep-values", help="comma-separated exact values replacing the default sweep")
    s.add_argument("--no-errata", action="store_true", help="skip erratum justification")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bracket", parents=[common, params], help="evaluate a Nambu bracket")
    s.add_argument("--algebra", help="use the solved order-four structure of this algebra")
    s.add_argument("--eta", help="top-order scalar eta^{1..n}")
    s.add_argument("--component", action="append", metavar="IJK=EXPR", help="multivector component, repeatable")
    s.add_argument("--dim", type=int, default=4)
    s.add_argument("functions", nargs="+")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("dynamics", parents=[common], help="dynamics checks and trajectories")
    s.add_argument("mode", choices=("check", "evolve"))
    s.add_argument("--alpha", default="1")
    s.add_argument("--metric-a", default="1", help="invariant metric parameter, or 'alpha' to reuse --alpha")
    s.add_argument("--q4", default="1")
    s.add_argument("--eta", default=DEFAULT_ETA, help="order-four scalar in x1..x4 (q4 bound from --q4)")
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--start", default="0,1,1,1/2", help="initial x1,x2,P1,P2 (exact values)")
    s.add_argument("--t-end", default="10")
    s.add_argument("--dt", default="0.001")
    s.add_argument("--freeze-eta", action="store_true", help="evaluate the prefactor once at the start")
    s.add_argument("--output", help="CSV path (default stdout)")
    s.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("derive-frame", parents=[common, params], help="derive left-invariant fields")
    s.add_argument("--algebra", required=True)
    s.add_argument("--order", choices=("forward", "reverse"))
    s.set_defaults(func=cmd_derive_frame)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError, StepSizeInvalid) as exc:
        print(f"nambulie {args.command}: {type(exc).__name__ if not isinstance(exc, UsageError) else 'error'}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
