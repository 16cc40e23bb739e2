"""Command-line interface: ``poissonlift <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .catalog import compatibility_matrix, get_algebra, semidirect_table
from .dynamics import conservation_report, hamiltons_equations, integrate_rk4
from .errors import PoissonLiftError
from .lifts import (
    LINEAR_FAMILY_VARIANTS,
    lift_biham,
    lift_biham_eps,
    lift_cv,
    lift_linear_family,
    lift_point_deform,
    semidirect,
    tangent_lift,
)
from .poisson_core import (
    PoissonTensor,
    VecField,
    is_casimir,
    jacobiator,
    monomial_test_sets,
    schouten_compatible,
    verify_algebroid_axioms,
)
from .suites import SUITES

SCHEMA_VERSION = 1

EXIT_CODES = """exit codes:
  0  all checks passed
  1  a check reported a nonzero residual (first failure is named)
  2  malformed input: polynomial syntax, unknown variable, bad file
  3  unknown catalog algebra
  4  precondition of a construction violated
  5  numerical failure: divergence or too few usable sample points
"""

LIFTS = ("tangent", "cv", "biham", "point", "linear", "biham_eps", "semidirect")


class InputError(PoissonLiftError):
    exit_code = 2


def _number(text: str):
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise InputError(f"not a number: {text!r}") from None


def _params(items: Sequence[str] | None) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--param expects name=value, got {item!r}")
        out[name.strip()] = _number(value.strip())
    return out


def load_tensor(ref: str, params: dict | None = None) -> PoissonTensor:
    """``catalog:NAME`` or a path to a tensor JSON document."""
    if ref.startswith("catalog:"):
        _, t = get_algebra(ref[len("catalog:"):])
    else:
        try:
            doc = json.loads(Path(ref).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read tensor {ref!r}: {exc}") from None
        try:
            t = PoissonTensor.from_dict(doc)
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad tensor document {ref!r}: missing {exc}") from None
    bind = {k: v for k, v in (params or {}).items() if t.context.is_param(k)}
    return t.subs_params(bind) if bind else t


def _vector(t: PoissonTensor, text: str) -> VecField:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) == 1 and parts[0] in t.coords:
        return VecField.coordinate(t.context, parts[0])
    return VecField(t.context, tuple(t.context.parse(s) for s in parts), t.coords)


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _check_entry(name: str, rep) -> dict:
    d = {"name": name, "ok": rep.ok}
    if not rep.ok:
        key, res = rep.first()
        d["first_witness"] = {"key": list(key), "residual": str(res)}
        d["witness_count"] = len(rep.witnesses)
    return d


def _report(command: str, checks: list[dict], extra: dict | None = None) -> tuple[dict, int]:
    ok = all(c["ok"] for c in checks)
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "ok": ok, "checks": checks}
    failed = next((c["name"] for c in checks if not c["ok"]), None)
    if failed:
        doc["first_failure"] = failed
    doc.update(extra or {})
    return doc, 0 if ok else 1


# -- commands -------------------------------------------------------------------------------------


def cmd_verify(args) -> int:
    params = _params(args.param)
    t = load_tensor(args.tensor, params)
    checks = []
    selected = args.jacobi or args.casimir or args.tensor2 or args.algebroid
    if args.jacobi or not selected:
        checks.append(_check_entry("jacobi", jacobiator(t)))
    if args.tensor2:
        t2 = load_tensor(args.tensor2, params)
        checks.append(_check_entry("schouten", schouten_compatible(t, t2)))
    if args.algebroid:
        if not args.casimir or not args.vector:
            raise InputError("--algebroid needs --casimir and --vector")
        ctx = t.context
        forms, fns = monomial_test_sets(ctx)
        c = ctx.parse(args.casimir[0])
        checks.append(_check_entry("algebroid", verify_algebroid_axioms(t, c, _vector(t, args.vector), forms, fns)))
    else:
        for text in args.casimir or ():
            checks.append(_check_entry(f"casimir {text}", is_casimir(t, t.context.parse(text))))
    doc, status = _report("verify", checks, {"tensor": args.tensor})
    _emit(_dump(doc), args.out)
    return status


def _build_lift(args, params):
    t = load_tensor(args.tensor, params)
    t2 = load_tensor(args.tensor2, params) if args.tensor2 else None
    need2 = args.construction in ("biham", "biham_eps", "semidirect")
    if need2 and t2 is None:
        raise InputError(f"lift {args.construction} needs --tensor2")
    c = args.casimir[0] if args.casimir else None
    ctx = t.context.merge(t2.context) if t2 is not None else t.context
    for name in ("lam", "eps"):
        if getattr(args, name) and not ctx.is_param(getattr(args, name)):
            ctx = ctx.with_params(getattr(args, name))

    def poly(text):
        return ctx.parse(text)

    def need_c():
        if c is None:
            raise InputError(f"lift {args.construction} needs --casimir")
        return poly(c)

    kind = args.construction
    if kind == "tangent":
        return tangent_lift(t)
    if kind == "cv":
        if not args.vector:
            raise InputError("lift cv needs --vector")
        tc = t.embed(ctx)
        return lift_cv(t, need_c(), _vector(tc, args.vector))
    if kind == "biham":
        return lift_biham(t, t2, args.lam)
    if kind == "point":
        return lift_point_deform(t, need_c(), args.p, arg=args.arg, pi1=t2, lam=args.lam)
    if kind == "linear":
        return lift_linear_family(t, need_c(), args.p, lam=args.lam, variant=args.variant or "tilde_cx")
    if kind == "biham_eps":
        return lift_biham_eps(t, t2, need_c(), args.p, lam=args.lam, eps=args.eps)
    product, _ = semidirect(t, t2, args.variant or "v1")
    return product


def cmd_lift(args) -> int:
    params = _params(args.param)
    out = _build_lift(args, params)
    doc = {"schema_version": SCHEMA_VERSION, **out.to_dict()}
    if args.jacobi:
        rep = jacobiator(out)
        doc["jacobi"] = _check_entry("jacobi", rep)
        _emit(_dump(doc), args.out)
        return 0 if rep.ok else 1
    _emit(_dump(doc), args.out)
    return 0


def cmd_table(args) -> int:
    table = compatibility_matrix() if args.kind == "compat" else semidirect_table(args.variant or "v1")
    fmt = args.format or "csv"
    if fmt == "csv":
        text = table.to_csv()
    elif fmt == "md":
        text = table.to_markdown()
    else:
        text = _dump({"schema_version": SCHEMA_VERSION, **table.to_dict()})
    _emit(text, args.out)
    return 0


def cmd_integrate(args) -> int:
    params = _params(args.param)
    t = load_tensor(args.tensor)
    ctx = t.context
    H = ctx.parse(args.hamiltonian)
    system = hamiltons_equations(t, H)
    z0 = _floats(args.z0)
    traj = integrate_rk4(system, z0, args.dt, args.T, params, every=args.every)
    fns = [("H", H)] + [(text, ctx.parse(text)) for text in args.conserved or ()]
    cons = conservation_report(traj, fns, params)
    doc = cons.to_dict()
    doc["equations"] = system.render()
    doc["params"] = {k: str(v) for k, v in sorted(params.items())}
    tol = args.tol
    status = 0
    if tol is not None:
        bad = [d.name for d in cons.drifts if d.max_rel > tol]
        doc["tol"] = tol
        doc["ok"] = not bad
        if bad:
            doc["first_failure"] = f"drift {bad[0]}"
            status = 1
    if args.trajectory:
        Path(args.trajectory).write_text(traj.to_csv(), encoding="utf-8")
    _emit(_dump(doc), args.out)
    return status


def cmd_examples(args) -> int:
    names = list(SUITES) if args.which == "all" else [args.which]
    reports = [SUITES[n]() for n in names]
    checks = [{"name": f"{r.name}: {c.name}", "ok": c.ok, **({"detail": c.detail} if c.detail else {})} for r in reports for c in r.checks]
    if (args.format or "json") == "md":
        lines = ["| check | result |", "| --- | --- |"]
        lines += [f"| {c['name']} | {'PASS' if c['ok'] else 'FAIL'} |" for c in checks]
        _emit("\n".join(lines) + "\n", args.out)
        return 0 if all(c["ok"] for c in checks) else 1
    doc, status = _report("examples", checks, {"suites": {r.name: r.data for r in reports if r.data}})
    _emit(_dump(doc), args.out)
    return status


# -- parser -------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="poissonlift",
        description="Poisson tensors, their lifts to the tangent bundle, and Hamiltonian dynamics.",
        epilog=EXIT_CODES + "\ntensors are given as catalog:NAME (e.g. catalog:A3,9) or a path to a tensor JSON file.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="write output here instead of stdout"):
        sp.add_argument("--param", action="append", metavar="NAME=VALUE", help="bind a parameter (repeatable)")
        sp.add_argument("--out", help=out_help)
        return sp

    fmt = argparse.RawDescriptionHelpFormatter
    v = common(sub.add_parser("verify", help="check Jacobi, Casimirs, compatibility or algebroid axioms", epilog=EXIT_CODES, formatter_class=fmt))
    v.add_argument("--tensor", required=True)
    v.add_argument("--tensor2", help="check Schouten compatibility with this tensor")
    v.add_argument("--casimir", action="append", metavar="POLY", help="check this function is a Casimir (repeatable)")
    v.add_argument("--jacobi", action="store_true", help="check the Jacobi identity (default when nothing else is asked)")
    v.add_argument("--algebroid", action="store_true", help="check the deformed algebroid axioms for --casimir and --vector")
    v.add_argument("--vector", help="vector field: a coordinate name or comma-separated components")
    v.set_defaults(func=cmd_verify)

    lf = common(sub.add_parser("lift", help="build a lifted tensor and write it as JSON", epilog=EXIT_CODES, formatter_class=fmt))
    lf.add_argument("construction", choices=LIFTS)
    lf.add_argument("--tensor", required=True)
    lf.add_argument("--tensor2")
    lf.add_argument("--casimir", action="append", metavar="POLY")
    lf.add_argument("--vector")
    lf.add_argument("--p", type=int, default=3, help="1-based index of the deformed diagonal entry (default 3)")
    lf.add_argument("--variant", help=f"linear: one of {', '.join(LINEAR_FAMILY_VARIANTS)}; semidirect: v1 or v2")
    lf.add_argument("--arg", choices=("of_x", "of_y"), default="of_x", help="point: read the Casimir in x or y")
    lf.add_argument("--lam", default="lam", help="name of the pencil parameter")
    lf.add_argument("--eps", default="eps", help="name of the second parameter of biham_eps")
    lf.add_argument("--jacobi", action="store_true", help="also check the Jacobi identity of the result")
    lf.set_defaults(func=cmd_lift)

    tb = common(sub.add_parser("table", help="reproduce the 9x9 catalog tables", epilog=EXIT_CODES, formatter_class=fmt))
    tb.add_argument("--kind", choices=("compat", "semidirect"), required=True)
    tb.add_argument("--variant", choices=("v1", "v2"))
    tb.add_argument("--format", choices=("csv", "md", "json"))
    tb.set_defaults(func=cmd_table)

    it = common(sub.add_parser("integrate", help="integrate Hamilton's equations with RK4", epilog=EXIT_CODES, formatter_class=fmt))
    it.add_argument("--tensor", required=True)
    it.add_argument("--hamiltonian", "-H", required=True, metavar="POLY")
    it.add_argument("--z0", required=True, help="initial state, comma-separated (use --z0=-1,... for a leading minus)")
    it.add_argument("--dt", type=float, default=1e-3)
    it.add_argument("--T", type=float, default=10.0)
    it.add_argument("--every", type=int, default=1, help="keep every n-th state in the trajectory")
    it.add_argument("--conserved", action="append", metavar="POLY", help="also track this function's drift (repeatable)")
    it.add_argument("--tol", type=float, help="fail if any relative drift exceeds this")
    it.add_argument("--trajectory", help="write the trajectory CSV here")
    it.set_defaults(func=cmd_integrate)

    ex = common(sub.add_parser("examples", help="run the worked-example suites", epilog=EXIT_CODES, formatter_class=fmt))
    ex.add_argument("--which", choices=("all", *SUITES), default="all")
    ex.add_argument("--format", choices=("json", "md"))
    ex.set_defaults(func=cmd_examples)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PoissonLiftError as exc:
        sys.stderr.write(_dump({"schema_version": SCHEMA_VERSION, "error": exc.to_dict()}))
        return exc.exit_code
    except ValueError as exc:
        err = InputError(str(exc))
        sys.stderr.write(_dump({"schema_version": SCHEMA_VERSION, "error": err.to_dict()}))
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
