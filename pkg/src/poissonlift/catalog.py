"""Three-dimensional real Lie algebras and their Lie-Poisson tensors.

The nine algebras A3,1 .. A3,9 are stored by their nonzero brackets
``[e_i, e_j] = sum_k c_ij^k e_k``; the Lie-Poisson tensor on the dual is
``pi_ij = sum_k c_ij^k x_k``.  A3,5 and A3,7 carry a parameter ``a`` kept
symbolic unless a value is bound.

Invariants are either exact polynomials or numeric callables with a
sampling guard that keeps trial points away from singular loci.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import JacobiFailed, UnknownAlgebra
from .exactpoly import Poly, VarContext
from .lifts import check_semidirect_conditions
from .poisson_core import IdentityReport, PoissonTensor, is_casimir, is_casimir_numeric, jacobiator, schouten_compatible

BASE = ("x1", "x2", "x3")


@dataclass(frozen=True)
class Invariant:
    """A Casimir of a catalog tensor.

    Exact invariants hold ``poly`` (a string over x1..x3 and the algebra's
    parameters).  Numeric ones hold ``func(point, params)`` and sample with
    ``|x_guard| in [0.5, 1]`` (positive only when ``guard_positive``).
    """

    text: str
    poly: str | None = None
    func: Callable | None = None
    guard: int | None = None
    guard_positive: bool = False
    best_effort: bool = False

    @property
    def exact(self) -> bool:
        return self.poly is not None

    def as_poly(self, ctx: VarContext) -> Poly:
        if self.poly is None:
            raise TypeError(f"invariant {self.text} is not polynomial")
        return ctx.parse(self.poly)

    def callable(self, params: Mapping[str, float] | None = None) -> Callable[[Sequence[float]], float]:
        if self.func is None:
            p = self.as_poly(VarContext(BASE, (), tuple(params or {})))
            f = p.compile(BASE + tuple(params or {}))
            extra = tuple(float(v) for v in (params or {}).values())
            return lambda z: f(*z, *extra)
        bound = dict(params or {})
        return lambda z: self.func(z, bound)

    def sample(self, rng: random.Random, count: int, dim: int = 3) -> list[list[float]]:
        pts = []
        for _ in range(count):
            z = [rng.uniform(-1.0, 1.0) for _ in range(dim)]
            if self.guard is not None:
                mag = rng.uniform(0.5, 1.0)
                z[self.guard] = mag if self.guard_positive or rng.random() < 0.5 else -mag
            pts.append(z)
        return pts


@dataclass(frozen=True)
class LieAlgebra3:
    """Structure constants as ``{(i, j): {k: coeff}}`` with 1-based ``i < j``.

    Coefficients are rationals or polynomial strings in ``params``.
    """

    name: str
    brackets: Mapping
    params: tuple = ()
    invariants: tuple = ()
    param_range: str = ""

    def context(self) -> VarContext:
        return VarContext(BASE, (), self.params)


def _a32(z, p):
    return z[0] * math.exp(-z[1] / z[0])


def _a33(z, p):
    return z[1] / z[0]


def _a35(z, p):
    return z[1] * z[0] ** (-float(p.get("a", 0.5)))


def _a37(z, p):
    # real form of (x1^2+x2^2) ((x1+i x2)/(x1-i x2))^(i a)
    a = float(p.get("a", 1.0))
    return (z[0] ** 2 + z[1] ** 2) * math.exp(-2.0 * a * math.atan2(z[1], z[0]))


ALGEBRAS: dict[str, LieAlgebra3] = {
    alg.name: alg
    for alg in (
        LieAlgebra3("A3,1", {(2, 3): {1: 1}}, invariants=(Invariant("e1", poly="x1"),)),
        LieAlgebra3(
            "A3,2",
            {(1, 3): {1: 1}, (2, 3): {1: 1, 2: 1}},
            invariants=(Invariant("e1*exp(-e2/e1)", func=_a32, guard=0),),
        ),
        LieAlgebra3("A3,3", {(1, 3): {1: 1}, (2, 3): {2: 1}}, invariants=(Invariant("e2/e1", func=_a33, guard=0),)),
        LieAlgebra3("A3,4", {(1, 3): {1: 1}, (2, 3): {2: -1}}, invariants=(Invariant("e1*e2", poly="x1*x2"),)),
        LieAlgebra3(
            "A3,5",
            {(1, 3): {1: 1}, (2, 3): {2: "a"}},
            params=("a",),
            invariants=(Invariant("e2*e1^(-a)", func=_a35, guard=0, guard_positive=True),),
            param_range="0 < |a| < 1",
        ),
        LieAlgebra3("A3,6", {(1, 3): {2: -1}, (2, 3): {1: 1}}, invariants=(Invariant("e1^2+e2^2", poly="x1^2 + x2^2"),)),
        LieAlgebra3(
            "A3,7",
            {(1, 3): {1: "a", 2: -1}, (2, 3): {1: 1, 2: "a"}},
            params=("a",),
            invariants=(
                Invariant("(e1^2+e2^2)*exp(-2*a*atan2(e2,e1))", func=_a37, guard=0, guard_positive=True, best_effort=True),
            ),
            param_range="a > 0",
        ),
        LieAlgebra3(
            "A3,8",
            {(1, 3): {2: -2}, (1, 2): {1: 1}, (2, 3): {3: 1}},
            invariants=(Invariant("2*e2^2+2*e1*e3", poly="2*x2^2 + 2*x1*x3"),),
        ),
        LieAlgebra3(
            "A3,9",
            {(1, 2): {3: 1}, (2, 3): {1: 1}, (1, 3): {2: -1}},
            invariants=(Invariant("e1^2+e2^2+e3^2", poly="x1^2 + x2^2 + x3^2"),),
        ),
    )
}

NAMES = tuple(ALGEBRAS)

# Six-dimensional target of the product examples: nonzero brackets of A6,16.
A6_16 = {(1, 3): {4: 1}, (1, 4): {5: 1}, (1, 5): {6: 1}, (2, 3): {5: 1}, (2, 4): {6: 1}}


def lie_poisson(alg, coords: Sequence[str] = BASE, params: Sequence[str] = (), check: bool = True) -> PoissonTensor:
    """Linear tensor ``pi_ij = sum_k c_ij^k x_k`` from an algebra or a bracket table."""
    if isinstance(alg, LieAlgebra3):
        brackets, params = alg.brackets, tuple(alg.params) + tuple(p for p in params if p not in alg.params)
    else:
        brackets = alg
    ctx = VarContext(tuple(coords), (), tuple(params))
    entries = {}
    for (i, j), rhs in brackets.items():
        e = ctx.zero()
        for k, coeff in rhs.items():
            e = e + ctx.coerce(coeff) * ctx.var(coords[k - 1])
        if i > j:
            i, j, e = j, i, -e
        entries[(i, j)] = entries.get((i, j), ctx.zero()) + e
    t = PoissonTensor.from_upper(ctx, entries)
    if check:
        rep = jacobiator(t)
        if not rep.ok:
            raise JacobiFailed(f"structure constants violate Jacobi at {rep.first()[0]}", rep)
    return t


_NAME_RE = re.compile(r"^\s*A_?3[,._ ]?([1-9])\s*$", re.IGNORECASE)


def normalize_name(name: str) -> str:
    m = _NAME_RE.match(name)
    if not m:
        raise UnknownAlgebra(f"unknown algebra {name!r}; expected one of {', '.join(NAMES)}")
    return f"A3,{m.group(1)}"


def get_algebra(name: str, params: Mapping[str, object] | None = None, rename: Mapping[str, str] | None = None):
    """``(LieAlgebra3, PoissonTensor)`` for a catalog name such as ``"A3,8"``.

    ``params`` binds parameter values; ``rename`` gives parameters fresh names
    (useful when two parameterized algebras meet in one check).
    """
    alg = ALGEBRAS[normalize_name(name)]
    t = lie_poisson(alg)
    if rename:
        ctx = VarContext(BASE, (), tuple(rename.get(p, p) for p in t.context.params))
        t = PoissonTensor(
            ctx, [[e.substitute({p: ctx.var(rename.get(p, p)) for p in alg.params}, ctx) for e in row] for row in t.mat]
        )
    if params:
        t = t.subs_params(params)
    return alg, t


def catalog_tensors() -> dict[str, PoissonTensor]:
    return {n: get_algebra(n)[1] for n in NAMES}


# -- tables --------------------------------------------------------------------------------------------


@dataclass
class Table:
    """YES/NO decision table with residual witnesses for the NO cells."""

    kind: str
    rows: list
    cols: list
    cells: dict
    witnesses: dict = field(default_factory=dict)

    def value(self, r: str, c: str) -> str:
        return "YES" if self.cells[(r, c)] else "NO"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name"] + self.cols)
        for r in self.rows:
            w.writerow([r] + [self.value(r, c) for c in self.cols])
        return buf.getvalue()

    def to_markdown(self) -> str:
        head = ["name"] + self.cols
        body = [[r] + [self.value(r, c) for c in self.cols] for r in self.rows]
        widths = [max(len(row[k]) for row in [head] + body) for k in range(len(head))]

        def line(cells):
            return "| " + " | ".join(s.ljust(wd) for s, wd in zip(cells, widths)) + " |"

        sep = "|" + "|".join("-" * (wd + 2) for wd in widths) + "|"
        return "\n".join([line(head), sep] + [line(b) for b in body]) + "\n"

    def to_dict(self, with_witnesses: bool = False) -> dict:
        doc = {
            "kind": self.kind,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "cells": [[self.value(r, c) for c in self.cols] for r in self.rows],
        }
        if with_witnesses:
            doc["witnesses"] = {
                f"{r}|{c}": rep.to_dict()["witnesses"] for (r, c), rep in sorted(self.witnesses.items())
            }
        return doc

    def to_json(self, with_witnesses: bool = False) -> str:
        return json.dumps(self.to_dict(with_witnesses), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_csv(kind: str, text: str) -> "Table":
        rows = list(csv.reader(io.StringIO(text)))
        cols = rows[0][1:]
        cells = {}
        names = []
        for row in rows[1:]:
            names.append(row[0])
            for c, v in zip(cols, row[1:]):
                cells[(row[0], c)] = v.strip().upper() == "YES"
        return Table(kind, names, cols, cells)


def _pair(r: str, c: str):
    _, t1 = get_algebra(r)
    # distinct algebras get independent parameters
    _, t2 = get_algebra(c, rename={"a": "b"}) if r != c else get_algebra(c)
    return t1, t2


def compatibility_matrix() -> Table:
    """Schouten compatibility of every pair of catalog tensors."""
    cells, wit = {}, {}
    for i, r in enumerate(NAMES):
        for c in NAMES[i:]:
            t1, t2 = _pair(r, c)
            rep = schouten_compatible(t1, t2)
            cells[(r, c)] = cells[(c, r)] = rep.ok
            if not rep.ok:
                wit[(r, c)] = rep
    return Table("compat", list(NAMES), list(NAMES), cells, wit)


def semidirect_table(variant: str = "v1") -> Table:
    """Row ``pi1``, column ``pi2``: do the product conditions hold?"""
    cells, wit = {}, {}
    for r in NAMES:
        for c in NAMES:
            t1, t2 = _pair(r, c)
            rep = check_semidirect_conditions(t1, t2, variant)
            cells[(r, c)] = rep.ok
            if not rep.ok:
                wit[(r, c)] = rep
    return Table(f"semidirect_{variant}", list(NAMES), list(NAMES), cells, wit)


# -- invariants ---------------------------------------------------------------------------------------------


NUMERIC_PARAMS = {"A3,5": {"a": 0.5}, "A3,7": {"a": 1.0}}


@dataclass
class InvariantResult:
    algebra: str
    invariant: str
    exact: bool
    ok: bool
    detail: str = ""
    best_effort: bool = False


def check_invariant(name: str, inv: Invariant, samples: int = 20, tol: float = 1e-9, seed: int = 0) -> InvariantResult:
    alg = ALGEBRAS[normalize_name(name)]
    if inv.exact:
        _, t = get_algebra(alg.name)
        rep = is_casimir(t, inv.as_poly(t.context))
        detail = "" if rep.ok else str(rep.first())
        return InvariantResult(alg.name, inv.text, True, rep.ok, detail, inv.best_effort)
    params = NUMERIC_PARAMS.get(alg.name, {})
    _, t = get_algebra(alg.name, params=params)
    rng = random.Random(f"{alg.name}:{seed}")
    res = is_casimir_numeric(t, inv.callable(params), inv.sample(rng, samples), tol=tol)
    detail = f"max residual {res.max_residual:.3e} over {res.checked} points"
    return InvariantResult(alg.name, inv.text, False, res.ok, detail, inv.best_effort)


def verify_invariants(samples: int = 20, tol: float = 1e-9, seed: int = 0) -> list[InvariantResult]:
    """Check every catalog invariant (exact ones symbolically, the rest on guarded samples)."""
    out = []
    for alg in ALGEBRAS.values():
        for inv in alg.invariants:
            out.append(check_invariant(alg.name, inv, samples, tol, seed))
    return out


# -- six-dimensional identification ---------------------------------------------------------------------------


def pushforward_matches(tensor: PoissonTensor, brackets: Mapping, images: Mapping[str, str]) -> IdentityReport:
    """Compare ``tensor`` with a Lie-Poisson structure under a linear change of variables.

    ``images`` expresses each coordinate of ``tensor`` as a linear form in
    ``E1..En``, the Lie-Poisson coordinates of the algebra given by
    ``brackets``.  Witness keys are 1-based coordinate pairs.
    """
    n = tensor.dim
    E = tuple(f"E{k}" for k in range(1, n + 1))
    lp = lie_poisson(brackets, E)
    ectx = lp.context
    z = {name: ectx.parse(images[name]) for name in tensor.coords}
    sub = {name: z[name] for name in tensor.coords}
    pairs = []
    for a in range(n):
        za = z[tensor.coords[a]]
        for b in range(a + 1, n):
            zb = z[tensor.coords[b]]
            expected = tensor.mat[a][b].substitute(sub, ectx)
            got = ectx.zero()
            for k, ek in enumerate(E):
                da = za.diff(ek)
                if not da:
                    continue
                for l, el in enumerate(E):
                    db = zb.diff(el)
                    if db and lp.mat[k][l]:
                        got = got + da * db * lp.mat[k][l]
            pairs.append(((a + 1, b + 1), got - expected))
    return IdentityReport.collect(pairs, "pushforward")


A6_16_IMAGES = {
    "A3,3": {"x1": "-E5", "x2": "-E3", "x3": "E1", "y1": "E6", "y2": "E4", "y3": "-E2"},
    "A3,2": {"x1": "-E5", "x2": "-E3", "x3": "E1", "y1": "E6", "y2": "E4 - E6", "y3": "-E2"},
}
