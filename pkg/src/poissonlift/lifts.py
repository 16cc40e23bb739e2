"""Poisson structures on the tangent bundle built from data on the base.

All constructors take tensors over a base context ``(x1..xN; params)`` and
return a :class:`LiftedTensor` over the lifted context ``(x1..xN, y1..yN;
params)``.  The 2N x 2N matrix is assembled from four N x N blocks::

    [[UL, UR],
     [LL, LR]]

with ``{x_i, x_j} = UL_ij``, ``{x_i, y_j} = UR_ij`` and ``{y_i, y_j} = LR_ij``.
Antisymmetry forces ``LL = -UR^T``.

Reading a base function "in y" means substituting ``x_s -> y_s``.  Indices
``p`` are 1-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ConditionFailed,
    ConditionsViolated,
    DependsOnXp,
    InvolutionHypothesisFailed,
    NotCasimir,
    NotCompatible,
    NotHomogeneous,
    NotLinear,
    NotLinearTensor,
    NotPoisson,
    PreconditionViolated,
    SideConditionFailed,
)
from .exactpoly import Poly, VarContext
from .poisson_core import (
    IdentityReport,
    PoissonTensor,
    VecField,
    bracket,
    check_cv_hypotheses,
    is_casimir,
    jacobiator,
    schouten_compatible,
)


# -- containers --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LiftedTensor(PoissonTensor):
    """A tensor on the tangent bundle together with how it was built."""

    provenance: Mapping = field(default_factory=dict)

    @property
    def inner(self) -> PoissonTensor:
        return PoissonTensor(self.context, self.mat, self.coords)

    @property
    def base_dim(self) -> int:
        return self.dim // 2

    def block(self, name: str) -> list[list[Poly]]:
        """One of ``"UL"``, ``"UR"``, ``"LL"``, ``"LR"``."""
        n = self.base_dim
        r0 = 0 if name[0] == "U" else n
        c0 = 0 if name[1] == "L" else n
        return [[self.mat[r0 + i][c0 + j] for j in range(n)] for i in range(n)]

    def to_dict(self) -> dict:
        doc = super().to_dict()
        doc["provenance"] = dict(self.provenance)
        return doc


@dataclass(frozen=True)
class FunctionFamily:
    """Named functions sharing one context, tagged with what they are for.

    ``role`` is one of ``"casimir"``, ``"involution"``, ``"hamiltonian"``.
    Entries are Polys or plain callables (for numeric invariants).
    """

    entries: tuple
    role: str = "casimir"

    def __post_init__(self):
        ents = tuple((str(n), f) for n, f in self.entries)
        object.__setattr__(self, "entries", ents)
        ctxs = {f.context for _, f in ents if isinstance(f, Poly)}
        if len(ctxs) > 1:
            raise ValueError("family entries live over different contexts")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    @property
    def polys(self) -> list[Poly]:
        return [f for _, f in self.entries]

    @property
    def context(self) -> VarContext | None:
        for _, f in self.entries:
            if isinstance(f, Poly):
                return f.context
        return None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, key):
        if isinstance(key, int):
            return self.entries[key][1]
        for n, f in self.entries:
            if n == key:
                return f
        raise KeyError(key)

    def __add__(self, other: "FunctionFamily") -> "FunctionFamily":
        return FunctionFamily(self.entries + other.entries, self.role)

    def embed(self, ctx: VarContext) -> "FunctionFamily":
        return FunctionFamily(tuple((n, f.embed(ctx)) for n, f in self.entries), self.role)

    def to_dict(self) -> dict:
        return {"role": self.role, "entries": {n: str(f) for n, f in self.entries}}


# -- context helpers ---------------------------------------------------------------------------


def _base_context(*tensors: PoissonTensor) -> VarContext:
    ctx = None
    for t in tensors:
        if t.context.fiber_vars:
            raise ValueError("expected a tensor on the base, got one over a lifted context")
        ctx = t.context if ctx is None else ctx.merge(t.context)
    return ctx


def _with_param(ctx: VarContext, value) -> tuple[VarContext, object]:
    """Register ``value`` as a parameter if it is a name; returns (ctx, value)."""
    if isinstance(value, str) and value not in ctx:
        ctx = ctx.with_params(value)
    return ctx, value


def _polys(items, ctx: VarContext | None = None) -> list[Poly]:
    if isinstance(items, (Poly, str)):
        items = [items]
    out = []
    for f in getattr(items, "polys", items):
        if isinstance(f, str):
            if ctx is None:
                raise TypeError("string functions need a context")
            f = ctx.parse(f)
        out.append(f)
    return out


def in_x(p: Poly, L: VarContext) -> Poly:
    """A base function viewed on the tangent bundle (pulled back by the projection)."""
    return p.embed(L)


def in_y(p: Poly, L: VarContext) -> Poly:
    """A base function evaluated on the fiber coordinates."""
    if p.context.fiber_vars:
        if any(p.diff(x) for x in p.context.base_vars):
            raise ValueError(f"{p} already depends on base variables")
        return p.embed(L)
    return p.substitute({x: L.var(y) for x, y in zip(L.base_vars, L.fiber_vars)}, L)


def _shifted(p: Poly, L: VarContext, factor: Poly) -> Poly:
    """``p(x + factor*y)``."""
    return p.substitute({x: L.var(x) + factor * L.var(y) for x, y in zip(L.base_vars, L.fiber_vars)}, L)


def _matrix(t: PoissonTensor, L: VarContext, reader) -> list[list[Poly]]:
    return [[reader(e, L) for e in row] for row in t.mat]


def _tangent_part(t: PoissonTensor, L: VarContext) -> list[list[Poly]]:
    """``sum_s dpi/dx_s y_s`` as a matrix over ``L``."""
    n = t.dim
    out = [[L.zero() for _ in range(n)] for _ in range(n)]
    for s, (x, y) in enumerate(zip(L.base_vars, L.fiber_vars)):
        ys = L.var(y)
        for i in range(n):
            for j in range(i + 1, n):
                d = t.mat[i][j].diff(x)
                if d:
                    term = d.embed(L) * ys
                    out[i][j] = out[i][j] + term
                    out[j][i] = out[j][i] - term
    return out


def _zeros(n: int, L: VarContext) -> list[list[Poly]]:
    return [[L.zero() for _ in range(n)] for _ in range(n)]


def _add(a, b):
    return [[p + q for p, q in zip(ra, rb)] for ra, rb in zip(a, b)]


def _scale(a, f: Poly):
    return [[f * p for p in row] for row in a]


def _assemble(L: VarContext, ul, ur, lr, provenance: dict) -> LiftedTensor:
    n = len(ul)
    mat = []
    for i in range(n):
        mat.append(list(ul[i]) + list(ur[i]))
    for i in range(n):
        mat.append([-ur[j][i] for j in range(n)] + list(lr[i]))
    return LiftedTensor(L, mat, L.coords, provenance)


def _epp(n: int, p: int, c: Poly, L: VarContext) -> list[list[Poly]]:
    if not 1 <= p <= n:
        raise ValueError(f"index p={p} out of range 1..{n}")
    m = _zeros(n, L)
    m[p - 1][p - 1] = c
    return m


def _prov(kind: str, **args) -> dict:
    out = {"constructor": kind}
    for k, v in args.items():
        if isinstance(v, PoissonTensor):
            out[k] = v.render_rows()
        elif isinstance(v, (Poly, VecField)):
            out[k] = str(v)
        else:
            out[k] = v
    return out


# -- hypothesis checks -------------------------------------------------------------------------------


def _require_poisson(t: PoissonTensor, label: str = "") -> None:
    rep = jacobiator(t)
    if not rep.ok:
        key, res = rep.first()
        raise NotPoisson(res, detail=f"{label} triple {key}".strip())


def _require_compatible(t1: PoissonTensor, t2: PoissonTensor) -> None:
    rep = schouten_compatible(t1, t2)
    if not rep.ok:
        key, res = rep.first()
        raise NotCompatible(res, detail=f"triple {key}")


def _require_independent(t: PoissonTensor, p: int, label: str = "") -> None:
    if not 1 <= p <= t.dim:
        raise ValueError(f"index p={p} out of range 1..{t.dim}")
    rep = t.depends_on(t.coords[p - 1])
    if not rep.ok:
        key, res = rep.first()
        raise DependsOnXp(res, detail=f"{label} entry {key}".strip())


def _require_casimir(t: PoissonTensor, c: Poly) -> None:
    rep = is_casimir(t, c)
    if not rep.ok:
        key, res = rep.first()
        raise NotCasimir(res, detail=f"component {key[0]}")


def _require_linear_fn(c: Poly) -> None:
    if c.degree() > 1:
        raise NotLinear(c, detail=f"degree {c.degree()}")


def _require_linear_tensor(t: PoissonTensor) -> None:
    if not t.is_linear():
        bad = next(e for row in t.mat for e in row if e.degree(t.coords) > 1)
        raise NotLinearTensor(bad)


def _require_constant_tensor(t: PoissonTensor, label: str = "pi2") -> None:
    if not t.is_constant():
        bad = next(e for row in t.mat for e in row if e.degree(t.coords) > 0)
        raise PreconditionViolated(f"{label} is constant", bad)


# -- constructors ----------------------------------------------------------------------------------


def tangent_lift(pi: PoissonTensor, check: bool = True) -> LiftedTensor:
    """Canonical tangent lift: ``[[0, pi(x)], [pi(x), sum_s dpi/dx_s y_s]]``."""
    ctx = _base_context(pi)
    if check:
        _require_poisson(pi)
    L = ctx.lifted()
    x = _matrix(pi, L, in_x)
    return _assemble(L, _zeros(pi.dim, L), x, _tangent_part(pi, L), _prov("tangent_lift", pi=pi))


def lift_cv(pi: PoissonTensor, c, v: VecField, check: bool = True) -> LiftedTensor:
    """Lift deformed by a Casimir ``c`` and a symmetry ``v`` of ``pi``.

    Off-diagonal blocks ``pi +- c v v^T``; lower-right block
    ``sum_s (dpi/dx_s + c (dv/dx_s v^T - v dv/dx_s^T)) y_s``.
    """
    ctx = _base_context(pi)
    c = c if isinstance(c, Poly) else ctx.coerce(c)
    if c.context != ctx:
        ctx = ctx.merge(c.context)
        pi = pi.embed(ctx)
        c = c.embed(ctx)
    if v.context != ctx:
        v = VecField(ctx, tuple(ctx.coerce(vi) for vi in v), pi.coords)
    if check:
        _require_poisson(pi)
        err = check_cv_hypotheses(pi, c, v)
        if err is not None:
            raise err
    L = ctx.lifted()
    n = pi.dim
    cL = c.embed(L)
    vL = [vi.embed(L) for vi in v]
    ur = _matrix(pi, L, in_x)
    for i in range(n):
        for j in range(n):
            ur[i][j] = ur[i][j] + cL * vL[i] * vL[j]
    lr = _tangent_part(pi, L)
    for s, (xs, ys) in enumerate(zip(L.base_vars, L.fiber_vars)):
        dv = [vi.diff(xs) for vi in vL]
        if not any(dv):
            continue
        y = L.var(ys)
        for i in range(n):
            for j in range(n):
                t = dv[i] * vL[j] - vL[i] * dv[j]
                if t:
                    lr[i][j] = lr[i][j] + cL * t * y
    return _assemble(L, _zeros(n, L), ur, lr, _prov("lift_cv", pi=pi, c=c, v=v))


def lift_biham(pi1: PoissonTensor, pi2: PoissonTensor, lam="lam", check: bool = True) -> LiftedTensor:
    """Tangent lift of ``pi2`` with ``lam * pi1(x)`` added to the lower-right block."""
    ctx = _base_context(pi1, pi2)
    ctx, lam = _with_param(ctx, lam)
    pi1, pi2 = pi1.embed(ctx), pi2.embed(ctx)
    if check:
        _require_poisson(pi1, "pi1")
        _require_poisson(pi2, "pi2")
        _require_compatible(pi1, pi2)
    L = ctx.lifted()
    lr = _add(_tangent_part(pi2, L), _scale(_matrix(pi1, L, in_x), L.coerce(lam)))
    return _assemble(
        L, _zeros(pi2.dim, L), _matrix(pi2, L, in_x), lr, _prov("lift_biham", pi1=pi1, pi2=pi2, lam=str(lam))
    )


def lift_point_deform(
    pi: PoissonTensor,
    c,
    p: int,
    arg: str = "of_x",
    pi1: PoissonTensor | None = None,
    lam="lam",
    check: bool = True,
) -> LiftedTensor:
    """Lift with the Casimir ``c`` placed at entry ``(p, p)`` of the off-diagonal blocks.

    ``arg="of_y"`` reads a linear ``c`` in the fiber variables.  With
    ``pi1`` given, ``lam * pi1(x)`` is added to the lower-right block.
    """
    if arg not in ("of_x", "of_y"):
        raise ValueError("arg must be 'of_x' or 'of_y'")
    tensors = (pi,) if pi1 is None else (pi, pi1)
    ctx = _base_context(*tensors)
    c = c if isinstance(c, Poly) else ctx.coerce(c)
    ctx = ctx.merge(c.context)
    if pi1 is not None:
        ctx, lam = _with_param(ctx, lam)
        pi1 = pi1.embed(ctx)
    pi, c = pi.embed(ctx), c.embed(ctx)
    if check:
        _require_poisson(pi)
        _require_independent(pi, p)
        _require_casimir(pi, c)
        if arg == "of_y":
            _require_linear_fn(c)
        if pi1 is not None:
            _require_poisson(pi1, "pi1")
            _require_independent(pi1, p, "pi1")
            _require_compatible(pi1, pi)
    L = ctx.lifted()
    n = pi.dim
    cc = in_x(c, L) if arg == "of_x" else in_y(c, L)
    ur = _add(_matrix(pi, L, in_x), _epp(n, p, cc, L))
    lr = _tangent_part(pi, L)
    if pi1 is not None:
        lr = _add(lr, _scale(_matrix(pi1, L, in_x), L.coerce(lam)))
    prov = _prov("lift_point_deform", pi=pi, c=c, p=p, arg=arg)
    if pi1 is not None:
        prov.update(_prov("", pi1=pi1, lam=str(lam)))
        prov["constructor"] = "lift_point_deform"
    return _assemble(L, _zeros(n, L), ur, lr, prov)


LINEAR_FAMILY_VARIANTS = ("tilde_cx", "tilde_cy", "dtilde_cx", "dtilde_cy")


def lift_linear_family(pi: PoissonTensor, c, p: int, lam="lam", variant: str = "tilde_cx", check: bool = True) -> LiftedTensor:
    """Lifts of a linear tensor with ``lam * pi`` in the upper-left block.

    ``tilde_*`` variants put ``lam * pi(x)`` there, ``dtilde_*`` put
    ``lam * pi(y)``; the suffix says whether ``c`` is read in x or y.  The
    lower-right block is ``pi(y)``.
    """
    if variant not in LINEAR_FAMILY_VARIANTS:
        raise ValueError(f"variant must be one of {LINEAR_FAMILY_VARIANTS}")
    ctx = _base_context(pi)
    c = c if isinstance(c, Poly) else ctx.coerce(c)
    ctx = ctx.merge(c.context)
    ctx, lam = _with_param(ctx, lam)
    pi, c = pi.embed(ctx), c.embed(ctx)
    if check:
        _require_linear_tensor(pi)
        _require_poisson(pi)
        _require_independent(pi, p)
        _require_casimir(pi, c)
        if variant != "tilde_cx":
            _require_linear_fn(c)
    L = ctx.lifted()
    n = pi.dim
    lamL = L.coerce(lam)
    ul = _scale(_matrix(pi, L, in_x if variant.startswith("tilde") else in_y), lamL)
    cc = in_x(c, L) if variant.endswith("cx") else in_y(c, L)
    ur = _add(_matrix(pi, L, in_x), _epp(n, p, cc, L))
    lr = _matrix(pi, L, in_y)
    return _assemble(L, ul, ur, lr, _prov("lift_linear_family", pi=pi, c=c, p=p, lam=str(lam), variant=variant))


def lift_biham_eps(
    pi1: PoissonTensor, pi2: PoissonTensor, c, p: int, lam="lam", eps="eps", check: bool = True
) -> LiftedTensor:
    """Two-parameter lift of a bi-Hamiltonian pair.

    Upper-left ``eps * pi2(x)``, off-diagonal ``pi2(x) +- E_pp c(x)`` and
    lower-right ``sum_s dpi2/dx_s y_s + lam pi1(x) - lam eps pi1(y)``.
    """
    ctx = _base_context(pi1, pi2)
    c = c if isinstance(c, Poly) else ctx.coerce(c)
    ctx = ctx.merge(c.context)
    ctx, lam = _with_param(ctx, lam)
    ctx, eps = _with_param(ctx, eps)
    pi1, pi2, c = pi1.embed(ctx), pi2.embed(ctx), c.embed(ctx)
    if check:
        _require_poisson(pi1, "pi1")
        _require_poisson(pi2, "pi2")
        _require_compatible(pi1, pi2)
        _require_independent(pi1, p, "pi1")
        _require_independent(pi2, p, "pi2")
        _require_casimir(pi2, c)
    L = ctx.lifted()
    n = pi2.dim
    lamL, epsL = L.coerce(lam), L.coerce(eps)
    ul = _scale(_matrix(pi2, L, in_x), epsL)
    ur = _add(_matrix(pi2, L, in_x), _epp(n, p, in_x(c, L), L))
    lr = _add(_tangent_part(pi2, L), _scale(_matrix(pi1, L, in_x), lamL))
    lr = _add(lr, _scale(_matrix(pi1, L, in_y), -lamL * epsL))
    prov = _prov("lift_biham_eps", pi1=pi1, pi2=pi2, c=c, p=p, lam=str(lam), eps=str(eps))
    return _assemble(L, ul, ur, lr, prov)


# -- semidirect-type products --------------------------------------------------------------------------


def check_semidirect_conditions(pi1: PoissonTensor, pi2: PoissonTensor, variant: str = "v1") -> IdentityReport:
    """Sufficient conditions for the ``v1``/``v2`` product to be Poisson.

    ``v1`` reads ``pi1`` in the fiber variables and has three groups of
    conditions; ``v2`` keeps ``pi1`` in x and has two.  Witness keys are
    ``(group, i, j, k)`` with 1-based indices.
    """
    if variant not in ("v1", "v2"):
        raise ValueError("variant must be 'v1' or 'v2'")
    ctx = _base_context(pi1, pi2)
    pi1, pi2 = pi1.embed(ctx), pi2.embed(ctx)
    L = ctx.lifted()
    n = pi2.dim
    xs, ys = L.base_vars, L.fiber_vars
    reader = in_y if variant == "v1" else in_x
    wrt = ys if variant == "v1" else xs
    P1 = _matrix(pi1, L, reader)
    P2 = _matrix(pi2, L, in_x)
    dP1 = [[[P1[i][j].diff(w) for j in range(n)] for i in range(n)] for w in wrt]  # dP1[s][i][j]
    dP2 = [[[P2[i][j].diff(x) for j in range(n)] for i in range(n)] for x in xs]
    yv = [L.var(y) for y in ys]
    zero = L.zero()

    def acc(pairs):
        out = zero
        for a, b in pairs:
            if a and b:
                out = out + a * b
        return out

    pairs = []
    trip = list(itertools.product(range(n), repeat=3))
    if variant == "v1":
        for i, j, k in itertools.combinations(range(n), 3):
            r = acc(
                (P2[s][k], dP1[s][i][j]) for s in range(n)
            ) + acc((P2[s][j], dP1[s][k][i]) for s in range(n)) + acc((P2[s][i], dP1[s][j][k]) for s in range(n))
            pairs.append((("1", i + 1, j + 1, k + 1), r))
        # y-directional derivative of pi2 columns
        ydP2 = [[acc((yv[m], dP2[m][s][k]) for m in range(n)) for k in range(n)] for s in range(n)]
        for i, j, k in trip:
            if i >= j:
                continue
            r = acc((ydP2[s][k], dP1[s][i][j]) for s in range(n))
            r = r + acc((P1[s][i], dP2[s][j][k]) for s in range(n)) + acc((P1[s][j], dP2[s][k][i]) for s in range(n))
            pairs.append((("2", i + 1, j + 1, k + 1), r))
    else:
        for i, j, k in trip:
            if i >= j:
                continue
            r = acc((P2[s][k], dP1[s][i][j]) for s in range(n))
            r = r + acc((P1[s][i], dP2[s][j][k]) for s in range(n)) + acc((P1[s][j], dP2[s][k][i]) for s in range(n))
            pairs.append((("1", i + 1, j + 1, k + 1), r))
    group = "3" if variant == "v1" else "2"
    for i, j, k in trip:
        if i >= j:
            continue
        r = zero
        for s in range(n):
            for m in range(n):
                d2 = dP2[m][i][j].diff(xs[s])
                if d2 and P1[m][k]:
                    r = r + yv[s] * P1[m][k] * d2
        pairs.append(((group, i + 1, j + 1, k + 1), r))
    return IdentityReport.collect(pairs, f"semidirect_{variant}")


def semidirect(
    pi1: PoissonTensor, pi2: PoissonTensor, variant: str = "v1", strict: bool = True
) -> tuple[LiftedTensor, IdentityReport]:
    """Product tensor ``[[pi1(.), pi2(x)], [pi2(x), sum_s dpi2/dx_s y_s]]``.

    ``pi1`` is read in y for ``v1`` and in x for ``v2``.  With ``strict`` a
    failed condition raises :class:`ConditionsViolated` carrying the tensor;
    otherwise the report is returned alongside it.
    """
    if variant not in ("v1", "v2"):
        raise ValueError("variant must be 'v1' or 'v2'")
    ctx = _base_context(pi1, pi2)
    pi1, pi2 = pi1.embed(ctx), pi2.embed(ctx)
    L = ctx.lifted()
    ul = _matrix(pi1, L, in_y if variant == "v1" else in_x)
    t = _assemble(L, ul, _matrix(pi2, L, in_x), _tangent_part(pi2, L), _prov("semidirect", pi1=pi1, pi2=pi2, variant=variant))
    report = check_semidirect_conditions(pi1, pi2, variant)
    if strict and not report.ok:
        raise ConditionsViolated(report, t)
    return t, report


# -- Casimir and involution families -------------------------------------------------------------------------


def _lifted_ctx(polys: Sequence[Poly], extra=()) -> VarContext:
    ctx = None
    for p in polys:
        c = p.context.base_only() if not p.context.fiber_vars else p.context
        ctx = c if ctx is None else ctx.merge(c)
    if ctx is None:
        raise ValueError("empty function list")
    for e in extra:
        ctx, _ = _with_param(ctx, e)
    return ctx.lifted()


def l_d(c: Poly, L: VarContext) -> Poly:
    """Fiber-linear function ``sum_s dc/dx_s y_s``."""
    out = L.zero()
    for x, y in zip(L.base_vars, L.fiber_vars):
        d = c.diff(x)
        if d:
            out = out + d.embed(L) * L.var(y)
    return out


def lifted_casimirs(c_list) -> FunctionFamily:
    """``{c_i(x), l_dc_i}`` for each base Casimir."""
    cs = _polys(c_list)
    L = _lifted_ctx(cs)
    entries = []
    for k, c in enumerate(cs, start=1):
        entries.append((f"c{k}", in_x(c, L)))
        entries.append((f"l_dc{k}", l_d(c, L)))
    return FunctionFamily(tuple(entries), "casimir")


def lifted_casimirs_biham(
    c_list,
    f_list,
    lam="lam",
    convention: str = "f_in_pi2",
    pi1: PoissonTensor | None = None,
    pi2: PoissonTensor | None = None,
) -> FunctionFamily:
    """``{c_i(x), l_dc_i + lam f_i(x)}`` after checking the side condition on ``f_i``.

    ``convention="f_in_pi1"`` requires ``{f_i, x_j}_1 == {x_j, c_i}_2`` and
    ``"f_in_pi2"`` requires ``{f_i, x_j}_2 == {x_j, c_i}_1``.  The check needs
    both tensors; without them the family is built unchecked.
    """
    if convention not in ("f_in_pi1", "f_in_pi2"):
        raise ValueError("convention must be 'f_in_pi1' or 'f_in_pi2'")
    cs, fs = _polys(c_list), _polys(f_list)
    if len(cs) != len(fs):
        raise ValueError("need one f_i per Casimir")
    if (pi1 is None) != (pi2 is None):
        raise ValueError("pass both tensors or neither")
    if pi1 is not None:
        ctx = _base_context(pi1, pi2)
        for p in cs + fs:
            ctx = ctx.merge(p.context)
        t1, t2 = pi1.embed(ctx), pi2.embed(ctx)
        tf, tc = (t1, t2) if convention == "f_in_pi1" else (t2, t1)
        for i, (c, f) in enumerate(zip(cs, fs), start=1):
            c, f = c.embed(ctx), f.embed(ctx)
            for j, x in enumerate(ctx.base_vars, start=1):
                xj = ctx.var(x)
                r = bracket(tf, f, xj) - bracket(tc, xj, c)
                if r:
                    raise SideConditionFailed(i, j, r)
    L = _lifted_ctx(cs + fs, (lam,))
    lamL = L.coerce(lam)
    entries = []
    for k, (c, f) in enumerate(zip(cs, fs), start=1):
        entries.append((f"c{k}", in_x(c, L)))
        entries.append((f"c{k}_tilde", l_d(c, L) + lamL * in_x(f, L)))
    return FunctionFamily(tuple(entries), "casimir")


def casimirs_linear_family(c_list, param="lam", variant: str = "tilde") -> FunctionFamily:
    """Casimirs for the linear-family lifts.

    ``tilde``: ``{c(x), c(x - lam y) - c(x)}``.  ``hat``: with ``lam = mu^2``
    and ``param`` naming ``mu``, ``{c(x - mu y) + c(x + mu y), c(x - mu y) - c(x + mu y)}``.
    """
    if variant not in ("tilde", "hat"):
        raise ValueError("variant must be 'tilde' or 'hat'")
    cs = _polys(c_list)
    L = _lifted_ctx(cs, (param,))
    t = L.coerce(param)
    entries = []
    for k, c in enumerate(cs, start=1):
        minus = _shifted(c, L, -t)
        if variant == "tilde":
            cx = in_x(c, L)
            entries += [(f"c{k}", cx), (f"c{k}_tt", minus - cx)]
        else:
            plus = _shifted(c, L, t)
            entries += [(f"c{k}_hat", minus + plus), (f"c{k}_hathat", minus - plus)]
    return FunctionFamily(tuple(entries), "casimir")


def _check_pair(pi1: PoissonTensor, pi2: PoissonTensor, need_compatible: bool = True) -> VarContext:
    ctx = _base_context(pi1, pi2)
    _require_constant_tensor(pi2)
    if need_compatible:
        _require_compatible(pi1.embed(ctx), pi2.embed(ctx))
    return ctx


def semidirect_casimirs(c_list, tilde_tilde_list, pi1: PoissonTensor, pi2: PoissonTensor) -> FunctionFamily:
    """``{c_i(y), c_i(x) + tt_i(y)}`` for the v1 product with constant ``pi2``.

    Each supplied ``tt_i`` (a function of y, given in x or y variables) must
    satisfy ``sum_s pi1_js(y) dc_i/dx_s(x) + pi2_js dtt_i/dy_s(y) == 0``.
    """
    cs, tts = _polys(c_list), _polys(tilde_tilde_list)
    if len(cs) != len(tts):
        raise ValueError("need one correction term per Casimir")
    ctx = _check_pair(pi1, pi2)
    for p in cs + tts:
        ctx = ctx.merge(p.context.base_only())
    L = ctx.lifted()
    P1 = _matrix(pi1.embed(ctx), L, in_y)
    P2 = _matrix(pi2.embed(ctx), L, in_x)
    entries = []
    for i, (c, tt) in enumerate(zip(cs, tts), start=1):
        c = c.embed(ctx)
        ttL = in_y(tt.embed(ctx) if not tt.context.fiber_vars else tt.embed(L), L)
        dc = [c.diff(x).embed(L) for x in ctx.base_vars]
        dtt = [ttL.diff(y) for y in L.fiber_vars]
        for j in range(len(dc)):
            r = L.zero()
            for s in range(len(dc)):
                r = r + P1[j][s] * dc[s] + P2[j][s] * dtt[s]
            if r:
                raise ConditionFailed(i, j + 1, r, "correction term condition")
        entries += [(f"c{i}_y", in_y(c, L)), (f"c{i}_tilde", in_x(c, L) + ttL)]
    return FunctionFamily(tuple(entries), "casimir")


def _hat(H: Poly, L: VarContext) -> Poly:
    """``sum_s dH/dy_s(y) x_s`` for ``H`` given on the base."""
    Hy = in_y(H, L)
    out = L.zero()
    for x, y in zip(L.base_vars, L.fiber_vars):
        d = Hy.diff(y)
        if d:
            out = out + d * L.var(x)
    return out


def involution_family(H_list, pi1: PoissonTensor, pi2: PoissonTensor) -> FunctionFamily:
    """``{H_i(y), sum_s dH_i/dy_s(y) x_s}``, involutive for the v1 product.

    Requires ``pi2`` constant, the pair compatible and the ``H_i`` pairwise
    in involution for both tensors.
    """
    Hs = _polys(H_list)
    ctx = _check_pair(pi1, pi2)
    for h in Hs:
        ctx = ctx.merge(h.context)
    t1, t2 = pi1.embed(ctx), pi2.embed(ctx)
    Hs = [h.embed(ctx) for h in Hs]
    for (a, f), (b, g) in itertools.combinations(enumerate(Hs, start=1), 2):
        for which, t in (("pi1", t1), ("pi2", t2)):
            r = bracket(t, f, g)
            if r:
                raise InvolutionHypothesisFailed((a, b), which, r)
    L = ctx.lifted()
    entries = []
    for k, h in enumerate(Hs, start=1):
        entries += [(f"H{k}", in_y(h, L)), (f"H{k}_tilde", _hat(h, L))]
    return FunctionFamily(tuple(entries), "involution")


def _homogeneous_degree(H: Poly) -> int | None:
    for d in (1, 2):
        if H.is_homogeneous(d):
            return d
    return None


def hat_family(H_list, hathat_list, pi1: PoissonTensor, pi2: PoissonTensor) -> FunctionFamily:
    """``{sum_s dH_i/dy_s(y) x_s} + {HH_j(x)}`` for the v1 product.

    Each ``H_i`` must be a Casimir of ``pi1`` and linear or quadratic
    homogeneous; each ``HH_j`` must Poisson-commute with every ``H_i`` under
    ``pi2``, and ``sum pi1_sm(y) dHH_i/dx_s dHH_j/dx_m`` must vanish.
    """
    Hs, HHs = _polys(H_list), _polys(hathat_list)
    ctx = _base_context(pi1, pi2)
    for h in Hs + HHs:
        ctx = ctx.merge(h.context)
    t1, t2 = pi1.embed(ctx), pi2.embed(ctx)
    Hs = [h.embed(ctx) for h in Hs]
    HHs = [h.embed(ctx) for h in HHs]
    for i, h in enumerate(Hs, start=1):
        _require_casimir(t1, h)
        if _homogeneous_degree(h) is None:
            raise NotHomogeneous(h, detail=f"H{i}")
    for j, hh in enumerate(HHs, start=1):
        for i, h in enumerate(Hs, start=1):
            r = bracket(t2, h, hh)
            if r:
                raise ConditionFailed(i, j, r, "involution with H_i under pi2")
    L = ctx.lifted()
    P1y = _matrix(t1, L, in_y)
    grads = [[hh.diff(x).embed(L) for x in ctx.base_vars] for hh in HHs]
    n = ctx.dim
    for (i, gi), (j, gj) in itertools.combinations(enumerate(grads, start=1), 2):
        r = L.zero()
        for s in range(n):
            for m in range(n):
                if P1y[s][m] and gi[s] and gj[m]:
                    r = r + P1y[s][m] * gi[s] * gj[m]
        if r:
            raise ConditionFailed(i, j, r, "pi1(y) pairing of the second family")
    entries = [(f"H{k}_hat", _hat(h, L)) for k, h in enumerate(Hs, start=1)]
    entries += [(f"HH{k}", in_x(hh, L)) for k, hh in enumerate(HHs, start=1)]
    return FunctionFamily(tuple(entries), "involution")


def self_semidirect_casimirs(c_list, variant: str = "v1") -> FunctionFamily:
    """Casimirs of a tensor's product with itself built from its own Casimirs.

    ``v1``: ``c(x - y) +- c(x + y)``; ``v2``: ``c(x - y) +- c(x)``.
    """
    cs = _polys(c_list)
    L = _lifted_ctx(cs)
    one = L.one()
    entries = []
    for k, c in enumerate(cs, start=1):
        minus = _shifted(c, L, -one)
        other = _shifted(c, L, one) if variant == "v1" else in_x(c, L)
        entries += [(f"c{k}_sum", minus + other), (f"c{k}_diff", minus - other)]
    return FunctionFamily(tuple(entries), "casimir")


# -- frozen structures -------------------------------------------------------------------------------------


def freeze(pi: PoissonTensor, x0: Sequence) -> PoissonTensor:
    """Constant tensor ``pi(x0)`` of a linear tensor.

    Components of ``x0`` are numbers, Polys, or names that become parameters.
    """
    ctx = _base_context(pi)
    _require_linear_tensor(pi)
    if len(x0) != pi.dim:
        raise ValueError(f"x0 needs {pi.dim} components")
    for v in x0:
        if isinstance(v, str) and v not in ctx:
            ctx = ctx.with_params(v)
    images = {x: ctx.coerce(v) for x, v in zip(ctx.base_vars, x0)}
    for img in images.values():
        if img.degree() > 0:
            raise ValueError("freezing point must not involve coordinates")
    t = pi.embed(ctx)
    return PoissonTensor(ctx, [[e.substitute(images) for e in row] for row in t.mat], t.coords)


# -- bounded-degree ansatz solver --------------------------------------------------------------------------------


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of ``rows @ a = rhs`` over Q (free unknowns set to 0), or None."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncol = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncol):
        piv = next((k for k in range(r, len(m)) if m[k][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / Fraction(m[r][col])
        m[r] = [v * inv for v in m[r]]
        for k in range(len(m)):
            if k != r and m[k][col] != 0:
                f = m[k][col]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        pivots.append(col)
        r += 1
    for k in range(r, len(m)):
        if m[k][-1] != 0:
            return None
    sol = [Fraction(0)] * ncol
    for k, col in enumerate(pivots):
        sol[col] = m[k][-1]
    return sol


def solve_linear_ansatz(residuals: Callable[[Poly], Sequence[Poly]], basis: Sequence[Poly]) -> Poly | None:
    """Find ``u = sum a_k basis_k`` with every ``residuals(u)`` identically zero.

    ``residuals`` must be affine in its argument.  Returns one solution or
    None when the ansatz admits none.
    """
    if not basis:
        raise ValueError("empty ansatz")
    ctx = basis[0].context
    r0 = list(residuals(ctx.zero()))
    cols = [[a - b for a, b in zip(residuals(b), r0)] for b in basis]
    keys = sorted({(q, e) for q in range(len(r0)) for e in r0[q].terms} | {
        (q, e) for col in cols for q in range(len(col)) for e in col[q].terms
    })
    rows = [[Fraction(col[q].terms.get(e, 0)) for col in cols] for q, e in keys]
    rhs = [-Fraction(r0[q].terms.get(e, 0)) for q, e in keys]
    sol = _solve_rational(rows, rhs)
    if sol is None:
        return None
    out = ctx.zero()
    for a, b in zip(sol, basis):
        if a:
            out = out + b * a
    return out


def monomial_basis(ctx: VarContext, names: Sequence[str], degree: int, param_degree: int = 0) -> list[Poly]:
    """Monomials in ``names`` of degree 1..degree times parameter monomials up to ``param_degree``."""
    pmons = [ctx.one()]
    for d in range(1, param_degree + 1):
        for combo in itertools.combinations_with_replacement(ctx.params, d):
            m = ctx.one()
            for nm in combo:
                m = m * ctx.var(nm)
            pmons.append(m)
    out = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(names, d):
            m = ctx.one()
            for nm in combo:
                m = m * ctx.var(nm)
            out.extend(m * q for q in pmons)
    return out


def solve_correction_term(c: Poly, pi1: PoissonTensor, pi2: PoissonTensor, degree: int = 2, param_degree: int = 1) -> Poly | None:
    """Search a polynomial ``tt(y)`` making ``c(x) + tt(y)`` a Casimir of the v1 product.

    Solves the linear condition checked by :func:`semidirect_casimirs` over
    monomials in y of bounded degree.  Returns None if the ansatz is too small.
    """
    ctx = _base_context(pi1, pi2).merge(c.context)
    L = ctx.lifted()
    P1 = _matrix(pi1.embed(ctx), L, in_y)
    P2 = _matrix(pi2.embed(ctx), L, in_x)
    dc = [c.embed(ctx).diff(x).embed(L) for x in ctx.base_vars]
    n = ctx.dim

    def residuals(u: Poly):
        du = [u.diff(y) for y in L.fiber_vars]
        return [sum((P1[j][s] * dc[s] + P2[j][s] * du[s] for s in range(n)), L.zero()) for j in range(n)]

    return solve_linear_ansatz(residuals, monomial_basis(L, L.fiber_vars, degree, param_degree))
