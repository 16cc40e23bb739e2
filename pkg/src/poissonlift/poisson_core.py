"""Poisson tensors and the identities they satisfy.

Conventions
-----------
The bracket is ``{f, g} = sum_ij pi_ij df/dx_i dg/dx_j`` with both indices
summed over the full antisymmetric matrix.  Hamilton's equations read
``dz_j/dt = {z_j, H}``; with this sign the Lagrange-top example reproduces
the published equations of motion.

One-forms and vector fields are component tuples over the tensor's
coordinates.  The algebroid structure on one-forms uses
``pi(alpha, .)`` as the vector field with components ``sum_i alpha_i pi_ij``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ContextError,
    InsufficientSamples,
    NotAntisymmetric,
    PreconditionViolated,
)
from .exactpoly import Poly, VarContext, compile_polys


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of an exact identity check.

    ``witnesses`` holds ``(key, residual)`` pairs for every failing instance;
    the check passed iff there are none.
    """

    witnesses: tuple = ()
    label: str = ""

    @property
    def ok(self) -> bool:
        return not self.witnesses

    def __bool__(self) -> bool:
        return self.ok

    def first(self):
        return self.witnesses[0] if self.witnesses else None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "ok": self.ok,
            "witnesses": [{"key": list(k), "residual": str(r)} for k, r in self.witnesses],
        }

    @staticmethod
    def collect(pairs: Iterable[tuple], label: str = "") -> "IdentityReport":
        return IdentityReport(tuple((tuple(k), r) for k, r in pairs if not r.is_zero()), label)


@dataclass(frozen=True)
class PoissonTensor:
    """Antisymmetric matrix of polynomials over ``coords``.

    ``coords`` defaults to every coordinate of the context (base then fiber),
    so a tensor on M lives over a fiber-free context and a lifted tensor over
    the lifted one.
    """

    context: VarContext
    mat: tuple
    coords: tuple = None

    def __post_init__(self):
        coords = tuple(self.coords) if self.coords is not None else self.context.coords
        object.__setattr__(self, "coords", coords)
        n = len(coords)
        rows = tuple(tuple(self.context.coerce(e) for e in row) for row in self.mat)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"matrix must be {n}x{n} for coordinates {coords}")
        object.__setattr__(self, "mat", rows)
        for i in range(n):
            for j in range(i, n):
                if rows[i][j] != -rows[j][i]:
                    raise NotAntisymmetric(f"entry ({i + 1},{j + 1}) = {rows[i][j]} but ({j + 1},{i + 1}) = {rows[j][i]}")

    @classmethod
    def from_upper(cls, context: VarContext, entries: Mapping[tuple[int, int], object], coords=None) -> "PoissonTensor":
        """Build from upper-triangle entries keyed by 1-based ``(i, j)``, ``i < j``."""
        coords = tuple(coords) if coords is not None else context.coords
        n = len(coords)
        m = [[context.zero() for _ in range(n)] for _ in range(n)]
        for (i, j), v in entries.items():
            if not 1 <= i < j <= n:
                raise ValueError(f"upper-triangle index expected, got {(i, j)}")
            p = context.coerce(v)
            m[i - 1][j - 1] = p
            m[j - 1][i - 1] = -p
        return cls(context, m, coords)

    @classmethod
    def zero(cls, context: VarContext, coords=None) -> "PoissonTensor":
        return cls.from_upper(context, {}, coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def entry(self, i: int, j: int) -> Poly:
        """1-based entry ``pi_ij``."""
        return self.mat[i - 1][j - 1]

    def rows(self) -> list[list[Poly]]:
        return [list(r) for r in self.mat]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PoissonTensor):
            return NotImplemented
        return self.context == other.context and self.coords == other.coords and self.mat == other.mat

    def __hash__(self) -> int:
        return hash((self.context, self.coords, self.mat))

    def _combine(self, other: "PoissonTensor", op) -> "PoissonTensor":
        if self.coords != other.coords:
            raise ContextError("tensors over different coordinates")
        ctx = self.context.merge(other.context)
        a, b = self.embed(ctx), other.embed(ctx)
        n = self.dim
        return PoissonTensor(ctx, [[op(a.mat[i][j], b.mat[i][j]) for j in range(n)] for i in range(n)], self.coords)

    def __add__(self, other: "PoissonTensor") -> "PoissonTensor":
        return self._combine(other, lambda p, q: p + q)

    def __sub__(self, other: "PoissonTensor") -> "PoissonTensor":
        return self._combine(other, lambda p, q: p - q)

    def scale(self, factor) -> "PoissonTensor":
        """Multiply by a rational, a Poly, or the name of a (new) parameter."""
        ctx = self.context
        if isinstance(factor, str) and factor not in ctx:
            ctx = ctx.with_params(factor)
        f = ctx.coerce(factor)
        src = self.embed(ctx)
        return PoissonTensor(ctx, [[f * e for e in row] for row in src.mat], self.coords)

    def embed(self, ctx: VarContext) -> "PoissonTensor":
        if ctx == self.context:
            return self
        return PoissonTensor(ctx, [[e.embed(ctx) for e in row] for row in self.mat], self.coords)

    def subs_params(self, values: Mapping[str, object]) -> "PoissonTensor":
        names = [n for n in values if self.context.is_param(n)]
        if not names:
            return self
        ctx = self.context.without_params(*names)
        return PoissonTensor(ctx, [[e.subs_params(values) for e in row] for row in self.mat], self.coords)

    def substitute_params(self, images: Mapping[str, str]) -> "PoissonTensor":
        """Replace parameters by expressions in (possibly new) parameters, e.g. ``{"lam": "mu^2"}``."""
        fresh = []
        for text in images.values():
            for name in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", str(text)):
                if name not in self.context and name not in fresh:
                    fresh.append(name)
        wide = self.context.with_params(*fresh)
        target = wide.without_params(*images)
        sub = {k: target.parse(str(v)) for k, v in images.items()}
        rows = [[e.embed(wide).substitute(sub, target) for e in row] for row in self.mat]
        return PoissonTensor(target, rows, self.coords)

    def is_constant(self) -> bool:
        return all(e.degree(self.coords) <= 0 for row in self.mat for e in row)

    def is_linear(self) -> bool:
        return all(e.degree(self.coords) <= 1 for row in self.mat for e in row)

    def depends_on(self, var: str) -> IdentityReport:
        """Witnesses of nonzero ``d pi_ij / d var``; ok means independence."""
        n = self.dim
        return IdentityReport.collect(
            (((i + 1, j + 1), self.mat[i][j].diff(var)) for i in range(n) for j in range(i + 1, n)),
            f"independent of {var}",
        )

    def render_rows(self) -> list[list[str]]:
        return [[str(e) for e in row] for row in self.mat]

    def __str__(self) -> str:
        rows = self.render_rows()
        width = max(len(s) for r in rows for s in r)
        return "\n".join("[" + ", ".join(s.rjust(width) for s in r) + "]" for r in rows)

    def to_dict(self) -> dict:
        doc = {
            "vars": list(self.coords),
            "params": list(self.context.params),
            "matrix": self.render_rows(),
        }
        if self.context.fiber_vars:
            doc["fiber_vars"] = list(self.context.fiber_vars)
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PoissonTensor":
        coords = list(doc["vars"])
        fiber = list(doc.get("fiber_vars", []))
        base = [v for v in coords if v not in fiber]
        ctx = VarContext(tuple(base), tuple(fiber), tuple(doc.get("params", [])))
        if tuple(base) + tuple(fiber) != tuple(coords):
            raise ValueError("fiber variables must follow the base variables in 'vars'")
        return cls(ctx, [[ctx.parse(str(s)) for s in row] for row in doc["matrix"]], tuple(coords))


@dataclass(frozen=True)
class _Components:
    context: VarContext
    components: tuple
    coords: tuple = None

    def __post_init__(self):
        coords = tuple(self.coords) if self.coords is not None else self.context.coords
        object.__setattr__(self, "coords", coords)
        comps = tuple(self.context.coerce(c) for c in self.components)
        if len(comps) != len(coords):
            raise ValueError(f"expected {len(coords)} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    def __getitem__(self, i: int) -> Poly:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def _new(self, comps):
        return type(self)(self.context, tuple(comps), self.coords)

    def __add__(self, other):
        return self._new(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return self._new(a - b for a, b in zip(self, other))

    def __neg__(self):
        return self._new(-a for a in self)

    def __mul__(self, h):
        if isinstance(h, Poly):
            return self._new(h * a for a in self)
        return self._new(a * h for a in self)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


class VecField(_Components):
    """Vector field ``sum_i v_i d/dx_i``."""

    @classmethod
    def coordinate(cls, context: VarContext, var: str, coords=None) -> "VecField":
        coords = tuple(coords) if coords is not None else context.coords
        return cls(context, tuple(context.one() if c == var else context.zero() for c in coords), coords)

    def apply(self, f: Poly) -> Poly:
        """Directional derivative ``v(f)``."""
        out = f.context.zero()
        for vi, x in zip(self.components, self.coords):
            if vi:
                out = out + vi * f.diff(x)
        return out


class OneForm(_Components):
    """One-form ``sum_i alpha_i dx_i``."""

    @classmethod
    def d(cls, f: Poly, coords=None) -> "OneForm":
        coords = tuple(coords) if coords is not None else f.context.coords
        return cls(f.context, tuple(f.diff(x) for x in coords), coords)

    @classmethod
    def dx(cls, context: VarContext, var: str, coords=None) -> "OneForm":
        coords = tuple(coords) if coords is not None else context.coords
        return cls(context, tuple(context.one() if c == var else context.zero() for c in coords), coords)

    def pair(self, v: VecField) -> Poly:
        """``alpha(v)``."""
        out = self.context.zero()
        for a, b in zip(self.components, v.components):
            if a and b:
                out = out + a * b
        return out


# -- helpers ---------------------------------------------------------------------


def _same_context(pi: PoissonTensor, *objs) -> None:
    for o in objs:
        ctx = o.context
        if ctx != pi.context:
            raise ContextError(f"context mismatch: tensor over {pi.context.names}, operand over {ctx.names}")
        coords = getattr(o, "coords", None)
        if isinstance(o, (VecField, OneForm)) and coords != pi.coords:
            raise ContextError("operand coordinates differ from tensor coordinates")


def _grad(pi: PoissonTensor, f: Poly) -> list[Poly]:
    return [f.diff(x) for x in pi.coords]


def _dot(ps: Sequence[Poly], qs: Sequence[Poly], zero: Poly) -> Poly:
    out = zero
    for p, q in zip(ps, qs):
        if p and q:
            out = out + p * q
    return out


# -- brackets and identities -----------------------------------------------------------


def bracket(pi: PoissonTensor, f: Poly, g: Poly) -> Poly:
    """``{f, g} = sum_ij pi_ij df/dx_i dg/dx_j``."""
    _same_context(pi, f, g)
    df, dg = _grad(pi, f), _grad(pi, g)
    out = pi.context.zero()
    for i, a in enumerate(df):
        if not a:
            continue
        row = pi.mat[i]
        for j, b in enumerate(dg):
            if b and row[j]:
                out = out + row[j] * a * b
    return out


def _jacobi_residual(pi: PoissonTensor, dpi, i: int, j: int, k: int) -> Poly:
    m = pi.mat
    out = pi.context.zero()
    for s in range(pi.dim):
        for a, b in ((dpi[s][i][j], m[s][k]), (dpi[s][k][i], m[s][j]), (dpi[s][j][k], m[s][i])):
            if a and b:
                out = out + a * b
    return out


def _derivatives(pi: PoissonTensor):
    return [[[e.diff(x) for e in row] for row in pi.mat] for x in pi.coords]


def jacobiator(pi: PoissonTensor, all_triples: bool = False) -> IdentityReport:
    """Jacobi identity residuals for triples ``i < j < k`` (1-based keys).

    The residual is totally antisymmetric, so other triples are redundant;
    ``all_triples=True`` evaluates every ordered triple anyway.
    """
    dpi = _derivatives(pi)
    n = pi.dim
    triples = itertools.product(range(n), repeat=3) if all_triples else itertools.combinations(range(n), 3)
    return IdentityReport.collect(
        (((i + 1, j + 1, k + 1), _jacobi_residual(pi, dpi, i, j, k)) for i, j, k in triples), "jacobi"
    )


def is_poisson(pi: PoissonTensor) -> bool:
    return jacobiator(pi).ok


def schouten_compatible(pi1: PoissonTensor, pi2: PoissonTensor) -> IdentityReport:
    """Componentwise vanishing of the Schouten-Nijenhuis bracket ``[pi1, pi2]``."""
    if pi1.coords != pi2.coords:
        raise ContextError(f"dimension/coordinate mismatch: {pi1.coords} vs {pi2.coords}")
    ctx = pi1.context.merge(pi2.context)
    a, b = pi1.embed(ctx), pi2.embed(ctx)
    da, db = _derivatives(a), _derivatives(b)
    A, B = a.mat, b.mat
    n = a.dim

    def residual(i, j, k):
        out = ctx.zero()
        for s in range(n):
            for p, q in (
                (B[s][k], da[s][i][j]),
                (A[s][k], db[s][i][j]),
                (B[s][j], da[s][k][i]),
                (A[s][j], db[s][k][i]),
                (B[s][i], da[s][j][k]),
                (A[s][i], db[s][j][k]),
            ):
                if p and q:
                    out = out + p * q
        return out

    return IdentityReport.collect(
        (((i + 1, j + 1, k + 1), residual(i, j, k)) for i, j, k in itertools.combinations(range(n), 3)),
        "schouten",
    )


def lie_derivative_tensor(pi: PoissonTensor, v: VecField) -> list[list[Poly]]:
    """``(L_v pi)_ij = sum_s v_s dpi_ij/dx_s - pi_sj dv_i/dx_s - pi_is dv_j/dx_s``."""
    _same_context(pi, v)
    n, m = pi.dim, pi.mat
    dv = [[vi.diff(x) for x in pi.coords] for vi in v]  # dv[i][s] = d v_i / d x_s
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            r = v.apply(m[i][j])
            for s in range(n):
                if m[s][j] and dv[i][s]:
                    r = r - m[s][j] * dv[i][s]
                if m[i][s] and dv[j][s]:
                    r = r - m[i][s] * dv[j][s]
            row.append(r)
        out.append(row)
    return out


def lie_derivative_report(pi: PoissonTensor, v: VecField) -> IdentityReport:
    L = lie_derivative_tensor(pi, v)
    n = pi.dim
    return IdentityReport.collect(
        (((i + 1, j + 1), L[i][j]) for i in range(n) for j in range(i + 1, n)), "lie_derivative"
    )


def sharp(pi: PoissonTensor, c: Poly) -> list[Poly]:
    """``(pi grad c)_j = sum_s pi_js dc/dx_s``."""
    g = _grad(pi, c)
    return [_dot(pi.mat[j], g, pi.context.zero()) for j in range(pi.dim)]


def is_casimir(pi: PoissonTensor, c: Poly) -> IdentityReport:
    _same_context(pi, c)
    return IdentityReport.collect((((j + 1,), r) for j, r in enumerate(sharp(pi, c))), "casimir")


def in_involution(pi: PoissonTensor, fams) -> IdentityReport:
    """Pairwise brackets of a family (a FunctionFamily or a sequence of Polys)."""
    entries = _named_entries(fams)
    for _, f in entries:
        _same_context(pi, f)
    return IdentityReport.collect(
        (((a, b), bracket(pi, f, g)) for (a, f), (b, g) in itertools.combinations(entries, 2)), "involution"
    )


def _named_entries(fams) -> list[tuple[str, Poly]]:
    entries = getattr(fams, "entries", fams)
    out = []
    for k, e in enumerate(entries):
        if isinstance(e, tuple):
            out.append((str(e[0]), e[1]))
        else:
            out.append((f"f{k + 1}", e))
    return out


def hamiltonian_vf(pi: PoissonTensor, H: Poly) -> VecField:
    """Components ``{x_j, H} = sum_s pi_js dH/dx_s``."""
    _same_context(pi, H)
    return VecField(pi.context, tuple(sharp(pi, H)), pi.coords)


# -- numeric Casimir check --------------------------------------------------------------------


@dataclass
class NumericCheck:
    """Result of a sampled check; truthy iff ``ok``."""

    ok: bool
    max_residual: float
    checked: int
    skipped: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _central(c: Callable, x: list[float], i: int, h: float) -> float:
    xp, xm = list(x), list(x)
    xp[i] = x[i] + h
    xm[i] = x[i] - h
    step = xp[i] - xm[i]  # the representable step actually taken
    return (c(xp) - c(xm)) / step


def numeric_gradient(c: Callable, x: Sequence[float], h: float = 1e-6, rel_check: float = 1e-5) -> list[float]:
    """Central differences, step ``h*max(1,|x_i|)``, cross-checked at half step.

    Raises ``ArithmeticError`` when halving the step moves a component by more
    than ``rel_check`` relative (floor 1e-3 on the magnitude).
    """
    x = [float(v) for v in x]
    g = []
    for i in range(len(x)):
        hi = h * max(1.0, abs(x[i]))
        d1 = _central(c, x, i, hi)
        d2 = _central(c, x, i, hi / 2)
        if not (math.isfinite(d1) and math.isfinite(d2)):
            raise ArithmeticError(f"non-finite difference quotient in coordinate {i + 1}")
        if abs(d1 - d2) > rel_check * max(abs(d1), abs(d2), 1e-3):
            raise ArithmeticError(f"difference quotient unstable in coordinate {i + 1}: {d1} vs {d2}")
        g.append(d1)
    return g


def is_casimir_numeric(
    pi: PoissonTensor,
    c: Callable[[Sequence[float]], float],
    points: Iterable[Sequence[float]],
    tol: float = 1e-9,
    grad: Callable[[Sequence[float]], Sequence[float]] | None = None,
    params: Mapping[str, float] | None = None,
    h: float = 1e-6,
) -> NumericCheck:
    """Check ``|(pi grad c)_j| <= tol`` at sample points.

    ``c`` takes a coordinate sequence.  Points where evaluation fails are
    skipped and listed; if every point fails ``InsufficientSamples`` is raised.
    """
    t = pi.subs_params(params or {})
    if t.context.params:
        raise PreconditionViolated("all parameters bound", detail=f"unbound {t.context.params}")
    n = t.dim
    entries = [t.mat[i][j] for i in range(n) for j in range(n)]
    mat_fn = compile_polys(entries, t.coords)
    worst = 0.0
    checked = 0
    skipped = []
    ok = True
    for pt in points:
        pt = [float(v) for v in pt]
        try:
            g = list(grad(pt)) if grad is not None else numeric_gradient(c, pt, h)
            flat = mat_fn(*pt)
        except (ArithmeticError, ValueError, ZeroDivisionError, OverflowError) as exc:
            skipped.append((tuple(pt), str(exc)))
            continue
        checked += 1
        for j in range(n):
            r = abs(sum(flat[j * n + s] * g[s] for s in range(n)))
            worst = max(worst, r)
            if not r <= tol:
                ok = False
    if checked == 0:
        raise InsufficientSamples(f"no usable sample point ({len(skipped)} skipped)")
    return NumericCheck(ok, worst, checked, skipped)


# -- the deformed algebroid on one-forms -------------------------------------------------------


def pi_pair(pi: PoissonTensor, alpha: OneForm, beta: OneForm) -> Poly:
    """``pi(alpha, beta) = sum_ij pi_ij alpha_i beta_j``."""
    out = pi.context.zero()
    for i, a in enumerate(alpha):
        if not a:
            continue
        for j, b in enumerate(beta):
            if b and pi.mat[i][j]:
                out = out + pi.mat[i][j] * a * b
    return out


def pi_sharp(pi: PoissonTensor, alpha: OneForm) -> VecField:
    """The vector field ``pi(alpha, .)``."""
    n = pi.dim
    zero = pi.context.zero()
    comps = [_dot([alpha[i] for i in range(n)], [pi.mat[i][j] for i in range(n)], zero) for j in range(n)]
    return VecField(pi.context, tuple(comps), pi.coords)


def lie_derivative_form(X: VecField, gamma: OneForm) -> OneForm:
    """``L_X gamma = d(gamma(X)) + i_X d gamma`` in components."""
    coords = gamma.coords
    comps = []
    for k, xk in enumerate(coords):
        r = X.apply(gamma[k])
        for j in range(len(coords)):
            if gamma[j] and X[j]:
                dX = X[j].diff(xk)
                if dX:
                    r = r + gamma[j] * dX
        comps.append(r)
    return OneForm(gamma.context, tuple(comps), coords)


def canonical_form_bracket(pi: PoissonTensor, alpha: OneForm, beta: OneForm) -> OneForm:
    """``[alpha, beta] = L_{pi(alpha,.)} beta - L_{pi(beta,.)} alpha - d pi(alpha, beta)``."""
    t1 = lie_derivative_form(pi_sharp(pi, alpha), beta)
    t2 = lie_derivative_form(pi_sharp(pi, beta), alpha)
    t3 = OneForm.d(pi_pair(pi, alpha, beta), pi.coords)
    return t1 - t2 - t3


def check_cv_hypotheses(pi: PoissonTensor, c: Poly, v: VecField) -> PreconditionViolated | None:
    """First failing hypothesis of the deformation (c Casimir, L_v pi = 0), if any."""
    rep = is_casimir(pi, c)
    if not rep.ok:
        return PreconditionViolated("c is a Casimir of pi", rep.first()[1], detail=f"component {rep.first()[0]}")
    rep = lie_derivative_report(pi, v)
    if not rep.ok:
        return PreconditionViolated("Lie derivative of pi along v vanishes", rep.first()[1], detail=f"entry {rep.first()[0]}")
    return None


def algebroid_bracket_cv(
    pi: PoissonTensor, c: Poly, v: VecField, alpha: OneForm, beta: OneForm, check: bool = True
) -> OneForm:
    """Deformed bracket ``[alpha, beta] + c (beta(v) L_v alpha - alpha(v) L_v beta)``.

    With ``check=True`` a failed hypothesis raises ``PreconditionViolated``
    whose ``value`` holds the formal result.
    """
    _same_context(pi, c, v, alpha, beta)
    out = canonical_form_bracket(pi, alpha, beta)
    if c:
        av, bv = alpha.pair(v), beta.pair(v)
        out = out + (lie_derivative_form(v, alpha) * (c * bv)) - (lie_derivative_form(v, beta) * (c * av))
    if check:
        err = check_cv_hypotheses(pi, c, v)
        if err is not None:
            err.value = out
            raise err
    return out


def anchor_field_cv(pi: PoissonTensor, c: Poly, v: VecField, alpha: OneForm) -> VecField:
    """The anchor as a vector field: ``pi(alpha, .) - c alpha(v) v``."""
    X = pi_sharp(pi, alpha)
    if c:
        X = X - v * (c * alpha.pair(v))
    return X


def anchor_cv(pi: PoissonTensor, c: Poly, v: VecField, alpha: OneForm, f: Poly, check: bool = True) -> Poly:
    """``a_{c,v}(alpha)(f) = pi(alpha, df) - c alpha(v) df(v)``."""
    _same_context(pi, c, v, alpha, f)
    out = anchor_field_cv(pi, c, v, alpha).apply(f)
    if check:
        err = check_cv_hypotheses(pi, c, v)
        if err is not None:
            err.value = out
            raise err
    return out


def vf_commutator(X: VecField, Y: VecField) -> VecField:
    comps = []
    for j in range(len(X)):
        comps.append(X.apply(Y[j]) - Y.apply(X[j]))
    return VecField(X.context, tuple(comps), X.coords)


def verify_algebroid_axioms(
    pi: PoissonTensor, c: Poly, v: VecField, test_forms: Sequence[OneForm], test_fns: Sequence[Poly]
) -> IdentityReport:
    """Exact check of the algebroid axioms on finite test sets.

    Keys are ``("leibniz", a, b, h, k)``, ``("anchor", a, b, k)`` and
    ``("jacobi", a, b, g, k)`` with 1-based indices into the test sets and
    ``k`` the failing component.  The hypotheses on ``c`` and ``v`` are not
    enforced here, so a broken instance shows up as residuals.
    """
    if not test_forms or not test_fns:
        raise ValueError("test sets must be nonempty")
    _same_context(pi, c, v, *test_forms, *test_fns)

    memo: dict = {}

    def br(a, b):
        key = (a, b)
        if key not in memo:
            memo[key] = algebroid_bracket_cv(pi, c, v, a, b, check=False)
        return memo[key]

    anchors = [anchor_field_cv(pi, c, v, a) for a in test_forms]
    pairs = []
    forms = list(enumerate(test_forms, start=1))
    for ia, a in forms:
        for ib, b in forms:
            ab = br(a, b)
            for ih, h in enumerate(test_fns, start=1):
                lhs = algebroid_bracket_cv(pi, c, v, a, b * h, check=False)
                rhs = ab * h + b * anchors[ia - 1].apply(h)
                for k, r in enumerate(lhs - rhs, start=1):
                    pairs.append((("leibniz", ia, ib, ih, k), r))
            morph = anchor_field_cv(pi, c, v, ab) - vf_commutator(anchors[ia - 1], anchors[ib - 1])
            for k, r in enumerate(morph, start=1):
                pairs.append((("anchor", ia, ib, k), r))
    for (ia, a), (ib, b), (ig, g) in itertools.combinations(forms, 3):
        total = br(br(a, b), g) + br(br(b, g), a) + br(br(g, a), b)
        for k, r in enumerate(total, start=1):
            pairs.append((("jacobi", ia, ib, ig, k), r))
    return IdentityReport.collect(pairs, "algebroid")


def monomial_test_sets(ctx: VarContext, degree: int = 2) -> tuple[list[OneForm], list[Poly]]:
    """Forms ``dx_j`` and ``x_i dx_j`` plus all base monomials of degree ``1..degree``."""
    names = ctx.base_vars
    forms = [OneForm.dx(ctx, v) for v in names]
    forms += [OneForm.dx(ctx, v) * ctx.var(u) for u in names for v in names]
    fns = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(names, d):
            m = ctx.one()
            for nm in combo:
                m = m * ctx.var(nm)
            fns.append(m)
    return forms, fns
