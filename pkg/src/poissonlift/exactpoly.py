"""Exact multivariate polynomials with rational coefficients.

A :class:`Poly` is a sparse map from exponent vectors to nonzero rationals
over a :class:`VarContext`.  Every symbolic check in the package reduces to
asking whether some Poly is identically zero, so arithmetic is exact and the
term map is kept canonical (no zero coefficients, integral coefficients
stored as ``int``).

Free constants such as ``w`` or ``lam`` are *parameters*: ordinary
indeterminates of the ring that are never differentiated.  An identity that
holds in the parameter ring holds for every value of the parameters.

>>> ctx = VarContext(("x1", "x2"))
>>> p = ctx.parse("(x1 + x2)*(x1 - x2)")
>>> str(p)
'x1^2 - x2^2'
>>> str(p.diff("x1"))
'2*x1'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import ContextError, EvalError, PolySyntaxError, VarError

Coeff = Union[int, Fraction]
Exponent = tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _norm(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficients must be rational, got {type(c).__name__}")


def fiber_name(name: str) -> str:
    """Name of the fiber coordinate paired with base coordinate ``name``."""
    if name.startswith("x"):
        return "y" + name[1:]
    return name + "_dot"


@dataclass(frozen=True)
class VarContext:
    """Ordered variable set: base coordinates, fiber coordinates, parameters.

    The exponent vector of a monomial lists parameters first, then base
    variables, then fiber variables.
    """

    base_vars: tuple[str, ...]
    fiber_vars: tuple[str, ...] = ()
    params: tuple[str, ...] = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for attr in ("base_vars", "fiber_vars", "params"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        if not self.base_vars:
            raise ValueError("a context needs at least one base variable")
        if self.fiber_vars and len(self.fiber_vars) != len(self.base_vars):
            raise ValueError("fiber variables must pair one-to-one with base variables")
        names = self.names
        for n in names:
            if not _NAME_RE.match(n):
                raise ValueError(f"invalid variable name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in context: {names}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def names(self) -> tuple[str, ...]:
        return self.params + self.base_vars + self.fiber_vars

    @property
    def coords(self) -> tuple[str, ...]:
        """Differentiable coordinates (base then fiber)."""
        return self.base_vars + self.fiber_vars

    @property
    def nvars(self) -> int:
        return len(self._index)

    @property
    def dim(self) -> int:
        return len(self.base_vars)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise VarError(f"unknown variable {name!r}") from None

    def is_param(self, name: str) -> bool:
        return name in self.params

    def __contains__(self, name: str) -> bool:
        return name in self._index

    # -- derived contexts --------------------------------------------------------

    def lifted(self) -> "VarContext":
        """Context of the tangent bundle: same base, fresh fiber variables."""
        if self.fiber_vars:
            return self
        return VarContext(self.base_vars, tuple(fiber_name(n) for n in self.base_vars), self.params)

    def base_only(self) -> "VarContext":
        return VarContext(self.base_vars, (), self.params)

    def with_params(self, *names: str) -> "VarContext":
        extra = tuple(n for n in names if n not in self.params)
        if not extra:
            return self
        return VarContext(self.base_vars, self.fiber_vars, self.params + extra)

    def without_params(self, *names: str) -> "VarContext":
        return VarContext(self.base_vars, self.fiber_vars, tuple(p for p in self.params if p not in names))

    def merge(self, other: "VarContext") -> "VarContext":
        """Smallest context containing both; base variables must agree."""
        if self == other:
            return self
        if self.base_vars != other.base_vars:
            raise ContextError(f"base variables differ: {self.base_vars} vs {other.base_vars}")
        if self.fiber_vars and other.fiber_vars and self.fiber_vars != other.fiber_vars:
            raise ContextError(f"fiber variables differ: {self.fiber_vars} vs {other.fiber_vars}")
        fiber = self.fiber_vars or other.fiber_vars
        params = self.params + tuple(p for p in other.params if p not in self.params)
        return VarContext(self.base_vars, fiber, params)

    # -- constructors ------------------------------------------------------------

    def zero(self) -> "Poly":
        return Poly._make(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = _norm(c)
        return Poly._make(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Poly":
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Poly._make(self, {tuple(e): 1})

    def parse(self, text: str) -> "Poly":
        return parse(text, self)

    def coerce(self, value) -> "Poly":
        """Accept a Poly (embedded into this context), a string, or a rational."""
        if isinstance(value, Poly):
            return value if value.context == self else value.embed(self)
        if isinstance(value, str):
            return parse(value, self)
        return self.const(value)

    def to_dict(self) -> dict:
        return {"base_vars": list(self.base_vars), "fiber_vars": list(self.fiber_vars), "params": list(self.params)}


class Poly:
    """Immutable sparse polynomial over a :class:`VarContext`."""

    __slots__ = ("context", "terms", "_hash")

    def __init__(self, context: VarContext, terms: Mapping[Exponent, object] | None = None):
        n = context.nvars
        clean: dict[Exponent, Coeff] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {e} for {n} indeterminates")
            c = _norm(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.context = context
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, context: VarContext, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.context = context
        p.terms = terms
        p._hash = None
        return p

    # -- predicates ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        """True when no coordinate occurs (parameters may)."""
        return self.degree() <= 0

    def constant_value(self) -> Coeff:
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            ((e, c),) = self.terms.items()
            if not any(e):
                return c
        raise ValueError(f"{self} is not a rational constant")

    def free_names(self) -> set[str]:
        names = self.context.names
        out = set()
        for e in self.terms:
            out.update(names[i] for i, k in enumerate(e) if k)
        return out

    def degree(self, names: Iterable[str] | None = None) -> int:
        """Total degree in ``names`` (default: all coordinates); -1 for zero."""
        if not self.terms:
            return -1
        idx = [self.context.index(n) for n in (self.context.coords if names is None else names)]
        return max(sum(e[i] for i in idx) for e in self.terms)

    def is_homogeneous(self, deg: int, names: Iterable[str] | None = None) -> bool:
        idx = [self.context.index(n) for n in (self.context.coords if names is None else names)]
        return all(sum(e[i] for i in idx) == deg for e in self.terms)

    # -- equality -----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.context == other.context and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.context.nvars: _norm(other)}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.context, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------------------

    def _other(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.context != self.context:
                raise ContextError(f"context mismatch: {self.context.names} vs {other.context.names}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.context.const(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s) if isinstance(s, Fraction) else s
            else:
                out.pop(e, None)
        return Poly._make(self.context, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._make(self.context, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c0 = _norm(other)
            if not c0:
                return self.context.zero()
            return Poly._make(self.context, {e: _norm(c * c0) for e, c in self.terms.items()})
        try:
            other = self._other(other)
        except TypeError:
            return NotImplemented
        out: dict[Exponent, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._make(self.context, {e: _norm(c) for e, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = self.context.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other) -> "Poly":
        # division by a nonzero rational only; the ring has no other quotients
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool) and other:
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    # -- calculus -------------------------------------------------------------------

    def diff(self, var: str) -> "Poly":
        ctx = self.context
        if var not in ctx:
            raise VarError(f"unknown variable {var!r}")
        if ctx.is_param(var):
            raise VarError(f"{var!r} is a parameter and cannot be a differentiation target")
        i = ctx.index(var)
        out: dict[Exponent, Coeff] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1 :]
                out[ne] = c * k
        return Poly._make(ctx, out)

    def gradient(self, names: Sequence[str] | None = None) -> list["Poly"]:
        return [self.diff(n) for n in (self.context.coords if names is None else names)]

    # -- context changes and substitution --------------------------------------------

    def embed(self, ctx: VarContext) -> "Poly":
        """Re-express this polynomial in a context that contains all its names."""
        if ctx == self.context:
            return self
        src = self.context.names
        used = [i for i in range(len(src)) if any(e[i] for e in self.terms)]
        try:
            target = {i: ctx.index(src[i]) for i in used}
        except VarError as exc:
            raise ContextError(f"cannot embed {self} into {ctx.names}: {exc}") from None
        out = {}
        n = ctx.nvars
        for e, c in self.terms.items():
            ne = [0] * n
            for i in used:
                ne[target[i]] = e[i]
            out[tuple(ne)] = c
        return Poly._make(ctx, out)

    def substitute(self, mapping: Mapping[str, "Poly | int | Fraction"], ctx: VarContext | None = None) -> "Poly":
        """Simultaneous substitution ``name -> Poly`` producing a Poly over ``ctx``.

        Names not in ``mapping`` are carried over by name, so they must exist
        in ``ctx`` (default: this context).
        """
        ctx = ctx or self.context
        src = self.context.names
        images = {}
        for i, name in enumerate(src):
            if name in mapping:
                images[i] = ctx.coerce(mapping[name])
            elif any(e[i] for e in self.terms):
                images[i] = ctx.var(name) if name in ctx else None
                if images[i] is None:
                    raise ContextError(f"{name!r} is neither substituted nor present in target context")
        powers: dict[tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        result = ctx.zero()
        for e, c in self.terms.items():
            term = ctx.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def subs_params(self, values: Mapping[str, object], drop: bool = True) -> "Poly":
        """Bind parameters to rational values; bound parameters leave the context."""
        ctx = self.context
        names = [n for n in values if ctx.is_param(n)]
        if not names:
            return self
        target = ctx.without_params(*names) if drop else ctx
        return self.substitute({n: _as_rational(values[n]) for n in names}, target)

    # -- evaluation ---------------------------------------------------------------------

    def eval(self, point: Mapping[str, object], param_values: Mapping[str, object] | None = None):
        """Evaluate at a point; exact for rational inputs, float otherwise."""
        values = dict(point)
        if param_values:
            values.update(param_values)
        names = self.context.names
        used = self.free_names()
        missing = [n for n in names if n in used and n not in values]
        if missing:
            raise EvalError(f"no value supplied for {', '.join(missing)}")
        vals = [values.get(n, 0) for n in names]
        return _horner_eval(_horner_tree(self.terms, 0, len(names)), vals)

    def compile(self, arg_names: Sequence[str]) -> Callable:
        """Float evaluator ``f(*args)`` over ``arg_names`` (Horner form).

        Every name of the context with a nonzero exponent must be listed.
        """
        return compile_polys([self], arg_names, tuple_result=False)

    # -- text ----------------------------------------------------------------------------

    def render(self) -> str:
        return render(self)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Poly({render(self)!r})"


def _as_rational(v) -> Coeff:
    if isinstance(v, Poly):
        return v.constant_value()
    if isinstance(v, float):
        # decimal reading: 0.1 binds as 1/10, not as its binary expansion
        return _norm(Fraction(repr(v)))
    if isinstance(v, str):
        return _norm(Fraction(v))
    return _norm(v)


# -- Horner evaluation -------------------------------------------------------------------


def _horner_tree(terms: Mapping[Exponent, Coeff], k: int, n: int):
    """Nested Horner representation: constant, or (k, [(deg, subtree), ...]) high to low."""
    if k == n or not terms:
        return sum(terms.values()) if terms else 0
    groups: dict[int, dict] = {}
    for e, c in terms.items():
        groups.setdefault(e[k], {})[e] = c
    if list(groups) == [0]:
        return _horner_tree(terms, k + 1, n)
    return (k, [(d, _horner_tree(groups[d], k + 1, n)) for d in sorted(groups, reverse=True)])


def _horner_eval(node, vals):
    if not isinstance(node, tuple):
        return node
    k, parts = node
    x = vals[k]
    acc = _horner_eval(parts[0][1], vals)
    for (d_prev, _), (d, sub) in zip(parts, parts[1:]):
        acc = acc * x ** (d_prev - d) + _horner_eval(sub, vals)
    last = parts[-1][0]
    return acc * x**last if last else acc


def _horner_src(node, argnames) -> str:
    if not isinstance(node, tuple):
        return repr(float(node))
    k, parts = node
    x = argnames[k]

    def pw(d):
        return x if d == 1 else f"{x}**{d}"

    acc = _horner_src(parts[0][1], argnames)
    for (d_prev, _), (d, sub) in zip(parts, parts[1:]):
        acc = f"({acc})*{pw(d_prev - d)} + {_horner_src(sub, argnames)}"
    last = parts[-1][0]
    return f"({acc})*{pw(last)}" if last else acc


def compile_polys(polys: Sequence[Poly], arg_names: Sequence[str], tuple_result: bool = True) -> Callable:
    """Compile polynomials sharing a context into one float function."""
    if not polys:
        return (lambda *a: ()) if tuple_result else (lambda *a: 0.0)
    ctx = polys[0].context
    locals_ = {}
    safe = [f"_a{i}" for i in range(len(arg_names))]
    pos = {n: s for n, s in zip(arg_names, safe)}
    argmap = []
    for name in ctx.names:
        argmap.append(pos.get(name, None))
    exprs = []
    for p in polys:
        if p.context != ctx:
            raise ContextError("compile_polys needs a single context")
        for n in p.free_names():
            if n not in pos:
                raise EvalError(f"no argument supplied for {n!r}")
        tree = _horner_tree(p.terms, 0, ctx.nvars)
        exprs.append(_horner_src(tree, [a if a is not None else "0.0" for a in argmap]))
    body = f"({', '.join(exprs)},)" if tuple_result else exprs[0]
    src = f"def _f({', '.join(safe)}):\n    return {body}\n"
    exec(compile(src, "<poly>", "exec"), {}, locals_)
    return locals_["_f"]


# -- rendering ------------------------------------------------------------------------------


def _grlex_key(e: Exponent):
    return (sum(e), e)


def _fmt_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def render(p: Poly) -> str:
    """Deterministic text form in graded-lexicographic order."""
    if not p.terms:
        return "0"
    names = p.context.names
    pieces = []
    for e in sorted(p.terms, key=_grlex_key, reverse=True):
        c = p.terms[e]
        mono = "*".join(names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k)
        mag = -c if c < 0 else c
        if not mono:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(mag)}*{mono}"
        pieces.append((c < 0, body))
    neg, body = pieces[0]
    out = ("-" if neg else "") + body
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# -- parsing ------------------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str, ctx: VarContext):
        self.text = text
        self.ctx = ctx
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.toks.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.toks.append(("name", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise PolySyntaxError(f"unexpected character {ch!r}", text, m.start(3))
                self.toks.append(("op", ch, m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, self.text, tok[2])

    def expect_op(self, ch: str):
        t = self.peek()
        if t[0] != "op" or t[1] != ch:
            self.fail(f"expected {ch!r}")
        self.take()

    def parse(self) -> Poly:
        if not self.toks:
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                q = self.term()
                p = p + q if t[1] == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            at = self.peek()
            q = self.factor()
            if op[1] == "*":
                p = p * q
            elif not q.is_constant() or q.is_zero():
                self.fail("can only divide by a nonzero constant", at)
            else:
                p = p / q.constant_value()
        return p

    def factor(self) -> Poly:
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            f = self.factor()
            return -f if t[1] == "-" else f
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.peek()
            if t[0] != "num":
                self.fail("expected integer exponent")
            self.take()
            base = base ** int(t[1])
        return base

    def atom(self) -> Poly:
        t = self.peek()
        if t[0] == "num":
            self.take()
            value: Coeff = int(t[1])
            if self.peek()[:2] == ("op", "/"):
                self.take()
                d = self.peek()
                if d[0] != "num":
                    self.fail("expected integer denominator")
                self.take()
                if int(d[1]) == 0:
                    self.fail("zero denominator", d)
                value = _norm(Fraction(value, int(d[1])))
            return self.ctx.const(value)
        if t[0] == "name":
            self.take()
            if t[1] not in self.ctx:
                raise VarError(f"unknown identifier {t[1]!r} at offset {t[2]}")
            return self.ctx.var(t[1])
        if t[:2] == ("op", "("):
            self.take()
            p = self.expr()
            self.expect_op(")")
            return p
        if t[0] == "end":
            self.fail("expected operand")
        self.fail(f"unexpected {t[1]!r}")


def parse(text: str, ctx: VarContext) -> Poly:
    """Parse ``text`` over ``ctx``.

    Grammar: integers, rationals ``p/q``, names, ``+ - * ^`` and parentheses;
    ``*`` is mandatory between factors and ``/`` takes a nonzero constant divisor.
    """
    return _Parser(text, ctx).parse()
