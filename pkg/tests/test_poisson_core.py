import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BASE3, polys, tensors
from poissonlift.catalog import get_algebra
from poissonlift.errors import ContextError, InsufficientSamples, NotAntisymmetric, PreconditionViolated
from poissonlift.exactpoly import VarContext
from poissonlift.poisson_core import (
    IdentityReport,
    OneForm,
    PoissonTensor,
    VecField,
    algebroid_bracket_cv,
    anchor_cv,
    bracket,
    canonical_form_bracket,
    hamiltonian_vf,
    in_involution,
    is_casimir,
    is_casimir_numeric,
    is_poisson,
    jacobiator,
    lie_derivative_report,
    lie_derivative_tensor,
    monomial_test_sets,
    numeric_gradient,
    pi_pair,
    schouten_compatible,
    verify_algebroid_axioms,
)

W = VarContext(("x1", "x2", "x3"), (), ("w",))
RIGID = PoissonTensor.from_upper(W, {(1, 2): "w*x3", (1, 3): "-x2", (2, 3): "x1"})
CONST = PoissonTensor.from_upper(W, {(1, 2): -1})


def alg(name):
    return get_algebra(name)[1]


F3 = polys(BASE3, max_terms=3, max_exp=2)


# -- bracket --------------------------------------------------------------------------------


@settings(max_examples=250, deadline=None)
@given(tensors(), F3, F3)
def test_bracket_antisymmetric(pi, f, g):
    assert bracket(pi, f, g) == -bracket(pi, g, f)


@settings(max_examples=250, deadline=None)
@given(tensors(), F3, F3, F3)
def test_bracket_leibniz(pi, f, g, h):
    assert bracket(pi, f * g, h) == f * bracket(pi, g, h) + g * bracket(pi, f, h)


def test_bracket_examples():
    assert bracket(RIGID, W.var("x1"), W.var("x2")) == W.parse("w*x3")
    f = W.parse("x1^2 + x3")
    assert bracket(RIGID, f, f).is_zero()
    p39 = alg("A3,9")
    c = p39.context
    assert bracket(p39, c.parse("x1^2 + x2^2 + x3^2"), c.var("x1")).is_zero()


def test_bracket_context_mismatch():
    other = VarContext(("a", "b", "c"))
    with pytest.raises(ContextError):
        bracket(alg("A3,9"), other.var("a"), other.var("b"))


# -- tensors ------------------------------------------------------------------------------------


def test_antisymmetry_enforced():
    c = BASE3
    with pytest.raises(NotAntisymmetric):
        PoissonTensor(c, [[c.zero(), c.var("x3"), c.zero()], [c.var("x3"), c.zero(), c.zero()], [c.zero()] * 3])


def test_json_round_trip():
    doc = RIGID.to_dict()
    assert PoissonTensor.from_dict(doc) == RIGID


# -- Jacobi ----------------------------------------------------------------------------------------


def test_jacobiator_examples():
    assert jacobiator(alg("A3,8")).ok
    assert jacobiator(PoissonTensor.zero(BASE3)).ok
    bad = PoissonTensor.from_upper(BASE3, {(1, 2): "x3", (1, 3): "x1"})
    rep = jacobiator(bad)
    assert not rep.ok
    key, res = rep.first()
    assert key == (1, 2, 3)
    assert res == BASE3.parse("-x3")


def test_identity_report_drops_zeros():
    c = BASE3
    rep = IdentityReport.collect([((1,), c.zero()), ((2,), c.var("x1"))])
    assert not rep.ok and len(rep.witnesses) == 1
    assert IdentityReport.collect([((1,), c.zero())]).ok


@settings(max_examples=60, deadline=None)
@given(tensors(VarContext(("x1", "x2", "x3", "x4")), max_terms=2, max_exp=1))
def test_ordered_triples_suffice(pi):
    # the Jacobi expression is totally antisymmetric, so i<j<k decides all triples
    assert jacobiator(pi).ok == jacobiator(pi, all_triples=True).ok


@pytest.mark.parametrize("name", [f"A3,{k}" for k in range(1, 10)])
def test_catalog_self_compatible(name):
    pi = alg(name)
    assert is_poisson(pi)
    assert schouten_compatible(pi, pi).ok


def test_schouten_examples():
    assert not schouten_compatible(alg("A3,2"), alg("A3,8")).ok
    assert schouten_compatible(RIGID, CONST).ok


def test_schouten_dimension_mismatch():
    two = PoissonTensor.from_upper(VarContext(("x1", "x2")), {(1, 2): 1})
    with pytest.raises(ContextError):
        schouten_compatible(alg("A3,9"), two)


@pytest.mark.parametrize("a,b", [("A3,4", "A3,9"), ("A3,1", "A3,8"), ("A3,6", "A3,8")])
def test_pencil_closure(a, b):
    p1, p2 = alg(a), alg(b)
    assert schouten_compatible(p1, p2).ok
    ctx = p1.context.with_params("t")
    pencil = p1.embed(ctx) + p2.embed(ctx).scale("t")
    assert jacobiator(pencil).ok


def test_incompatible_pencil_fails():
    ctx = BASE3.with_params("t")
    pencil = alg("A3,2").embed(ctx) + alg("A3,8").embed(ctx).scale("t")
    assert not jacobiator(pencil).ok


# -- Lie derivative ------------------------------------------------------------------------------------


def test_lie_derivative_examples():
    p36 = alg("A3,6")
    c = p36.context
    assert lie_derivative_report(p36, VecField.coordinate(c, "x3")).ok
    zero = VecField(c, (0, 0, 0))
    assert lie_derivative_report(alg("A3,9"), zero).ok
    p31 = alg("A3,1")
    L = lie_derivative_tensor(p31, VecField(c, (c.var("x1"), 0, 0)))
    assert L[1][2] == c.var("x1")
    assert L[2][1] == -c.var("x1")


# -- Casimirs and involution ----------------------------------------------------------------------------


def test_casimir_examples():
    assert is_casimir(CONST, W.var("x3")).ok
    assert is_casimir(RIGID, W.parse("x1^2 + x2^2 + w*x3^2")).ok
    rep = is_casimir(alg("A3,9"), BASE3.var("x1"))
    assert not rep.ok
    assert dict(rep.witnesses) == {(2,): BASE3.parse("-x3"), (3,): BASE3.parse("x2")}


def test_involution_examples():
    H = W.parse("x1^2 + x2^2 + x3^2")
    F = W.parse("x1^2 + x2^2 + w*x3^2")
    assert in_involution(CONST, [("H", H), ("F", F)]).ok
    assert in_involution(RIGID, [("H", H)]).ok
    assert not in_involution(alg("A3,9"), [("a", BASE3.var("x1")), ("b", BASE3.var("x2"))]).ok


# -- Hamiltonian vector fields -------------------------------------------------------------------------


def test_hamiltonian_vf_rigid_body():
    vf = hamiltonian_vf(RIGID, W.parse("x1^2 + x2^2 + x3^2"))
    assert list(vf.components) == [W.parse("2*(w - 1)*x2*x3"), W.parse("-2*(w - 1)*x1*x3"), W.zero()]
    assert all(c.is_zero() for c in hamiltonian_vf(RIGID, W.const(5)).components)


@settings(max_examples=100, deadline=None)
@given(tensors(), F3)
def test_energy_conserved(pi, H):
    assert hamiltonian_vf(pi, H).apply(H).is_zero()


def test_hamiltonian_vf_frozen_pair_base_part():
    # x-part of the equations for the A3,8 pair at y = 0 and lam = alpha = 0
    p38 = alg("A3,8")
    c = p38.context
    vf = hamiltonian_vf(p38, c.parse("x2^2 + x1*x3"))
    assert all(v.is_zero() for v in vf.components)


# -- numeric Casimir checks ---------------------------------------------------------------------------


def _points(n, seed, guard=0):
    rng = random.Random(seed)
    pts = []
    for _ in range(n):
        p = [rng.uniform(-1, 1) for _ in range(3)]
        p[guard] = rng.choice((-1, 1)) * rng.uniform(0.5, 1)
        pts.append(tuple(p))
    return pts


def test_numeric_casimir_examples():
    ok = is_casimir_numeric(alg("A3,2"), lambda e: e[0] * math.exp(-e[1] / e[0]), _points(20, 1))
    assert ok and ok.checked == 20
    p35 = get_algebra("A3,5", {"a": "1/2"})[1]
    pos = [(abs(a), b, c) for a, b, c in _points(20, 2)]
    assert is_casimir_numeric(p35, lambda e: e[1] * e[0] ** -0.5, pos)
    assert not is_casimir_numeric(alg("A3,9"), lambda e: e[0], _points(20, 3))


def test_numeric_casimir_skips_bad_points():
    res = is_casimir_numeric(alg("A3,1"), lambda e: math.log(e[0]), [(-1.0, 0, 0), (0.7, 0.1, 0.2)])
    assert res.checked == 1 and len(res.skipped) == 1
    with pytest.raises(InsufficientSamples):
        is_casimir_numeric(alg("A3,1"), lambda e: math.log(e[0]), [(-1.0, 0, 0)])


def test_numeric_gradient_accuracy():
    g = numeric_gradient(lambda e: e[0] * e[0] * e[1], (1.5, -2.0))
    assert g[0] == pytest.approx(-6.0, rel=1e-8)
    assert g[1] == pytest.approx(2.25, rel=1e-8)


# -- the deformed algebroid -------------------------------------------------------------------------


@pytest.fixture
def cv():
    p36 = alg("A3,6")
    c = p36.context
    return p36, c.parse("x1^2 + x2^2"), VecField.coordinate(c, "x3")


def test_algebroid_bracket_examples(cv):
    pi, c, v = cv
    ctx = pi.context
    dx3 = OneForm.dx(ctx, "x3")
    assert all(x.is_zero() for x in algebroid_bracket_cv(pi, c, v, dx3, dx3).components)
    dx1, dx2 = OneForm.dx(ctx, "x1"), OneForm.dx(ctx, "x2")
    assert all(x.is_zero() for x in algebroid_bracket_cv(pi, c, v, dx1, dx2).components)


@settings(max_examples=40, deadline=None)
@given(F3, F3)
def test_exact_forms_closed_formula(f, g):
    p36 = alg("A3,6")
    ctx = p36.context
    c, v = ctx.parse("x1^2 + x2^2"), VecField.coordinate(ctx, "x3")
    df, dg = OneForm.d(f), OneForm.d(g)
    lhs = algebroid_bracket_cv(p36, c, v, df, dg)
    fv, gv = df.pair(v), dg.pair(v)
    rhs = OneForm.d(bracket(p36, f, g)) + (OneForm.d(fv) * (c * gv)) - (OneForm.d(gv) * (c * fv))
    assert lhs == rhs


def test_zero_deformation_is_canonical(cv):
    pi, _, v = cv
    forms, _ = monomial_test_sets(pi.context)
    zero = pi.context.zero()
    for a, b in itertools.product(forms[:6], repeat=2):
        assert algebroid_bracket_cv(pi, zero, v, a, b) == canonical_form_bracket(pi, a, b)


def test_anchor_examples(cv):
    pi, c, v = cv
    ctx = pi.context
    dx3 = OneForm.dx(ctx, "x3")
    assert anchor_cv(pi, c, v, dx3, ctx.var("x3")) == ctx.parse("-x1^2 - x2^2")
    zero_form = OneForm(ctx, (0, 0, 0))
    assert anchor_cv(pi, c, v, zero_form, ctx.parse("x1*x2")).is_zero()
    f = ctx.parse("x1*x3")
    assert anchor_cv(pi, ctx.zero(), v, OneForm.d(f), f).is_zero()
    assert anchor_cv(pi, ctx.zero(), v, OneForm.d(f), ctx.var("x2")) == pi_pair(pi, OneForm.d(f), OneForm.dx(ctx, "x2"))


def test_broken_hypothesis_raises_with_value(cv):
    pi, _, v = cv
    ctx = pi.context
    with pytest.raises(PreconditionViolated) as info:
        algebroid_bracket_cv(pi, ctx.var("x3"), v, OneForm.dx(ctx, "x1"), OneForm.dx(ctx, "x3"))
    assert isinstance(info.value.value, OneForm)


def test_algebroid_axioms_small_set(cv):
    pi, c, v = cv
    ctx = pi.context
    forms = [OneForm.dx(ctx, n) for n in ("x1", "x2", "x3")]
    fns = [ctx.parse(s) for s in ("x1", "x2", "x3", "x1*x2")]
    assert verify_algebroid_axioms(pi, c, v, forms, fns).ok
    assert verify_algebroid_axioms(pi, ctx.zero(), v, forms, fns).ok


def test_algebroid_axioms_broken_instance(cv):
    pi, _, v = cv
    forms, fns = monomial_test_sets(pi.context)
    rep = verify_algebroid_axioms(pi, pi.context.var("x3"), v, forms, fns)
    assert any(k[0] == "jacobi" for k, _ in rep.witnesses)
