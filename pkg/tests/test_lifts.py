import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poissonlift.catalog import NAMES, get_algebra
from poissonlift.errors import (
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
from poissonlift.exactpoly import VarContext
from poissonlift.lifts import (
    LINEAR_FAMILY_VARIANTS,
    FunctionFamily,
    casimirs_linear_family,
    check_semidirect_conditions,
    freeze,
    hat_family,
    involution_family,
    lift_biham,
    lift_biham_eps,
    lift_cv,
    lift_linear_family,
    lift_point_deform,
    lifted_casimirs,
    lifted_casimirs_biham,
    self_semidirect_casimirs,
    semidirect,
    semidirect_casimirs,
    solve_correction_term,
    tangent_lift,
)
from poissonlift.poisson_core import PoissonTensor, VecField, in_involution, is_casimir, jacobiator, schouten_compatible

W = VarContext(("x1", "x2", "x3"), (), ("w",))
RIGID = PoissonTensor.from_upper(W, {(1, 2): "w*x3", (1, 3): "-x2", (2, 3): "x1"})
CONST = PoissonTensor.from_upper(W, {(1, 2): -1})


def alg(name, **params):
    return get_algebra(name, params or None)[1]


def lower_right(t):
    return [list(row[3:]) for row in t.mat[3:]]


def as_tensor(t):
    return PoissonTensor(t.context, t.mat, t.coords)


# -- tangent lift ------------------------------------------------------------------------------------


def test_tangent_lift_examples():
    t = tangent_lift(alg("A3,9"))
    L = t.context
    assert lower_right(t) == [[L.zero(), L.var("y3"), -L.var("y2")], [-L.var("y3"), L.zero(), L.var("y1")], [L.var("y2"), -L.var("y1"), L.zero()]]
    c = tangent_lift(CONST)
    assert all(e.is_zero() for row in lower_right(c) for e in row)
    t31 = tangent_lift(alg("A3,1"))
    assert t31.entry(5, 6) == t31.context.var("y1")


def test_tangent_lift_rejects_non_poisson():
    bad = PoissonTensor.from_upper(VarContext(("x1", "x2", "x3")), {(1, 2): "x3", (1, 3): "x1"})
    with pytest.raises(NotPoisson):
        tangent_lift(bad)


def test_provenance_in_json():
    doc = tangent_lift(alg("A3,9")).to_dict()
    assert doc["provenance"]["constructor"] == "tangent_lift"
    assert doc["fiber_vars"] == ["y1", "y2", "y3"]


# -- lifts of one tensor ---------------------------------------------------------------------------


@pytest.fixture
def e2():
    p = alg("A3,6")
    return p, p.context.parse("x1^2 + x2^2"), VecField.coordinate(p.context, "x3")


def test_lift_cv_matches_point_deformation(e2):
    pi, c, v = e2
    t = lift_cv(pi, c, v)
    assert jacobiator(t).ok
    assert t.entry(3, 6) == t.context.parse("x1^2 + x2^2")
    assert as_tensor(t) == as_tensor(lift_point_deform(pi, c, 3))


def test_lift_cv_reductions(e2):
    pi, c, v = e2
    ctx = pi.context
    base = as_tensor(tangent_lift(pi))
    assert as_tensor(lift_cv(pi, ctx.zero(), v)) == base
    assert as_tensor(lift_cv(pi, c, VecField(ctx, (0, 0, 0)))) == base


def test_lift_cv_with_symbolic_scale(e2):
    pi, _, v = e2
    ctx = pi.context.with_params("eps")
    t = lift_cv(pi, ctx.parse("eps*(x1^2 + x2^2)"), VecField.coordinate(ctx, "x3"))
    assert jacobiator(t).ok
    assert t.entry(3, 6) == t.context.parse("eps*x1^2 + eps*x2^2")


def test_lift_cv_hypotheses(e2):
    pi, c, v = e2
    ctx = pi.context
    with pytest.raises(PreconditionViolated, match="Casimir"):
        lift_cv(pi, ctx.var("x3"), v)
    with pytest.raises(PreconditionViolated, match="Lie derivative"):
        lift_cv(pi, c, VecField.coordinate(ctx, "x1"))


def test_lift_biham_lagrange_pair():
    t = lift_biham(RIGID, CONST)
    assert jacobiator(t).ok
    assert set(t.context.params) == {"w", "lam"}


def test_lift_biham_zero_parameter():
    t = lift_biham(RIGID, CONST).subs_params({"lam": 0})
    assert as_tensor(t) == as_tensor(tangent_lift(CONST)).embed(t.context)


def test_lift_biham_incompatible():
    with pytest.raises(NotCompatible):
        lift_biham(alg("A3,2"), alg("A3,8"))


def test_point_deform_with_pencil(e2):
    pi, c, _ = e2
    t = lift_point_deform(pi, c, 3, pi1=alg("A3,4"))
    L = t.context
    assert jacobiator(t).ok
    assert t.entry(4, 6) == L.parse("-y2 + lam*x1")
    assert t.entry(5, 6) == L.parse("y1 - lam*x2")


def test_point_deform_errors(e2):
    pi, c, _ = e2
    with pytest.raises(DependsOnXp):
        lift_point_deform(pi, c, 1)
    with pytest.raises(NotCasimir):
        lift_point_deform(pi, pi.context.var("x1"), 3)
    with pytest.raises(NotLinear):
        lift_point_deform(pi, c, 3, arg="of_y")


def test_point_deform_zero_casimir_reduces(e2):
    pi, _, _ = e2
    assert as_tensor(lift_point_deform(pi, 0, 3)) == as_tensor(tangent_lift(pi))


def test_linear_family_e2(e2):
    pi, c, _ = e2
    t = lift_linear_family(pi, c, 3)
    L = t.context
    assert jacobiator(t).ok
    assert t.entry(1, 3) == L.parse("-lam*x2")
    assert t.entry(2, 3) == L.parse("lam*x1")


def test_linear_family_reduction(e2):
    pi, _, _ = e2
    t = lift_linear_family(pi, 0, 3).subs_params({"lam": 0})
    assert as_tensor(t) == as_tensor(tangent_lift(pi))


@pytest.mark.parametrize("variant", LINEAR_FAMILY_VARIANTS)
@pytest.mark.parametrize("p", [2, 3])
def test_linear_family_variants_on_a31(variant, p):
    pi = alg("A3,1")
    t = lift_linear_family(pi, pi.context.var("x1"), p, variant=variant)
    assert jacobiator(t).ok


def test_linear_family_needs_linear_tensor():
    with pytest.raises(NotLinearTensor):
        lift_linear_family(RIGID.subs_params({"w": 1}) + PoissonTensor.from_upper(VarContext(("x1", "x2", "x3")), {(1, 2): "x3^2"}), 0, 3)


def test_biham_eps_e2_pair(e2):
    pi, c, _ = e2
    t = lift_biham_eps(alg("A3,4"), pi, c, 3)
    assert jacobiator(t).ok
    t0 = t.subs_params({"eps": 0})
    assert as_tensor(t0) == as_tensor(lift_point_deform(pi, c, 3, pi1=alg("A3,4")))


# -- semidirect products ----------------------------------------------------------------------------


def test_semidirect_lagrange_matrix():
    t, rep = semidirect(RIGID, CONST, "v1")
    L = t.context
    assert rep.ok and jacobiator(t).ok
    assert t.entry(1, 2) == L.parse("w*y3")
    assert t.entry(1, 3) == L.parse("-y2")
    assert t.entry(2, 4) == L.one()
    assert t.entry(1, 5) == -L.one()


@pytest.mark.parametrize("variant", ["v1", "v2"])
@pytest.mark.parametrize("name", NAMES)
def test_semidirect_zero_first_tensor(variant, name):
    pi = alg(name)
    t, _ = semidirect(PoissonTensor.zero(pi.context), pi, variant)
    assert as_tensor(t) == as_tensor(tangent_lift(pi))


def test_semidirect_conditions_examples():
    assert check_semidirect_conditions(alg("A3,9"), alg("A3,9"), "v1").ok
    assert not check_semidirect_conditions(alg("A3,1"), alg("A3,4"), "v1").ok
    assert check_semidirect_conditions(RIGID, CONST, "v1").ok


def test_semidirect_strict_raises():
    with pytest.raises(ConditionsViolated) as info:
        semidirect(alg("A3,1"), alg("A3,4"))
    assert info.value.tensor.dim == 6
    t, rep = semidirect(alg("A3,1"), alg("A3,4"), strict=False)
    assert not rep.ok


def test_semidirect_a33_a31_matrix():
    t, _ = semidirect(alg("A3,3"), alg("A3,1"))
    L = t.context
    assert [t.entry(1, 3), t.entry(2, 3)] == [L.var("y1"), L.var("y2")]
    assert t.entry(2, 6) == L.var("x1")
    assert t.entry(5, 6) == L.var("y1")


@pytest.mark.parametrize("name", NAMES)
def test_block_antisymmetry(name):
    t = tangent_lift(alg(name))
    for i in range(3):
        for j in range(3):
            assert t.mat[3 + j][i] == -t.mat[i][3 + j]


# -- Casimir families -------------------------------------------------------------------------------------


def test_lifted_casimirs_examples(e2):
    pi, c, _ = e2
    fam = lifted_casimirs([c])
    L = fam.context
    assert fam["l_dc1"] == L.parse("2*x1*y1 + 2*x2*y2")
    assert lifted_casimirs([pi.context.const(4)])["l_dc1"].is_zero()
    assert lifted_casimirs([pi.context.var("x3")])["l_dc1"] == L.var("y3")


def test_lifted_casimirs_are_casimirs_of_tangent_lift(e2):
    pi, c, _ = e2
    t = tangent_lift(pi)
    for _, f in lifted_casimirs([c]):
        assert is_casimir(t, f).ok


def test_lifted_casimirs_biham_example(e2):
    pi, c, _ = e2
    f = pi.context.parse("-2*x1*x2")
    fam = lifted_casimirs_biham([c], [f], "lam", "f_in_pi2", pi1=alg("A3,4"), pi2=pi)
    L = fam.context
    assert fam["c1_tilde"] == L.parse("2*x1*y1 + 2*x2*y2 - 2*lam*x1*x2")
    t = lift_point_deform(pi, c, 3, pi1=alg("A3,4"))
    for _, g in fam:
        assert is_casimir(t, g.embed(t.context)).ok


def test_lifted_casimirs_biham_side_condition(e2):
    pi, c, _ = e2
    with pytest.raises(SideConditionFailed):
        lifted_casimirs_biham([c], [pi.context.parse("x1*x2")], "lam", "f_in_pi2", pi1=alg("A3,4"), pi2=pi)


def test_lifted_casimirs_biham_zero_parameter(e2):
    pi, c, _ = e2
    fam = lifted_casimirs_biham([c], [pi.context.parse("-2*x1*x2")])
    plain = lifted_casimirs([c])
    assert fam["c1_tilde"].subs_params({"lam": 0}) == plain["l_dc1"]


def test_linear_family_casimirs(e2):
    pi, c, _ = e2
    fam = casimirs_linear_family([c])
    L = fam.context
    assert fam["c1_tt"] == L.parse("lam^2*y1^2 + lam^2*y2^2 - 2*lam*x1*y1 - 2*lam*x2*y2")
    assert fam["c1_tt"].subs_params({"lam": 0}).is_zero()
    t = lift_linear_family(pi, c, 3)
    for _, g in fam:
        assert is_casimir(t, g.embed(t.context)).ok


def test_hat_casimirs_linear():
    p31 = alg("A3,1")
    fam = casimirs_linear_family([p31.context.var("x1")], "mu", "hat")
    L = fam.context
    assert fam["c1_hat"] == L.parse("2*x1")
    assert fam["c1_hathat"] == L.parse("-2*mu*y1")


@pytest.mark.parametrize("p", [2, 3])
def test_hat_casimirs_on_hat_tensor(p):
    p31 = alg("A3,1")
    c = p31.context.var("x1")
    t = lift_linear_family(p31, c, p, lam="lam", variant="dtilde_cx")
    t = t.substitute_params({"lam": "mu^2"})
    for _, g in casimirs_linear_family([c], "mu", "hat"):
        assert is_casimir(t, g.embed(t.context)).ok


def test_semidirect_casimirs_lagrange():
    fam = semidirect_casimirs([W.var("x3")], [W.parse("-1/2*(x1^2 + x2^2 + w*x3^2)")], RIGID, CONST)
    L = fam.context
    assert fam["c1_y"] == L.var("y3")
    assert fam["c1_tilde"] == L.parse("x3 - 1/2*y1^2 - 1/2*y2^2 - 1/2*w*y3^2")
    t, _ = semidirect(RIGID, CONST)
    for _, g in fam:
        assert is_casimir(t, g).ok


def test_semidirect_casimirs_rejects_bad_candidate():
    with pytest.raises(ConditionFailed):
        semidirect_casimirs([W.var("x3")], [W.parse("x1^2")], RIGID, CONST)


def test_correction_term_solver_recovers_candidate():
    tt = solve_correction_term(W.var("x3"), RIGID, CONST)
    assert tt is not None
    fam = semidirect_casimirs([W.var("x3")], [tt], RIGID, CONST)
    t, _ = semidirect(RIGID, CONST)
    assert is_casimir(t, fam["c1_tilde"]).ok


def test_involution_family_lagrange():
    H = W.parse("x1^2 + x2^2 + x3^2")
    F = W.parse("x1^2 + x2^2 + w*x3^2")
    fam = involution_family([H, F], RIGID, CONST)
    L = fam.context
    assert fam["H1_tilde"] == L.parse("2*x1*y1 + 2*x2*y2 + 2*x3*y3")
    assert fam["H2_tilde"] == L.parse("2*x1*y1 + 2*x2*y2 + 2*w*x3*y3")
    assert involution_family([W.const(3)], RIGID, CONST)["H1_tilde"].is_zero()
    t, _ = semidirect(RIGID, CONST)
    assert in_involution(t, fam).ok


def test_involution_family_hypothesis():
    with pytest.raises(InvolutionHypothesisFailed):
        involution_family([W.var("x1"), W.var("x2")], RIGID, CONST)


def test_hat_family_examples():
    H = W.parse("x1^2 + x2^2 + w*x3^2")
    fam = hat_family([H], [W.parse("x1^2 + x2^2 + x3^2")], RIGID, CONST)
    L = fam.context
    assert fam["H1_hat"] == L.parse("2*x1*y1 + 2*x2*y2 + 2*w*x3*y3")
    assert fam["HH1"] == L.parse("x1^2 + x2^2 + x3^2")
    p38 = alg("A3,8")
    c = p38.context
    fam = hat_family([c.parse("x2^2 + x1*x3")], [c.with_params("lam").parse("x2^2 + x1*x3 + lam*x3^2")], p38, freeze(p38, (1, 0, 0)))
    L = fam.context
    assert fam["H1_hat"] == L.parse("2*x2*y2 + x1*y3 + x3*y1")


def test_hat_family_linear_function():
    p38 = alg("A3,8")
    t31 = alg("A3,1")
    fam = hat_family([t31.context.var("x1")], [], t31, freeze(p38, (0, 0, 0)))
    assert fam["H1_hat"] == fam.context.var("x1")


def test_hat_family_errors():
    with pytest.raises(NotHomogeneous):
        hat_family([W.parse("x3 + x3^2")], [], PoissonTensor.from_upper(W, {(1, 2): "x1"}), CONST)
    with pytest.raises(NotCasimir):
        hat_family([W.var("x1")], [], RIGID, CONST)


@pytest.mark.parametrize("variant", ["v1", "v2"])
@pytest.mark.parametrize("name", ["A3,1", "A3,4", "A3,6", "A3,8", "A3,9"])
def test_self_semidirect_casimirs(variant, name):
    a, pi = get_algebra(name)
    t, rep = semidirect(pi, pi, variant)
    assert rep.ok and jacobiator(t).ok
    for _, f in self_semidirect_casimirs([a.invariants[0].as_poly(pi.context)], variant):
        assert is_casimir(t, f.embed(t.context)).ok


def test_family_indexing():
    fam = FunctionFamily((("a", W.var("x1")), ("b", W.var("x2"))), "casimir")
    assert fam[0] == fam["a"]
    assert fam.names == ["a", "b"]
    with pytest.raises(KeyError):
        fam["z"]


# -- frozen structures --------------------------------------------------------------------------------


def test_freeze_examples():
    p38 = alg("A3,8")
    f = freeze(p38, (1, 0, 0))
    assert f == PoissonTensor.from_upper(p38.context, {(1, 2): 1})
    assert freeze(p38, (0, 0, 0)) == PoissonTensor.zero(p38.context)


@pytest.mark.parametrize("name", NAMES)
def test_freeze_symbolic_point_is_compatible(name):
    pi = alg(name)
    f = freeze(pi, ("u1", "u2", "u3"))
    ctx = f.context.merge(pi.context)
    assert schouten_compatible(pi.embed(ctx), f.embed(ctx)).ok


def test_freeze_rejects_nonlinear():
    with pytest.raises(NotLinearTensor):
        freeze(PoissonTensor.from_upper(VarContext(("x1", "x2", "x3")), {(1, 2): "x3^2"}), (1, 0, 0))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(NAMES), st.tuples(*[st.integers(-3, 3)] * 3))
def test_frozen_semidirect_is_poisson(name, x0):
    pi = alg(name)
    t, rep = semidirect(pi, freeze(pi, x0), strict=False)
    if rep.ok:
        assert jacobiator(t).ok
