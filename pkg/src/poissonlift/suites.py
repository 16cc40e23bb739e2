"""End-to-end worked examples: each suite builds its structures and checks them.

Suites
------
``lagrange``    Lagrange top from the product of a rigid-body tensor with a
                constant one: Casimirs, involutive families, equations of
                motion and conservation along an RK4 trajectory.
``lie3``        The A3,8 tensor with a frozen companion: product tensor,
                Casimirs, involutive pair and equations of motion.
``semidirect``  Products of catalog tensors identified with A6,16, and the
                so(4)/e(3) type block tensors.
``euclidean``   Deformed lifts of the e(2) tensor and their Casimirs.

Expected polynomials below are hand-transcribed reference formulas; the
checks compare canonical forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .catalog import A6_16, A6_16_IMAGES, get_algebra, pushforward_matches
from .dynamics import conservation_report, hamiltons_equations, integrate_rk4
from .exactpoly import Poly, VarContext
from .lifts import (
    FunctionFamily,
    casimirs_linear_family,
    freeze,
    hat_family,
    involution_family,
    lift_cv,
    lift_linear_family,
    lift_point_deform,
    lifted_casimirs,
    lifted_casimirs_biham,
    semidirect,
    semidirect_casimirs,
    tangent_lift,
)
from .poisson_core import PoissonTensor, VecField, in_involution, is_casimir, jacobiator, schouten_compatible

LAGRANGE_Z0 = (1.0, 0.0, 0.5, 0.0, 1.0, 0.3)
LAGRANGE_W = 2
DRIFT_TOL = 1e-8


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok, detail: str = "") -> None:
        self.checks.append(Check(name, bool(ok), detail))

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.ok), None)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            **({"data": self.data} if self.data else {}),
        }


def _report(rep) -> str:
    if rep.ok:
        return ""
    key, res = rep.first()
    return f"first witness {key}: {res}"


def equations_match(system, expected: dict[str, str]) -> tuple[bool, str]:
    """Compare an ODE system with expected right-hand sides (parsed, then rendered)."""
    ctx = system.context
    got = system.as_dict()
    for z, text in expected.items():
        want = str(ctx.parse(text))
        if got[z] != want:
            return False, f"d{z}/dt: got {got[z]}, expected {want}"
    return True, ""


def upper_triangle_match(t: PoissonTensor, rows: list[list[str]]) -> tuple[bool, str]:
    """Compare entries above the diagonal with a displayed matrix.

    Only the upper triangle is compared, so sign slips below the diagonal of a
    displayed (and therefore non-antisymmetric) matrix do not matter.
    """
    for i in range(t.dim):
        for j in range(i + 1, t.dim):
            want = t.context.parse(rows[i][j])
            if t.mat[i][j] != want:
                return False, f"entry ({i + 1},{j + 1}): got {t.mat[i][j]}, expected {want}"
    return True, ""


# -- Lagrange top ---------------------------------------------------------------------------------


@dataclass
class LagrangeTop:
    base: VarContext
    pi1: PoissonTensor
    pi2: PoissonTensor
    product: PoissonTensor
    casimirs: FunctionFamily
    involutive: FunctionFamily
    hat: FunctionFamily
    hamiltonian: Poly

    @property
    def constants(self) -> FunctionFamily:
        """The four constants of motion."""
        return self.casimirs + self.hat


def lagrange_top() -> LagrangeTop:
    base = VarContext(("x1", "x2", "x3"), (), ("w",))
    pi1 = PoissonTensor.from_upper(base, {(1, 2): "w*x3", (1, 3): "-x2", (2, 3): "x1"})
    pi2 = PoissonTensor.from_upper(base, {(1, 2): -1})
    product, _ = semidirect(pi1, pi2, "v1")
    H = base.parse("x1^2 + x2^2 + x3^2")
    F = base.parse("x1^2 + x2^2 + w*x3^2")
    cas = semidirect_casimirs([base.parse("x3")], [base.parse("-1/2*(x1^2 + x2^2 + w*x3^2)")], pi1, pi2)
    inv = involution_family([H, F], pi1, pi2)
    hat = hat_family([F], [H], pi1, pi2)
    L = product.context
    h = (hat["HH1"] + (L.parse("w") - 1) * cas["c1_y"] * hat["H1_hat"]) * L.const(1) / 2
    return LagrangeTop(base, pi1, pi2, product, cas, inv, hat, h)


LAGRANGE_PRODUCT = [
    ["0", "w*y3", "-y2", "0", "-1", "0"],
    ["-w*y3", "0", "y1", "1", "0", "0"],
    ["y2", "-y1", "0", "0", "0", "0"],
    ["0", "-1", "0", "0", "0", "0"],
    ["1", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0"],
]
RIGID_BODY_EQS = {"x1": "2*(w - 1)*x2*x3", "x2": "-2*(w - 1)*x1*x3", "x3": "0"}
FOUR_PARAM_EQS = {
    "x1": "2*gamma*(w - 1)*y2*y3 - 2*(alpha + beta)*y2 - 2*(gamma + delta)*x2",
    "x2": "-2*gamma*(w - 1)*y1*y3 + 2*(alpha + beta)*y1 + 2*(gamma + delta)*x1",
    "x3": "0",
    "y1": "-2*(gamma + delta)*y2",
    "y2": "2*(gamma + delta)*y1",
    "y3": "0",
}
LAGRANGE_EQS = {
    "x1": "x2*y3 - x3*y2",
    "x2": "x3*y1 - x1*y3",
    "x3": "x1*y2 - x2*y1",
    "y1": "-x2 - (w - 1)*y2*y3",
    "y2": "x1 + (w - 1)*y1*y3",
    "y3": "0",
}
LAGRANGE_FAMILIES = {
    "c1_y": "y3",
    "c1_tilde": "x3 - 1/2*(y1^2 + y2^2 + w*y3^2)",
    "H1": "y1^2 + y2^2 + y3^2",
    "H1_tilde": "2*x1*y1 + 2*x2*y2 + 2*x3*y3",
    "H2": "y1^2 + y2^2 + w*y3^2",
    "H2_tilde": "2*x1*y1 + 2*x2*y2 + 2*w*x3*y3",
    "H1_hat": "2*x1*y1 + 2*x2*y2 + 2*w*x3*y3",
    "HH1": "x1^2 + x2^2 + x3^2",
}


def four_parameter_system(top: LagrangeTop):
    L = top.product.context.with_params("alpha", "beta", "gamma", "delta")
    fam = top.involutive.embed(L)
    h = L.parse("alpha") * fam["H1"] + L.parse("beta") * fam["H2"]
    h = h + L.parse("gamma") * fam["H1_tilde"] + L.parse("delta") * fam["H2_tilde"]
    return hamiltons_equations(top.product.embed(L), h)


def run_lagrange(dt: float = 1e-3, T: float = 10.0, z0=LAGRANGE_Z0, w=LAGRANGE_W, tol: float = DRIFT_TOL) -> SuiteReport:
    rep = SuiteReport("lagrange")
    top = lagrange_top()
    H = top.base.parse("x1^2 + x2^2 + x3^2")
    rep.add("rigid body equations", *equations_match(hamiltons_equations(top.pi1, H), RIGID_BODY_EQS))
    r = schouten_compatible(top.pi1, top.pi2)
    rep.add("pi1 and pi2 compatible", r.ok, _report(r))
    rep.add("product matrix", *upper_triangle_match(top.product, LAGRANGE_PRODUCT))
    rep.add("product is Poisson", jacobiator(top.product).ok)
    for fam in (top.casimirs, top.involutive, top.hat):
        for name, f in fam:
            want = f.context.parse(LAGRANGE_FAMILIES[name])
            rep.add(f"function {name}", f == want, "" if f == want else f"got {f}, expected {want}")
    for name, c in top.casimirs:
        r = is_casimir(top.product, c)
        rep.add(f"{name} is a Casimir", r.ok, _report(r))
    r = in_involution(top.product, top.involutive)
    rep.add("H1, H2 and their tilde partners in involution", r.ok, _report(r))
    r = in_involution(top.product, top.constants)
    rep.add("constants of motion in involution", r.ok, _report(r))
    rep.add("four-parameter equations", *equations_match(four_parameter_system(top), FOUR_PARAM_EQS))
    sys = hamiltons_equations(top.product, top.hamiltonian)
    rep.add("Lagrange top equations", *equations_match(sys, LAGRANGE_EQS))
    traj = integrate_rk4(sys, z0, dt, T, {"w": w})
    cons = conservation_report(traj, top.constants, {"w": w})
    for d in cons.drifts:
        rep.add(f"drift {d.name}", d.max_rel <= tol, f"relative drift {d.max_rel:.3e}")
    rep.data["conservation"] = cons.to_dict()
    rep.data["settings"] = {"dt": dt, "T": T, "z0": list(z0), "w": w}
    return rep


# -- A3,8 with a frozen companion ------------------------------------------------------------------------


@dataclass
class FrozenPair:
    pi1: PoissonTensor
    pi2: PoissonTensor
    product: PoissonTensor
    casimirs: FunctionFamily
    hat: FunctionFamily
    hamiltonian: Poly


def frozen_pair() -> FrozenPair:
    _, pi1 = get_algebra("A3,8")
    base = pi1.context
    pi2 = freeze(pi1, (1, 0, 0))
    product, _ = semidirect(pi1, pi2, "v1")
    cas = semidirect_casimirs([base.parse("x3")], [base.parse("x2^2 + x1*x3")], pi1, pi2)
    hat = hat_family([base.parse("x2^2 + x1*x3")], [base.with_params("lam").parse("x2^2 + x1*x3 + lam*x3^2")], pi1, pi2)
    L = hat.context.with_params("alpha")
    h = L.parse("x2^2 + x1*x3 + lam*x3^2 + alpha*y3*(2*x2*y2 + x1*y3 + x3*y1)")
    return FrozenPair(pi1, pi2, product, cas, hat, h)


FROZEN_PRODUCT = [
    ["0", "y1", "-2*y2", "0", "1", "0"],
    ["-y1", "0", "y3", "-1", "0", "0"],
    ["2*y2", "-y3", "0", "0", "0", "0"],
    ["0", "1", "0", "0", "0", "0"],
    ["-1", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0"],
]
# the y2 equation is printed with y3^3; homogeneity of the system requires y3^2
FROZEN_EQS = {
    "x1": "2*alpha*x2*y3 - 4*lam*x3*y2 + 2*y1*x2 - 2*x1*y2",
    "x2": "x1*y3 - x3*y1 + (2*lam - alpha)*x3*y3",
    "x3": "2*(x3*y2 - x2*y3)",
    "y1": "2*x2 + 2*alpha*y2*y3",
    "y2": "-x3 - alpha*y3^2",
    "y3": "0",
}
FROZEN_FAMILIES = {"c1_y": "y3", "c1_tilde": "x3 + y2^2 + y1*y3", "H1_hat": "2*x2*y2 + x1*y3 + x3*y1", "HH1": "x2^2 + x1*x3 + lam*x3^2"}
# with y3 != 0 the flow blows up in finite time; on y3 = 0 it stays finite up to T = 10
FROZEN_Z0 = (0.3, -0.2, 0.5, 0.1, 0.4, 0.0)


def run_lie3(dt: float = 1e-3, T: float = 10.0, z0=FROZEN_Z0, tol: float = DRIFT_TOL) -> SuiteReport:
    rep = SuiteReport("lie3")
    fp = frozen_pair()
    rep.add("frozen tensor", fp.pi2 == PoissonTensor.from_upper(fp.pi1.context, {(1, 2): 1}))
    rep.add("product matrix", *upper_triangle_match(fp.product, FROZEN_PRODUCT))
    rep.add("product is Poisson", jacobiator(fp.product).ok)
    for fam in (fp.casimirs, fp.hat):
        for name, f in fam:
            want = f.context.parse(FROZEN_FAMILIES[name])
            rep.add(f"function {name}", f == want, "" if f == want else f"got {f}, expected {want}")
    for name, c in fp.casimirs:
        r = is_casimir(fp.product, c)
        rep.add(f"{name} is a Casimir", r.ok, _report(r))
    r = in_involution(fp.product.embed(fp.hat.context), fp.hat)
    rep.add("hat pair in involution", r.ok, _report(r))
    L = fp.hamiltonian.context
    sys = hamiltons_equations(fp.product.embed(L), fp.hamiltonian)
    rep.add("equations of motion", *equations_match(sys, FROZEN_EQS))
    params = {"lam": 1, "alpha": 1}
    traj = integrate_rk4(sys, z0, dt, T, params)
    fns = (fp.casimirs.embed(L) + fp.hat.embed(L)).entries + (("h", fp.hamiltonian),)
    cons = conservation_report(traj, fns, params)
    for d in cons.drifts:
        rep.add(f"drift {d.name}", d.max_rel <= tol, f"relative drift {d.max_rel:.3e}")
    rep.data["conservation"] = cons.to_dict()
    return rep


# -- six-dimensional products ----------------------------------------------------------------------------------


PRODUCT_CASIMIRS = {
    "A3,3": ("y1", "1/3*x1^3 - x1*y1*y2 + x2*y1^2"),
    "A3,2": ("y1", "1/3*x1^3 - x1*y1*(y1 + y2) + x2*y1^2"),
}
PRODUCT_MATRICES = {
    "A3,3": [
        ["0", "0", "y1", "0", "0", "0"],
        ["0", "0", "y2", "0", "0", "x1"],
        ["-y1", "-y2", "0", "0", "-x1", "0"],
        ["0", "0", "0", "0", "0", "0"],
        ["0", "0", "x1", "0", "0", "y1"],
        ["0", "-x1", "0", "0", "-y1", "0"],
    ],
    "A3,2": [
        ["0", "0", "y1", "0", "0", "0"],
        ["0", "0", "y1 + y2", "0", "0", "x1"],
        ["-y1", "-y1 - y2", "0", "0", "-x1", "0"],
        ["0", "0", "0", "0", "0", "0"],
        ["0", "0", "x1", "0", "0", "y1"],
        ["0", "-x1", "0", "0", "-y1", "0"],
    ],
}


def run_semidirect() -> SuiteReport:
    rep = SuiteReport("semidirect")
    _, p31 = get_algebra("A3,1")
    for row in ("A3,3", "A3,2"):
        _, p = get_algebra(row)
        t, cond = semidirect(p, p31, "v1")
        rep.add(f"{row} x A3,1 conditions", cond.ok, _report(cond))
        rep.add(f"{row} x A3,1 matrix", *upper_triangle_match(t, PRODUCT_MATRICES[row]))
        rep.add(f"{row} x A3,1 is Poisson", jacobiator(t).ok)
        for text in PRODUCT_CASIMIRS[row]:
            r = is_casimir(t, t.context.parse(text))
            rep.add(f"{row} x A3,1 Casimir {text}", r.ok, _report(r))
        r = pushforward_matches(t, A6_16, A6_16_IMAGES[row])
        rep.add(f"{row} x A3,1 is A6,16 after change of variables", r.ok, _report(r))
    _, p39 = get_algebra("A3,9")
    t, cond = semidirect(p39, p39, "v1")
    rep.add("so(4) type product is Poisson", cond.ok and jacobiator(t).ok)
    e3 = tangent_lift(p39)
    rep.add("e(3) type block tensor is Poisson", jacobiator(e3).ok)
    rep.add("e(3) type tensor shares the lower blocks of the so(4) type one", e3.mat[3:] == t.mat[3:])
    return rep


# -- deformations of e(2) -----------------------------------------------------------------------------------------


EUCLIDEAN_MATRICES = {
    "point": [
        ["0", "0", "0", "0", "0", "-x2"],
        ["0", "0", "0", "0", "0", "x1"],
        ["0", "0", "0", "x2", "-x1", "eps*(x1^2 + x2^2)"],
        ["0", "0", "-x2", "0", "0", "-y2"],
        ["0", "0", "x1", "0", "0", "y1"],
        ["x2", "-x1", "-eps*(x1^2 + x2^2)", "y2", "-y1", "0"],
    ],
    "biham": [
        ["0", "0", "0", "0", "0", "-x2"],
        ["0", "0", "0", "0", "0", "x1"],
        ["0", "0", "0", "x2", "-x1", "eps*(x1^2 + x2^2)"],
        ["0", "0", "-x2", "0", "0", "-y2 + lam*x1"],
        ["0", "0", "x1", "0", "0", "y1 - lam*x2"],
        ["x2", "-x1", "-eps*(x1^2 + x2^2)", "y2", "-y1", "0"],
    ],
    "linear": [
        ["0", "0", "-lam*x2", "0", "0", "-x2"],
        ["0", "0", "lam*x1", "0", "0", "x1"],
        ["lam*x2", "-lam*x1", "0", "x2", "-x1", "eps*(x1^2 + x2^2)"],
        ["0", "0", "-x2", "0", "0", "-y2"],
        ["0", "0", "x1", "0", "0", "y1"],
        ["x2", "-x1", "-eps*(x1^2 + x2^2)", "y2", "-y1", "0"],
    ],
}
EUCLIDEAN_CASIMIRS = {
    "point": ("x1^2 + x2^2", "2*x1*y1 + 2*x2*y2"),
    "biham": ("x1^2 + x2^2", "2*x1*y1 + 2*x2*y2 - 2*lam*x1*x2"),
    "linear": ("x1^2 + x2^2", "lam^2*y1^2 + lam^2*y2^2 - 2*lam*x1*y1 - 2*lam*x2*y2"),
}


def euclidean_lifts() -> dict:
    """The three deformed lifts of e(2) with ``c = eps (x1^2 + x2^2)`` at ``p = 3``, plus their Casimirs."""
    _, p36 = get_algebra("A3,6")
    _, p34 = get_algebra("A3,4")
    base = p36.context.with_params("eps")
    c = base.parse("eps*(x1^2 + x2^2)")
    c0 = p36.context.parse("x1^2 + x2^2")
    out = {
        "point": (lift_point_deform(p36, c, 3), lifted_casimirs([c0])),
        "biham": (
            lift_point_deform(p36, c, 3, pi1=p34),
            lifted_casimirs_biham([c0], [p36.context.parse("-2*x1*x2")], "lam", "f_in_pi2", pi1=p34, pi2=p36),
        ),
        "linear": (lift_linear_family(p36, c, 3), casimirs_linear_family([c0], "lam", "tilde")),
    }
    out["cv"] = (lift_cv(p36, c, VecField.coordinate(base, "x3")), lifted_casimirs([c0]))
    return out


def run_euclidean() -> SuiteReport:
    rep = SuiteReport("euclidean")
    lifts = euclidean_lifts()
    for key in ("point", "biham", "linear"):
        t, fam = lifts[key]
        rep.add(f"{key} matrix", *upper_triangle_match(t, EUCLIDEAN_MATRICES[key]))
        rep.add(f"{key} is Poisson", jacobiator(t).ok)
        for f, text in zip(fam.polys, EUCLIDEAN_CASIMIRS[key]):
            ctx = t.context.merge(f.context)
            f = f.embed(ctx)
            want = ctx.parse(text)
            rep.add(f"{key} function {text}", f == want, "" if f == want else f"got {f}")
            r = is_casimir(t.embed(ctx), f)
            rep.add(f"{key} Casimir {text}", r.ok, _report(r))
    t_cv, _ = lifts["cv"]
    rep.add("symmetry-field lift equals point deformation", t_cv == lifts["point"][0])
    return rep


SUITES: dict[str, Callable[[], SuiteReport]] = {
    "lagrange": run_lagrange,
    "lie3": run_lie3,
    "semidirect": run_semidirect,
    "euclidean": run_euclidean,
}
