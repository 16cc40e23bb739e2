from fractions import Fraction

import pytest
from hypothesis import strategies as st

from poissonlift.exactpoly import Poly, VarContext
from poissonlift.poisson_core import PoissonTensor

CTX = VarContext(("x1", "x2", "x3"), ("y1", "y2", "y3"), ("w",))
BASE3 = VarContext(("x1", "x2", "x3"))

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def polys(ctx: VarContext = CTX, max_terms: int = 4, max_exp: int = 2):
    exps = st.tuples(*[st.integers(0, max_exp) for _ in ctx.names])
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: Poly(ctx, d))


def tensors(ctx: VarContext = BASE3, max_terms: int = 2, max_exp: int = 1):
    """Random antisymmetric matrices (not necessarily Poisson)."""
    n = len(ctx.coords)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return st.tuples(*[polys(ctx, max_terms, max_exp) for _ in pairs]).map(
        lambda vals: PoissonTensor.from_upper(ctx, dict(zip(pairs, vals)))
    )


@pytest.fixture
def ctx():
    return CTX


def frac(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
