from pathlib import Path

import pytest

from poissonlift.catalog import (
    A6_16,
    A6_16_IMAGES,
    ALGEBRAS,
    NAMES,
    Table,
    compatibility_matrix,
    get_algebra,
    lie_poisson,
    normalize_name,
    pushforward_matches,
    semidirect_table,
    verify_invariants,
)
from poissonlift.errors import JacobiFailed, UnknownAlgebra
from poissonlift.lifts import semidirect
from poissonlift.poisson_core import PoissonTensor, jacobiator

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def compat():
    return compatibility_matrix()


@pytest.fixture(scope="module")
def sd_table():
    return semidirect_table()


@pytest.mark.parametrize("name", NAMES)
def test_catalog_tensors_are_poisson(name):
    assert jacobiator(get_algebra(name)[1]).ok


def test_displayed_tensors():
    _, p38 = get_algebra("A3,8")
    assert p38 == PoissonTensor.from_upper(p38.context, {(1, 2): "x1", (1, 3): "-2*x2", (2, 3): "x3"})
    _, p39 = get_algebra("A3,9")
    assert p39 == PoissonTensor.from_upper(p39.context, {(1, 2): "x3", (1, 3): "-x2", (2, 3): "x1"})
    _, p35 = get_algebra("A3,5")
    assert p35 == PoissonTensor.from_upper(p35.context, {(1, 3): "x1", (2, 3): "a*x2"})


def test_parameter_binding_and_rename():
    _, t = get_algebra("A3,5", {"a": "1/2"})
    assert t.context.params == ()
    assert t.entry(2, 3) == t.context.parse("1/2*x2")
    _, r = get_algebra("A3,7", rename={"a": "b"})
    assert r.context.params == ("b",)


def test_abelian_and_bad_constants():
    assert lie_poisson({}) == PoissonTensor.zero(lie_poisson({}).context)
    with pytest.raises(JacobiFailed):
        lie_poisson({(1, 2): {3: 1}, (1, 3): {1: 1}})


def test_name_normalization():
    assert normalize_name("a3.8") == "A3,8"
    assert normalize_name("A_3,2") == "A3,2"
    with pytest.raises(UnknownAlgebra):
        get_algebra("A3,10")


def test_invariant_kinds():
    assert ALGEBRAS["A3,1"].invariants[0].poly == "x1"
    a32 = ALGEBRAS["A3,2"].invariants[0]
    assert not a32.exact and a32.guard == 0
    assert ALGEBRAS["A3,7"].invariants[0].best_effort


def test_verify_invariants():
    results = verify_invariants(samples=20, tol=1e-9)
    assert len(results) == 9
    for r in results:
        if not r.best_effort:
            assert r.ok, (r.algebra, r.detail)


def test_compat_golden(compat):
    golden = (GOLDEN / "compat_table.csv").read_text()
    assert compat.to_csv() == golden


def test_compat_examples(compat):
    assert compat.value("A3,1", "A3,9") == "YES"
    assert compat.value("A3,5", "A3,8") == "NO"
    assert compat.value("A3,2", "A3,8") == "NO"
    assert compat.value("A3,4", "A3,9") == "YES"
    assert all(compat.value(n, n) == "YES" for n in NAMES)


def test_compat_symmetric(compat):
    for r in NAMES:
        for c in NAMES:
            assert compat.cells[(r, c)] == compat.cells[(c, r)]


def test_compat_witnesses(compat):
    assert ("A3,2", "A3,8") in compat.witnesses
    assert not compat.witnesses[("A3,2", "A3,8")].ok


def test_semidirect_golden(sd_table):
    golden = (GOLDEN / "semidirect_table.csv").read_text()
    assert sd_table.to_csv() == golden


def test_semidirect_examples(sd_table):
    assert sd_table.value("A3,3", "A3,1") == "YES"
    assert sd_table.value("A3,1", "A3,4") == "NO"
    assert sd_table.value("A3,9", "A3,9") == "YES"


def test_yes_cells_give_poisson_products(sd_table):
    for r in NAMES:
        for c in NAMES:
            if not sd_table.cells[(r, c)]:
                continue
            t1 = get_algebra(r)[1]
            t2 = get_algebra(c, rename={"a": "b"})[1] if r != c else get_algebra(c)[1]
            t, _ = semidirect(t1, t2)
            assert jacobiator(t).ok, (r, c)


def test_table_round_trip_and_formats(compat):
    back = Table.from_csv("compat", compat.to_csv())
    assert back.cells == compat.cells
    md = compat.to_markdown()
    assert md.splitlines()[0].startswith("| name")
    assert '"kind": "compat"' in compat.to_json()


@pytest.mark.parametrize("row", ["A3,3", "A3,2"])
def test_products_identify_with_a616(row):
    t, _ = semidirect(get_algebra(row)[1], get_algebra("A3,1")[1])
    assert pushforward_matches(t, A6_16, A6_16_IMAGES[row]).ok


def test_pushforward_detects_wrong_map():
    t, _ = semidirect(get_algebra("A3,3")[1], get_algebra("A3,1")[1])
    assert not pushforward_matches(t, A6_16, A6_16_IMAGES["A3,2"]).ok
