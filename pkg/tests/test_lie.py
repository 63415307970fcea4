import itertools
import json
from fractions import Fraction
from importlib import resources

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from cartan_algebroids.catalog import catalog
from cartan_algebroids.kernel import StructuralError
from cartan_algebroids.lie import (
    NAMED_ALGEBRAS,
    KleinPair,
    LieAlgebra,
    MutationForm,
    Subspace,
    abelian,
    e2,
    heis3,
    klein_check,
    la_bracket,
    la_center,
    la_derivations,
    la_mutate,
    la_normalizer,
    la_validate,
    sl2,
    so3,
)

from conftest import small_rationals

E = lambda n, i: tuple(Fraction(int(k == i)) for k in range(n))  # noqa: E731


def _regression(key):
    text = resources.files("cartan_algebroids").joinpath(f"data/regression/{key}.json").read_text()
    return json.loads(text)


def _sub(n, rows):
    return Subspace.span(n, [[Fraction(x) for x in r] for r in rows])


def test_bracket_examples():
    assert la_bracket(so3(), E(3, 0), E(3, 1)) == E(3, 2)
    assert la_bracket(heis3(), E(3, 1), E(3, 0)) == tuple(-x for x in E(3, 2))


@given(st.lists(small_rationals, min_size=3, max_size=3))
def test_bracket_self_is_zero(u):
    for g in (so3(), sl2(), e2(), heis3()):
        assert not any(la_bracket(g, u, u))


def test_bracket_length_mismatch():
    with pytest.raises(StructuralError):
        la_bracket(so3(), E(2, 0), E(3, 0))


@pytest.mark.parametrize("key", sorted(NAMED_ALGEBRAS))
def test_named_algebras_validate(key):
    assert la_validate(NAMED_ALGEBRAS[key]()).passed


def test_jacobi_failure_witness():
    bad = LieAlgebra.from_brackets("bad", 3, {(0, 1): (1, 0, 0), (1, 2): (0, 1, 0), (0, 2): (0, 0, -1)})
    rep = la_validate(bad)
    item = rep.item("jacobi")
    assert not rep.passed
    assert item.witness == (1, 2, 3)
    assert item.residual == (1, 1, 1)


def _sympy_jacobi(C):
    n = len(C)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        s = sum(C[i][j][m] * C[m][k][l] + C[j][k][m] * C[m][i][l] + C[k][i][m] * C[m][j][l] for m in range(n))
        if sp.nsimplify(s) != 0:
            return False
    return True


@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_validate_agrees_with_full_index_expansion(vals):
    # random 3-dim brackets; the reference sums over all (i,j,k,l) as written
    g = LieAlgebra.from_brackets("r", 3, {(0, 1): vals[0:3], (0, 2): vals[3:6], (1, 2): vals[6:9]})
    assert la_validate(g).passed == _sympy_jacobi(g.C)


def test_center_examples():
    assert la_center(abelian(2)).dim == 2
    assert la_center(so3()).dim == 0
    assert la_center(heis3()).same_as(_sub(3, [[0, 0, 1]]))


def test_derivation_examples():
    assert [len(la_derivations(g)[0]) for g in (so3(), abelian(2), heis3())] == [3, 4, 6]
    assert [la_derivations(g)[1] for g in (so3(), abelian(2), heis3())] == [3, 0, 2]


def test_derivation_basis_satisfies_leibniz():
    g = heis3()
    for Dm in la_derivations(g)[0]:
        apply = lambda v: tuple(sum(Dm[a][i] * v[i] for i in range(3)) for a in range(3))  # noqa: E731
        for i, j in itertools.product(range(3), repeat=2):
            x, y = E(3, i), E(3, j)
            lhs = apply(g.bracket(x, y))
            rhs = tuple(a + b for a, b in zip(g.bracket(apply(x), y), g.bracket(x, apply(y))))
            assert lhs == rhs


def test_normalizer_examples():
    g = so3()
    whole = Subspace.coordinate(3, [0, 1, 2])
    assert la_normalizer(g, whole).same_as(whole)
    assert la_normalizer(g, Subspace.coordinate(3, [2])).same_as(Subspace.coordinate(3, [2]))
    assert la_normalizer(sl2(), Subspace.coordinate(3, [1])).same_as(Subspace.coordinate(3, [0, 1]))


@pytest.mark.parametrize("key", ["abelian2", "heis3", "sl2", "so3", "e2", "aff1"])
def test_against_frozen_oracle(key):
    """Answers of the package's solver equal the sympy oracle's frozen answers."""
    reg = _regression(key)
    doc = catalog(key)
    (p,) = [e.pair for e in doc.klein_pairs.values()]
    g, h = p.g, p.h
    n = g.dim
    assert la_center(g).same_as(_sub(n, reg["center"]["basis"])) if reg["center"]["dim"] else la_center(g).dim == 0
    der, inner = la_derivations(g)
    assert (len(der), inner) == (reg["derivations"]["dim"], reg["derivations"]["inner_dim"])
    assert la_normalizer(g, h).same_as(_sub(n, reg["pair"]["normalizer"]["basis"]))
    rep = klein_check(p)
    conds = reg["pair"]["conditions"]
    assert rep.item("condition-1-derivations-inner").passed == conds["derivations-inner"]
    assert rep.item("condition-2-center-zero").passed == conds["center-zero"]
    assert rep.item("condition-3-normalizer").passed == conds["normalizer-is-h"]
    assert rep.data["model_dim"] == reg["pair"]["model_dim"]


def test_klein_examples():
    rep = klein_check(KleinPair(so3(), Subspace.coordinate(3, [2])))
    assert rep.passed and rep.data["model_dim"] == 2
    rep = klein_check(KleinPair(sl2(), Subspace.coordinate(3, [1])))
    assert rep.failed_ids() == ["condition-3-normalizer"]
    rep = klein_check(KleinPair(heis3(), Subspace.coordinate(3, [2])))
    assert {"condition-1-derivations-inner", "condition-2-center-zero"} <= set(rep.failed_ids())


def test_klein_rejects_non_subalgebra():
    rep = klein_check(KleinPair(so3(), Subspace.coordinate(3, [0, 1])))
    assert "subalgebra" in rep.failed_ids()


def test_mutation_examples():
    g = e2()
    cand, rep = la_mutate(g, MutationForm.zero(3))
    assert cand.C == g.C and rep.passed
    w = MutationForm.from_brackets(3, {(0, 1): (0, 0, -1)})
    cand, rep = la_mutate(g, w, Subspace.coordinate(3, [2]))
    assert rep.passed
    assert cand.bracket(E(3, 0), E(3, 1)) == E(3, 2)  # {P1,P2} = J
    assert la_center(cand).dim == 0 and len(la_derivations(cand)[0]) == 3
    bad, rep = la_mutate(so3(), MutationForm.from_brackets(3, {(0, 1): (1, 0, 0)}))
    assert rep.item("jacobi").witness == (1, 2, 3)


@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_mutation_is_invertible(vals):
    w = MutationForm.from_brackets(3, {(0, 1): vals[0:3], (0, 2): vals[3:6], (1, 2): vals[6:9]})
    for g in (so3(), e2(), sl2()):
        cand, _ = la_mutate(g, w)
        back, _ = la_mutate(cand, -w)
        assert back.C == g.C


@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_rank_nullity_on_ad(vals):
    g = LieAlgebra.from_brackets("r", 3, {(0, 1): vals[0:3], (0, 2): vals[3:6], (1, 2): vals[6:9]})
    if la_validate(g).passed:
        assert la_derivations(g)[1] == g.dim - la_center(g).dim


@given(st.sampled_from(sorted(NAMED_ALGEBRAS)), st.data())
def test_normalizer_contains_subalgebra(key, data):
    g = NAMED_ALGEBRAS[key]()
    v = [data.draw(st.integers(-2, 2)) for _ in range(g.dim)]
    if not any(v):
        return
    h = Subspace.span(g.dim, [v])  # lines are always subalgebras
    assert la_normalizer(g, h).contains_subspace(h)


def test_passing_klein_pair_has_trivial_center_and_self_normalizing_h():
    for key in ("so3", "aff1"):
        (entry,) = catalog(key).klein_pairs.values()
        p = entry.pair
        assert klein_check(p).passed
        assert la_center(p.g).dim == 0
        assert la_normalizer(p.g, p.h).same_as(p.h)
