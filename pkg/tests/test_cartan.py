import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartan_algebroids.algebroid import (
    AlgebroidChart,
    action_algebroid,
    coordinate_field,
    section_bracket,
    section_sub,
)
from cartan_algebroids.cartan import (
    ITEM_IDS,
    FiberBracket,
    LinearConnection,
    ModelError,
    UnsupportedChartError,
    WellDefinednessError,
    blaom_compat_pullback_residual,
    blaom_compat_residual,
    blaom_from_D,
    blaom_pullback,
    d_from_blaom,
    flat_model,
    gauge_model,
    identity_suite,
    kappa_extract,
    kappa_tensor,
    linconn_curvature,
    linconn_is_flat,
    mutate_geometry,
    parallel_sections,
    sharpe_constancy,
    space_form_check,
    structure_from_parallel,
    theorem3_reconstruct,
    tractor_from_D,
    tractor_pullback,
)
from cartan_algebroids.catalog import bump_conformal_factor, catalog, sphere_conformal_factor, stereographic_fields
from cartan_algebroids.connections import (
    AConnection,
    HypothesisError,
    PreconditionError,
    conn_torsion,
    is_representation,
    random_polynomial,
    random_section,
)
from cartan_algebroids.kernel import Polynomial, ZeroTest
from cartan_algebroids.lie import KleinPair, LieAlgebra, MutationForm, Subspace, abelian, aff1, e2, la_center, so3
from cartan_algebroids.report import PASS, SKIPPED

SEEDS = st.integers(0, 10**6)


@pytest.fixture(scope="module")
def flat(euclid):
    return euclid.geometry("flat")


@pytest.fixture(scope="module")
def sphere(sphere_doc):
    return sphere_doc.geometry("sphere")


@pytest.fixture(scope="module")
def sphere_flat(sphere_doc):
    return sphere_doc.geometry("sphere-flat")


@pytest.fixture(scope="module")
def bump(sphere_doc):
    return sphere_doc.geometry("bump")


def _m0_bundle(g):
    A = AlgebroidChart("bundle", 0, g.dim, [()] * g.dim, [[[-c for c in r] for r in p] for p in g.C])
    D = AConnection(A, A.gamma)
    return A, D, FiberBracket.constant(A, g)


def _is_zero_array(arr):
    return all(not p for plane in arr for row in plane for p in row)


def _neg(C):
    return tuple(tuple(tuple(-c for c in r) for r in p) for p in C)


# tractor / Blaom connections


def test_tractor_equals_blaom_when_flat(flat, affine):
    for G in (flat, affine.geometry("flat")):
        assert tractor_from_D(G.D, G.fb).G == blaom_from_D(G.D).G


def test_blaom_of_flat_model_is_zero(flat):
    assert _is_zero_array(blaom_from_D(flat.D).G)
    assert blaom_from_D(flat.D).G == flat.blaom.G


def test_m0_connections_are_empty():
    A, D, fb = _m0_bundle(so3())
    assert tractor_from_D(D, fb).G == ()
    assert blaom_from_D(D).G == ()


def test_m0_d_from_blaom_is_the_bracket():
    A, D, fb = _m0_bundle(so3())
    assert d_from_blaom(LinearConnection.zero(A), A).Gamma == A.gamma


def test_tractor_needs_lift(sphere, sphere_flat):
    for G in (sphere, sphere_flat):
        with pytest.raises(UnsupportedChartError):
            tractor_from_D(G.D, G.fb)
        with pytest.raises(UnsupportedChartError):
            blaom_from_D(G.D)


def test_tractor_rejects_ill_defined(euclid):
    G = euclid.geometry("mismatched")
    with pytest.raises(WellDefinednessError) as exc:
        tractor_from_D(G.D, G.fb)
    assert not exc.value.report.passed


def test_blaom_rejects_non_canonical(euclid):
    with pytest.raises(WellDefinednessError):
        blaom_from_D(euclid.a_connections["corrupted"])


def test_sphere_blaom_flat_tractor_not(sphere):
    assert is_representation(blaom_pullback(sphere.D)).passed
    assert not is_representation(tractor_pullback(sphere.D, sphere.fb)).passed


def test_d_from_zero_blaom_gives_bracket_on_constants(euclid):
    A = euclid.charts["euclidean2"]
    D = d_from_blaom(LinearConnection.zero(A), A)
    from cartan_algebroids.connections import conn_apply

    for i, j in itertools.product(range(3), repeat=2):
        assert conn_apply(D, A.frame(i), A.frame(j)) == section_bracket(A, A.frame(i), A.frame(j))


def test_round_trip_on_flat_model(flat):
    assert blaom_from_D(d_from_blaom(flat.blaom)).G == flat.blaom.G
    assert d_from_blaom(blaom_from_D(flat.D)).Gamma == flat.D.Gamma


@given(seed=SEEDS)
def test_round_trip_random_linear_connections(seed):
    A = catalog("euclidean2").charts["euclidean2"]
    rng = random.Random(seed)
    G = [[[random_polynomial(2, 2, rng) for _ in range(3)] for _ in range(3)] for _ in range(2)]
    nc = LinearConnection(A, G)
    assert blaom_from_D(d_from_blaom(nc)).G == nc.G


def test_linconn_curvature_examples(euclid):
    A = euclid.charts["euclidean2"]
    R = linconn_curvature(LinearConnection.zero(A))
    assert all(not p for sec in itertools.chain.from_iterable(itertools.chain.from_iterable(R)) for p in sec)
    assert linconn_is_flat(euclid.linear_connections["blaom"]).passed
    assert not linconn_is_flat(euclid.linear_connections["perturbed"]).passed


# curvature form


def test_kappa_flat_is_zero(flat):
    assert kappa_extract(flat.D, flat.fb).is_zero()


def test_kappa_sphere_at_origin(sphere):
    k = kappa_extract(sphere.D, sphere.fb, point=(0, 0), U=(1, 0), V=(0, 1))
    assert k.value == (0, 0, -4)


def test_kappa_shift_invariance(sphere):
    from cartan_algebroids.cartan import kappa_at

    for pt in itertools.product(range(-2, 3), repeat=2):
        val, ok = kappa_at(sphere.D, sphere.fb, pt, (1, 2), (-1, 1))
        assert ok


def test_kappa_requires_transitive_point():
    # x d/dx vanishes at the origin
    x = Polynomial.var(1, 0)
    A = action_algebroid(abelian(1), [(x,)])
    D = AConnection(A, [[[0]]])
    fb = FiberBracket.constant(A, abelian(1))
    with pytest.raises(PreconditionError):
        kappa_extract(D, fb, point=(0,), U=(1,), V=(1,))


def test_sharpe_constancy(sphere, bump):
    rep = sharpe_constancy(sphere.D, sphere.fb)
    assert rep.passed
    assert rep.data["values"] == [(0, 0, -1), (0, 0, 0), (0, 0, 0)]
    assert not sharpe_constancy(bump.D, bump.fb).passed


# identity suite


def test_suite_flat_euclidean_symbolic(flat):
    rep = identity_suite(flat.D, flat.fb)
    assert rep.mode == "symbolic"
    assert [it.id for it in rep.items] == list(ITEM_IDS)
    assert all(it.status == PASS for it in rep.items)


def test_suite_sphere_grid(sphere, sphere_flat, bump):
    for G in (sphere, sphere_flat, bump):
        rep = identity_suite(G.D, G.fb)
        assert rep.passed, rep.render()
        assert rep.grid == 5
        assert all(it.status == PASS for it in rep.items)


def test_suite_pointwise_mode_agrees(flat):
    rep = identity_suite(flat.D, flat.fb, zt=ZeroTest("pointwise"))
    assert rep.passed and rep.mode == "pointwise"


def test_suite_corrupted_bracket(euclid):
    G = euclid.geometry("mismatched")
    rep = identity_suite(G.D, G.fb)
    assert rep.item("i-derivation").witness == (1, 1, 2)
    assert rep.item("ii-kernel-bracket").status == PASS
    statuses = {it.id: it.status for it in rep.items}
    assert statuses["iii-torsion-formula"] == "fail"
    assert statuses["ix-kernel-action"] == "fail"
    for item in ("iv-tractor-derivation", "v-tractor-curvature", "vi-bracket-from-tractor", "vii-difference-tensor"):
        assert statuses[item] == SKIPPED
    assert statuses["viii-blaom-compatibility"] == PASS


def test_suite_corrupted_bracket_on_sphere(sphere):
    # {e1,e3} changed: breaks Jacobi-compatibility with D
    bad = sphere.fb.with_entry(0, 2, 1, 2)
    rep = identity_suite(sphere.D, bad)
    assert "i-derivation" in rep.failed_ids() or "ii-kernel-bracket" in rep.failed_ids()


def _bent(flat, b1, b2):
    """Flat model plus beta ⊗ {w,·}: still well-defined, generally curved."""
    A = flat.chart
    x, y = A.coord(0), A.coord(1)
    beta = (b1, b2, -y * b1 + x * b2)
    (w,) = A.kernel_generators()
    adw = [flat.fb.apply(w, A.frame(j)) for j in range(3)]
    G = [[[flat.D.Gamma[i][j][k] + beta[i] * adw[j][k] for k in range(3)] for j in range(3)] for i in range(3)]
    return AConnection(A, G, "bent")


@given(seed=SEEDS)
def test_difference_tensor_identity(seed):
    flat = catalog("euclidean2").geometry("flat")
    rng = random.Random(seed)
    D = _bent(flat, random_polynomial(2, 1, rng), random_polynomial(2, 1, rng))
    A = D.chart
    lift = A.lift_sections()
    NT, NC = tractor_from_D(D, flat.fb), blaom_from_D(D)
    K = kappa_tensor(D, flat.fb)
    for a, j in itertools.product(range(2), range(3)):
        assert section_sub(NT.G[a][j], NC.G[a][j]) == K.apply(lift[a], A.frame(j))
    rep = identity_suite(D, flat.fb)
    # these hold for any D with D_s = -{s,.}; (v) and (viii) also need flatness
    for item in ("iii-torsion-formula", "iv-tractor-derivation", "vi-bracket-from-tractor", "vii-difference-tensor", "ix-kernel-action"):
        assert rep.item(item).status == PASS
    if is_representation(D).passed:
        assert rep.passed


def test_blaom_compatibility_random_sections(flat, sphere, rng):
    A = flat.chart
    for _ in range(5):
        U = tuple(random_polynomial(2, 1, rng) for _ in range(2))
        s, t = random_section(A, 1, rng), random_section(A, 1, rng)
        assert not any(blaom_compat_residual(flat.blaom, U, s, t))
    B = sphere.chart
    for _ in range(5):
        rho, s, t = (random_section(B, 1, rng) for _ in range(3))
        assert not any(blaom_compat_pullback_residual(sphere.D, rho, s, t))


# symmetric reconstruction


@pytest.mark.parametrize("key,geo", [("euclidean2", "flat"), ("affine1", "flat"), ("so3-sphere", "sphere-flat")])
def test_theorem3_returns_original_when_flat(key, geo):
    G = catalog(key).geometry(geo)
    fb, rep = theorem3_reconstruct(G.D)
    assert rep.passed
    assert fb.f == G.fb.f


def test_theorem3_sphere(sphere, sphere_doc):
    fb, rep = theorem3_reconstruct(sphere.D)
    assert rep.passed
    assert rep.item("jacobi").status == PASS and rep.item("bianchi").status == PASS
    assert fb.f != sphere.fb.f
    assert LieAlgebra("c", 3, fb.constants()).C == so3().C
    mutant, mrep = mutate_geometry(sphere.fb, sphere_doc.mutation_forms["omega"], sphere.D)
    assert mrep.passed and mutant.f == fb.f


def test_theorem3_refusals(bump, euclid):
    with pytest.raises(HypothesisError) as exc:
        theorem3_reconstruct(bump.D)
    assert "DT" in exc.value.hypothesis
    with pytest.raises(HypothesisError) as exc:
        theorem3_reconstruct(euclid.a_connections["corrupted"])
    assert exc.value.hypothesis == "representation"


# parallel sections


def test_parallel_examples(euclid):
    A = euclid.charts["euclidean2"]
    zero = parallel_sections(LinearConnection.zero(A), 0)
    assert set(zero) == {A.frame(i) for i in range(3)}
    assert len(parallel_sections(euclid.linear_connections["blaom"], 1)) == 3
    assert len(parallel_sections(euclid.linear_connections["perturbed"], 2)) < 3


def test_parallel_sections_are_parallel(euclid):
    from cartan_algebroids.cartan import linconn_apply

    nc = euclid.linear_connections["perturbed"]
    for s in parallel_sections(nc, 2):
        for a in range(2):
            assert not any(linconn_apply(nc, coordinate_field(2, a), s))


def test_structure_from_parallel_euclidean(euclid):
    A = euclid.charts["euclidean2"]
    frame = parallel_sections(euclid.linear_connections["blaom"], 1)
    C, rep = structure_from_parallel(A, frame)
    assert rep.passed and rep.item("action-bracket-formula").status == PASS
    assert la_center(LieAlgebra("A0", 3, C)).dim == 0
    assert tuple(tuple(tuple(c for c in r) for r in p) for p in C) == tuple(
        tuple(tuple(p.constant_value() for p in r) for r in q) for q in A.gamma
    )


def test_structure_from_parallel_sphere(sphere_doc):
    A = sphere_doc.charts["sphere-action"]
    frame = parallel_sections(sphere_doc.linear_connections["sphere-action-blaom"], 2)
    assert len(frame) == 3
    C, rep = structure_from_parallel(A, frame)
    assert rep.passed
    # so3 type: the constants are -so3, isomorphic through e -> -e
    assert tuple(tuple(tuple(r) for r in p) for p in C) == _neg(so3().C)


def test_structure_from_non_parallel_frame(euclid):
    A = euclid.charts["euclidean2"]
    x = A.coord(0)
    frame = [A.frame(0), A.section([0, x, 0]), A.frame(2)]
    C, rep = structure_from_parallel(A, frame)
    assert C is None
    assert rep.failed_ids() == ["closed-constant"]
    assert rep.item("action-bracket-formula").status == SKIPPED


# model constructors


def test_flat_model_affine():
    x = Polynomial.var(1, 0)
    G = flat_model(KleinPair(aff1(), Subspace.coordinate(2, [1])), [(Polynomial.const(1, 1),), (x,)])
    assert identity_suite(G.D, G.fb).passed
    assert kappa_extract(G.D, G.fb).is_zero()


def test_flat_model_sphere_action_is_flat():
    G = flat_model(KleinPair(so3(), Subspace.coordinate(3, [2])), stereographic_fields())
    assert _is_zero_array(kappa_tensor(G.D, G.fb).T)
    assert conn_torsion(G.D).T == G.chart.gamma


def test_flat_model_rejections():
    neg = [tuple(-p for p in V) for V in stereographic_fields()]
    # negated fields realize so3 itself, not the reversed constants
    with pytest.raises(ModelError):
        flat_model(KleinPair(so3(), Subspace.coordinate(3, [2])), neg)
    one, zero = Polynomial.const(2, 1), Polynomial.zero(2)
    x, y = Polynomial.var(2, 0), Polynomial.var(2, 1)
    with pytest.raises(ModelError):
        flat_model(KleinPair(e2(), Subspace.coordinate(3, [0])), [(one, zero), (zero, one), (-y, x)])


def test_gauge_model_flat_factor_is_euclidean():
    G = gauge_model(Polynomial.const(2, 1))
    constant, omega, _ = space_form_check(G.D, G.fb)
    assert constant and omega.is_zero()


def test_gauge_model_curvature_matches_gauss():
    S = gauge_model(sphere_conformal_factor())
    assert S.meta["gauss_curvature"] == Polynomial.const(2, 1)
    B = gauge_model(bump_conformal_factor())
    assert not B.meta["gauss_curvature"].is_constant()


# space forms and mutation


def test_space_form_examples(flat, sphere, bump):
    c, w, _ = space_form_check(flat.D, flat.fb)
    assert c and w.is_zero()
    c, w, _ = space_form_check(sphere.D, sphere.fb)
    assert c and not w.is_zero()
    assert w.Omega[0][1][2] == -1
    c, w, rep = space_form_check(bump.D, bump.fb)
    assert not c
    assert set(rep.failed_ids()) == {"omega-constant", "DT-zero"}


def test_mutation_examples(flat, sphere, sphere_doc):
    fb, rep = mutate_geometry(flat.fb, MutationForm.zero(3), flat.D)
    assert fb.f == flat.fb.f and rep.passed
    fb, rep = mutate_geometry(sphere.fb, MutationForm.zero(3), sphere.D)
    assert rep.failed_ids() == ["mutant-flatness"]
    fb, rep = mutate_geometry(sphere.fb, sphere_doc.mutation_forms["omega"], sphere.D)
    assert rep.passed
    w = MutationForm.from_brackets(3, {(0, 1): (1, 0, 0)})
    fb, rep = mutate_geometry(flat.fb, w)
    assert "jacobi" in rep.failed_ids()


def test_mutation_needs_constant_bracket(sphere):
    u = sphere.chart.coord(0)
    fb = sphere.fb.with_entry(0, 1, 2, u)
    with pytest.raises(PreconditionError):
        mutate_geometry(fb, MutationForm.zero(3))
