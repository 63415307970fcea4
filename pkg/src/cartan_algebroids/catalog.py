"""Built-in definition documents.

Each entry is built from its mathematical description and admitted only
after the construction-time checks pass (action relations, chart axioms,
expected suite outcomes); the emitted text is the canonical serialization.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .algebroid import chart_validate
from .cartan import (
    FiberBracket,
    LinearConnection,
    fb_validate,
    flat_model,
    gauge_model,
    identity_suite,
    space_form_check,
)
from .connections import AConnection, is_symmetric
from .document import (
    DefinitionDocument,
    GeometryEntry,
    KleinPairEntry,
    SubspaceEntry,
    parse,
    serialize,
)
from .kernel import Polynomial
from .lie import NAMED_ALGEBRAS, KleinPair, LieAlgebra, MutationForm, Subspace, la_validate

ALIASES = {
    "euclidean2": "euclidean2-model",
    "affine1": "affine1-model",
    "so3-sphere": "sphere2-model",
}

# (pair name, subspace name, spanning coordinate indices) per algebra
_PAIRS = {
    "abelian2": ("line", "e1-line", [0]),
    "heis3": ("center-line", "e3-line", [2]),
    "sl2": ("E-line", "E-line", [1]),
    "so3": ("sphere", "e3-line", [2]),
    "e2": ("euclid", "rotations", [2]),
    "aff1": ("line", "dilations", [1]),
}


class CatalogError(KeyError):
    pass


class AdmissionError(RuntimeError):
    """A catalog entry failed its construction-time checks."""


def _require(report, what: str) -> None:
    if not report.passed:
        raise AdmissionError(f"{what}: {report.failed_ids()}")


def _add_algebra(doc: DefinitionDocument, key: str) -> KleinPair:
    g: LieAlgebra = NAMED_ALGEBRAS[key]()
    _require(la_validate(g), f"Jacobi for {key}")
    pair_name, sub_name, idx = _PAIRS[key]
    h = Subspace.coordinate(g.dim, idx, sub_name)
    doc.add("lieAlgebras", g.name, g)
    doc.add("subspaces", sub_name, SubspaceEntry(g.name, h))
    p = KleinPair(g, h, pair_name)
    doc.add("kleinPairs", pair_name, KleinPairEntry(g.name, sub_name, p))
    return p


def _add_geometry(doc, name, G, blaom_name=None, omega_name=None, D_name=None, fb_name=None):
    A = G.chart
    doc.add("charts", A.name, A)
    D = AConnection(A, G.D.Gamma, D_name or name)
    fb = FiberBracket(A, G.fb.f, fb_name or f"{name}-fb")
    doc.add("aConnections", D.name, D)
    doc.add("fiberBrackets", fb.name, fb)
    if G.blaom is not None:
        nc = LinearConnection(A, G.blaom.G, blaom_name or f"{name}-blaom")
        doc.add("linearConnections", nc.name, nc)
        blaom_name = nc.name
    doc.add("geometries", name, GeometryEntry(name, A.name, D.name, fb.name, blaom_name, omega_name))
    return D, fb


def _algebra_doc(key: str) -> DefinitionDocument:
    doc = DefinitionDocument()
    _add_algebra(doc, key)
    return doc


def _euclidean2() -> DefinitionDocument:
    doc = DefinitionDocument()
    p = _add_algebra(doc, "e2")
    m = 2
    x, y = Polynomial.var(m, 0), Polynomial.var(m, 1)
    one, zero = Polynomial.const(m, 1), Polynomial.zero(m)
    G = flat_model(p, [(one, zero), (zero, one), (-y, x)], "flat", chart_name="euclidean2")
    A = G.chart
    _require(chart_validate(A), "euclidean2 chart")
    D, fb = _add_geometry(doc, "flat", G, blaom_name="blaom")
    _require(identity_suite(D, fb), "flat Euclidean identities")

    # connection-level negative control: Γ^3_11 += x
    doc.add("aConnections", "corrupted", AConnection(A, D.with_entry(0, 0, 2, x).Gamma, "corrupted"))
    if is_symmetric(doc.a_connections["corrupted"]).passed:
        raise AdmissionError("corrupted D must fail DT = 0")
    doc.add("aConnections", "zero", AConnection(A, [[[0] * 3 for _ in range(3)] for _ in range(3)], "zero"))
    # a valid Lie bracket ({P1,P2} = J) that is not compatible with D
    bad = fb.with_entry(0, 1, 2, 1)
    bad = FiberBracket(A, bad.f, "so3-fb")
    _require(fb_validate(bad), "so3-fb Jacobi")
    doc.add("fiberBrackets", bad.name, bad)
    doc.add("geometries", "mismatched", GeometryEntry("mismatched", A.name, D.name, bad.name, "blaom"))
    # linear connection with ∇_{∂y} e2 = x e3: not flat
    Gp = [[[zero] * 3 for _ in range(3)] for _ in range(2)]
    Gp[1][1][2] = x
    doc.add("linearConnections", "perturbed", LinearConnection(A, Gp, "perturbed"))
    return doc


def _affine1() -> DefinitionDocument:
    doc = DefinitionDocument()
    p = _add_algebra(doc, "aff1")
    x = Polynomial.var(1, 0)
    G = flat_model(p, [(Polynomial.const(1, 1),), (x,)], "flat", chart_name="affine1")
    A = G.chart
    _require(chart_validate(A), "affine1 chart")
    D, fb = _add_geometry(doc, "flat", G, blaom_name="blaom")
    _require(identity_suite(D, fb), "flat affine identities")
    return doc


def stereographic_fields():
    """so3 fundamental fields on the stereographic chart, [V_i, V_j] = −{e_i, e_j}."""
    m = 2
    u, v = Polynomial.var(m, 0), Polynomial.var(m, 1)
    one = Polynomial.const(m, 1)
    h = Fraction(1, 2)
    return [
        (u * v, (one - u * u + v * v).scale(h)),
        ((-one - u * u + v * v).scale(h), -u * v),
        (-v, u),
    ]


def sphere_conformal_factor() -> Polynomial:
    u, v = Polynomial.var(2, 0), Polynomial.var(2, 1)
    return (Polynomial.const(2, 1) + u * u + v * v).scale(Fraction(1, 2))


def bump_conformal_factor() -> Polynomial:
    u = Polynomial.var(2, 0)
    return Polynomial.const(2, 1) + u * u


def _sphere2() -> DefinitionDocument:
    doc = DefinitionDocument()
    _add_algebra(doc, "e2")
    p_sphere = _add_algebra(doc, "so3")

    # the round sphere as a Cartan space form modelled on (e2, rotations)
    S = gauge_model(sphere_conformal_factor(), "sphere", chart_name="sphere")
    _require(chart_validate(S.chart), "sphere chart")
    _require(identity_suite(S.D, S.fb), "sphere identities")
    constant, omega, rep = space_form_check(S.D, S.fb)
    if not constant or omega is None or omega.is_zero():
        raise AdmissionError("sphere must be a space form with nonzero Ω")
    omega = MutationForm(omega.dim, omega.Omega, "omega")
    doc.add("mutationForms", "omega", omega)
    _add_geometry(doc, "sphere", S, omega_name="omega", D_name="sphere", fb_name="sphere-fb")

    # the flat Klein model: so3 acting on the stereographic chart
    F = flat_model(p_sphere, stereographic_fields(), "sphere-action", chart_name="sphere-action")
    _require(chart_validate(F.chart), "sphere action chart")
    _add_geometry(doc, "sphere-flat", F, blaom_name="sphere-action-blaom", D_name="sphere-action", fb_name="sphere-action-fb")

    # a non-constant-curvature surface on the same model
    B = gauge_model(bump_conformal_factor(), "bump", chart_name="bump")
    _require(chart_validate(B.chart), "bump chart")
    if space_form_check(B.D, B.fb)[0]:
        raise AdmissionError("bump surface must not be a space form")
    _add_geometry(doc, "bump", B, D_name="bump", fb_name="bump-fb")
    return doc


_BUILDERS = {
    **{key: (lambda key=key: _algebra_doc(key)) for key in _PAIRS},
    "euclidean2-model": _euclidean2,
    "affine1-model": _affine1,
    "sphere2-model": _sphere2,
}

NAMES = tuple(_BUILDERS)


def resolve(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in _BUILDERS:
        raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")
    return name


@lru_cache(maxsize=None)
def catalog_text(name: str) -> str:
    return serialize(_BUILDERS[resolve(name)]())


def catalog(name: str) -> DefinitionDocument:
    """A fresh parsed copy of the named catalog document."""
    return parse(catalog_text(resolve(name)))
