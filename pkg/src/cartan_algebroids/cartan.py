"""Fiber brackets, tractor and Blaom connections, curvature, and model geometries.

Two derived A-connections carry most of the lift-free checks:

* the tractor pullback  D^T_σ = D_σ + {σ, ·}   (so ∇ᵀ_{Πσ} = D^T_σ),
* the Blaom pullback    D*                      (so ∇ᶜ_{Πσ} = D*_σ).

Both are well defined on the base exactly when D_s = −{s,·} and D extends
the canonical representation, respectively; then identities for ∇ᵀ and
∇ᶜ can be read off at algebroid level with polynomial residuals even when
the chart carries no polynomial lift.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .algebroid import (
    AlgebroidChart,
    Section,
    VectorField,
    action_algebroid,
    anchor_apply,
    chart_validate,
    coordinate_field,
    kernel_at_point,
    section_add,
    section_bracket,
    section_eval,
    section_sub,
    vf_apply,
    vf_bracket,
)
from .connections import (
    AConnection,
    HypothesisError,
    PreconditionError,
    TorsionTensor,
    bianchi_residual,
    conn_apply,
    conn_dual,
    conn_torsion,
    curvature_apply,
    extends_canonical,
    is_representation,
    is_symmetric,
    random_polynomial,
)
from .kernel import SYMBOLIC, Polynomial, StructuralError, ZeroTest, grid_points
from .lie import KleinPair, LieAlgebra, MutationForm, _one_based, la_validate
from .report import SKIPPED, CheckItem, Report, check


class UnsupportedChartError(PreconditionError):
    """The operation needs a polynomial lift the chart does not have."""


class WellDefinednessError(PreconditionError):
    """A formula that should not depend on a choice of lift does."""

    def __init__(self, message: str, report: Report):
        self.report = report
        super().__init__(message)


class ModelError(ValueError):
    """Inputs do not realize the requested model."""

    def __init__(self, message: str, report: Report | None = None):
        self.report = report
        super().__init__(message)


# --------------------------------------------------------------------------
# fiber brackets


def _poly_array(A: AlgebroidChart, arr, shape) -> tuple:
    def freeze(x, depth):
        if depth == len(shape):
            p = x if isinstance(x, Polynomial) else A.const(x)
            if p.nvars != A.base_dim:
                raise StructuralError("coefficient polynomial on the wrong chart")
            return p
        x = tuple(x)
        if len(x) != shape[depth]:
            raise StructuralError("array shape " + "x".join(map(str, shape)) + " expected")
        return tuple(freeze(y, depth + 1) for y in x)

    return freeze(arr, 0)


@dataclass(frozen=True)
class FiberBracket:
    """{e_i, e_j} = sum_k f[i][j][k] e_k, pointwise on the chart."""

    chart: AlgebroidChart
    f: tuple
    name: str = ""

    def __post_init__(self):
        r = self.chart.rank
        object.__setattr__(self, "f", _poly_array(self.chart, self.f, (r, r, r)))

    @classmethod
    def constant(cls, chart: AlgebroidChart, g: LieAlgebra, name: str = "") -> "FiberBracket":
        if g.dim != chart.rank:
            raise StructuralError("algebra dimension differs from chart rank")
        return cls(chart, g.C, name or g.name)

    def apply(self, s: Section, t: Section) -> Section:
        return TorsionTensor(self.chart, self.f).apply(s, t)

    def is_constant(self) -> bool:
        return all(p.is_constant() for plane in self.f for row in plane for p in row)

    def constants(self) -> list:
        if not self.is_constant():
            raise PreconditionError("fiber bracket has non-constant structure functions")
        return [[[p.constant_value() for p in row] for row in plane] for plane in self.f]

    def with_entry(self, i: int, j: int, k: int, delta) -> "FiberBracket":
        """Change {e_i,e_j}^k by delta, keeping antisymmetry."""
        f = [[list(row) for row in plane] for plane in self.f]
        f[i][j][k] = f[i][j][k] + delta
        f[j][i][k] = f[j][i][k] - delta
        return FiberBracket(self.chart, f, self.name)


def fb_validate(fb: FiberBracket, zt: ZeroTest = SYMBOLIC) -> Report:
    """Antisymmetry and Jacobi as polynomial identities."""
    r = fb.chart.rank
    items = []
    witness = residual = None
    for i, j in itertools.combinations_with_replacement(range(r), 2):
        res = tuple(fb.f[i][j][k] + fb.f[j][i][k] for k in range(r))
        if not zt.all_zero(res):
            witness, residual = _one_based(i, j), res
            break
    items.append(check("antisymmetry", witness is None, residual, witness, zt.mode))
    witness = residual = None
    A = fb.chart
    for i, j, k in itertools.combinations(range(r), 3):
        ei, ej, ek = A.frame(i), A.frame(j), A.frame(k)
        total = section_add(
            section_add(fb.apply(ei, fb.apply(ej, ek)), fb.apply(ej, fb.apply(ek, ei))),
            fb.apply(ek, fb.apply(ei, ej)),
        )
        if not zt.all_zero(total):
            witness, residual = _one_based(i, j, k), total
            break
    items.append(check("jacobi", witness is None, residual, witness, zt.mode))
    return Report(f"fiber bracket {fb.name}".strip(), tuple(items), zt.mode)


def fb_from_torsion(D: AConnection, name: str = "") -> FiberBracket:
    """{σ,τ}' = −T(σ,τ)."""
    T = conn_torsion(D)
    return FiberBracket(D.chart, (-T).T, name)


# --------------------------------------------------------------------------
# linear connections over the chart


@dataclass(frozen=True)
class LinearConnection:
    """∇_{∂_a} e_j = sum_k G[a][j][k] e_k."""

    chart: AlgebroidChart
    G: tuple
    name: str = ""

    def __post_init__(self):
        A = self.chart
        object.__setattr__(self, "G", _poly_array(A, self.G, (A.base_dim, A.rank, A.rank)))

    @classmethod
    def zero(cls, chart: AlgebroidChart, name: str = "") -> "LinearConnection":
        m, r = chart.base_dim, chart.rank
        return cls(chart, [[[0] * r for _ in range(r)] for _ in range(m)], name)


def linconn_apply(nc: LinearConnection, U: VectorField, s: Section) -> Section:
    """∇_U σ = U^a (∂_a σ + σ^j G[a][j])."""
    A = nc.chart
    out = [A.zero() for _ in range(A.rank)]
    for a, Ua in enumerate(U):
        if not Ua:
            continue
        for k in range(A.rank):
            term = s[k].partial(a)
            for j, sj in enumerate(s):
                if sj and nc.G[a][j][k]:
                    term = term + sj * nc.G[a][j][k]
            out[k] = out[k] + Ua * term
    return tuple(out)


def linconn_curvature(nc: LinearConnection) -> list:
    """R[a][b][j] = R(∂_a, ∂_b) e_j as a section."""
    A = nc.chart
    m, r = A.base_dim, A.rank
    G = nc.G
    out = []
    for a in range(m):
        plane = []
        for b in range(m):
            row = []
            for j in range(r):
                comp = []
                for k in range(r):
                    v = G[b][j][k].partial(a) - G[a][j][k].partial(b)
                    for p in range(r):
                        v = v + G[b][j][p] * G[a][p][k] - G[a][j][p] * G[b][p][k]
                    comp.append(v)
                row.append(tuple(comp))
            plane.append(row)
        out.append(plane)
    return out


def linconn_is_flat(nc: LinearConnection, zt: ZeroTest = SYMBOLIC) -> Report:
    R = linconn_curvature(nc)
    m, r = nc.chart.base_dim, nc.chart.rank
    witness = residual = None
    for a, b in itertools.combinations(range(m), 2):
        for j in range(r):
            if not zt.all_zero(R[a][b][j]):
                witness, residual = _one_based(a, b, j), R[a][b][j]
                break
        if witness:
            break
    return Report(
        f"flat {nc.name}".strip(), (check("curvature-zero", witness is None, residual, witness, zt.mode),), zt.mode
    )


def _require_lift(A: AlgebroidChart, lift=None) -> tuple:
    lift = lift if lift is not None else A.lift_sections()
    if lift is None:
        raise UnsupportedChartError(f"chart {A.name!r} has no polynomial lift")
    return tuple(lift)


def kernel_action_check(D: AConnection, fb: FiberBracket, zt: ZeroTest = SYMBOLIC) -> Report:
    """D_s σ + {s, σ} = 0 for kernel generators s and frame sections σ."""
    A = D.chart
    witness = residual = None
    for n, s in enumerate(A.kernel_generators()):
        for j in range(A.rank):
            e = A.frame(j)
            res = section_add(conn_apply(D, s, e), fb.apply(s, e))
            if not zt.all_zero(res):
                witness, residual = (n + 1, j + 1), res
                break
        if witness:
            break
    return Report(
        "kernel-action",
        (check("kernel-action", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


def tractor_from_D(D: AConnection, fb: FiberBracket, lift=None, zt: ZeroTest = SYMBOLIC) -> LinearConnection:
    """∇ᵀ_{∂_a} e_j = D_{λ_a} e_j + {λ_a, e_j}."""
    A = D.chart
    lift = _require_lift(A, lift) if A.base_dim else ()
    rep = kernel_action_check(D, fb, zt)
    if not rep.passed:
        raise WellDefinednessError("D_s + {s,·} does not vanish on the kernel; ∇ᵀ would depend on the lift", rep)
    G = [
        [section_add(conn_apply(D, lam, A.frame(j)), fb.apply(lam, A.frame(j))) for j in range(A.rank)]
        for lam in lift
    ]
    return LinearConnection(A, G, "tractor")


def blaom_from_D(D: AConnection, lift=None, zt: ZeroTest = SYMBOLIC) -> LinearConnection:
    """∇ᶜ_{∂_a} e_j = D_{e_j} λ_a − ⟦e_j, λ_a⟧."""
    A = D.chart
    lift = _require_lift(A, lift) if A.base_dim else ()
    rep = extends_canonical(D, zt=zt)
    if not rep.passed:
        raise WellDefinednessError("D does not extend the canonical representation; ∇ᶜ would depend on the lift", rep)
    G = [
        [section_sub(conn_apply(D, A.frame(j), lam), section_bracket(A, A.frame(j), lam)) for j in range(A.rank)]
        for lam in lift
    ]
    return LinearConnection(A, G, "blaom")


def d_from_blaom(nc: LinearConnection, A: AlgebroidChart | None = None, name: str = "") -> AConnection:
    """D_{e_i} e_j = ∇ᶜ_{Π(e_j)} e_i + ⟦e_i, e_j⟧.

    On a zero-anchor chart the first term is absent and D_{e_i} e_j = γ_ij.
    """
    A = A or nc.chart
    if nc.chart != A:
        raise StructuralError("linear connection lives on another chart")
    r, m = A.rank, A.base_dim
    Gamma = []
    for i in range(r):
        plane = []
        for j in range(r):
            row = []
            for k in range(r):
                v = A.gamma[i][j][k]
                for a in range(m):
                    if A.anchor[j][a]:
                        v = v + A.anchor[j][a] * nc.G[a][i][k]
                row.append(v)
            plane.append(row)
        Gamma.append(plane)
    return AConnection(A, Gamma, name or "D")


def tractor_pullback(D: AConnection, fb: FiberBracket) -> AConnection:
    """D^T_σ = D_σ + {σ,·}; equals ∇ᵀ_{Πσ} when D_s = −{s,·} on the kernel."""
    r = D.chart.rank
    G = [[[D.Gamma[i][j][k] + fb.f[i][j][k] for k in range(r)] for j in range(r)] for i in range(r)]
    return AConnection(D.chart, G, "tractor-pullback")


def blaom_pullback(D: AConnection) -> AConnection:
    """∇ᶜ_{Πσ} τ = D_τ σ − ⟦τ,σ⟧ = D*_σ τ."""
    out = conn_dual(D)
    return AConnection(out.chart, out.Gamma, "blaom-pullback")


# --------------------------------------------------------------------------
# curvature form


def kappa_tensor(D: AConnection, fb: FiberBracket) -> TorsionTensor:
    """K(σ,τ) = T(σ,τ) + {σ,τ}; κ(Πσ,Πτ) = K(σ,τ) when K kills the kernel."""
    T = conn_torsion(D)
    r = D.chart.rank
    return TorsionTensor(
        D.chart, [[[T.T[i][j][k] + fb.f[i][j][k] for k in range(r)] for j in range(r)] for i in range(r)]
    )


def kappa_well_defined(D: AConnection, fb: FiberBracket, zt: ZeroTest = SYMBOLIC) -> Report:
    A = D.chart
    K = kappa_tensor(D, fb)
    witness = residual = None
    for n, s in enumerate(A.kernel_generators()):
        for j in range(A.rank):
            res = K.apply(s, A.frame(j))
            if not zt.all_zero(res):
                witness, residual = (n + 1, j + 1), res
                break
        if witness:
            break
    return Report(
        "kappa-well-defined",
        (check("kappa-kills-kernel", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


@dataclass(frozen=True)
class CurvatureForm:
    """κ either as polynomials kappa[a][b] (sections) or as one pointwise value."""

    chart: AlgebroidChart
    kappa: tuple | None = None
    point: tuple | None = None
    U: tuple | None = None
    V: tuple | None = None
    value: tuple | None = None

    @property
    def symbolic(self) -> bool:
        return self.kappa is not None

    def apply(self, U: VectorField, V: VectorField) -> Section:
        if self.kappa is None:
            raise PreconditionError("pointwise curvature record has a single value only")
        A = self.chart
        out = A.zero_section()
        for a, Ua in enumerate(U):
            for b, Vb in enumerate(V):
                if Ua and Vb:
                    out = section_add(out, tuple(Ua * Vb * c for c in self.kappa[a][b]))
        return out

    def is_zero(self, zt: ZeroTest = SYMBOLIC) -> bool:
        if self.kappa is not None:
            return all(zt.all_zero(s) for row in self.kappa for s in row)
        return not any(self.value)


def point_section(A: AlgebroidChart, x0, U) -> tuple[Fraction, ...]:
    """Constant coefficients c with Π(c)(x0) = U (exact solve)."""
    mat = A.anchor_matrix_at(x0)
    if linalg.rank(mat, A.rank) < A.base_dim:
        raise PreconditionError(f"anchor not surjective at {tuple(map(str, x0))}")
    sol = linalg.solve(mat, [Fraction(u) for u in U], A.rank)
    assert sol is not None
    return sol


def _eval_K(K: TorsionTensor, x0, c, d) -> tuple[Fraction, ...]:
    r = K.chart.rank
    out = [Fraction(0)] * r
    for i, ci in enumerate(c):
        if not ci:
            continue
        for j, dj in enumerate(d):
            if not dj:
                continue
            for k in range(r):
                p = K.T[i][j][k]
                if p:
                    out[k] += ci * dj * p.eval(x0)
    return tuple(out)


def kappa_at(D: AConnection, fb: FiberBracket, x0, U, V, check_shift: bool = True) -> tuple:
    """κ(U,V) at x0 from constant sections; also returns whether kernel shifts agree."""
    A = D.chart
    K = kappa_tensor(D, fb)
    c = point_section(A, x0, U)
    d = point_section(A, x0, V)
    val = _eval_K(K, x0, c, d)
    ok = True
    if check_shift:
        for s in kernel_at_point(A, x0):
            c2 = tuple(x + y for x, y in zip(c, s))
            d2 = tuple(x + y for x, y in zip(d, s))
            if _eval_K(K, x0, c2, d) != val or _eval_K(K, x0, c, d2) != val:
                ok = False
    return val, ok


def kappa_extract(
    D: AConnection,
    fb: FiberBracket,
    point=None,
    U=None,
    V=None,
    lift=None,
    zt: ZeroTest = SYMBOLIC,
) -> CurvatureForm:
    """κ(U,V) = T(σ,τ) + {σ,τ} with Π(σ)=U, Π(τ)=V.

    Without ``point`` a polynomial lift is used and κ is returned as
    polynomials; with ``point`` the sections are exact constant solutions at
    that point and the single value κ(U,V)(point) is returned.  Either way,
    shifting the sections by kernel elements must not change the result.
    """
    A = D.chart
    if point is not None:
        m = A.base_dim
        U = tuple(U) if U is not None else tuple(int(a == 0) for a in range(m))
        V = tuple(V) if V is not None else tuple(int(a == 1) for a in range(m))
        val, ok = kappa_at(D, fb, tuple(Fraction(x) for x in point), U, V)
        if not ok:
            raise WellDefinednessError(
                "κ changes when a section is shifted by a kernel element",
                Report("kappa", (check("kernel-shift", False, witness=tuple(point), mode="pointwise"),), "pointwise"),
            )
        return CurvatureForm(A, None, tuple(point), U, V, val)
    lift = _require_lift(A, lift)
    rep = kappa_well_defined(D, fb, zt)
    if not rep.passed:
        raise WellDefinednessError("κ depends on the choice of sections", rep)
    K = kappa_tensor(D, fb)
    kappa = tuple(tuple(K.apply(la, lb) for lb in lift) for la in lift)
    return CurvatureForm(A, kappa)


# --------------------------------------------------------------------------
# identity suite


ITEM_IDS = (
    "i-derivation",
    "ii-kernel-bracket",
    "iii-torsion-formula",
    "iv-tractor-derivation",
    "v-tractor-curvature",
    "vi-bracket-from-tractor",
    "vii-difference-tensor",
    "viii-blaom-compatibility",
    "ix-kernel-action",
)


def _first_failure(cases, zt: ZeroTest):
    for witness, res in cases:
        if not zt.all_zero(res):
            return witness, res
    return None, None


def _item(item_id, cases, zt: ZeroTest, note=None):
    witness, residual = _first_failure(cases, zt)
    return check(item_id, witness is None, residual, witness, zt.mode, note)


def _derivation_cases(conn: AConnection, fb: FiberBracket):
    A = conn.chart
    r = A.rank
    for l in range(r):
        el = A.frame(l)
        for i, j in itertools.combinations(range(r), 2):
            ei, ej = A.frame(i), A.frame(j)
            lhs = conn_apply(conn, el, fb.apply(ei, ej))
            rhs = section_add(fb.apply(conn_apply(conn, el, ei), ej), fb.apply(ei, conn_apply(conn, el, ej)))
            yield _one_based(l, i, j), section_sub(lhs, rhs)


def _kernel_bracket_cases(A: AlgebroidChart, fb: FiberBracket):
    gens = A.kernel_generators()
    for (n1, s), (n2, t) in itertools.combinations_with_replacement(list(enumerate(gens)), 2):
        yield (n1 + 1, n2 + 1), section_add(section_bracket(A, s, t), fb.apply(s, t))


def _kernel_action_cases(D: AConnection, fb: FiberBracket):
    A = D.chart
    for n, s in enumerate(A.kernel_generators()):
        for j in range(A.rank):
            e = A.frame(j)
            yield (n + 1, j + 1), section_add(conn_apply(D, s, e), fb.apply(s, e))


def _linconn_derivation_cases(nc: LinearConnection, fb: FiberBracket):
    A = nc.chart
    for a in range(A.base_dim):
        U = coordinate_field(A.base_dim, a)
        for j, k in itertools.combinations(range(A.rank), 2):
            ej, ek = A.frame(j), A.frame(k)
            lhs = linconn_apply(nc, U, fb.apply(ej, ek))
            rhs = section_add(fb.apply(linconn_apply(nc, U, ej), ek), fb.apply(ej, linconn_apply(nc, U, ek)))
            yield _one_based(a, j, k), section_sub(lhs, rhs)


def blaom_compat_residual(nc: LinearConnection, U: VectorField, s: Section, t: Section) -> Section:
    """∇_U⟦σ,τ⟧ − ⟦∇_Uσ,τ⟧ − ⟦σ,∇_Uτ⟧ − ∇_{∇*_τU}σ + ∇_{∇*_σU}τ,
    with ∇*_σU = Π(∇_Uσ) + [Π(σ),U]."""
    A = nc.chart

    def star(x):
        return tuple(
            p + q for p, q in zip(anchor_apply(A, linconn_apply(nc, U, x)), vf_bracket(anchor_apply(A, x), U))
        )

    out = linconn_apply(nc, U, section_bracket(A, s, t))
    out = section_sub(out, section_bracket(A, linconn_apply(nc, U, s), t))
    out = section_sub(out, section_bracket(A, s, linconn_apply(nc, U, t)))
    out = section_sub(out, linconn_apply(nc, star(t), s))
    return section_add(out, linconn_apply(nc, star(s), t))


def blaom_compat_pullback_residual(D: AConnection, rho: Section, s: Section, t: Section) -> Section:
    """The same identity with U = Π(ρ) and ∇ replaced by its pullback D*:
    D*_ρ⟦σ,τ⟧ − ⟦D*_ρσ,τ⟧ − ⟦σ,D*_ρτ⟧ − D*_{D_τρ}σ + D*_{D_σρ}τ."""
    A = D.chart
    Ds = conn_dual(D)
    out = conn_apply(Ds, rho, section_bracket(A, s, t))
    out = section_sub(out, section_bracket(A, conn_apply(Ds, rho, s), t))
    out = section_sub(out, section_bracket(A, s, conn_apply(Ds, rho, t)))
    out = section_sub(out, conn_apply(Ds, conn_apply(D, t, rho), s))
    return section_add(out, conn_apply(Ds, conn_apply(D, s, rho), t))


def _grid_failure(A: AlgebroidChart, grid: int, per_point):
    """Run per_point(x0) -> iterable of (witness, lhs, rhs) exact vectors; first mismatch."""
    for x0 in grid_points(A.base_dim, grid):
        for witness, lhs, rhs in per_point(x0):
            if tuple(lhs) != tuple(rhs):
                diff = tuple(a - b for a, b in zip(lhs, rhs))
                return (tuple(x0), witness), diff
    return None, None


def identity_suite(
    D: AConnection,
    fb: FiberBracket,
    lift=None,
    zt: ZeroTest = SYMBOLIC,
    grid: int | None = None,
) -> Report:
    """The nine self-representation / tractor / Blaom identities.

    With a polynomial lift every item is a polynomial residual.  Without
    one, items (iii), (v), (vi), (vii) are evaluated exactly at the points
    of a product grid using constant sections solved at each point, and
    (iv), (viii) are checked through the tractor and Blaom pullbacks.
    Items needing ∇ᵀ are skipped when D_s + {s,·} or κ fails to kill the
    kernel (∇ᵀ is then not defined); likewise ∇ᶜ items when D does not
    extend the canonical representation.
    """
    A = D.chart
    if fb.chart != A:
        raise StructuralError("connection and fiber bracket live on different charts")
    r, m = A.rank, A.base_dim
    grid = grid or zt.grid
    lift = lift if lift is not None else A.lift_sections()
    if m == 0:
        lift = ()
    symbolic = lift is not None
    items = [
        _item("i-derivation", _derivation_cases(D, fb), zt),
        _item("ii-kernel-bracket", _kernel_bracket_cases(A, fb), zt),
    ]
    tractor_ok = kappa_well_defined(D, fb, zt).passed and kernel_action_check(D, fb, zt).passed
    blaom_ok = extends_canonical(D, zt=zt).passed
    K = kappa_tensor(D, fb)
    grid_note = f"no polynomial lift: exact evaluation on the {grid}^{m} grid"

    def skipped(item_id, why):
        return CheckItem(item_id, SKIPPED, mode=zt.mode, note=why)

    no_tractor = "∇ᵀ undefined: D_s + {s,·} or κ does not vanish on the kernel"
    no_blaom = "∇ᶜ undefined: D does not extend the canonical representation"

    if not tractor_ok:
        cases = (
            ((n + 1, j + 1), K.apply(s, A.frame(j)))
            for n, s in enumerate(A.kernel_generators())
            for j in range(r)
        )
        items.append(_item("iii-torsion-formula", cases, zt, note="κ(Π·,Π·) must kill the kernel"))
        items += [skipped(k, no_tractor) for k in ITEM_IDS[3:6]]
    elif symbolic:
        kap = kappa_extract(D, fb, lift=lift, zt=zt)
        nT = tractor_from_D(D, fb, lift, zt)
        T = conn_torsion(D)
        anchor = A.anchor

        def kappa_frame(i, j):
            return kap.apply(anchor[i], anchor[j])

        items.append(
            _item(
                "iii-torsion-formula",
                (
                    (_one_based(i, j), section_sub(tuple(T.T[i][j]), section_sub(kappa_frame(i, j), tuple(fb.f[i][j]))))
                    for i, j in itertools.combinations(range(r), 2)
                ),
                zt,
            )
        )
        items.append(_item("iv-tractor-derivation", _linconn_derivation_cases(nT, fb), zt))
        RT = linconn_curvature(nT)
        items.append(
            _item(
                "v-tractor-curvature",
                (
                    (_one_based(a, b, j), section_sub(RT[a][b][j], fb.apply(kap.kappa[a][b], A.frame(j))))
                    for a, b in itertools.combinations(range(m), 2)
                    for j in range(r)
                ),
                zt,
            )
        )

        def vi_cases():
            for i, j in itertools.combinations(range(r), 2):
                ei, ej = A.frame(i), A.frame(j)
                lhs = section_sub(
                    section_sub(linconn_apply(nT, anchor[i], ej), linconn_apply(nT, anchor[j], ei)),
                    section_bracket(A, ei, ej),
                )
                yield _one_based(i, j), section_sub(lhs, section_add(tuple(fb.f[i][j]), kappa_frame(i, j)))

        items.append(_item("vi-bracket-from-tractor", vi_cases(), zt))
    else:
        pw = "pointwise"
        DT = tractor_pullback(D, fb)

        def const_section(c):
            return tuple(A.const(x) for x in c)

        def iii_point(x0):
            Tx = conn_torsion(D)
            for i, j in itertools.combinations(range(r), 2):
                Ui = tuple(p.eval(x0) for p in A.anchor[i])
                Uj = tuple(p.eval(x0) for p in A.anchor[j])
                val, ok = kappa_at(D, fb, x0, Ui, Uj)
                T_ij = section_eval(tuple(Tx.T[i][j]), x0)
                f_ij = section_eval(tuple(fb.f[i][j]), x0)
                expect = tuple(v - f for v, f in zip(val, f_ij)) if ok else (None,) * r
                yield _one_based(i, j), T_ij, expect

        def v_point(x0):
            lam = [point_section(A, x0, tuple(int(b == a) for b in range(m))) for a in range(m)]
            for a, b in itertools.combinations(range(m), 2):
                ca, cb = const_section(lam[a]), const_section(lam[b])
                kab = const_section(_eval_K(K, x0, lam[a], lam[b]))
                for j in range(r):
                    lhs = section_eval(curvature_apply(DT, ca, cb, A.frame(j)), x0)
                    rhs = section_eval(fb.apply(kab, A.frame(j)), x0)
                    yield _one_based(a, b, j), lhs, rhs

        def vi_point(x0):
            for i, j in itertools.combinations(range(r), 2):
                ci = const_section(point_section(A, x0, [p.eval(x0) for p in A.anchor[i]]))
                cj = const_section(point_section(A, x0, [p.eval(x0) for p in A.anchor[j]]))
                ei, ej = A.frame(i), A.frame(j)
                lhs = section_sub(
                    section_sub(conn_apply(DT, ci, ej), conn_apply(DT, cj, ei)), section_bracket(A, ei, ej)
                )
                kij = _eval_K(K, x0, section_eval(ci, x0), section_eval(cj, x0))
                rhs = tuple(fv + kv for fv, kv in zip(section_eval(tuple(fb.f[i][j]), x0), kij))
                yield _one_based(i, j), section_eval(lhs, x0), rhs

        witness, residual = _grid_failure(A, grid, iii_point)
        items.append(
            check("iii-torsion-formula", witness is None, residual, witness, pw, grid_note + "; κ kernel-shift checked")
        )
        items.append(
            _item("iv-tractor-derivation", _derivation_cases(DT, fb), zt, note="through the tractor pullback D + {σ,·}")
        )
        for item_id, fn in (("v-tractor-curvature", v_point), ("vi-bracket-from-tractor", vi_point)):
            witness, residual = _grid_failure(A, grid, fn)
            items.append(check(item_id, witness is None, residual, witness, pw, grid_note))

    if not (tractor_ok and blaom_ok):
        items.append(skipped("vii-difference-tensor", no_tractor if not tractor_ok else no_blaom))
    elif symbolic:
        nC = blaom_from_D(D, lift, zt)
        items.append(
            _item(
                "vii-difference-tensor",
                (
                    (
                        _one_based(a, j),
                        section_sub(section_sub(nT.G[a][j], nC.G[a][j]), kap.apply(coordinate_field(m, a), A.anchor[j])),
                    )
                    for a in range(m)
                    for j in range(r)
                ),
                zt,
            )
        )
    else:
        Dstar = conn_dual(D)

        def vii_point(x0):
            lam = [point_section(A, x0, tuple(int(b == a) for b in range(m))) for a in range(m)]
            for a in range(m):
                ca = const_section(lam[a])
                for j in range(r):
                    ej = A.frame(j)
                    lhs = section_eval(section_sub(conn_apply(DT, ca, ej), conn_apply(Dstar, ca, ej)), x0)
                    yield _one_based(a, j), lhs, _eval_K(K, x0, lam[a], section_eval(ej, x0))

        witness, residual = _grid_failure(A, grid, vii_point)
        items.append(check("vii-difference-tensor", witness is None, residual, witness, "pointwise", grid_note))

    if not blaom_ok:
        items.append(skipped("viii-blaom-compatibility", no_blaom))
    elif symbolic:
        nC = blaom_from_D(D, lift, zt)
        items.append(
            _item(
                "viii-blaom-compatibility",
                (
                    (_one_based(a, i, j), blaom_compat_residual(nC, coordinate_field(m, a), A.frame(i), A.frame(j)))
                    for a in range(m)
                    for i, j in itertools.combinations(range(r), 2)
                ),
                zt,
                note="checked on coordinate fields and frame sections",
            )
        )
    else:
        items.append(
            _item(
                "viii-blaom-compatibility",
                (
                    (_one_based(l, i, j), blaom_compat_pullback_residual(D, A.frame(l), A.frame(i), A.frame(j)))
                    for l in range(r)
                    for i, j in itertools.combinations(range(r), 2)
                ),
                zt,
                note="through the Blaom pullback D* on frame sections",
            )
        )
    items.append(_item("ix-kernel-action", _kernel_action_cases(D, fb), zt))
    mode = zt.mode if symbolic else "mixed"
    return Report(f"identities {D.name}".strip(), tuple(items), mode, None if symbolic else grid)


# --------------------------------------------------------------------------
# symmetric reconstruction, parallel sections


def theorem3_reconstruct(D: AConnection, zt: ZeroTest = SYMBOLIC) -> tuple[FiberBracket, Report]:
    """Set {σ,τ}' = −T(σ,τ) for a flat, canonical-extending D with DT = 0."""
    for name, rep in (
        ("representation", is_representation(D, zt)),
        ("extends-canonical", extends_canonical(D, zt=zt)),
        ("symmetric (DT = 0)", is_symmetric(D, zt)),
    ):
        if not rep.passed:
            raise HypothesisError(name, rep)
    A = D.chart
    fb = fb_from_torsion(D, "theorem3")
    bianchi = bianchi_residual(D, zt)
    items = [
        check("bianchi", bianchi.passed, bianchi.items[0].residual, bianchi.items[0].witness, zt.mode),
    ]
    items.extend(fb_validate(fb, zt).items)
    items.append(_item("kernel-restriction", _kernel_bracket_cases(A, fb), zt))
    items.append(_item("derivation", _derivation_cases(D, fb), zt))
    items.append(_item("kernel-action", _kernel_action_cases(D, fb), zt))
    return fb, Report(f"theorem3 {D.name}".strip(), tuple(items), zt.mode)


def _monomials(m: int, d: int) -> list[tuple[int, ...]]:
    return [e for e in itertools.product(range(d + 1), repeat=m) if sum(e) <= d]


def parallel_sections(nc: LinearConnection, max_degree: int) -> list[Section]:
    """Basis of the ∇-parallel sections with polynomial coefficients of degree ≤ d."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    A = nc.chart
    m, r = A.base_dim, A.rank
    mons = _monomials(m, max_degree)
    nunk = r * len(mons)
    # column index of unknown (k, monomial)
    basis_secs = []
    for k in range(r):
        for e in mons:
            s = [A.zero()] * r
            s[k] = Polynomial.monomial(e) if m else A.const(1)
            basis_secs.append(tuple(s))
    images = [
        [linconn_apply(nc, coordinate_field(m, a), s) for a in range(m)] for s in basis_secs
    ]
    keys = set()
    for img in images:
        for sec in img:
            for p in sec:
                keys.update(p.monomials())
    keys = sorted(keys)
    rows = []
    for a in range(m):
        for k in range(r):
            for mono in keys:
                rows.append([images[c][a][k].coefficient(mono) for c in range(nunk)])
    null = linalg.nullspace(rows, nunk) if rows else linalg.nullspace([], nunk)
    out = []
    for vec in null:
        sec = A.zero_section()
        for c, x in enumerate(vec):
            if x:
                sec = section_add(sec, tuple(p.scale(x) for p in basis_secs[c]))
        out.append(sec)
    return out


def _express_constant(target: Section, frame: Sequence[Section], r: int):
    """Constant c with sum_k c_k frame[k] = target, or None."""
    keys = set()
    for s in list(frame) + [target]:
        for p in s:
            keys.update(p.monomials())
    keys = sorted(keys)
    rows, rhs = [], []
    for comp in range(len(target)):
        for mono in keys:
            rows.append([frame[k][comp].coefficient(mono) for k in range(r)])
            rhs.append(target[comp].coefficient(mono))
    if not rows:
        return tuple(Fraction(0) for _ in range(r))
    return linalg.solve(rows, rhs, r)


def structure_from_parallel(
    A: AlgebroidChart, frame: Sequence[Section], samples: int = 20, seed: int = 0, degree: int = 2
) -> tuple[list | None, Report]:
    """Constants C with ⟦α_i,α_j⟧ = C^k_ij α_k, and the action-algebroid bracket check."""
    r, m = A.rank, A.base_dim
    frame = [tuple(s) for s in frame]
    if len(frame) != r:
        raise PreconditionError(f"frame must have {r} members")
    if not any(
        linalg.rank([section_eval(s, x0) for s in frame], r) == r for x0 in grid_points(m, 3)
    ):
        raise PreconditionError("frame is not pointwise independent at any sample point")
    C = [[[Fraction(0)] * r for _ in range(r)] for _ in range(r)]
    witness = residual = None
    for i, j in itertools.combinations(range(r), 2):
        br = section_bracket(A, frame[i], frame[j])
        sol = _express_constant(br, frame, r)
        if sol is None:
            witness, residual = _one_based(i, j), br
            break
        for k in range(r):
            C[i][j][k] = sol[k]
            C[j][i][k] = -sol[k]
    items = [check("closed-constant", witness is None, residual, witness, "symbolic")]
    if witness is not None:
        items.append(CheckItem("action-bracket-formula", SKIPPED, note="frame not closed under the bracket"))
        return None, Report("structure-from-parallel", tuple(items))
    g = LieAlgebra("A0", r, C)
    items.append(check("jacobi", la_validate(g).passed, mode="symbolic"))
    rng = random.Random(seed)
    witness = residual = None
    for n in range(samples):
        a = [random_polynomial(m, degree, rng) for _ in range(r)]
        b = [random_polynomial(m, degree, rng) for _ in range(r)]
        sig = _combine(A, a, frame)
        tau = _combine(A, b, frame)
        Ps, Pt = anchor_apply(A, sig), anchor_apply(A, tau)
        coeff = []
        for k in range(r):
            v = vf_apply(Ps, b[k]) - vf_apply(Pt, a[k])
            for i, j in itertools.product(range(r), repeat=2):
                if C[i][j][k]:
                    v = v + (a[i] * b[j]).scale(C[i][j][k])
            coeff.append(v)
        formula = _combine(A, coeff, frame)
        res = section_sub(section_bracket(A, sig, tau), formula)
        if any(res):
            witness, residual = n + 1, res
            break
    items.append(
        check(
            "action-bracket-formula",
            witness is None,
            residual,
            witness,
            "symbolic",
            note=f"{samples} randomized section pairs (seed {seed})",
        )
    )
    return C, Report("structure-from-parallel", tuple(items), data={"samples": samples})


def _combine(A: AlgebroidChart, coeffs, frame) -> Section:
    out = A.zero_section()
    for c, s in zip(coeffs, frame):
        if c:
            out = section_add(out, tuple(c * p for p in s))
    return out


# --------------------------------------------------------------------------
# space forms and mutation


def space_form_check(
    D: AConnection, fb: FiberBracket, zt: ZeroTest = SYMBOLIC
) -> tuple[bool, MutationForm | None, Report]:
    """Ω^k_ij = T^k_ij + f^k_ij on the frame; constant iff all entries constant and DT = 0."""
    for name, rep in (("representation", is_representation(D, zt)), ("extends-canonical", extends_canonical(D, zt=zt))):
        if not rep.passed:
            raise HypothesisError(name, rep)
    K = kappa_tensor(D, fb)
    r = D.chart.rank
    nonconst = None
    for i, j, k in itertools.product(range(r), repeat=3):
        if not K.T[i][j][k].is_constant():
            nonconst = (_one_based(i, j, k), K.T[i][j][k])
            break
    sym = is_symmetric(D, zt)
    items = [
        check(
            "omega-constant",
            nonconst is None,
            nonconst[1] if nonconst else None,
            nonconst[0] if nonconst else None,
            "symbolic",
        ),
        sym.items[0],
    ]
    constant = nonconst is None and sym.passed
    omega = None
    if nonconst is None:
        omega = MutationForm(r, [[[K.T[i][j][k].constant_value() for k in range(r)] for j in range(r)] for i in range(r)], "Omega")
    rep = Report(
        f"space-form {D.name}".strip(),
        tuple(items),
        zt.mode,
        data={"constant": constant, "omega_zero": bool(omega and omega.is_zero())},
    )
    return constant, omega, rep


def mutate_geometry(
    fb: FiberBracket, w: MutationForm, D: AConnection | None = None, zt: ZeroTest = SYMBOLIC
) -> tuple[FiberBracket, Report]:
    """{,}' = {,} − Ω; checks Jacobi and, given D, the mutant flatness T = −{,}'."""
    if not fb.is_constant():
        raise PreconditionError("mutation needs a constant-coefficient fiber bracket")
    r = fb.chart.rank
    if w.dim != r:
        raise StructuralError("mutation form and bracket dimensions differ")
    C = fb.constants()
    new = FiberBracket(
        fb.chart,
        [[[C[i][j][k] - w.Omega[i][j][k] for k in range(r)] for j in range(r)] for i in range(r)],
        f"{fb.name}'" if fb.name else "mutant",
    )
    items = list(fb_validate(new, zt).items)
    if D is not None:
        T = conn_torsion(D)
        items.append(
            _item(
                "mutant-flatness",
                (
                    (_one_based(i, j), section_add(tuple(T.T[i][j]), tuple(new.f[i][j])))
                    for i, j in itertools.combinations(range(r), 2)
                ),
                zt,
            )
        )
    return new, Report(f"mutation {fb.name}".strip(), tuple(items), zt.mode)


def sharpe_constancy(D: AConnection, fb: FiberBracket, grid: int = 5) -> Report:
    """κ(Πe_i, Πe_j) evaluated by exact pointwise solves must be the same at every grid point."""
    A = D.chart
    r = A.rank
    ref = None
    witness = residual = None
    shift_ok = True
    for x0 in grid_points(A.base_dim, grid):
        vals = []
        for i, j in itertools.combinations(range(r), 2):
            Ui = tuple(p.eval(x0) for p in A.anchor[i])
            Uj = tuple(p.eval(x0) for p in A.anchor[j])
            val, ok = kappa_at(D, fb, x0, Ui, Uj)
            shift_ok = shift_ok and ok
            vals.append(val)
        if ref is None:
            ref = vals
        elif vals != ref and witness is None:
            witness, residual = tuple(x0), vals
    items = (
        check("kernel-shift", shift_ok, mode="pointwise"),
        check("frame-values-constant", witness is None, residual, witness, "pointwise", f"{grid}^{A.base_dim} grid"),
    )
    return Report("sharpe-constancy", items, "pointwise", grid, data={"values": ref})


# --------------------------------------------------------------------------
# model geometries


@dataclass(frozen=True)
class Geometry:
    """A chart with its self-representation D and fiber bracket."""

    name: str
    chart: AlgebroidChart
    D: AConnection
    fb: FiberBracket
    blaom: LinearConnection | None = None
    meta: dict = field(default_factory=dict, compare=False)


def flat_model(
    p: KleinPair, fields: Sequence[VectorField], name: str = "flat", lift=None, chart_name: str | None = None
) -> Geometry:
    """Flat model for (g, h): action algebroid of −C with ∇ᶜ = 0 and fb = C.

    Rejects fields that do not realize the action, kernels that do not
    match h at the origin, and any failure of the postconditions.
    """
    from .algebroid import ActionError

    g = p.g
    n = g.dim
    Ct = [[[-g.C[i][j][k] for k in range(n)] for j in range(n)] for i in range(n)]
    gt = LieAlgebra(f"-{g.name}", n, Ct)
    try:
        A = action_algebroid(gt, fields, name=chart_name or f"{name}-chart", lift=lift)
    except ActionError as exc:
        raise ModelError(f"fields do not realize the action of {g.name} with reversed constants: {exc}") from exc
    origin = tuple(Fraction(0) for _ in range(A.base_dim))
    ker = kernel_at_point(A, origin)
    if len(ker) != p.h.dim or not all(p.h.contains(v) for v in ker):
        raise ModelError(f"anchor kernel at the origin is not {p.h.name or 'h'}")
    nc = LinearConnection.zero(A, "blaom")
    D = d_from_blaom(nc, A, name=f"{name}-D")
    fb = FiberBracket.constant(A, g, f"{name}-fb")
    reps = [chart_validate(A), is_representation(D), extends_canonical(D), kappa_well_defined(D, fb)]
    K = kappa_tensor(D, fb)
    if any(p_ for plane in K.T for row in plane for p_ in row):
        raise ModelError("constructed κ is not zero")
    suite = identity_suite(D, fb, zt=ZeroTest("pointwise") if A.lift_sections() is None else SYMBOLIC)
    bad = [rep for rep in reps + [suite] if not rep.passed]
    if bad:
        raise ModelError(f"flat model postconditions failed: {bad[0].suite}", bad[0])
    return Geometry(name, A, D, fb, nc, meta={"klein": p.name})


def gauge_model(phi: Polynomial, name: str = "surface", chart_name: str | None = None) -> Geometry:
    """Conformally flat surface with metric φ⁻²(du² + dv²), modelled on e2.

    Frame e1, e2 anchor to φ∂_u, φ∂_v and e3 spans the rotation kernel;
    the fiber bracket is that of e2 (basis P1, P2, J) and the frame-level
    curvature is Ω_12 = −K e3 with K = φΔφ − |∇φ|² the Gauss curvature.
    """
    from .lie import e2

    if phi.nvars != 2:
        raise StructuralError("gauge_model works on a 2-dimensional chart")
    pu, pv = phi.partial(0), phi.partial(1)
    K = phi * (pu.partial(0) + pv.partial(1)) - pu * pu - pv * pv
    z = Polynomial.zero(2)
    anchor = ((phi, z), (z, phi), (z, z))
    gamma = [[[z] * 3 for _ in range(3)] for _ in range(3)]
    gamma[0][1] = [-pv, pu, K]
    gamma[1][0] = [pv, -pu, -K]
    A = AlgebroidChart(chart_name or f"{name}-chart", 2, 3, anchor, gamma, kernel_frame=((z, z, Polynomial.const(2, 1)),))
    g = e2()
    c = (pv, -pu, Polynomial.const(2, -1))
    Gamma = [[[c[i] * g.C[2][j][k] for k in range(3)] for j in range(3)] for i in range(3)]
    D = AConnection(A, Gamma, f"{name}-D")
    fb = FiberBracket.constant(A, g, f"{name}-fb")
    return Geometry(name, A, D, fb, None, meta={"gauss_curvature": K})
