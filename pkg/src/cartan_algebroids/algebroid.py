"""Transitive Lie algebroids over one polynomial coordinate chart.

A section is a tuple of ``rank`` polynomials (coefficients against the
frame e_1..e_r); a vector field is a tuple of ``base_dim`` polynomials.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .kernel import SYMBOLIC, Polynomial, StructuralError, ZeroTest, grid_points
from .lie import LieAlgebra, _one_based
from .report import Report, check

Section = tuple  # tuple[Polynomial, ...]
VectorField = tuple  # tuple[Polynomial, ...]


# --------------------------------------------------------------------------
# vector fields on the chart


def vf_apply(V: VectorField, f: Polynomial) -> Polynomial:
    """Directional derivative V(f)."""
    if len(V) != f.nvars:
        raise StructuralError("vector field and function live on different charts")
    out = Polynomial.zero(f.nvars)
    for a, Va in enumerate(V):
        if Va:
            out = out + Va * f.partial(a)
    return out


def vf_bracket(U: VectorField, V: VectorField) -> VectorField:
    """[U, V]^a = U(V^a) - V(U^a)."""
    return tuple(vf_apply(U, Va) - vf_apply(V, Ua) for Ua, Va in zip(U, V))


def coordinate_field(m: int, a: int) -> VectorField:
    return tuple(Polynomial.const(m, int(b == a)) for b in range(m))


def vf_from_json_like(m: int, comps: Sequence) -> VectorField:
    return tuple(c if isinstance(c, Polynomial) else Polynomial.const(m, c) for c in comps)


# --------------------------------------------------------------------------
# sections


def section_add(s: Section, t: Section) -> Section:
    return tuple(a + b for a, b in zip(s, t))


def section_sub(s: Section, t: Section) -> Section:
    return tuple(a - b for a, b in zip(s, t))


def section_scale(f, s: Section) -> Section:
    return tuple(f * a for a in s)


def section_is_zero(s: Section, zt: ZeroTest = SYMBOLIC) -> bool:
    return zt.all_zero(s)


def section_eval(s: Section, point) -> tuple[Fraction, ...]:
    return tuple(c.eval(point) for c in s)


def combine(coeffs: Sequence, vectors: Sequence[Section]) -> Section:
    """sum_i coeffs[i] * vectors[i] (coefficients may be polynomials or scalars)."""
    out = None
    for c, v in zip(coeffs, vectors):
        if isinstance(c, Polynomial):
            if c.is_zero():
                continue
        elif not c:
            continue
        term = section_scale(c, v)
        out = term if out is None else section_add(out, term)
    if out is None:
        return tuple(Polynomial.zero(v.nvars) for v in vectors[0])
    return out


@dataclass(frozen=True)
class AlgebroidChart:
    """Anchor ``anchor[i][a]`` = A^a_i (Pi(e_i) = sum_a A^a_i d_a) and bracket
    functions ``gamma[i][j][k]`` (⟦e_i, e_j⟧ = sum_k gamma^k_ij e_k).

    ``kernel_frame`` lists sections spanning the anchor kernel; ``lift``
    lists, per coordinate direction a, a section lambda_a with
    Pi(lambda_a) = d_a.
    """

    name: str
    base_dim: int
    rank: int
    anchor: tuple
    gamma: tuple
    kernel_frame: tuple | None = None
    lift: tuple | None = None

    def __post_init__(self):
        m, r = self.base_dim, self.rank

        def poly(p):
            if isinstance(p, Polynomial):
                if p.nvars != m:
                    raise StructuralError(f"polynomial in {p.nvars} variables on a {m}-chart")
                return p
            return Polynomial.const(m, p)

        anchor = tuple(tuple(poly(p) for p in col) for col in self.anchor)
        if len(anchor) != r or any(len(col) != m for col in anchor):
            raise StructuralError(f"anchor must have {r} columns of length {m}")
        gamma = tuple(tuple(tuple(poly(p) for p in row) for row in plane) for plane in self.gamma)
        if len(gamma) != r or any(len(p) != r or any(len(x) != r for x in p) for p in gamma):
            raise StructuralError(f"gamma must be {r}x{r}x{r}")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "gamma", gamma)
        if self.kernel_frame is not None:
            kf = tuple(tuple(poly(p) for p in s) for s in self.kernel_frame)
            if any(len(s) != r for s in kf):
                raise StructuralError(f"kernel frame members must have {r} coefficients")
            object.__setattr__(self, "kernel_frame", kf)
        if self.lift is not None:
            lift = tuple(tuple(poly(p) for p in s) for s in self.lift)
            if len(lift) != m or any(len(s) != r for s in lift):
                raise StructuralError(f"lift must have {m} columns of length {r}")
            object.__setattr__(self, "lift", lift)

    # helpers
    @property
    def m(self) -> int:
        return self.base_dim

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.base_dim)

    def const(self, c) -> Polynomial:
        return Polynomial.const(self.base_dim, c)

    def coord(self, a: int) -> Polynomial:
        return Polynomial.var(self.base_dim, a)

    def frame(self, i: int) -> Section:
        return tuple(self.const(int(k == i)) for k in range(self.rank))

    def zero_section(self) -> Section:
        return tuple(self.zero() for _ in range(self.rank))

    def section(self, coeffs: Sequence) -> Section:
        out = tuple(c if isinstance(c, Polynomial) else self.const(c) for c in coeffs)
        self.check_section(out)
        return out

    def check_section(self, s: Section) -> None:
        if len(s) != self.rank or any(c.nvars != self.base_dim for c in s):
            raise StructuralError(
                f"section does not belong to chart {self.name!r} (rank {self.rank}, m {self.base_dim})"
            )

    def anchor_matrix_at(self, point) -> list[list[Fraction]]:
        """m x r matrix of anchor values at a rational point."""
        return [[self.anchor[i][a].eval(point) for i in range(self.rank)] for a in range(self.base_dim)]

    def canonical_lift(self) -> tuple | None:
        """lambda(d_a) = e_a when the first m frame members anchor to the coordinate fields."""
        m = self.base_dim
        if self.rank < m:
            return None
        for a in range(m):
            if self.anchor[a] != coordinate_field(m, a):
                return None
        return tuple(self.frame(a) for a in range(m))

    def lift_sections(self) -> tuple | None:
        return self.lift if self.lift is not None else self.canonical_lift()

    def kernel_generators(self) -> tuple:
        """Explicit kernel frame, else the frame members with identically zero anchor."""
        if self.kernel_frame is not None:
            return self.kernel_frame
        return tuple(
            self.frame(i) for i in range(self.rank) if all(p.is_zero() for p in self.anchor[i])
        )


# --------------------------------------------------------------------------
# operations


def anchor_apply(A: AlgebroidChart, s: Section) -> VectorField:
    A.check_section(s)
    out = [A.zero() for _ in range(A.base_dim)]
    for i, si in enumerate(s):
        if si:
            for a in range(A.base_dim):
                if A.anchor[i][a]:
                    out[a] = out[a] + si * A.anchor[i][a]
    return tuple(out)


def section_bracket(A: AlgebroidChart, s: Section, t: Section) -> Section:
    """⟦σ,τ⟧^k = σ^i τ^j γ^k_ij + Π(σ)(τ^k) − Π(τ)(σ^k)."""
    A.check_section(s)
    A.check_section(t)
    r = A.rank
    out = [A.zero() for _ in range(r)]
    for i, si in enumerate(s):
        if not si:
            continue
        for j, tj in enumerate(t):
            if not tj:
                continue
            w = si * tj
            for k, g in enumerate(A.gamma[i][j]):
                if g:
                    out[k] = out[k] + w * g
    Ps, Pt = anchor_apply(A, s), anchor_apply(A, t)
    for k in range(r):
        out[k] = out[k] + vf_apply(Ps, t[k]) - vf_apply(Pt, s[k])
    return tuple(out)


def _frame_bracket(A: AlgebroidChart, i: int, j: int) -> Section:
    return tuple(A.gamma[i][j])


def _kernel_grid_check(A: AlgebroidChart, grid: int) -> tuple[bool, tuple | None, list[int]]:
    gens = A.kernel_generators()
    ranks = []
    for pt in grid_points(A.base_dim, grid):
        mat = A.anchor_matrix_at(pt)
        arank = linalg.rank(mat, A.rank) if A.base_dim else 0
        ranks.append(arank)
        kdim = A.rank - arank
        vals = [section_eval(s, pt) for s in gens]
        got = linalg.rank(vals, A.rank) if vals else 0
        if got != kdim:
            return False, tuple(pt), ranks
    return True, None, ranks


def chart_validate(A: AlgebroidChart, zt: ZeroTest = SYMBOLIC, grid: int | None = None) -> Report:
    """Algebroid axioms on the frame, lift/kernel data, and the anchor rank on a grid."""
    r, m = A.rank, A.base_dim
    grid = grid or zt.grid
    items = []

    witness = residual = None
    for i, j in itertools.combinations_with_replacement(range(r), 2):
        res = tuple(A.gamma[i][j][k] + A.gamma[j][i][k] for k in range(r))
        if not zt.all_zero(res):
            witness, residual = _one_based(i, j), res
            break
    items.append(check("gamma-antisymmetry", witness is None, residual, witness, zt.mode))

    witness = residual = None
    for i, j in itertools.combinations(range(r), 2):
        lhs = anchor_apply(A, _frame_bracket(A, i, j))
        rhs = vf_bracket(A.anchor[i], A.anchor[j])
        res = tuple(a - b for a, b in zip(lhs, rhs))
        if not zt.all_zero(res):
            witness, residual = _one_based(i, j), res
            break
    items.append(check("anchor-homomorphism", witness is None, residual, witness, zt.mode))

    witness = residual = None
    for i, j, k in itertools.combinations(range(r), 3):
        ei, ej, ek = A.frame(i), A.frame(j), A.frame(k)
        total = section_add(
            section_add(
                section_bracket(A, ei, section_bracket(A, ej, ek)),
                section_bracket(A, ej, section_bracket(A, ek, ei)),
            ),
            section_bracket(A, ek, section_bracket(A, ei, ej)),
        )
        if not zt.all_zero(total):
            witness, residual = _one_based(i, j, k), total
            break
    items.append(check("jacobi", witness is None, residual, witness, zt.mode))

    if A.lift is not None:
        witness = residual = None
        for a in range(m):
            res = section_sub(anchor_apply(A, A.lift[a]), coordinate_field(m, a))
            if not zt.all_zero(res):
                witness, residual = (a + 1,), res
                break
        items.append(check("lift-inverts-anchor", witness is None, residual, witness, zt.mode))

    gens = A.kernel_generators()
    witness = residual = None
    for n, s in enumerate(gens):
        res = anchor_apply(A, s)
        if not zt.all_zero(res):
            witness, residual = (n + 1,), res
            break
    items.append(check("kernel-frame-anchor-zero", witness is None, residual, witness, zt.mode))
    ok, pt, ranks = _kernel_grid_check(A, grid)
    items.append(
        check(
            "kernel-frame-spans-kernel",
            ok,
            witness=pt,
            mode="pointwise",
            note=f"{grid}^{m} grid",
        )
    )
    transitive = all(rk == m for rk in ranks)
    items.append(
        check(
            "transitive-on-grid",
            transitive,
            witness=None if transitive else min(ranks),
            mode="pointwise",
            note=f"anchor rank {min(ranks) if ranks else 0}..{max(ranks) if ranks else 0} on {grid}^{m} grid",
        )
    )
    return Report(f"chart {A.name}".strip(), tuple(items), zt.mode, grid, data={"anchor_rank_min": min(ranks)})


def kernel_at_point(A: AlgebroidChart, x0) -> list[tuple[Fraction, ...]]:
    if len(x0) != A.base_dim:
        raise StructuralError("point has the wrong dimension")
    if A.base_dim == 0:
        return [tuple(Fraction(int(k == i)) for k in range(A.rank)) for i in range(A.rank)]
    return linalg.nullspace(A.anchor_matrix_at(x0), A.rank)


def minors_kernel_vector(anchor: Sequence[VectorField], m: int) -> Section:
    """Signed maximal minors of the m x (m+1) anchor matrix: a pointwise kernel vector."""
    r = len(anchor)
    if r != m + 1:
        raise StructuralError("minors kernel vector needs rank = base_dim + 1")
    out = []
    for i in range(r):
        cols = [anchor[c] for c in range(r) if c != i]
        mat = [[cols[c][a] for c in range(m)] for a in range(m)]
        d = _det(mat, m)
        out.append(d if i % 2 == 0 else -d)
    return tuple(out)


def _det(mat, nvars: int) -> Polynomial:
    n = len(mat)
    if n == 0:
        return Polynomial.const(nvars, 1)
    total = Polynomial.zero(nvars)
    for c in range(n):
        if mat[0][c]:
            minor = [row[:c] + row[c + 1 :] for row in mat[1:]]
            term = mat[0][c] * _det(minor, nvars)
            total = total + term if c % 2 == 0 else total - term
    return total


class ActionError(ValueError):
    """Supplied fields do not realize the stated Lie algebra action."""

    def __init__(self, pair, residual):
        self.pair = pair
        self.residual = residual
        super().__init__(f"[V_i, V_j] != C^k_ij V_k at pair {pair}")


def action_algebroid(
    g: LieAlgebra,
    fields: Sequence[VectorField],
    name: str = "",
    kernel_frame: Sequence[Section] | None = None,
    lift: Sequence[Section] | None = None,
) -> AlgebroidChart:
    """Action algebroid M x g; requires [V_i, V_j] = sum_k C[i][j][k] V_k exactly.

    For rank = base_dim + 1 the signed anchor minors are attached as the
    kernel frame when none is supplied.
    """
    if len(fields) != g.dim:
        raise StructuralError(f"need {g.dim} fields, got {len(fields)}")
    m = len(fields[0]) if fields else 0
    fields = [vf_from_json_like(m, V) for V in fields]
    for i, j in itertools.combinations(range(g.dim), 2):
        lhs = vf_bracket(fields[i], fields[j])
        rhs = [Polynomial.zero(m) for _ in range(m)]
        for k in range(g.dim):
            c = g.C[i][j][k]
            if c:
                rhs = [x + y.scale(c) for x, y in zip(rhs, fields[k])]
        res = tuple(a - b for a, b in zip(lhs, rhs))
        if any(res):
            raise ActionError(_one_based(i, j), res)
    gamma = [[[Polynomial.const(m, g.C[i][j][k]) for k in range(g.dim)] for j in range(g.dim)] for i in range(g.dim)]
    if kernel_frame is None and g.dim == m + 1 and m > 0:
        kernel_frame = (minors_kernel_vector(fields, m),)
    return AlgebroidChart(
        name or f"action-{g.name}",
        m,
        g.dim,
        tuple(fields),
        gamma,
        tuple(kernel_frame) if kernel_frame is not None else None,
        tuple(lift) if lift is not None else None,
    )
