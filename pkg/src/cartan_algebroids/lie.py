"""Finite-dimensional Lie algebras over Q given by structure constants.

Indices are 0-based in the Python API.  Witnesses written into reports are
1-based frame indices, matching the definition-file format.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .kernel import StructuralError, to_rational
from .report import Report, check

Vector = tuple[Fraction, ...]


def _one_based(*idx: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in idx)


def _zero3(n: int) -> list[list[list[Fraction]]]:
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def _freeze3(arr) -> tuple:
    return tuple(tuple(tuple(to_rational(x) for x in row) for row in plane) for plane in arr)


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants ``C[i][j][k]``: {e_i, e_j} = sum_k C[i][j][k] e_k.

    Shape is checked here; antisymmetry and Jacobi are reported by
    :func:`la_validate` so that broken candidates can still be inspected.
    """

    name: str
    dim: int
    C: tuple

    def __post_init__(self):
        n = self.dim
        C = _freeze3(self.C)
        if len(C) != n or any(len(p) != n or any(len(r) != n for r in p) for p in C):
            raise StructuralError(f"structure constants must be {n}x{n}x{n}")
        object.__setattr__(self, "C", C)

    @classmethod
    def from_brackets(
        cls, name: str, dim: int, brackets: Mapping[tuple[int, int], Sequence]
    ) -> "LieAlgebra":
        """Build from {(i, j): coefficients} with i < j; the rest is antisymmetric completion."""
        C = _zero3(dim)
        for (i, j), coeffs in brackets.items():
            if not (0 <= i < j < dim):
                raise StructuralError(f"bracket pair {(i, j)} must satisfy 0 <= i < j < {dim}")
            if len(coeffs) != dim:
                raise StructuralError(f"bracket ({i},{j}) needs {dim} coefficients")
            for k, c in enumerate(coeffs):
                C[i][j][k] = to_rational(c)
                C[j][i][k] = -to_rational(c)
        return cls(name, dim, C)

    def bracket(self, u: Sequence, v: Sequence) -> Vector:
        n = self.dim
        if len(u) != n or len(v) != n:
            raise StructuralError(f"vectors must have length {n}")
        out = [Fraction(0)] * n
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                w = ui * vj
                for k, c in enumerate(self.C[i][j]):
                    if c:
                        out[k] += w * c
        return tuple(out)

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def ad(self, u: Sequence) -> list[list[Fraction]]:
        """Matrix of ad u; column j is {u, e_j}."""
        cols = [self.bracket(u, self.basis_vector(j)) for j in range(self.dim)]
        return [[cols[j][a] for j in range(self.dim)] for a in range(self.dim)]

    def brackets(self) -> dict[tuple[int, int], Vector]:
        """Nonzero brackets for i < j."""
        return {
            (i, j): self.C[i][j]
            for i, j in itertools.combinations(range(self.dim), 2)
            if any(self.C[i][j])
        }


@dataclass(frozen=True)
class Subspace:
    parent_dim: int
    basis: tuple
    name: str = ""

    def __post_init__(self):
        basis = tuple(tuple(to_rational(x) for x in v) for v in self.basis)
        if any(len(v) != self.parent_dim for v in basis):
            raise StructuralError(f"basis vectors must have length {self.parent_dim}")
        if linalg.rank(basis, self.parent_dim) != len(basis):
            raise StructuralError("subspace basis is linearly dependent")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def span(cls, parent_dim: int, vectors: Sequence[Sequence], name: str = "") -> "Subspace":
        """Subspace spanned by possibly dependent vectors (independent subset kept)."""
        kept: list = []
        for v in vectors:
            if linalg.rank(kept + [list(v)], parent_dim) > len(kept):
                kept.append(list(v))
        return cls(parent_dim, tuple(kept), name)

    @classmethod
    def coordinate(cls, parent_dim: int, indices: Sequence[int], name: str = "") -> "Subspace":
        return cls(
            parent_dim,
            tuple(tuple(Fraction(int(k == i)) for k in range(parent_dim)) for i in indices),
            name,
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return linalg.in_span(self.basis, v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def same_as(self, other: "Subspace") -> bool:
        return (
            self.parent_dim == other.parent_dim
            and self.contains_subspace(other)
            and other.contains_subspace(self)
        )

    def annihilator(self) -> list[Vector]:
        return linalg.nullspace(self.basis, self.parent_dim)


@dataclass(frozen=True)
class KleinPair:
    g: LieAlgebra
    h: Subspace
    name: str = ""

    def __post_init__(self):
        if self.h.parent_dim != self.g.dim:
            raise StructuralError("subspace does not live in the algebra")


@dataclass(frozen=True)
class MutationForm:
    """Constant antisymmetric Omega[i][j][k]; mutation replaces C by C - Omega."""

    dim: int
    Omega: tuple
    name: str = ""

    def __post_init__(self):
        n = self.dim
        W = _freeze3(self.Omega)
        if len(W) != n or any(len(p) != n or any(len(r) != n for r in p) for p in W):
            raise StructuralError(f"Omega must be {n}x{n}x{n}")
        for i, j, k in itertools.product(range(n), repeat=3):
            if W[i][j][k] != -W[j][i][k]:
                raise StructuralError(f"Omega not antisymmetric at {_one_based(i, j, k)}")
        object.__setattr__(self, "Omega", W)

    @classmethod
    def from_brackets(cls, dim: int, entries: Mapping[tuple[int, int], Sequence], name: str = ""):
        W = _zero3(dim)
        for (i, j), coeffs in entries.items():
            if not (0 <= i < j < dim):
                raise StructuralError(f"pair {(i, j)} must satisfy 0 <= i < j < {dim}")
            for k, c in enumerate(coeffs):
                W[i][j][k] = to_rational(c)
                W[j][i][k] = -to_rational(c)
        return cls(dim, W, name)

    @classmethod
    def zero(cls, dim: int) -> "MutationForm":
        return cls(dim, _zero3(dim))

    def __neg__(self) -> "MutationForm":
        return MutationForm(
            self.dim, [[[-x for x in r] for r in p] for p in self.Omega], self.name
        )

    def is_zero(self) -> bool:
        return not any(x for p in self.Omega for r in p for x in r)


# --------------------------------------------------------------------------
# operations


def la_bracket(g: LieAlgebra, u: Sequence, v: Sequence) -> Vector:
    return g.bracket(u, v)


def jacobi_residual(C, i: int, j: int, k: int) -> Vector:
    """Cyclic sum {e_i,{e_j,e_k}} + {e_j,{e_k,e_i}} + {e_k,{e_i,e_j}}."""
    n = len(C)
    out = [Fraction(0)] * n
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        inner = C[b][c]
        for m, cm in enumerate(inner):
            if cm:
                for l, v in enumerate(C[a][m]):
                    if v:
                        out[l] += cm * v
    return tuple(out)


def la_validate(g: LieAlgebra) -> Report:
    n = g.dim
    anti_witness = None
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        if any(g.C[i][j][k] != -g.C[j][i][k] for k in range(n)):
            anti_witness = _one_based(i, j)
            break
    items = [check("antisymmetry", anti_witness is None, witness=anti_witness)]
    jac_witness = None
    jac_residual = None
    for i, j, k in itertools.combinations(range(n), 3):
        res = jacobi_residual(g.C, i, j, k)
        if any(res):
            jac_witness, jac_residual = _one_based(i, j, k), res
            break
    items.append(check("jacobi", jac_witness is None, residual=jac_residual, witness=jac_witness))
    return Report(f"lie-algebra {g.name}".strip(), tuple(items))


def la_center(g: LieAlgebra) -> Subspace:
    n = g.dim
    rows = [[g.C[i][j][k] for i in range(n)] for j in range(n) for k in range(n)]
    return Subspace(n, tuple(linalg.nullspace(rows, n)))


def derivation_equations(g: LieAlgebra) -> list[list[Fraction]]:
    """Rows of the linear conditions D{x,y} = {Dx,y} + {x,Dy}; unknown D[a][i] at a*n+i."""
    n = g.dim
    C = g.C
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        for l in range(n):
            row = [Fraction(0)] * (n * n)
            for k in range(n):
                row[l * n + k] += C[i][j][k]
            for a in range(n):
                row[a * n + i] -= C[a][j][l]
                row[a * n + j] -= C[i][a][l]
            rows.append(row)
    return rows


def la_derivations(g: LieAlgebra) -> tuple[list[list[list[Fraction]]], int]:
    """(basis of Der(g) as n x n matrices, dimension of the inner derivations)."""
    n = g.dim
    if n == 0:
        return [], 0
    sols = linalg.nullspace(derivation_equations(g), n * n)
    der = [[[v[a * n + i] for i in range(n)] for a in range(n)] for v in sols]
    inner = [
        [x for row in g.ad(g.basis_vector(i)) for x in row] for i in range(n)
    ]
    return der, linalg.rank(inner, n * n)


def la_normalizer(g: LieAlgebra, h: Subspace) -> Subspace:
    n = g.dim
    if h.parent_dim != n:
        raise StructuralError("subspace does not live in the algebra")
    ann = h.annihilator()
    rows = []
    for hb in h.basis:
        for nu in ann:
            row = []
            for i in range(n):
                s = Fraction(0)
                for j in range(n):
                    if hb[j]:
                        s += hb[j] * sum(g.C[i][j][k] * nu[k] for k in range(n))
                row.append(s)
            rows.append(row)
    return Subspace(n, tuple(linalg.nullspace(rows, n)))


def is_subalgebra(g: LieAlgebra, h: Subspace) -> tuple[bool, tuple | None]:
    for a, b in itertools.combinations(range(h.dim), 2):
        if not h.contains(g.bracket(h.basis[a], h.basis[b])):
            return False, _one_based(a, b)
    return True, None


def klein_check(p: KleinPair) -> Report:
    g, h = p.g, p.h
    closed, witness = is_subalgebra(g, h)
    der, inner_dim = la_derivations(g)
    center = la_center(g)
    normalizer = la_normalizer(g, h)
    items = (
        check("subalgebra", closed, witness=witness, note=None if closed else "basis pair not closed"),
        check("proper", h.dim < g.dim),
        check(
            "condition-1-derivations-inner",
            len(der) == inner_dim,
            residual={"derivations": len(der), "inner": inner_dim},
        ),
        check("condition-2-center-zero", center.dim == 0, residual=center.basis),
        check("condition-3-normalizer", normalizer.same_as(h), residual=normalizer.basis),
    )
    data = {
        "model_dim": g.dim - h.dim,
        "der_dim": len(der),
        "inner_dim": inner_dim,
        "center_dim": center.dim,
        "normalizer_dim": normalizer.dim,
    }
    return Report(f"klein {p.name}".strip(), items, data=data)


def la_mutate(
    g: LieAlgebra, w: MutationForm, h: Subspace | None = None
) -> tuple[LieAlgebra, Report]:
    if w.dim != g.dim:
        raise StructuralError("mutation form and algebra dimensions differ")
    n = g.dim
    C = [
        [[g.C[i][j][k] - w.Omega[i][j][k] for k in range(n)] for j in range(n)]
        for i in range(n)
    ]
    cand = LieAlgebra(f"{g.name}'" if g.name else "", n, C)
    base = la_validate(cand)
    items = list(base.items)
    if h is not None:
        closed, witness = is_subalgebra(cand, h)
        items.append(check("subalgebra-preserved", closed, witness=witness))
    return cand, Report(f"mutation of {g.name}".strip(), tuple(items))


# --------------------------------------------------------------------------
# named algebras


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(f"abelian{n}", n, _zero3(n))


def heis3() -> LieAlgebra:
    return LieAlgebra.from_brackets("heis3", 3, {(0, 1): (0, 0, 1)})


def sl2() -> LieAlgebra:
    # basis H, E, F
    return LieAlgebra.from_brackets(
        "sl2", 3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)}
    )


def so3() -> LieAlgebra:
    return LieAlgebra.from_brackets(
        "so3", 3, {(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (0, 2): (0, -1, 0)}
    )


def e2() -> LieAlgebra:
    # basis P1, P2, J with {J,P1} = P2, {J,P2} = -P1
    return LieAlgebra.from_brackets("e2", 3, {(0, 2): (0, -1, 0), (1, 2): (1, 0, 0)})


def aff1() -> LieAlgebra:
    # basis P, D with {D,P} = P
    return LieAlgebra.from_brackets("aff1", 2, {(0, 1): (-1, 0)})


NAMED_ALGEBRAS = {
    "abelian2": lambda: abelian(2),
    "heis3": heis3,
    "sl2": sl2,
    "so3": so3,
    "e2": e2,
    "aff1": aff1,
}
