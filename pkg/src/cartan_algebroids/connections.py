"""A-connections on A: application, dual, torsion, curvature, DT, Bianchi."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .algebroid import (
    AlgebroidChart,
    Section,
    anchor_apply,
    section_add,
    section_bracket,
    section_sub,
    vf_apply,
)
from .kernel import SYMBOLIC, Polynomial, StructuralError, ZeroTest
from .lie import _one_based
from .report import Report, check


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class HypothesisError(PreconditionError):
    """A theorem's hypothesis failed; ``hypothesis`` names it."""

    def __init__(self, hypothesis: str, report: Report | None = None):
        self.hypothesis = hypothesis
        self.report = report
        super().__init__(f"hypothesis failed: {hypothesis}")


def _poly3(A: AlgebroidChart, arr, shape: tuple[int, int, int]) -> tuple:
    out = tuple(
        tuple(tuple(p if isinstance(p, Polynomial) else A.const(p) for p in row) for row in plane)
        for plane in arr
    )
    a, b, c = shape
    if len(out) != a or any(len(p) != b or any(len(x) != c for x in p) for p in out):
        raise StructuralError(f"coefficient array must be {a}x{b}x{c}")
    for plane in out:
        for row in plane:
            for p in row:
                if p.nvars != A.base_dim:
                    raise StructuralError("coefficient polynomial on the wrong chart")
    return out


@dataclass(frozen=True)
class AConnection:
    """D_{e_i} e_j = sum_k Gamma[i][j][k] e_k."""

    chart: AlgebroidChart
    Gamma: tuple
    name: str = ""

    def __post_init__(self):
        r = self.chart.rank
        object.__setattr__(self, "Gamma", _poly3(self.chart, self.Gamma, (r, r, r)))

    def with_entry(self, i: int, j: int, k: int, delta) -> "AConnection":
        G = [[list(row) for row in plane] for plane in self.Gamma]
        G[i][j][k] = G[i][j][k] + delta
        return AConnection(self.chart, G, self.name)


@dataclass(frozen=True)
class TorsionTensor:
    chart: AlgebroidChart
    T: tuple

    def __post_init__(self):
        r = self.chart.rank
        object.__setattr__(self, "T", _poly3(self.chart, self.T, (r, r, r)))

    def __neg__(self) -> "TorsionTensor":
        return TorsionTensor(self.chart, [[[-p for p in row] for row in plane] for plane in self.T])

    def apply(self, s: Section, t: Section) -> Section:
        """T(σ,τ) = σ^i τ^j T_ij (tensorial contraction)."""
        A = self.chart
        out = [A.zero() for _ in range(A.rank)]
        for i, si in enumerate(s):
            if not si:
                continue
            for j, tj in enumerate(t):
                if not tj:
                    continue
                w = si * tj
                for k, p in enumerate(self.T[i][j]):
                    if p:
                        out[k] = out[k] + w * p
        return tuple(out)


def conn_apply(D: AConnection, s: Section, t: Section) -> Section:
    """D_σ τ = σ^i (τ^j Γ^k_ij + Π(e_i)(τ^k))."""
    A = D.chart
    A.check_section(s)
    A.check_section(t)
    out = [A.zero() for _ in range(A.rank)]
    for i, si in enumerate(s):
        if not si:
            continue
        for j, tj in enumerate(t):
            if not tj:
                continue
            w = si * tj
            for k, p in enumerate(D.Gamma[i][j]):
                if p:
                    out[k] = out[k] + w * p
    Ps = anchor_apply(A, s)
    return tuple(o + vf_apply(Ps, tk) for o, tk in zip(out, t))


def conn_dual(D: AConnection) -> AConnection:
    """D*_σ τ = D_τ σ + ⟦σ,τ⟧, i.e. Γ*^k_ij = Γ^k_ji + γ^k_ij."""
    A = D.chart
    r = A.rank
    G = [[[D.Gamma[j][i][k] + A.gamma[i][j][k] for k in range(r)] for j in range(r)] for i in range(r)]
    return AConnection(A, G, f"{D.name}*" if D.name else "")


def conn_torsion(D: AConnection) -> TorsionTensor:
    """T^k_ij = Γ^k_ij − Γ^k_ji − γ^k_ij."""
    A = D.chart
    r = A.rank
    T = [
        [[D.Gamma[i][j][k] - D.Gamma[j][i][k] - A.gamma[i][j][k] for k in range(r)] for j in range(r)]
        for i in range(r)
    ]
    return TorsionTensor(A, T)


def torsion_direct(D: AConnection, s: Section, t: Section) -> Section:
    return section_sub(section_sub(conn_apply(D, s, t), conn_apply(D, t, s)), section_bracket(D.chart, s, t))


def torsion_tensoriality(
    D: AConnection, sections: Sequence[tuple[Section, Section]], zt: ZeroTest = SYMBOLIC
) -> Report:
    """Contraction of the torsion array agrees with D_σ τ − D_τ σ − ⟦σ,τ⟧ on the given pairs."""
    T = conn_torsion(D)
    witness = residual = None
    for n, (s, t) in enumerate(sections):
        res = section_sub(T.apply(s, t), torsion_direct(D, s, t))
        if not zt.all_zero(res):
            witness, residual = n + 1, res
            break
    return Report(
        "torsion-tensoriality",
        (check("torsion-contraction", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


def curvature_apply(D: AConnection, s: Section, t: Section, u: Section) -> Section:
    """C(σ,τ)ε = D_σ D_τ ε − D_τ D_σ ε − D_⟦σ,τ⟧ ε."""
    a = conn_apply(D, s, conn_apply(D, t, u))
    b = conn_apply(D, t, conn_apply(D, s, u))
    c = conn_apply(D, section_bracket(D.chart, s, t), u)
    return section_sub(section_sub(a, b), c)


def conn_curvature(D: AConnection, i: int, j: int, k: int) -> Section:
    A = D.chart
    return curvature_apply(D, A.frame(i), A.frame(j), A.frame(k))


def curvature_array(D: AConnection) -> list:
    r = D.chart.rank
    return [[[conn_curvature(D, i, j, k) for k in range(r)] for j in range(r)] for i in range(r)]


def is_representation(D: AConnection, zt: ZeroTest = SYMBOLIC) -> Report:
    r = D.chart.rank
    witness = residual = None
    for i, j in itertools.combinations(range(r), 2):
        for k in range(r):
            res = conn_curvature(D, i, j, k)
            if not zt.all_zero(res):
                witness, residual = _one_based(i, j, k), res
                break
        if witness:
            break
    return Report(
        f"representation {D.name}".strip(),
        (check("curvature-zero", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


def extends_canonical(
    D: AConnection, kernel_gens: Sequence[Section] | None = None, zt: ZeroTest = SYMBOLIC
) -> Report:
    """D_{e_i} s = ⟦e_i, s⟧ for every frame member and kernel generator."""
    A = D.chart
    gens = A.kernel_generators() if kernel_gens is None else tuple(kernel_gens)
    for n, s in enumerate(gens):
        if not zt.all_zero(anchor_apply(A, s)):
            raise PreconditionError(f"kernel generator {n + 1} has nonzero anchor")
    witness = residual = None
    for n, s in enumerate(gens):
        for i in range(A.rank):
            e = A.frame(i)
            res = section_sub(conn_apply(D, e, s), section_bracket(A, e, s))
            if not zt.all_zero(res):
                witness, residual = (i + 1, n + 1), res
                break
        if witness:
            break
    return Report(
        f"extends-canonical {D.name}".strip(),
        (
            check(
                "extends-canonical",
                witness is None,
                residual,
                witness,
                zt.mode,
                note="checked on kernel generators; Leibniz extends it to their polynomial multiples",
            ),
        ),
        zt.mode,
    )


def conn_DT(D: AConnection) -> list:
    """DT[l][i][j] = (D_{e_l} T)(e_i, e_j) as a section (rank-4 array overall)."""
    A = D.chart
    r = A.rank
    T = conn_torsion(D)
    frame = [A.frame(i) for i in range(r)]
    Dframe = [[tuple(D.Gamma[l][i]) for i in range(r)] for l in range(r)]
    out = []
    for l in range(r):
        plane = []
        for i in range(r):
            row = []
            for j in range(r):
                v = conn_apply(D, frame[l], tuple(T.T[i][j]))
                v = section_sub(v, T.apply(Dframe[l][i], frame[j]))
                v = section_sub(v, T.apply(frame[i], Dframe[l][j]))
                row.append(v)
            plane.append(row)
        out.append(plane)
    return out


def is_symmetric(D: AConnection, zt: ZeroTest = SYMBOLIC) -> Report:
    DT = conn_DT(D)
    r = D.chart.rank
    witness = residual = None
    for l in range(r):
        for i, j in itertools.combinations(range(r), 2):
            if not zt.all_zero(DT[l][i][j]):
                witness, residual = _one_based(l, i, j), DT[l][i][j]
                break
        if witness:
            break
    return Report(
        f"symmetric {D.name}".strip(),
        (check("DT-zero", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


def bianchi_cyclic(D: AConnection) -> dict:
    """Cyclic sums of (D_ρ T)(σ,τ) + T(T(ρ,σ),τ) over frame triples i<j<k."""
    A = D.chart
    r = A.rank
    T = conn_torsion(D)
    DT = conn_DT(D)
    out = {}
    for i, j, k in itertools.combinations(range(r), 3):
        total = A.zero_section()
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            total = section_add(total, DT[a][b][c])
            total = section_add(total, T.apply(tuple(T.T[a][b]), A.frame(c)))
        out[(i, j, k)] = total
    return out


def bianchi_residual(D: AConnection, zt: ZeroTest = SYMBOLIC) -> Report:
    rep = is_representation(D, zt)
    if not rep.passed:
        raise HypothesisError(
            "representation (the Bianchi identity is asserted for vanishing curvature)", rep
        )
    witness = residual = None
    for key, total in bianchi_cyclic(D).items():
        if not zt.all_zero(total):
            witness, residual = _one_based(*key), total
            break
    return Report(
        f"bianchi {D.name}".strip(),
        (check("bianchi-cyclic-sum", witness is None, residual, witness, zt.mode),),
        zt.mode,
    )


# --------------------------------------------------------------------------
# randomized data for property checks


def random_polynomial(m: int, degree: int, rng: random.Random, span: int = 3) -> Polynomial:
    terms = {}
    for exps in itertools.product(range(degree + 1), repeat=m):
        if sum(exps) <= degree and rng.random() < 0.6:
            terms[exps] = rng.randint(-span, span)
    return Polynomial(m, terms)


def random_section(A: AlgebroidChart, degree: int, rng: random.Random) -> Section:
    return tuple(random_polynomial(A.base_dim, degree, rng) for _ in range(A.rank))


def random_connection(A: AlgebroidChart, degree: int, rng: random.Random) -> AConnection:
    r = A.rank
    G = [[[random_polynomial(A.base_dim, degree, rng) for _ in range(r)] for _ in range(r)] for _ in range(r)]
    return AConnection(A, G, "random")

