"""Regenerate the frozen Lie-algebra regression files with an independent sympy oracle.

The structure constants are read from the catalog documents (the data of
record); every answer is then recomputed with sympy's exact matrices, so
nothing here goes through the package's own linear algebra.

    python3 scripts/generate_regressions.py [--check]
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import sympy as sp

from cartan_algebroids.catalog import _PAIRS, catalog

OUT = Path(__file__).resolve().parents[1] / "src" / "cartan_algebroids" / "data" / "regression"


def constants(g) -> list:
    n = g.dim
    return [[[sp.Rational(g.C[i][j][k].numerator, g.C[i][j][k].denominator) for k in range(n)]
             for j in range(n)] for i in range(n)]


def bracket(C, u, v):
    n = len(C)
    return [sum(u[i] * v[j] * C[i][j][k] for i in range(n) for j in range(n)) for k in range(n)]


def rref_basis(vectors, n) -> list:
    if not vectors:
        return []
    M = sp.Matrix(vectors)
    R, piv = M.rref()
    return [[str(R[r, c]) for c in range(n)] for r in range(len(piv))]


def center(C):
    n = len(C)
    # u with {u, e_j} = 0 for all j: rows indexed by (j, k)
    M = sp.Matrix([[C[i][j][k] for i in range(n)] for j in range(n) for k in range(n)])
    return [list(v) for v in M.nullspace()]


def derivations(C):
    n = len(C)
    syms = sp.symbols(f"d0:{n * n}")
    Dm = sp.Matrix(n, n, syms)
    eqs = []
    for i, j in itertools.product(range(n), repeat=2):
        ei = sp.Matrix([int(a == i) for a in range(n)])
        ej = sp.Matrix([int(a == j) for a in range(n)])
        lhs = Dm * sp.Matrix(bracket(C, list(ei), list(ej)))
        rhs = sp.Matrix(bracket(C, list(Dm * ei), list(ej))) + sp.Matrix(bracket(C, list(ei), list(Dm * ej)))
        eqs.extend(lhs - rhs)
    A, _ = sp.linear_eq_to_matrix(eqs, syms) if eqs else (sp.zeros(0, n * n), None)
    der_dim = n * n - A.rank()
    ads = sp.Matrix([[C[i][j][k] for j in range(n) for k in range(n)] for i in range(n)])
    return der_dim, ads.rank()


def normalizer(C, h):
    n = len(C)
    hb = sp.Matrix(h).T  # columns span h
    ann = hb.T.nullspace()  # functionals vanishing on h
    xs = sp.symbols(f"x0:{n}")
    eqs = []
    for v in h:
        b = bracket(C, list(xs), v)
        for a in ann:
            eqs.append(sum(a[k] * b[k] for k in range(n)))
    if not eqs:
        return [[int(a == i) for a in range(n)] for i in range(n)]
    A, _ = sp.linear_eq_to_matrix(eqs, xs)
    return [list(v) for v in A.nullspace()]


def record(key: str) -> dict:
    doc = catalog(key)
    (g,) = doc.lie_algebras.values()
    C = constants(g)
    n = g.dim
    pair_name, sub_name, _ = _PAIRS[key]
    h = [[sp.Rational(x.numerator, x.denominator) for x in v] for v in doc.subspaces[sub_name].space.basis]
    z = center(C)
    der_dim, inner = derivations(C)
    N = normalizer(C, h)
    norm_equals_h = sp.Matrix(N).rank() == sp.Matrix(h).rank() == sp.Matrix(N + h).rank()
    return {
        "algebra": g.name,
        "dim": n,
        "center": {"dim": len(z), "basis": rref_basis(z, n)},
        "derivations": {"dim": der_dim, "inner_dim": inner, "all_inner": der_dim == inner},
        "pair": {
            "name": pair_name,
            "h": rref_basis(h, n),
            "normalizer": {"dim": len(N), "basis": rref_basis(N, n)},
            "conditions": {
                "derivations-inner": der_dim == inner,
                "center-zero": len(z) == 0,
                "normalizer-is-h": bool(norm_equals_h),
            },
            "model_dim": n - len(h),
        },
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of writing")
    args = ap.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    stale = []
    for key in _PAIRS:
        text = json.dumps(record(key), indent=2) + "\n"
        path = OUT / f"{key}.json"
        if args.check:
            if not path.exists() or path.read_text() != text:
                stale.append(path.name)
        else:
            path.write_text(text)
            print(f"wrote {path}")
    if stale:
        print("stale regression files: " + ", ".join(stale), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
