"""Definition documents: JSON schema, diagnostics with positions, canonical output.

Indices in documents are 1-based; the Python objects built from them are
0-based.  Rationals are strings "p" or "p/q" (plain integers are accepted
on input); polynomials use the term-record format of :mod:`kernel`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import yaml

from .algebroid import AlgebroidChart
from .cartan import FiberBracket, Geometry, LinearConnection
from .connections import AConnection
from .kernel import Polynomial, StructuralError, rational_from_str, rational_to_str
from .lie import KleinPair, LieAlgebra, MutationForm, Subspace

COLLECTIONS = (
    "lieAlgebras",
    "subspaces",
    "kleinPairs",
    "charts",
    "fiberBrackets",
    "aConnections",
    "linearConnections",
    "mutationForms",
    "geometries",
)


# --------------------------------------------------------------------------
# diagnostics


class DocumentError(ValueError):
    kind = "document"

    def __init__(self, rule: str, path: tuple = (), line: int | None = None, column: int | None = None):
        self.rule = rule
        self.path = tuple(path)
        self.line = line
        self.column = column
        super().__init__(self.describe())

    @property
    def pointer(self) -> str:
        return "/" + "/".join(str(p) for p in self.path) if self.path else "/"

    def describe(self) -> str:
        where = f"line {self.line}, column {self.column}: " if self.line is not None else ""
        return f"{self.kind} error at {where}{self.pointer}: {self.rule}"

    def to_dict(self) -> dict:
        return {
            "class": self.kind,
            "rule": self.rule,
            "path": self.pointer,
            "line": self.line,
            "column": self.column,
        }


class SyntaxDiagnostic(DocumentError):
    kind = "syntax"


class SchemaDiagnostic(DocumentError):
    kind = "schema"


class ReferenceDiagnostic(DocumentError):
    kind = "reference"


class DimensionDiagnostic(DocumentError):
    kind = "dimension"


def _locate(text: str, path: tuple) -> tuple[int | None, int | None]:
    """1-based line/column of the node at ``path`` (best effort, via a YAML node walk)."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None, None
    best = node
    for key in path:
        if node is None:
            break
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and 0 <= key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = best = nxt
    if best is None:
        return None, None
    return best.start_mark.line + 1, best.start_mark.column + 1


# --------------------------------------------------------------------------
# document model


@dataclass(frozen=True)
class SubspaceEntry:
    algebra: str
    space: Subspace


@dataclass(frozen=True)
class KleinPairEntry:
    algebra: str
    subspace: str
    pair: KleinPair


@dataclass(frozen=True)
class GeometryEntry:
    name: str
    chart: str
    connection: str
    fiber_bracket: str
    blaom: str | None = None
    mutation_form: str | None = None


@dataclass
class DefinitionDocument:
    lie_algebras: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)
    klein_pairs: dict = field(default_factory=dict)
    charts: dict = field(default_factory=dict)
    fiber_brackets: dict = field(default_factory=dict)
    a_connections: dict = field(default_factory=dict)
    linear_connections: dict = field(default_factory=dict)
    mutation_forms: dict = field(default_factory=dict)
    geometries: dict = field(default_factory=dict)

    def klein_pair(self, name: str) -> KleinPair:
        return self._get(self.klein_pairs, "kleinPairs", name).pair

    def geometry(self, name: str) -> Geometry:
        g = self._get(self.geometries, "geometries", name)
        return Geometry(
            g.name,
            self.charts[g.chart],
            self.a_connections[g.connection],
            self.fiber_brackets[g.fiber_bracket],
            self.linear_connections[g.blaom] if g.blaom else None,
            meta={"mutationForm": g.mutation_form} if g.mutation_form else {},
        )

    def get(self, collection: str, name: str):
        attr = _ATTR[collection]
        return self._get(getattr(self, attr), collection, name)

    @staticmethod
    def _get(table: dict, collection: str, name: str):
        if name not in table:
            known = ", ".join(table) or "none"
            raise ReferenceDiagnostic(f"no entry {name!r} in {collection} (known: {known})", (collection,))
        return table[name]

    def add(self, collection: str, name: str, obj) -> None:
        getattr(self, _ATTR[collection])[name] = obj


_ATTR = {
    "lieAlgebras": "lie_algebras",
    "subspaces": "subspaces",
    "kleinPairs": "klein_pairs",
    "charts": "charts",
    "fiberBrackets": "fiber_brackets",
    "aConnections": "a_connections",
    "linearConnections": "linear_connections",
    "mutationForms": "mutation_forms",
    "geometries": "geometries",
}


# --------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.doc = DefinitionDocument()

    def fail(self, cls, rule: str, path) -> None:
        line, col = _locate(self.text, tuple(path))
        raise cls(rule, tuple(path), line, col)

    # primitive readers
    def obj(self, value, path, required: set, optional: set = frozenset()) -> dict:
        if not isinstance(value, dict):
            self.fail(SchemaDiagnostic, "expected an object", path)
        missing = sorted(required - set(value))
        if missing:
            self.fail(SchemaDiagnostic, f"missing required field {missing[0]!r}", path)
        extra = sorted(set(value) - required - set(optional))
        if extra:
            self.fail(SchemaDiagnostic, f"unknown field {extra[0]!r}", path + [extra[0]])
        return value

    def lst(self, value, path, length: int | None = None, what: str = "list") -> list:
        if not isinstance(value, list):
            self.fail(SchemaDiagnostic, f"expected a {what}", path)
        if length is not None and len(value) != length:
            self.fail(DimensionDiagnostic, f"expected {length} entries, found {len(value)}", path)
        return value

    def name(self, value, path) -> str:
        if not isinstance(value, str) or not value:
            self.fail(SchemaDiagnostic, "name must be a non-empty string", path)
        return value

    def count(self, value, path, minimum: int = 0) -> int:
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            self.fail(SchemaDiagnostic, f"expected an integer >= {minimum}", path)
        return value

    def rational(self, value, path) -> Fraction:
        if isinstance(value, int) and not isinstance(value, bool):
            return Fraction(value)
        if not isinstance(value, str):
            self.fail(SchemaDiagnostic, "rational must be a string 'p' or 'p/q'", path)
        try:
            return rational_from_str(value)
        except (ValueError, ZeroDivisionError) as exc:
            self.fail(SchemaDiagnostic, f"malformed rational {value!r}: {exc}", path)

    def poly(self, value, path, nvars: int) -> Polynomial:
        self.lst(value, path, what="list of term records")
        acc = {}
        for n, rec in enumerate(value):
            p = path + [n]
            self.obj(rec, p, {"coefficient", "exponents"})
            exps = self.lst(rec["exponents"], p + ["exponents"])
            if any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in exps):
                self.fail(SchemaDiagnostic, "exponents must be non-negative integers", p + ["exponents"])
            if len(exps) != nvars:
                self.fail(
                    DimensionDiagnostic,
                    f"exponent vector has length {len(exps)}, chart has {nvars} coordinates",
                    p + ["exponents"],
                )
            c = self.rational(rec["coefficient"], p + ["coefficient"])
            if tuple(exps) in acc:
                self.fail(SchemaDiagnostic, f"duplicate exponent vector {exps}", p)
            acc[tuple(exps)] = c
        return Polynomial(nvars, acc)

    def pairs(self, value, path, dim: int, reader) -> dict:
        """[{i, j, coeffs}] with 1 <= i < j <= dim -> {(i-1, j-1): [dim entries]}."""
        out = {}
        for n, rec in enumerate(self.lst(value, path)):
            p = path + [n]
            self.obj(rec, p, {"i", "j", "coeffs"})
            i = self.count(rec["i"], p + ["i"], 1)
            j = self.count(rec["j"], p + ["j"], 1)
            if i > dim or j > dim:
                self.fail(DimensionDiagnostic, f"index out of range 1..{dim}", p)
            if not i < j:
                self.fail(SchemaDiagnostic, "pairs must satisfy i < j", p)
            if (i - 1, j - 1) in out:
                self.fail(SchemaDiagnostic, f"pair ({i}, {j}) listed twice", p)
            coeffs = self.lst(rec["coeffs"], p + ["coeffs"], dim)
            out[(i - 1, j - 1)] = [reader(c, p + ["coeffs", k]) for k, c in enumerate(coeffs)]
        return out

    def ref(self, collection: str, value, path):
        name = self.name(value, path)
        table = getattr(self.doc, _ATTR[collection])
        if name not in table:
            self.fail(ReferenceDiagnostic, f"unresolved reference to {collection} entry {name!r}", path)
        return table[name]

    # collections
    def run(self, data) -> DefinitionDocument:
        self.obj(data, [], set(), set(COLLECTIONS) | {"version"})
        if "version" in data and data["version"] != 1:
            self.fail(SchemaDiagnostic, "unsupported version (expected 1)", ["version"])
        for coll in COLLECTIONS:
            entries = self.lst(data.get(coll, []), [coll])
            reader = getattr(self, "read_" + _ATTR[coll])
            for n, entry in enumerate(entries):
                path = [coll, n]
                name = self.name(entry.get("name") if isinstance(entry, dict) else None, path + ["name"])
                if name in getattr(self.doc, _ATTR[coll]):
                    self.fail(SchemaDiagnostic, f"duplicate name {name!r} in {coll}", path + ["name"])
                try:
                    obj = reader(entry, path)
                except StructuralError as exc:
                    self.fail(SchemaDiagnostic, str(exc), path)
                self.doc.add(coll, name, obj)
        return self.doc

    def read_lie_algebras(self, e, path):
        self.obj(e, path, {"name", "dim", "brackets"})
        n = self.count(e["dim"], path + ["dim"], 1)
        br = self.pairs(e["brackets"], path + ["brackets"], n, self.rational)
        return LieAlgebra.from_brackets(e["name"], n, br)

    def read_subspaces(self, e, path):
        self.obj(e, path, {"name", "algebra", "basis"})
        g = self.ref("lieAlgebras", e["algebra"], path + ["algebra"])
        vecs = []
        for n, v in enumerate(self.lst(e["basis"], path + ["basis"])):
            p = path + ["basis", n]
            vecs.append([self.rational(x, p + [k]) for k, x in enumerate(self.lst(v, p, g.dim))])
        try:
            space = Subspace(g.dim, tuple(tuple(v) for v in vecs), e["name"])
        except StructuralError as exc:
            self.fail(SchemaDiagnostic, str(exc), path + ["basis"])
        return SubspaceEntry(g.name, space)

    def read_klein_pairs(self, e, path):
        self.obj(e, path, {"name", "algebra", "subalgebra"})
        g = self.ref("lieAlgebras", e["algebra"], path + ["algebra"])
        sub = self.ref("subspaces", e["subalgebra"], path + ["subalgebra"])
        if sub.algebra != g.name:
            self.fail(ReferenceDiagnostic, f"subspace {e['subalgebra']!r} lives in {sub.algebra!r}", path + ["subalgebra"])
        return KleinPairEntry(g.name, e["subalgebra"], KleinPair(g, sub.space, e["name"]))

    def read_charts(self, e, path):
        self.obj(e, path, {"name", "baseDim", "rank", "anchor", "gamma"}, {"kernelFrame", "lift"})
        m = self.count(e["baseDim"], path + ["baseDim"])
        r = self.count(e["rank"], path + ["rank"], 1)

        def poly(v, p):
            return self.poly(v, p, m)

        def sections(key, count=None, length=r):
            out = []
            for n, col in enumerate(self.lst(e[key], path + [key], count)):
                p = path + [key, n]
                out.append(tuple(poly(c, p + [k]) for k, c in enumerate(self.lst(col, p, length))))
            return tuple(out)

        anchor = sections("anchor", r, m)
        gam = self.pairs(e["gamma"], path + ["gamma"], r, poly)
        gamma = _complete(gam, r, Polynomial.zero(m))
        kf = sections("kernelFrame") if "kernelFrame" in e else None
        lift = sections("lift", m) if "lift" in e else None
        return AlgebroidChart(e["name"], m, r, anchor, gamma, kf, lift)

    def read_fiber_brackets(self, e, path):
        self.obj(e, path, {"name", "chart", "f"})
        A = self.ref("charts", e["chart"], path + ["chart"])
        f = self.pairs(e["f"], path + ["f"], A.rank, lambda v, p: self.poly(v, p, A.base_dim))
        return FiberBracket(A, _complete(f, A.rank, A.zero()), e["name"])

    def _array3(self, value, path, dims, nvars):
        out = []
        for a, plane in enumerate(self.lst(value, path, dims[0])):
            rows = []
            for j, row in enumerate(self.lst(plane, path + [a], dims[1])):
                p = path + [a, j]
                rows.append([self.poly(c, p + [k], nvars) for k, c in enumerate(self.lst(row, p, dims[2]))])
            out.append(rows)
        return out

    def read_a_connections(self, e, path):
        self.obj(e, path, {"name", "chart", "Gamma"})
        A = self.ref("charts", e["chart"], path + ["chart"])
        r = A.rank
        return AConnection(A, self._array3(e["Gamma"], path + ["Gamma"], (r, r, r), A.base_dim), e["name"])

    def read_linear_connections(self, e, path):
        self.obj(e, path, {"name", "chart", "G"})
        A = self.ref("charts", e["chart"], path + ["chart"])
        r = A.rank
        G = self._array3(e["G"], path + ["G"], (A.base_dim, r, r), A.base_dim)
        return LinearConnection(A, G, e["name"])

    def read_mutation_forms(self, e, path):
        self.obj(e, path, {"name", "dim", "omega"})
        n = self.count(e["dim"], path + ["dim"], 1)
        return MutationForm.from_brackets(n, self.pairs(e["omega"], path + ["omega"], n, self.rational), e["name"])

    def read_geometries(self, e, path):
        self.obj(e, path, {"name", "chart", "connection", "fiberBracket"}, {"blaom", "mutationForm"})
        A = self.ref("charts", e["chart"], path + ["chart"])
        parts = [("aConnections", "connection"), ("fiberBrackets", "fiberBracket")]
        if "blaom" in e:
            parts.append(("linearConnections", "blaom"))
        for coll, key in parts:
            obj = self.ref(coll, e[key], path + [key])
            if obj.chart != A:
                self.fail(ReferenceDiagnostic, f"{key} {e[key]!r} is not defined on chart {A.name!r}", path + [key])
        if "mutationForm" in e:
            w = self.ref("mutationForms", e["mutationForm"], path + ["mutationForm"])
            if w.dim != A.rank:
                self.fail(DimensionDiagnostic, f"mutation form has dim {w.dim}, chart rank is {A.rank}", path + ["mutationForm"])
        return GeometryEntry(e["name"], e["chart"], e["connection"], e["fiberBracket"], e.get("blaom"), e.get("mutationForm"))


def _complete(pairs: dict, r: int, zero) -> list:
    out = [[[zero] * r for _ in range(r)] for _ in range(r)]
    for (i, j), coeffs in pairs.items():
        out[i][j] = list(coeffs)
        out[j][i] = [-c for c in coeffs]
    return out


def parse(text: str) -> DefinitionDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SyntaxDiagnostic(exc.msg, (), exc.lineno, exc.colno) from None
    return _Parser(text).run(data)


def from_data(data: dict) -> DefinitionDocument:
    return parse(json.dumps(data))


# --------------------------------------------------------------------------
# canonical serialization


def _rat(q) -> str:
    return rational_to_str(Fraction(q))


def _pairs_out(arr, r: int, conv) -> list:
    out = []
    for i in range(r):
        for j in range(i + 1, r):
            row = arr[i][j]
            if any(row):
                out.append({"i": i + 1, "j": j + 1, "coeffs": [conv(c) for c in row]})
    return out


def _poly(p: Polynomial) -> list:
    return p.to_json()


def to_data(doc: DefinitionDocument) -> dict:
    out: dict[str, Any] = {"version": 1}
    if doc.lie_algebras:
        out["lieAlgebras"] = [
            {"name": name, "dim": g.dim, "brackets": _pairs_out(g.C, g.dim, _rat)} for name, g in doc.lie_algebras.items()
        ]
    if doc.subspaces:
        out["subspaces"] = [
            {"name": name, "algebra": s.algebra, "basis": [[_rat(x) for x in v] for v in s.space.basis]}
            for name, s in doc.subspaces.items()
        ]
    if doc.klein_pairs:
        out["kleinPairs"] = [
            {"name": name, "algebra": k.algebra, "subalgebra": k.subspace} for name, k in doc.klein_pairs.items()
        ]
    if doc.charts:
        charts = []
        for name, A in doc.charts.items():
            rec = {
                "name": name,
                "baseDim": A.base_dim,
                "rank": A.rank,
                "anchor": [[_poly(p) for p in col] for col in A.anchor],
                "gamma": _pairs_out(A.gamma, A.rank, _poly),
            }
            if A.kernel_frame is not None:
                rec["kernelFrame"] = [[_poly(p) for p in s] for s in A.kernel_frame]
            if A.lift is not None:
                rec["lift"] = [[_poly(p) for p in s] for s in A.lift]
            charts.append(rec)
        out["charts"] = charts
    if doc.fiber_brackets:
        out["fiberBrackets"] = [
            {"name": name, "chart": fb.chart.name, "f": _pairs_out(fb.f, fb.chart.rank, _poly)}
            for name, fb in doc.fiber_brackets.items()
        ]
    if doc.a_connections:
        out["aConnections"] = [
            {"name": name, "chart": D.chart.name, "Gamma": [[[_poly(p) for p in row] for row in pl] for pl in D.Gamma]}
            for name, D in doc.a_connections.items()
        ]
    if doc.linear_connections:
        out["linearConnections"] = [
            {"name": name, "chart": nc.chart.name, "G": [[[_poly(p) for p in row] for row in pl] for pl in nc.G]}
            for name, nc in doc.linear_connections.items()
        ]
    if doc.mutation_forms:
        out["mutationForms"] = [
            {"name": name, "dim": w.dim, "omega": _pairs_out(w.Omega, w.dim, _rat)} for name, w in doc.mutation_forms.items()
        ]
    if doc.geometries:
        geos = []
        for name, g in doc.geometries.items():
            rec = {"name": name, "chart": g.chart, "connection": g.connection, "fiberBracket": g.fiber_bracket}
            if g.blaom:
                rec["blaom"] = g.blaom
            if g.mutation_form:
                rec["mutationForm"] = g.mutation_form
            geos.append(rec)
        out["geometries"] = geos
    return out


def serialize(doc: DefinitionDocument) -> str:
    return json.dumps(to_data(doc), indent=2, ensure_ascii=False) + "\n"
