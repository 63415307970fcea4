"""Command-line driver: ``cartan-algebroids <command> <file|catalog:NAME> ...``.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 input or
usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from pathlib import Path

from . import __version__
from . import catalog as cat
from .algebroid import chart_validate
from .cartan import (
    UnsupportedChartError,
    WellDefinednessError,
    fb_validate,
    identity_suite,
    mutate_geometry,
    parallel_sections,
    sharpe_constancy,
    space_form_check,
    structure_from_parallel,
    theorem3_reconstruct,
)
from .connections import (
    HypothesisError,
    PreconditionError,
    bianchi_residual,
    conn_dual,
    conn_torsion,
    extends_canonical,
    is_representation,
    is_symmetric,
    random_section,
    torsion_tensoriality,
)
from .document import DocumentError, parse
from .kernel import ZeroTest, default_grid_size
from .lie import is_subalgebra, klein_check, la_validate
from .report import FAIL, PASS, CheckItem, Report, check

TOOL = "cartan-algebroids"


class InputError(Exception):
    pass


def load_source(source: str):
    """(document, raw text) for a path or a ``catalog:NAME`` URI."""
    if source.startswith("catalog:"):
        try:
            text = cat.catalog_text(source[len("catalog:") :])
        except cat.CatalogError as exc:
            raise InputError(str(exc.args[0])) from None
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc.strerror}") from None
    return parse(text), text


def _refusal(suite: str, exc: PreconditionError) -> Report:
    name = exc.hypothesis if isinstance(exc, HypothesisError) else "precondition"
    items = [CheckItem(f"hypothesis:{name}", FAIL, note=str(exc))]
    inner = getattr(exc, "report", None)
    if inner is not None:
        items.extend(inner.items)
    return Report(suite, tuple(items))


# --------------------------------------------------------------------------
# commands


def cmd_validate(doc, args, zt):
    reports = []
    for name, g in doc.lie_algebras.items():
        reports.append(_prefixed(la_validate(g), f"lieAlgebras/{name}"))
    for name, k in doc.klein_pairs.items():
        ok, witness = is_subalgebra(k.pair.g, k.pair.h)
        reports.append(Report(f"kleinPairs/{name}", (check("subalgebra", ok, witness=witness),)))
    for name, A in doc.charts.items():
        reports.append(_prefixed(chart_validate(A, zt, args.grid), f"charts/{name}"))
    for name, fb in doc.fiber_brackets.items():
        reports.append(_prefixed(fb_validate(fb, zt), f"fiberBrackets/{name}"))
    if not reports:
        reports.append(Report("document", (check("parsed", True),)))
    return reports


def _prefixed(rep: Report, suite: str) -> Report:
    return Report(suite, rep.items, rep.mode, rep.grid, rep.data)


def cmd_klein(doc, args, zt):
    return [klein_check(doc.klein_pair(args.pair))]


def cmd_algebroid(doc, args, zt):
    return [chart_validate(doc.get("charts", args.chart), zt, args.grid)]


def cmd_connection(doc, args, zt):
    D = doc.get("aConnections", args.conn)
    out = []
    if args.dual:
        Dd = conn_dual(D)
        out.append(
            Report(
                f"dual {D.name}",
                (
                    check("dual-involution", conn_dual(Dd).Gamma == D.Gamma),
                    check("torsion-antiequivariance", conn_torsion(Dd).T == (-conn_torsion(D)).T),
                ),
                data={"Gamma*": Dd.Gamma},
            )
        )
    if args.torsion:
        rng = random.Random(0)
        pairs = [(random_section(D.chart, 2, rng), random_section(D.chart, 2, rng)) for _ in range(5)]
        rep = torsion_tensoriality(D, pairs, zt)
        out.append(Report(rep.suite, rep.items, rep.mode, data={"T": conn_torsion(D).T}))
    if args.curvature:
        out.append(is_representation(D, zt))
    if args.symmetric:
        out.append(is_symmetric(D, zt))
    if args.bianchi:
        try:
            out.append(bianchi_residual(D, zt))
        except HypothesisError as exc:
            out.append(_refusal(f"bianchi {D.name}", exc))
    if not out:
        out.append(is_representation(D, zt))
        try:
            out.append(extends_canonical(D, zt=zt))
        except PreconditionError as exc:
            out.append(_refusal(f"extends-canonical {D.name}", exc))
        out.append(is_symmetric(D, zt))
    return out


def cmd_identities(doc, args, zt):
    G = doc.geometry(args.geometry)
    return [identity_suite(G.D, G.fb, zt=zt, grid=args.grid)]


def cmd_theorem3(doc, args, zt):
    G = doc.geometry(args.geometry)
    try:
        fb_new, rep = theorem3_reconstruct(G.D, zt)
    except HypothesisError as exc:
        return [_refusal(f"theorem3 {G.D.name}", exc)]
    items = list(rep.items)
    if G.fb.f == fb_new.f:
        note = "reconstructed bracket equals the geometry's bracket"
    else:
        note = "reconstructed bracket differs from the geometry's bracket"
    wname = G.meta.get("mutationForm")
    if wname:
        w = doc.mutation_forms[wname]
        mutant, _ = mutate_geometry(G.fb, w, G.D, zt)
        items.append(check("equals-mutant", mutant.f == fb_new.f, witness=None, mode=zt.mode, note=f"{{,}} − {wname}"))
    return [Report(rep.suite, tuple(items), rep.mode, data={"f": fb_new.f, "comparison": note})]


def cmd_parallel(doc, args, zt):
    nc = doc.get("linearConnections", args.linconn)
    basis = parallel_sections(nc, args.max_degree)
    r = nc.chart.rank
    items = [check("full-dimension", len(basis) == r, witness=len(basis), note=f"dimension {len(basis)} of rank {r}")]
    data = {"max_degree": args.max_degree, "dimension": len(basis), "basis": basis}
    if len(basis) == r:
        C, rep = structure_from_parallel(nc.chart, basis)
        items.extend(rep.items)
        if C is not None:
            data["structure_constants"] = C
    return [Report(f"parallel {nc.name}", tuple(items), "symbolic", data=data)]


def cmd_mutate(doc, args, zt):
    fb = doc.get("fiberBrackets", args.fb)
    w = doc.get("mutationForms", args.omega)
    D = doc.get("aConnections", args.conn) if args.conn else None
    new, rep = mutate_geometry(fb, w, D, zt)
    return [Report(rep.suite, rep.items, rep.mode, data={"f": new.f})]


def cmd_spaceform(doc, args, zt):
    G = doc.geometry(args.geometry)
    try:
        constant, omega, rep = space_form_check(G.D, G.fb, zt)
    except HypothesisError as exc:
        return [_refusal(f"space-form {G.D.name}", exc)]
    data = dict(rep.data)
    if omega is not None:
        data["omega"] = omega.Omega
    out = [Report(rep.suite, rep.items, rep.mode, data=data)]
    if G.chart.base_dim:
        out.append(sharpe_constancy(G.D, G.fb, args.grid))
    return out


COMMANDS = {
    "validate": cmd_validate,
    "klein": cmd_klein,
    "algebroid": cmd_algebroid,
    "connection": cmd_connection,
    "identities": cmd_identities,
    "theorem3": cmd_theorem3,
    "parallel": cmd_parallel,
    "mutate": cmd_mutate,
    "spaceform": cmd_spaceform,
}


# --------------------------------------------------------------------------
# argument parsing


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--mode", choices=("symbolic", "pointwise"), default=d if suppress else "symbolic")
    parser.add_argument("--grid", type=int, default=d, help="grid points per coordinate (pointwise checks)")
    parser.add_argument("--report", metavar="PATH", default=d, help="write the structured report here")
    parser.add_argument("--quiet", action="store_true", default=d if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description="Exact verification of Cartan algebroid identities.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        _common(sp, suppress=True)
        if name != "catalog":
            sp.add_argument("source", help="definition file or catalog:NAME")
        return sp

    add("validate", "parse a document and check every algebra, chart and fiber bracket")
    add("klein", "Klein-pair hypotheses").add_argument("--pair", required=True)
    add("algebroid", "algebroid axioms of a chart").add_argument("--chart", required=True)
    sp = add("connection", "A-connection checks")
    sp.add_argument("--conn", required=True)
    for flag in ("dual", "torsion", "curvature", "symmetric", "bianchi"):
        sp.add_argument(f"--{flag}", action="store_true")
    add("identities", "the nine-item identity suite").add_argument("--geometry", required=True)
    add("theorem3", "symmetric reconstruction {,}' = −T").add_argument("--geometry", required=True)
    sp = add("parallel", "parallel sections of a linear connection")
    sp.add_argument("--linconn", required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp = add("mutate", "mutate a constant fiber bracket by Ω")
    sp.add_argument("--fb", required=True)
    sp.add_argument("--omega", required=True)
    sp.add_argument("--conn", help="also check mutant flatness T = −{,}' for this connection")
    add("spaceform", "constant curvature check").add_argument("--geometry", required=True)
    sp = add("catalog", "print a built-in document")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--list", action="store_true")
    return p


def _digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def verification_report(args, source: str, text: str, reports: list[Report], zt: ZeroTest) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "command": args.command,
        "input": {"source": source, "digest": _digest(text)},
        "mode": zt.mode,
        "grid": zt.grid,
        "status": PASS if all(r.passed for r in reports) else FAIL,
        "reports": [r.to_dict() for r in reports],
    }


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "catalog":
        if args.list or args.name in (None, "--list"):
            if not args.list and args.name is None:
                print("catalog: give a NAME or --list", file=stderr)
                return 2
            print("\n".join(cat.NAMES), file=stdout)
            return 0
        try:
            stdout.write(cat.catalog_text(args.name))
        except cat.CatalogError as exc:
            print(f"error: {exc.args[0]}", file=stderr)
            return 2
        return 0
    try:
        grid = args.grid if args.grid is not None else default_grid_size()
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if grid < 1:
        print("error: --grid must be positive", file=stderr)
        return 2
    args.grid = grid
    zt = ZeroTest(args.mode, grid)
    try:
        doc, text = load_source(args.source)
        reports = COMMANDS[args.command](doc, args, zt)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except DocumentError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (UnsupportedChartError, WellDefinednessError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    vr = verification_report(args, args.source, text, reports, zt)
    if args.report:
        try:
            Path(args.report).write_text(json.dumps(vr, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write report: {exc.strerror}", file=stderr)
            return 2
    if not args.quiet:
        for rep in reports:
            print(rep.render(), file=stdout)
    return 0 if vr["status"] == PASS else 1


def main() -> None:
    sys.exit(run_command())

