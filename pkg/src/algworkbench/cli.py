"""Command-line entry point ``algwb``.

Every command writes one JSON document (sorted keys, ``schema_version``) to
stdout or ``--out``; diagnostics go to stderr as JSON lines. Exit codes: 0 ok,
1 verification failure, 2 usage error or malformed input, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .errors import BudgetExceeded, StructuralError, WorkbenchError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

BUDGET_PROFILES = {
    "small": {"atoms": 20_000, "positions": 20_000, "nodes": 6, "base": 4, "matrices": 200_000},
    "default": {"atoms": 200_000, "positions": 200_000, "nodes": 8, "base": 6, "matrices": 2_000_000},
    "large": {"atoms": 2_000_000, "positions": 2_000_000, "nodes": 10, "base": 8, "matrices": 20_000_000},
}
CONSTRUCTIONS = ("monk", "rainbow", "blur", "hirsch", "matrices", "rainbow-ca")


class UsageError(WorkbenchError):
    pass


def _profile():
    name = os.environ.get("ALGWB_BUDGET_PROFILE", "default")
    if name not in BUDGET_PROFILES:
        raise UsageError(f"unknown budget profile {name!r}; choose from {sorted(BUDGET_PROFILES)}")
    return dict(BUDGET_PROFILES[name])


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return v


def _diag(**fields):
    sys.stderr.write(json.dumps(fields, sort_keys=True, default=str) + "\n")


def _emit(doc, out):
    doc = dict(doc)
    doc.setdefault("schema_version", SCHEMA_VERSION)
    text = json.dumps(doc, sort_keys=True, default=_json_default) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    import numpy as np

    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _read(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise StructuralError(f"{path} is not JSON: {e}") from None


def _load_structure(path):
    from . import ra_core
    from .cyl_core import structure

    doc = _read(path)
    kind = doc.get("kind")
    loader = {"ra_atom_structure": ra_core.from_json_dict, "ca_atom_structure": structure.from_json_dict}.get(kind)
    if loader is not None:
        try:
            return loader(doc)
        except (KeyError, TypeError, IndexError) as e:
            raise StructuralError(f"{path}: malformed {kind} document: {e!r}") from None
    raise StructuralError(f"{path}: unknown document kind {kind!r}")


# --------------------------------------------------------------------------
# commands


def cmd_build(args, budgets):
    from . import ra_core
    from .cyl_core import structure

    name = args.construction
    if name == "monk":
        from .constructions import monk_ra
        from .graphs import graph_from_name

        S = monk_ra(graph_from_name(args.graph), args.colours)
        rep = ra_core.validate_atom_structure(S)
        doc = ra_core.to_json_dict(S)
    elif name == "rainbow":
        from .constructions import rainbow_ra
        from .graphs import LinearOrderSpec

        S = rainbow_ra(LinearOrderSpec(args.green_order, args.greens), LinearOrderSpec(args.red_order, args.reds),
                       args.copies)
        rep = ra_core.validate_atom_structure(S)
        doc = ra_core.to_json_dict(S)
    elif name == "blur":
        from .constructions import BlurSpec, blur_structure, f_family

        if args.spec:
            spec_doc = _read(args.spec)
            base = ra_core.from_json_dict(spec_doc["base"]) if "base" in spec_doc else f_family(
                args.l, args.n_base, 1, args.t)[1]
            spec = BlurSpec.from_json_dict(spec_doc["spec"] if "spec" in spec_doc else spec_doc)
        else:
            spec, base = f_family(args.l, args.n_base, args.mu, args.t)
        S = blur_structure(spec, base).ra
        rep = ra_core.validate_atom_structure(S)
        doc = ra_core.to_json_dict(S, explicit=True)
    elif name == "hirsch":
        from .constructions import HirschParams, hirsch_algebra
        from .cyl_core.structure import ca_axiom_check, hirsch_ca

        H = hirsch_algebra(HirschParams(args.m, args.n, args.r), budget=budgets["atoms"])
        F = hirsch_ca(H)
        rep = ca_axiom_check(F, "PEA", check_commutativity=F.size <= 400)
        doc = structure.to_json_dict(F)
    elif name == "matrices":
        from .cyl_core.matrices import basic_matrices, matrices_ca
        from .cyl_core.structure import ca_axiom_check

        if not args.ra:
            raise UsageError("build matrices needs --ra FILE")
        S = _load_structure(args.ra)
        F = matrices_ca(basic_matrices(S, args.dim, budget=budgets["matrices"]))
        rep = ca_axiom_check(F, "PEA", check_commutativity=False)
        doc = structure.to_json_dict(F)
    else:
        from .cyl_core.coloured import Palette
        from .cyl_core.rainbow_atoms import rainbow_ca_atoms
        from .cyl_core.structure import ca_axiom_check

        F = rainbow_ca_atoms(Palette(3, args.tints, args.reds, args.copies), budget=budgets["atoms"])
        rep = ca_axiom_check(F, "PEA", check_commutativity=False)
        doc = structure.to_json_dict(F)
    ok = rep.ok
    summary = {"atoms": len(doc["atoms"]), "valid": bool(ok)}
    if hasattr(rep, "laws"):
        summary["failed_laws"] = rep.laws()
    else:
        summary["failed_axioms"] = rep.failed()
    doc["build"] = {"construction": name, "summary": summary}
    _emit(doc, args.out)
    _diag(event="build", **summary)
    return EXIT_OK


def cmd_validate(args, budgets):
    from .ra_core import RaAtomStructure, validate_atom_structure
    from .cyl_core.structure import ca_axiom_check

    S = _load_structure(args.structure)
    if isinstance(S, RaAtomStructure):
        rep = validate_atom_structure(S)
        doc = {"kind": "validation", "ok": rep.ok, "laws": rep.laws(),
               "violations": [v.as_dict() for v in rep.violations], "total": rep.total_violations}
    else:
        rep = ca_axiom_check(S, args.signature, check_commutativity=not args.no_commutativity)
        doc = {"kind": "validation", "ok": rep.ok_with_commutativity if not args.no_commutativity else rep.ok,
               "report": rep.to_json_dict()}
    _emit(doc, args.out)
    return EXIT_OK if doc["ok"] else EXIT_VERIFY


def cmd_matrices(args, budgets):
    from .cyl_core.matrices import basic_matrices

    S = _load_structure(args.ra)
    ms = basic_matrices(S, args.dim, budget=budgets["matrices"])
    doc = {"kind": "basic_matrices", "n": ms.n, "count": ms.size,
           "matrices": [[[int(v) for v in row] for row in M] for M in ms.mats]}
    _emit(doc, args.out)
    _diag(event="matrices", count=ms.size)
    return EXIT_OK


def cmd_basis_check(args, budgets):
    from .cyl_core.matrices import basic_matrices, is_cylindric_basis, required_amalgams

    S = _load_structure(args.ra)
    ms = basic_matrices(S, args.dim, budget=budgets["matrices"])
    rep = is_cylindric_basis(ms, polyadic=args.polyadic)
    doc = {"kind": "basis_check", "count": ms.size, "ok": bool(rep.ok), "witness": rep.witness}
    if args.required:
        doc["required_amalgams"] = len(required_amalgams(ms))
    _emit(doc, args.out)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_solve(args, budgets):
    from .games.solver import solve_game

    F = _load_structure(args.structure)
    if args.kind == "F" and (args.m is None or args.m <= F.dim):
        raise UsageError("parameter bound violated: F(m) needs --m greater than the dimension")
    res = solve_game(F, args.kind, args.rounds, node_budget=args.nodes or budgets["nodes"], m=args.m,
                     budget=args.budget or budgets["positions"], certificate=True)
    return _game_out(res.winner, res.to_json_dict(), args, "solve")


def cmd_hypersolve(args, budgets):
    from .games.hyper import solve_hypergame

    F = _load_structure(args.structure)
    moves = tuple(args.moves.split(","))
    res = solve_hypergame(F, args.rounds, node_budget=args.nodes or 4, moves=moves,
                          budget=args.budget or budgets["positions"], certificate=True)
    doc = res.to_json_dict()
    doc["kind"] = "hypergame"
    return _game_out(res.winner, doc, args, "hypersolve")


def _game_out(winner, doc, args, event):
    cert = doc.pop("certificate", None)
    if cert is not None and args.cert:
        _emit({"kind": "certificate", "game": event, "certificate": cert}, args.cert)
    doc["message"] = {"exists": "EXISTS wins", "forall": "FORALL wins"}.get(winner, "undetermined within budget")
    _emit(doc, args.out)
    _diag(event=event, winner=winner)
    return EXIT_BUDGET if winner == "undetermined" else EXIT_OK


def cmd_rep(args, budgets):
    from .ra_core import RaAtomStructure
    from .repsearch import find_ca_representation, find_square_representation

    S = _load_structure(args.structure)
    base = args.max_base or budgets["base"]
    if isinstance(S, RaAtomStructure):
        rep = find_square_representation(S, base)
    else:
        rep = find_ca_representation(S, S.dim, base)
    doc = {"kind": "representation_search", "found": rep.ok, "message": rep.message(), "max_base": base,
           "exhausted_bases": rep.tried}
    if rep.ok:
        doc["representation"] = rep.found.to_json_dict()
    _emit(doc, args.out)
    return EXIT_OK


def cmd_verify(args, budgets):
    from .repsearch import Representation, verify_representation

    S = _load_structure(args.structure)
    doc = _read(args.file)
    if doc.get("kind") == "certificate":
        return _replay(S, doc, args)
    if doc.get("kind") == "representation_search":
        if not doc.get("found"):
            raise StructuralError("search report contains no representation")
        doc = doc["representation"]
    try:
        R = Representation.from_json_dict(doc)
    except (KeyError, TypeError) as e:
        raise StructuralError(f"not a representation document: {e}") from None
    ok, why = verify_representation(S, R)
    _emit({"kind": "verification", "ok": ok, "violation": why}, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_replay(args, budgets):
    S = _load_structure(args.structure)
    return _replay(S, _read(args.file), args)


def _replay(S, doc, args):
    from .games.hyper_replay import replay_hyper_certificate
    from .games.naive import replay_certificate

    if doc.get("kind") != "certificate":
        raise StructuralError("not a certificate document")
    if doc.get("game") == "hypersolve":
        ok, msg = replay_hyper_certificate(S, doc["certificate"])
    else:
        ok, msg = replay_certificate(S, doc["certificate"])
    _emit({"kind": "replay", "ok": ok, "message": msg}, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_graph(args, budgets):
    from .graphs import chromatic_number, clique_number, girth, graph_from_name, seeded_random_graph

    if args.random:
        if args.seed is None:
            raise UsageError("random graphs need --seed")
        m, p = args.random
        G = seeded_random_graph(int(m), float(p), args.seed)
    else:
        if not args.name:
            raise UsageError("graph needs a name or --random M P")
        G = graph_from_name(args.name)
    chi = chromatic_number(G)
    doc = {"kind": "graph_report", "graph": G.to_json_dict(), "chromatic_number": chi.value,
           "chromatic_status": chi.status, "colouring": chi.colouring, "clique_number": clique_number(G),
           "girth": girth(G)}
    _emit(doc, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="algwb", description="Finite atom structures, games and representations.")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized generators")
    p.add_argument("--threads", type=_positive, default=1, help="worker threads (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", "-o", default=None, help="output file (default stdout)")
        return sp

    b = add("build", cmd_build, "build an atom structure")
    b.add_argument("construction", choices=CONSTRUCTIONS)
    b.add_argument("--graph", default="k3")
    b.add_argument("--colours", type=int, default=3)
    b.add_argument("--greens", type=_positive, default=2)
    b.add_argument("--reds", type=int, default=2)
    b.add_argument("--green-order", default="reversed-naturals")
    b.add_argument("--red-order", default="naturals")
    b.add_argument("--copies", type=_positive, default=1)
    b.add_argument("--l", type=int, default=2)
    b.add_argument("--n-base", type=int, default=6)
    b.add_argument("--mu", type=int, default=1)
    b.add_argument("--t", type=int, default=3)
    b.add_argument("--m", type=int, default=3)
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--r", type=int, default=1)
    b.add_argument("--ra", default=None, help="RA document for build matrices")
    b.add_argument("--dim", type=int, default=3)
    b.add_argument("--tints", type=int, default=1)
    b.add_argument("--spec", default=None, help="blur spec JSON (I, J, t) with optional base")

    v = add("validate", cmd_validate, "validate an RA or CA atom structure")
    v.add_argument("structure")
    v.add_argument("--signature", default="PEA")
    v.add_argument("--no-commutativity", action="store_true")

    m = add("matrices", cmd_matrices, "enumerate basic matrices")
    m.add_argument("ra")
    m.add_argument("--dim", type=int, default=3)

    bc = add("basis-check", cmd_basis_check, "check the cylindric basis property")
    bc.add_argument("ra")
    bc.add_argument("--dim", type=int, default=3)
    bc.add_argument("--polyadic", action="store_true")
    bc.add_argument("--required", action="store_true", help="also count required amalgams")

    s = add("solve", cmd_solve, "solve G or F(m) on a CA atom structure")
    s.add_argument("structure")
    s.add_argument("--kind", choices=("G", "F"), default="G")
    s.add_argument("--rounds", type=int, default=3)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--nodes", type=_positive, default=None)
    s.add_argument("--budget", type=_positive, default=None)
    s.add_argument("--cert", default=None, help="write the certificate here")

    h = add("hypersolve", cmd_hypersolve, "solve the hypernetwork game H")
    h.add_argument("structure")
    h.add_argument("--rounds", type=int, default=2)
    h.add_argument("--nodes", type=_positive, default=None)
    h.add_argument("--moves", default="cyl,transform,amalg")
    h.add_argument("--budget", type=_positive, default=None)
    h.add_argument("--cert", default=None)

    r = add("rep", cmd_rep, "search for a square representation")
    r.add_argument("structure")
    r.add_argument("--max-base", type=_positive, default=None)

    vf = add("verify", cmd_verify, "verify a representation or certificate file")
    vf.add_argument("structure")
    vf.add_argument("file")

    rp = add("replay", cmd_replay, "replay a game certificate")
    rp.add_argument("structure")
    rp.add_argument("file")

    g = add("graph", cmd_graph, "graph generators and invariants")
    g.add_argument("name", nargs="?", default=None)
    g.add_argument("--random", nargs=2, metavar=("M", "P"), default=None)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.seed is not None:
        random.seed(args.seed)
    try:
        budgets = _profile()
        return args.func(args, budgets)
    except BudgetExceeded as e:
        _diag(event="budget", error=str(e), size=e.size, budget=e.budget)
        return EXIT_BUDGET
    except (UsageError, StructuralError, ValueError) as e:
        _diag(event="usage", error=str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
