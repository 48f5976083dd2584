"""Command-line entry point for the fuzzy bisimilarity checker.

Every command prints one JSON document on stdout.  Exit codes: 0 success,
1 the checked property is false, 2 usage/parse/evaluation error, 3 capacity
limit exceeded.
"""
import argparse
import json
import sys
from typing import List, Optional, Tuple

import data_store
import fixedpoint
import limited
import logic
import report_exporter
import subsystem
from algebra import Algebra, Degree, DegreeError, format_degree, parse_degree
from formula_parser import FormulaParseError, parse_formula
from models import EngineSettings, Nfts, UnknownNameError

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_ERROR = 2
EXIT_CAPACITY = 3

Result = Tuple[int, dict]


def _degree_fields(d: Degree, key: str = "degree") -> dict:
    """Exact rational plus a decimal approximation; the rational is authoritative."""
    return {key: format_degree(d), f"{key}_decimal": float(d)}


def _pairs(rel) -> List[List[str]]:
    return [list(p) for p in sorted(rel)]


def _model_json(m: Nfts, order: Optional[List[str]] = None) -> dict:
    transitions = []
    for (src, label), dists in m.delta.items():
        for p in dists:
            transitions.append({"src": src, "label": label, "dist": p.to_dict()})
    transitions.sort(key=lambda t: (t["src"], t["label"], sorted(t["dist"].items())))
    return {
        "states": order if order is not None else sorted(m.states),
        "labels": sorted(m.labels),
        "transitions": transitions,
    }


def _alg(args) -> Algebra:
    return Algebra.from_name(args.tnorm)


# ── Commands ──────────────────────────────────────────────────────────────────

def _cmd_validate(args, settings: EngineSettings) -> Result:
    doc = data_store.parse_model_document(_read(args.file))
    m = doc.model
    return EXIT_OK, {
        "valid": True,
        "states": len(m.states),
        "labels": len(m.labels),
        "transitions": sum(len(v) for v in m.delta.values()),
        "canonical": data_store.serialize_model(m),
    }


def _cmd_degree(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    d = limited.bis(m, args.u, args.v, args.k, _alg(args))
    return EXIT_OK, {"u": args.u, "v": args.v, "k": args.k, "tnorm": args.tnorm,
                     **_degree_fields(d)}


def _cmd_check(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    for s in (args.u, args.v):
        m.require_state(s)
    holds = fixedpoint.is_k_limited_bisimulation(m, {(args.u, args.v)}, args.k,
                                                 args.alpha, _alg(args))
    return (EXIT_OK if holds else EXIT_FALSE), {
        "u": args.u, "v": args.v, "k": args.k, "tnorm": args.tnorm,
        **_degree_fields(args.alpha, "alpha"), "holds": holds,
    }


def _cmd_bisim(args, settings: EngineSettings) -> Result:
    left = data_store.load_model(args.file, allow_depth_names=True)
    right = data_store.load_model(args.right, allow_depth_names=True) if args.right else left
    alg = _alg(args)
    if (args.u is None) != (args.v is None):
        raise ValueError("bisim takes either no state pair or both states")
    if args.degree:
        if args.u is None:
            raise ValueError("--degree needs a state pair")
        d = fixedpoint.alpha_bisimilarity_degree(left, args.u, right, args.v, alg)
        return EXIT_OK, {"u": args.u, "v": args.v, "tnorm": args.tnorm, **_degree_fields(d)}
    if args.alpha is None:
        raise ValueError("bisim needs --alpha unless --degree is given")
    rel = fixedpoint.greatest_alpha_bisimulation(left, right, args.alpha, alg)
    out = {"tnorm": args.tnorm, **_degree_fields(args.alpha, "alpha")}
    if args.u is None:
        out["relation"] = _pairs(rel)
        return EXIT_OK, out
    left.require_state(args.u)
    right.require_state(args.v)
    member = (args.u, args.v) in rel
    out.update({"u": args.u, "v": args.v, "member": member})
    return (EXIT_OK if member else EXIT_FALSE), out


def _cmd_subsystem(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    if args.induced:
        sub = subsystem.induced(m, args.u, args.k)
        out = {"kind": "induced", "root": args.u, **_model_json(sub)}
    else:
        unf = subsystem.unfold(m, args.u, args.k)
        sub = unf.tree
        sidecar = subsystem.unfolding_sidecar(unf)
        out = {"kind": "unfolding", "root": unf.root.name,
               **_model_json(sub, order=list(sidecar["states"]))}
        if args.sidecar:
            data_store.save_sidecar(args.sidecar, sidecar)
    if args.output:
        data_store.save_model(args.output, sub)
    return EXIT_OK, out


def _cmd_eval(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    phi = parse_formula(args.formula)
    value = logic.eval_state(m, phi, args.u, _alg(args))
    return EXIT_OK, {"u": args.u, "formula": logic.render(phi), "tnorm": args.tnorm,
                     **_degree_fields(value, "value")}


def _cmd_distinguish(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    alg = _alg(args)
    depth = args.depth if args.depth is not None else settings.formula_depth
    closure = args.closure_depth if args.closure_depth is not None else settings.closure_depth
    phi = logic.distinguish(m, args.u, args.v, args.k, args.alpha, depth, alg,
                            max_formulas=settings.max_formulas, closure_depth=closure)
    out = {"u": args.u, "v": args.v, "k": args.k, "depth": depth, "tnorm": args.tnorm,
           **_degree_fields(args.alpha, "alpha"), "found": phi is not None, "formula": None}
    if phi is None:
        return EXIT_OK, out
    # values in the unfoldings, matching how the search compared them
    u_tree = subsystem.unfold(m, args.u, args.k)
    v_tree = subsystem.unfold(m, args.v, args.k)
    out["formula"] = logic.render(phi)
    out.update(_degree_fields(logic.eval_state(u_tree.tree, phi, u_tree.root.name, alg), "u_value"))
    out.update(_degree_fields(logic.eval_state(v_tree.tree, phi, v_tree.root.name, alg), "v_value"))
    return EXIT_FALSE, out


def _cmd_oracle_degree(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    limit = args.max_candidates if args.max_candidates is not None else settings.oracle_max_candidates
    d = limited.oracle_degree(m, args.u, args.v, args.k, _alg(args), max_candidates=limit)
    return EXIT_OK, {"u": args.u, "v": args.v, "k": args.k, "tnorm": args.tnorm,
                     **_degree_fields(d)}


def _cmd_matrix(args, settings: EngineSettings) -> Result:
    m = data_store.load_model(args.file)
    states = sorted(m.states)
    matrix = limited.degree_matrix(m, args.k, _alg(args))
    if args.csv:
        report_exporter.export_matrix_csv(args.csv, states, matrix)
    if args.xlsx:
        report_exporter.export_matrix_xlsx(args.xlsx, states, matrix, args.k, args.tnorm)
    return EXIT_OK, {
        "k": args.k, "tnorm": args.tnorm, "states": states,
        "degrees": [[format_degree(matrix[(x, y)]) for y in states] for x in states],
    }


_COMMANDS = {
    "validate": _cmd_validate,
    "degree": _cmd_degree,
    "check": _cmd_check,
    "bisim": _cmd_bisim,
    "subsystem": _cmd_subsystem,
    "eval": _cmd_eval,
    "distinguish": _cmd_distinguish,
    "oracle-degree": _cmd_oracle_degree,
    "matrix": _cmd_matrix,
}


# ── Argument parsing ──────────────────────────────────────────────────────────

def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _tnorm(text: str) -> str:
    return Algebra.from_name(text).value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--debug", action="store_true", help="log engine progress to stderr")
    common.add_argument("--config", metavar="FILE", help="engine config JSON file")

    engine = argparse.ArgumentParser(add_help=False, parents=[common])
    engine.add_argument("--tnorm", required=True, type=_tnorm,
                        help="godel, product or lukasiewicz")

    parser = argparse.ArgumentParser(
        prog="fuzzybisim",
        description="k-limited alpha-bisimilarity for nondeterministic fuzzy transition systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="parse a model file")
    p.add_argument("file")

    p = sub.add_parser("degree", parents=[engine], help="degree of k-limited similarity")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("u")
    p.add_argument("v")

    p = sub.add_parser("check", parents=[engine], help="decide u ≈_k^alpha v")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("--alpha", type=parse_degree, required=True)
    p.add_argument("u")
    p.add_argument("v")

    p = sub.add_parser("bisim", parents=[engine], help="greatest alpha-bisimulation")
    p.add_argument("file")
    p.add_argument("--right", metavar="FILE", help="second system (default: the same file)")
    p.add_argument("--alpha", type=parse_degree)
    p.add_argument("--degree", action="store_true",
                   help="report the greatest alpha relating the pair instead")
    p.add_argument("u", nargs="?")
    p.add_argument("v", nargs="?")

    p = sub.add_parser("subsystem", parents=[engine], help="depth-k unfolding or neighbourhood")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("--induced", action="store_true", help="induced k-neighbourhood instead")
    p.add_argument("-o", "--output", metavar="OUT", help="also write the subsystem model file")
    p.add_argument("--sidecar", metavar="OUT", help="write the state -> (base, depth) map")
    p.add_argument("u")

    p = sub.add_parser("eval", parents=[engine], help="evaluate a state formula")
    p.add_argument("file")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("u")

    p = sub.add_parser("distinguish", parents=[engine], help="search a distinguishing formula")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("--alpha", type=parse_degree, required=True)
    p.add_argument("--depth", type=_count)
    p.add_argument("--closure-depth", type=_count)
    p.add_argument("u")
    p.add_argument("v")

    p = sub.add_parser("oracle-degree", parents=[engine], help="brute-force degree")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("--max-candidates", type=_count)
    p.add_argument("u")
    p.add_argument("v")

    p = sub.add_parser("matrix", parents=[engine], help="all-pairs degree matrix")
    p.add_argument("file")
    p.add_argument("-k", type=_count, required=True)
    p.add_argument("--csv", metavar="OUT")
    p.add_argument("--xlsx", metavar="OUT")
    return parser


def _fail(code: int, message: str, **extra) -> int:
    print(json.dumps({"error": message, **extra}), file=sys.stderr)
    return code


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR

    try:
        settings = data_store.load_settings(args.config)
        if args.debug:
            data_store.set_debug(True)
        code, payload = _COMMANDS[args.command](args, settings)
    except limited.CapacityError as exc:
        return _fail(EXIT_CAPACITY, str(exc), size=exc.size, limit=exc.limit)
    except (data_store.ModelParseError, FormulaParseError, DegreeError) as exc:
        return _fail(EXIT_ERROR, str(exc))
    except (logic.EvaluationError, UnknownNameError) as exc:
        return _fail(EXIT_ERROR, str(exc))
    except (ValueError, OSError) as exc:
        return _fail(EXIT_ERROR, str(exc))

    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
