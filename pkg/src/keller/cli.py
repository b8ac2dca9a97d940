"""Command-line front end: ``keller <command> ...``.

Exit codes: 0 success, 1 a check or verdict failed, 2 usage or input error,
3 a search or enumeration budget was exceeded.  With ``--json`` every
command prints one JSON document that validates against ``schema.json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import experiments as ex
from .arith import GF, QQ, ZZ, Ring, parse_ring
from .groebner import BasisCache, Ideal, radical_member
from .poly import PolyRing, format_polynomial
from .polymap import (
    EnumerationCapExceeded,
    PolyMap,
    compose,
    default_names,
    formal_inverse,
    inverse_degree_bound,
    is_injective_on_points,
    parse_map,
    reduce_map_mod_p,
)
from .skeller import BudgetExceeded, strong_keller_check
from .system import KellerSystem, default_certificates, system_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# -- helpers ------------------------------------------------------------------------


def _cache(args):
    return None if args.no_cache else BasisCache.default()


def _emit(args, doc: dict, text: str | None = None) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(doc, indent=2))
    elif text is not None:
        print(text)


def _ring(args, default: Ring = QQ) -> Ring:
    if getattr(args, "p", None) is not None:
        return GF(args.p)
    if getattr(args, "ring", None):
        return parse_ring(args.ring)
    return default


def _map_ring(args, texts: list[str], coeffs: Ring) -> PolyRing:
    if args.vars:
        names = [s.strip() for s in args.vars.split(",") if s.strip()]
    else:
        first = texts[0].strip().strip("[]")
        names = default_names(len(first.split(";")))
    return PolyRing(names, coeffs)


def _read_map(text: str, R: PolyRing) -> PolyMap:
    F = parse_map(text, R)
    if F.n != R.nvars:
        raise UsageError(f"map has {F.n} components but {R.nvars} variables; pass --vars")
    return F


# -- commands -------------------------------------------------------------------------


def cmd_gen(args) -> int:
    S = KellerSystem(args.n, args.d)
    doc = {"command": "gen", **system_to_json(S, default_certificates(S))}
    lines = [f"{g['monomial']}: {g['E']}" for g in doc["generators"]]
    lines += [f"[{c['kind']}, den {c['denominator']}] {c['g']}" for c in doc["certificates"]]
    lines.append(f"nd_lcm_lower_bound = {doc['nd_lcm_lower_bound']}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    R = _map_ring(args, [args.map], GF(args.p))
    F = _read_map(args.map, R)
    n = args.n or F.n
    if n != F.n:
        raise UsageError(f"--n {n} but the map has {F.n} components")
    d = args.d or max(2, F.degree())
    S = KellerSystem(n, d)
    v = strong_keller_check(F, S, lift_bound=args.bound)
    doc = {"command": "check", "map": str(F), **v.to_json()}
    text = v.outcome.value
    if v.fails:
        text += f": {v.witness_text} = {v.value}"
    elif v.certified_by:
        text += f" ({v.certified_by})"
    _emit(args, doc, text)
    return EXIT_FAIL if v.fails else EXIT_OK


def _ideal_from_args(args):
    if args.gens:
        if not args.vars:
            raise UsageError("--gens needs --vars")
        names = [s.strip() for s in args.vars.split(",") if s.strip()]
        R = PolyRing(names, _ring(args))
        gens = [R.parse(t) for t in args.gens.split(";") if t.strip()]
        return R.parse(args.poly), Ideal(gens, R, cache=_cache(args)), {"generators": [str(g) for g in gens]}
    if args.n is None or args.d is None:
        raise UsageError("give --n and --d, or --gens with --vars")
    S = KellerSystem(args.n, args.d)
    R = S.coeff_ring if args.p is None else S.coeff_ring.with_coeffs(GF(args.p))
    f = S.parse(args.poly).change_ring(R)
    gens = [g.change_ring(R) for g in S.E]
    return f, Ideal(gens, R, cache=_cache(args)), {"n": args.n, "d": args.d}


def cmd_ideal(args) -> int:
    f, I, desc = _ideal_from_args(args)
    if args.action == "member":
        ok = I.contains(f)
    else:
        ok = radical_member(f, I)
    doc = {"command": f"ideal {args.action}", "poly": format_polynomial(f), "ring": str(I.ring.coeffs), "member": ok, "ideal": desc}
    _emit(args, doc, "true" if ok else "false")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_map(args) -> int:
    act = args.action
    if act == "mod-p":
        if args.p is None:
            raise UsageError("mod-p needs --p")
        coeffs = parse_ring(args.ring) if args.ring else QQ
    else:
        coeffs = _ring(args)
    R = _map_ring(args, args.maps, coeffs)
    maps = [_read_map(t, R) for t in args.maps]
    need = {"compose": 2}.get(act, 1)
    if len(maps) != need:
        raise UsageError(f"map {act} takes {need} map argument(s)")
    F = maps[0]
    doc: dict = {"command": f"map {act}", "ring": str(R.coeffs), "input": [str(M) for M in maps]}
    code = EXIT_OK
    if act == "compose":
        out = compose(maps[0], maps[1])
        doc["result"] = text = str(out)
    elif act == "det-jac":
        doc["result"] = text = str(F.det_jac())
    elif act == "mod-p":
        doc["p"] = args.p
        doc["result"] = text = str(reduce_map_mod_p(F, args.p))
    elif act == "invert":
        bound = args.bound if args.bound is not None else inverse_degree_bound(F)
        G = formal_inverse(F, bound)
        doc["degree_bound"] = bound
        doc["invertible"] = G is not None
        doc["result"] = None if G is None else str(G)
        text = "no inverse within the degree bound" if G is None else str(G)
        code = EXIT_OK if G is not None else EXIT_FAIL
    else:  # injective
        if R.coeffs.kind != "GF":
            raise UsageError("injective needs --p")
        cap = args.bound if args.bound is not None else 10**6
        try:
            ok = is_injective_on_points(F, cap)
        except EnumerationCapExceeded as exc:
            doc["injective"] = None
            doc["error"] = str(exc)
            _emit(args, doc, str(exc))
            return EXIT_BUDGET
        doc["injective"] = ok
        doc["result"] = text = "true" if ok else "false"
        code = EXIT_OK if ok else EXIT_FAIL
    _emit(args, doc, text)
    return code


def _report_text(rep) -> str:
    lines = [f"{'PASS' if c.ok else 'FAIL'}  {c.name}" for c in rep.checks]
    lines.append("ok" if rep.ok else "NOT ok")
    return "\n".join(lines)


def cmd_repro(args) -> int:
    cache = _cache(args)
    if args.which == "degree2":
        rep = ex.repro_degree2(cache=cache)
    else:
        kw = {}
        if args.sections:
            kw["sections"] = [s.strip() for s in args.sections.split(",") if s.strip()]
        say = None if args.json else (lambda s: print(f"... {s}", file=sys.stderr))
        rep = ex.repro_degree3(cache=cache, progress=say, **kw)
    doc = {"command": f"repro {args.which}", **rep.to_json()}
    gens = rep.info.get("generators", [])
    _emit(args, doc, "\n".join(gens + [_report_text(rep)]))
    return EXIT_OK if rep.ok else EXIT_FAIL


def _trial_text(rep) -> str:
    counts = ", ".join(f"{k}={v}" for k, v in rep.counts.items())
    return f"{rep.experiment} seed={rep.seed}: {counts}"


def cmd_conjecture(args) -> int:
    if args.which == "composition":
        rep = ex.conjecture_composition(args.p, args.n, args.d, args.trials, args.seed, C=args.bound)
        code = EXIT_FAIL if rep.counts["fail"] else EXIT_OK
    else:
        rep = ex.conjecture_lift(args.p, args.n, args.d, args.bound, args.trials, args.seed, budget=args.budget)
        code = EXIT_BUDGET if rep.counts["budget"] else EXIT_OK
    doc = {"command": f"conjecture {args.which}", **rep.to_json()}
    _emit(args, doc, _trial_text(rep))
    return code


def cmd_scan(args) -> int:
    R = _map_ring(args, [args.map], ZZ)
    F = _read_map(args.map, R)
    primes = [int(s) for s in args.primes.split(",") if s.strip()] if args.primes else []
    rep = ex.injectivity_scan(F, primes, cap=args.bound if args.bound is not None else 10**6)
    doc = {"command": "scan injectivity", **rep.to_json()}
    rows = [f"p={r['p']}: {r['injective'] if r['injective'] is not None else 'cap exceeded'}" for r in rep.witnesses]
    _emit(args, doc, "\n".join(rows) if rows else "no primes")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print a JSON document")
    p.add_argument("--out", help="also write the JSON document to this file")
    p.add_argument("--no-cache", action="store_true", help="do not read or write the Groebner basis cache")


def load_schema() -> dict:
    """The JSON schema that every ``--json`` document satisfies."""
    return json.loads(resources.files("keller").joinpath("schema.json").read_text(encoding="utf-8"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="keller", description="Keller-equation ideals and strong Keller checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="universal map generators and certificates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="strong Keller check of a map over GF(p)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--map", required=True)
    p.add_argument("--vars")
    p.add_argument("--bound", type=int, help="coefficient bound for the integer lift search")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ideal", help="ideal and radical membership")
    p.add_argument("action", choices=["member", "radical-member"])
    p.add_argument("poly")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--gens", help="semicolon-separated generators (with --vars)")
    p.add_argument("--vars")
    p.add_argument("--p", type=int)
    p.add_argument("--ring")
    _common(p)
    p.set_defaults(func=cmd_ideal)

    p = sub.add_parser("map", help="operations on polynomial maps")
    p.add_argument("action", choices=["compose", "invert", "det-jac", "mod-p", "injective"])
    p.add_argument("maps", nargs="+")
    p.add_argument("--vars")
    p.add_argument("--p", type=int)
    p.add_argument("--ring")
    p.add_argument("--bound", type=int, help="inverse degree bound, or the point cap for injective")
    _common(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("repro", help="reproduce the degree-2 or degree-3 computations")
    p.add_argument("which", choices=["degree2", "degree3"])
    p.add_argument("--sections", help="comma-separated subset for degree3")
    _common(p)
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("conjecture", help="randomized conjecture trials")
    p.add_argument("which", choices=["composition", "lift"])
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=2, help="coefficient bound C")
    p.add_argument("--budget", type=int, help="candidate cap for the lift search")
    _common(p)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("scan", help="injectivity scans over several primes")
    p.add_argument("which", choices=["injectivity"])
    p.add_argument("--map", required=True)
    p.add_argument("--primes", default="")
    p.add_argument("--vars")
    p.add_argument("--bound", type=int, help="point enumeration cap")
    _common(p)
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"keller: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EnumerationCapExceeded as exc:
        print(f"keller: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"keller: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
