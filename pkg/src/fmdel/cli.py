"""Command-line entry point.

Machine-readable results go to stdout as JSON; progress and diagnostics go to
stderr. Failures map to exit codes: 2 parse, 3 validation, 4 budget, 5 mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import __version__
from .errors import FmdelError, MismatchError, ParseError, ValidationError
from .families import default_detail, family_names, h_of, pattern, resolve
from .graph import BoundariedGraph

SCHEMA = 1


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _emit(kind: str, payload: dict) -> None:
    out = {"schema": f"fmdel/{kind}/{SCHEMA}", **payload}
    print(json.dumps(out, sort_keys=True))


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _read_graph(path: str):
    from .treedecomp import parse_gr

    return parse_gr(_read_text(path))


def _family(args):
    fam = resolve(args.family)
    d = args.detail if getattr(args, "detail", None) is not None else default_detail(fam)
    _log(f"family {','.join(family_names(fam))}: h_F={h_of(fam)} d={d}")
    return fam, d


def _note_jobs(args) -> None:
    if getattr(args, "jobs", 1) > 1:
        _log("note: this command runs sequentially; --jobs is ignored")


# -- solve / oracle ----------------------------------------------------------

def cmd_solve(args) -> int:
    from .solver import SolveOptions, solve, verify_deletion
    from .treedecomp import parse_td

    _note_jobs(args)
    fam, d = _family(args)
    g = _read_graph(args.graph)
    td = parse_td(_read_text(args.td)) if args.td else None
    table = None
    if args.table:
        from .representatives import RepresentativeTable

        table = RepresentativeTable.load(args.table)
    opts = SolveOptions(compress=not args.no_compress, detail=d, recover=args.witness,
                        state_guard=args.state_guard, canon_cap=args.canon_cap, table=table)
    res = solve(g, fam, td=td, opts=opts)
    payload = {"instance": args.graph, "opt": res.opt, "width": res.width, "n": g.n, "m": g.m,
               "family": family_names(fam), "detail": d, "stats": res.stats}
    if args.witness:
        payload["deletion_set"] = [v + 1 for v in res.deletion_set]
        payload["verified"] = verify_deletion(g, fam, res.deletion_set)
    _emit("solve", payload)
    return 0


def cmd_oracle(args) -> int:
    from .solver import oracle_solve

    fam, _ = _family(args)
    g = _read_graph(args.graph)
    opt, dels = oracle_solve(g, fam, cap=args.cap, witness=True)
    payload = {"instance": args.graph, "opt": opt, "n": g.n, "m": g.m, "family": family_names(fam)}
    if args.witness:
        payload["deletion_set"] = [v + 1 for v in dels]
    _emit("oracle", payload)
    return 0


# -- crosscheck -----------------------------------------------------------------

def _crosscheck_one(job):
    from .instances import random_instance
    from .solver import SolveOptions, oracle_solve, solve, verify_deletion

    spec, n_max, seed, fault = job
    fam = resolve(spec)
    rng = random.Random(seed)
    kind, g, td = random_instance(rng, n_max)
    res = solve(g, fam, td=td, opts=SolveOptions(cost_offset=fault))
    want = oracle_solve(g, fam)
    ok = res.opt == want and verify_deletion(g, fam, res.deletion_set) and len(res.deletion_set) == res.opt
    return spec, seed, kind, g.n, g.m, res.opt, want, ok


def cmd_crosscheck(args) -> int:
    from .solver import ORACLE_CAP

    if args.n_max > ORACLE_CAP:
        raise ValidationError(f"--n-max {args.n_max} exceeds the oracle cap {ORACLE_CAP}")
    specs = args.family or ["vertex-cover", "fvs", "k4", "c4", "planarization"]
    for s in specs:
        resolve(s)
    master = random.Random(args.seed)
    jobs = []
    for i in range(args.count):
        spec = specs[i % len(specs)]
        jobs.append((spec, args.n_max, master.randrange(1 << 30), args.inject_fault))
    start = time.perf_counter()
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_crosscheck_one, jobs))
    else:
        results = []
        for i, job in enumerate(jobs, 1):
            results.append(_crosscheck_one(job))
            if i % 25 == 0:
                _log(f"crosscheck {i}/{len(jobs)}")
    per: dict = {}
    mismatches = []
    for spec, seed, kind, n, m, got, want, ok in results:
        row = per.setdefault(spec, {"agree": 0, "total": 0})
        row["total"] += 1
        row["agree"] += ok
        if not ok:
            mismatches.append({"family": spec, "seed": seed, "kind": kind, "n": n, "m": m,
                               "solve": got, "oracle": want})
    _emit("crosscheck", {"count": len(results), "seed": args.seed, "n_max": args.n_max,
                         "per_family": per, "mismatches": mismatches,
                         "seconds": round(time.perf_counter() - start, 2)})
    if mismatches:
        raise MismatchError(f"{len(mismatches)} of {len(results)} instances disagree with the oracle")
    return 0


# -- reps / folio / minor-test ---------------------------------------------------

def _int_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"bad integer range {text!r}") from None


def cmd_reps(args) -> int:
    from .representatives import census_csv, census_json, rep_census

    _note_jobs(args)
    fam, d = _family(args)
    ts = _int_range(args.t)
    caps_for = None
    if args.n_cap is not None or args.m_cap is not None:
        from .representatives import default_caps

        def caps_for(t):
            n0, m0 = default_caps(t, fam)
            return (t + args.n_cap if args.n_cap is not None else n0,
                    args.m_cap if args.m_cap is not None else m0)

    def progress(row):
        _log(f"t={row.t}: {row.classes} classes, max rep {row.max_rep}, "
             f"{row.members} members, {row.violations} audit violations")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = rep_census(ts, d, fam, caps_for=caps_for, audit=not args.no_audit, partners=args.partners,
                        bank_cap=args.bank_cap, seed=args.seed, tables_out=str(out), progress=progress)
    (out / "census.csv").write_text(census_csv(report))
    (out / "census.json").write_text(census_json(report))
    _emit("reps", report)
    bad = sum(r["violations"] for r in report["rows"])
    if bad:
        raise MismatchError(f"{bad} audit violations")
    return 0


def _read_boundaried(arg: str) -> BoundariedGraph:
    p = Path(arg)
    text = p.read_text() if arg != "-" and p.is_file() else (sys.stdin.read() if arg == "-" else arg)
    return BoundariedGraph.decode(text)


def cmd_folio(args) -> int:
    from .folio import describe, folio, folio_closure, pattern_universe, signature_of

    g = _read_boundaried(args.graph)
    if args.closure:
        fol = folio_closure(g, args.detail)
        sig = signature_of(fol)
    else:
        uni = pattern_universe(g.t, args.detail)
        fol = folio(g, args.detail, uni)
        sig = signature_of(fol, uni)
    _emit("folio", {"t": g.t, "detail": args.detail, "size": len(fol), "signature": sig.digest,
                    "patterns": describe(fol)})
    return 0


def cmd_minor_test(args) -> int:
    from .containment import has_minor, has_tm

    host = _read_graph(args.graph)
    pat = pattern(args.pattern)
    if args.topological:
        res = has_tm(host, pat, witness=args.witness)
    else:
        res = has_minor(host, pat, witness=args.witness)
    found, wit = (res if args.witness else (res, None))
    payload = {"contains": bool(found), "pattern": args.pattern, "relation": "tm" if args.topological else "minor"}
    if wit is not None:
        payload["witness"] = wit.to_json()
    _emit("minor-test", payload)
    return 0


# -- gen / validate-td -------------------------------------------------------------

def _write_outputs(prefix: str | None, g, td=None, meta: dict | None = None) -> None:
    from .treedecomp import emit_gr, emit_td

    if prefix is None:
        sys.stdout.write(emit_gr(g))
        return
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    Path(prefix + ".gr").write_text(emit_gr(g))
    if td is not None:
        Path(prefix + ".td").write_text(emit_td(td))
    if meta is not None:
        Path(prefix + ".json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    _emit("gen", {k: v for k, v in (meta or {}).items() if not isinstance(v, list)})


def cmd_gen(args) -> int:
    from . import instances as inst

    if args.kind == "wall":
        w = inst.gen_wall(args.r, args.subdivide)
        meta = w.metadata()
        meta["layer_count"] = len(w.layers)
        _write_outputs(args.out, w.graph, None, meta)
    elif args.kind == "grid":
        g = inst.gen_grid(args.a, args.b)
        _write_outputs(args.out, g, None, {"kind": "grid", "a": args.a, "b": args.b, "n": g.n, "m": g.m})
    elif args.kind == "pkt":
        g, td = inst.gen_partial_ktree(args.n, args.k, args.seed, keep=args.keep)
        _write_outputs(args.out, g, td, {"kind": "pkt", "n": g.n, "m": g.m, "k": args.k, "seed": args.seed,
                                         "width": td.width})
    else:
        g = inst.gen_er(args.n, args.p, args.seed)
        _write_outputs(args.out, g, None, {"kind": "er", "n": g.n, "m": g.m, "p": args.p, "seed": args.seed})
    return 0


def cmd_validate_td(args) -> int:
    from .treedecomp import parse_td, validate_td

    g = _read_graph(args.graph)
    td = parse_td(_read_text(args.td))
    rep = validate_td(g, td)
    _emit("validate-td", {"ok": rep.ok, "width": rep.width, "violations": rep.violations})
    if not rep.ok:
        raise ValidationError("invalid tree decomposition")
    return 0


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fmdel", description="Exact minor-deletion solver on tree decompositions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fam_opt(sp, default="fvs"):
        sp.add_argument("--family", "-F", default=default,
                        help="preset (vertex-cover, fvs, planarization, k4, c4), comma list like K4,C4, or a file")

    sp = sub.add_parser("solve", help="solve one instance")
    sp.add_argument("graph", help=".gr file or - for stdin")
    sp.add_argument("--td", help="PACE .td file; computed when omitted")
    fam_opt(sp)
    sp.add_argument("--detail", type=int, help="folio detail (default 3*h_F)")
    sp.add_argument("--no-compress", action="store_true")
    sp.add_argument("--witness", action="store_true", help="recover and verify a deletion set")
    sp.add_argument("--state-guard", type=int, default=2_000_000)
    sp.add_argument("--canon-cap", type=int, default=12)
    sp.add_argument("--table", help="representative table file to preload")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("oracle", help="brute-force solve one small instance")
    sp.add_argument("graph")
    fam_opt(sp)
    sp.add_argument("--cap", type=int, default=16)
    sp.add_argument("--witness", action="store_true")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("crosscheck", help="compare solve with the oracle on random instances")
    sp.add_argument("--family", "-F", action="append", help="repeatable; default: all presets")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inject-fault", type=int, default=0, help=argparse.SUPPRESS)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_crosscheck)

    sp = sub.add_parser("reps", help="build representative tables and the census")
    fam_opt(sp)
    sp.add_argument("--t", default="0..3", help="boundary sizes, e.g. 0..3 or 0,2")
    sp.add_argument("--detail", type=int, default=3)
    sp.add_argument("--n-cap", type=int, help="interior vertex cap (default 5)")
    sp.add_argument("--m-cap", type=int, help="edge cap")
    sp.add_argument("--no-audit", action="store_true")
    sp.add_argument("--partners", type=int, default=50)
    sp.add_argument("--bank-cap", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="reps_out")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_reps)

    sp = sub.add_parser("folio", help="list the folio of a boundaried graph")
    sp.add_argument("graph", help="encoded boundaried graph, a file holding one, or -")
    sp.add_argument("--detail", type=int, default=2)
    sp.add_argument("--closure", action="store_true", help="use the closure method")
    sp.set_defaults(func=cmd_folio)

    sp = sub.add_parser("minor-test", help="decide whether a pattern is a (topological) minor")
    sp.add_argument("graph")
    sp.add_argument("--pattern", required=True, help="K2..K5, K33, C4, or G<hex form>")
    sp.add_argument("--topological", action="store_true")
    sp.add_argument("--witness", action="store_true")
    sp.set_defaults(func=cmd_minor_test)

    sp = sub.add_parser("gen", help="generate instances")
    sp.add_argument("kind", choices=["wall", "grid", "pkt", "er"])
    sp.add_argument("--r", type=int, default=5)
    sp.add_argument("--subdivide", type=int, default=0)
    sp.add_argument("--a", type=int, default=4)
    sp.add_argument("--b", type=int, default=4)
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--keep", type=float, default=0.7)
    sp.add_argument("--p", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="output prefix; writes .gr, .td and .json")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("validate-td", help="check a tree decomposition")
    sp.add_argument("graph")
    sp.add_argument("td")
    sp.set_defaults(func=cmd_validate_td)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FmdelError as exc:
        _log(f"error: {exc}")
        return exc.exit_code
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
