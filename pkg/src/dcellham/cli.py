"""Command-line entry point.

Subcommands: gen (emit a topology), hp (Hamiltonian path), ft-hp / ft-hc
(fault-tolerant path / cycle), oracle (certify, search, fault sweeps),
partial (incremental-deployment tooling), bcast (broadcast simulation),
bench (construction scaling table).

Exit codes: 0 success, 2 usage errors, 3 domain errors (a JSON object with
the error code and message is written to stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import broadcast, oracle, partial
from .construct import counted_dcell_hp, dcell_hp, verify_path
from .errors import DCellError, ParameterError
from .fault import FaultSet, FaultyView, ft_hc, ft_hp, verify_fault_certificate
from .topology import Params, build_graph, label_from_uid, t, uid


def _params(args) -> Params:
    return Params(n=args.n, k=args.k)


def _label(u: int, n: int, k: int):
    return label_from_uid((), u, k, n)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load_faults(path: str, n: int, k: int) -> FaultSet:
    with open(path) as fh:
        data = json.load(fh)
    verts = [_label(u, n, k) for u in data.get("vertices", ())]
    edges = [
        (_label(a, n, k), _label(b, n, k)) for a, b in data.get("edges", ())
    ]
    return FaultSet.make(verts, edges)


# -- subcommand handlers ---------------------------------------------------


def cmd_gen(args) -> int:
    topo = build_graph(_params(args), vertex_cap=args.max_vertices)
    text = {
        "edgelist": topo.to_edgelist,
        "dot": topo.to_dot,
        "json": topo.to_json,
    }[args.format]()
    _emit(text, args.out)
    return 0


def cmd_hp(args) -> int:
    params = _params(args)
    u, v = _label(args.u, args.n, args.k), _label(args.v, args.n, args.k)
    path = dcell_hp(u, v, args.k, args.n)
    if not verify_path(params, path, u, v):
        raise DCellError("constructed path failed verification")
    _emit(json.dumps({
        "n": args.n, "k": args.k, "u": args.u, "v": args.v,
        "path": [uid(x, args.k, args.n) for x in path],
    }), args.out)
    return 0


def cmd_ft_hp(args) -> int:
    params = _params(args)
    faults = _load_faults(args.faults, args.n, args.k)
    u, v = _label(args.u, args.n, args.k), _label(args.v, args.n, args.k)
    path = ft_hp(params, faults, u, v)
    view = FaultyView(build_graph(params, vertex_cap=args.max_vertices), faults)
    if not verify_fault_certificate(view, path, endpoints=(u, v)):
        raise DCellError("fault-tolerant path failed verification")
    _emit(json.dumps({
        "n": args.n, "k": args.k, "u": args.u, "v": args.v,
        "faults": faults.size,
        "path": [uid(x, args.k, args.n) for x in path],
    }), args.out)
    return 0


def cmd_ft_hc(args) -> int:
    params = _params(args)
    faults = _load_faults(args.faults, args.n, args.k)
    cycle = ft_hc(params, faults)
    view = FaultyView(build_graph(params, vertex_cap=args.max_vertices), faults)
    if not verify_fault_certificate(view, cycle, cycle=True):
        raise DCellError("fault-tolerant cycle failed verification")
    _emit(json.dumps({
        "n": args.n, "k": args.k, "faults": faults.size,
        "cycle": [uid(x, args.k, args.n) for x in cycle],
    }), args.out)
    return 0


def cmd_oracle_certify(args) -> int:
    report = oracle.certify_base_cases()
    for entry in report:
        print(f"{entry['status']} {entry['claim']} ({entry['elapsed_ms']} ms)")
    return 0 if all(e["status"] == "PASS" for e in report) else 1


def cmd_oracle_hp(args) -> int:
    topo = build_graph(_params(args), vertex_cap=args.max_vertices)
    g = oracle.SmallGraph.from_topology(topo)
    cert = oracle.find_hp(g, args.u, args.v)
    _emit(json.dumps({
        "n": args.n, "k": args.k, "u": args.u, "v": args.v,
        "found": bool(cert), "path": cert.sequence,
    }), args.out)
    return 0 if cert else 1


def cmd_oracle_fault_check(args) -> int:
    topo = build_graph(_params(args), vertex_cap=args.max_vertices)
    g = oracle.SmallGraph.from_topology(topo)
    ok, counterexample = oracle.fault_check(
        g, args.f, mode=args.mode, sampling=args.sampling,
        count=args.count, seed=args.seed,
    )
    _emit(json.dumps({
        "n": args.n, "k": args.k, "f": args.f, "mode": args.mode,
        "ok": ok,
        "counterexample": None if ok else [list(map(str, c)) for c in counterexample],
    }), args.out)
    return 0 if ok else 1


def _parse_shape(text: str) -> partial.ShapeA:
    try:
        bounds = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"bad shape {text!r}: {exc}") from None
    return partial.ShapeA(bounds)


def cmd_partial_next(args) -> int:
    listing = partial.Listing(_parse_shape(args.shape))
    steps = args.steps if args.steps is not None else listing.shape.total
    out = [listing.next() for _ in range(steps)]
    if args.json:
        _emit(listing.to_json(), args.out)
    else:
        _emit("\n".join(",".join(str(d) for d in a) for a in out), args.out)
    return 0


def _grown_listing(n: int, k: int, d: int) -> partial.Listing:
    listing = partial.Listing(partial.dcell_shape(n, k))
    if not 1 <= d <= listing.shape.total:
        raise ParameterError(f"d must be in [1, {listing.shape.total}], got {d}")
    for _ in range(d):
        listing.next()
    return listing


def cmd_partial_check(args) -> int:
    listing = _grown_listing(args.n, args.k, args.d)
    witness = partial.kc_violation(listing, args.c)
    pt = partial.materialize_partial(listing, args.n, args.k,
                                     vertex_cap=args.max_vertices)
    report = partial.check_copy_connectivity(pt, (), args.k - 1)
    _emit(json.dumps({
        "n": args.n, "k": args.k, "d": args.d, "c": args.c,
        "kc_connected": witness is None,
        "violating_prefix": list(witness) if witness is not None else None,
        "vertices": pt.num_vertices,
        "copy_connectivity": {
            key: (list(map(list, val)) if key == "missing_links" else val)
            for key, val in report.items()
            if key != "prefix"
        },
    }), args.out)
    return 0 if witness is None and report["passed"] else 1


def cmd_partial_hp(args) -> int:
    listing = _grown_listing(args.n, args.k, args.d)
    pt = partial.materialize_partial(listing, args.n, args.k,
                                     vertex_cap=args.max_vertices)
    u, v = _label(args.u, args.n, args.k), _label(args.v, args.n, args.k)
    path = partial.partial_hp(pt, args.c, u, v)
    if not partial.verify_partial_path(pt, path, u, v):
        raise DCellError("partial path failed verification")
    _emit(json.dumps({
        "n": args.n, "k": args.k, "d": args.d, "c": args.c,
        "u": args.u, "v": args.v,
        "path": [uid(x, args.k, args.n) for x in path],
    }), args.out)
    return 0


def cmd_bcast(args) -> int:
    source = _label(args.source, args.n, args.k) if args.source is not None else None
    config = broadcast.SimConfig(
        n=args.n, k=args.k, source=source, scheme=args.scheme,
        link_fault_probability=args.p, trials=args.trials, seed=args.seed,
    )
    result = broadcast.simulate(config)
    _emit(json.dumps(result.to_dict(config)), args.out)
    return 0


def cmd_bench(args) -> int:
    rows = []
    for pair in args.pairs:
        try:
            n, k = (int(x) for x in pair.split(","))
        except ValueError:
            raise ParameterError(f"bad pair {pair!r}, want n,k") from None
        tk = t(n, k)
        if tk > args.max_vertices:
            raise ParameterError(f"t_{k}={tk} exceeds --max-vertices")
        u = _label(0, n, k)
        v = _label(tk - 1, n, k)
        start = time.perf_counter()
        path, counter = counted_dcell_hp(u, v, k, n)
        elapsed = time.perf_counter() - start
        if not verify_path(Params(n=n, k=k), path, u, v):
            raise DCellError(f"bench path failed verification at n={n}, k={k}")
        rows.append((n, k, tk, counter.total, counter.total / tk, elapsed))
    header = f"{'n':>3} {'k':>3} {'t_k':>9} {'calls':>9} {'calls/t_k':>10} {'seconds':>9}"
    lines = [header]
    for n, k, tk, calls, ratio, secs in rows:
        lines.append(f"{n:>3} {k:>3} {tk:>9} {calls:>9} {ratio:>10.4f} {secs:>9.4f}")
    _emit("\n".join(lines), args.out)
    return 0


# -- parser ----------------------------------------------------------------


def _add_nk(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="switch port count")
    p.add_argument("--k", type=int, required=True, help="recursion level")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcell",
        description="DCell topology, Hamiltonian constructions, and broadcast simulation",
    )
    parser.add_argument("--max-vertices", type=int, default=100_000,
                        help="size cap for materialized graphs")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker cap for parallelizable drivers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a DCell graph")
    _add_nk(p)
    p.add_argument("--format", choices=("edgelist", "dot", "json"),
                   default="edgelist")
    _add_out(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("hp", help="Hamiltonian path between two uids")
    _add_nk(p)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    _add_out(p)
    p.set_defaults(fn=cmd_hp)

    p = sub.add_parser("ft-hp", help="fault-tolerant Hamiltonian path")
    _add_nk(p)
    p.add_argument("--faults", required=True,
                   help='JSON file {"vertices":[uid...], "edges":[[uid,uid]...]}')
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    _add_out(p)
    p.set_defaults(fn=cmd_ft_hp)

    p = sub.add_parser("ft-hc", help="fault-tolerant Hamiltonian cycle")
    _add_nk(p)
    p.add_argument("--faults", required=True)
    _add_out(p)
    p.set_defaults(fn=cmd_ft_hc)

    p = sub.add_parser("oracle", help="exhaustive-search oracle")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    q = osub.add_parser("certify", help="re-certify the small base cases")
    q.set_defaults(fn=cmd_oracle_certify)
    q = osub.add_parser("hp", help="search for a Hamiltonian path")
    _add_nk(q)
    q.add_argument("--u", type=int, required=True)
    q.add_argument("--v", type=int, required=True)
    _add_out(q)
    q.set_defaults(fn=cmd_oracle_hp)
    q = osub.add_parser("fault-check", help="fault sweep on a small DCell")
    _add_nk(q)
    q.add_argument("--f", type=int, required=True, help="fault budget")
    q.add_argument("--mode", choices=("hc", "hcc"), default="hc")
    q.add_argument("--sampling", choices=("exhaustive", "random"),
                   default="exhaustive")
    q.add_argument("--count", type=int, default=0)
    q.add_argument("--seed", type=int, default=0)
    _add_out(q)
    q.set_defaults(fn=cmd_oracle_fault_check)

    p = sub.add_parser("partial", help="incremental-deployment tooling")
    psub = p.add_subparsers(dest="partial_command", required=True)
    q = psub.add_parser("next", help="enumerate unit tuples in canonical order")
    q.add_argument("--shape", required=True, help="bounds a_k,...,a_2")
    q.add_argument("--steps", type=int, default=None)
    q.add_argument("--json", action="store_true",
                   help="emit the listing as JSON instead of one tuple per line")
    _add_out(q)
    q.set_defaults(fn=cmd_partial_next)
    q = psub.add_parser("check", help="K_c-connectivity and copy linkage")
    _add_nk(q)
    q.add_argument("--d", type=int, required=True, help="deployed unit count")
    q.add_argument("--c", type=int, required=True)
    _add_out(q)
    q.set_defaults(fn=cmd_partial_check)
    q = psub.add_parser("hp", help="Hamiltonian path of a partial DCell")
    _add_nk(q)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--c", type=int, required=True)
    q.add_argument("--u", type=int, required=True)
    q.add_argument("--v", type=int, required=True)
    _add_out(q)
    q.set_defaults(fn=cmd_partial_hp)

    p = sub.add_parser("bcast", help="broadcast simulation")
    _add_nk(p)
    p.add_argument("--scheme", choices=broadcast.SCHEMES, default=broadcast.FLOOD)
    p.add_argument("--p", type=float, default=0.0,
                   help="iid link fault probability")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", type=int, default=None, help="source uid")
    _add_out(p)
    p.set_defaults(fn=cmd_bcast)

    p = sub.add_parser("bench", help="construction scaling table")
    p.add_argument("--pairs", nargs="*", default=[],
                   help="n,k pairs, e.g. --pairs 2,2 2,3 3,1")
    _add_out(p)
    p.set_defaults(fn=cmd_bench)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DCellError as exc:
        json.dump({"error": exc.code, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except FileNotFoundError as exc:
        json.dump({"error": "io", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
