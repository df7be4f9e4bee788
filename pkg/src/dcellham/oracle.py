"""Exhaustive Hamiltonian path/cycle search on small graphs.

Serves as ground truth for every constructive algorithm in the package,
and re-certifies the small base cases the recursive constructions start
from.  Adjacency is kept as per-vertex bitmasks; searches are plain
backtracking with connectivity and degree pruning, deterministic
(neighbors visited in ascending index order).
"""

from __future__ import annotations

import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import topology
from .errors import CertificationError, ParameterError, ResourceLimitError
from .topology import Label, Params, build_graph

ORACLE_CAP = 64


class SmallGraph:
    """Undirected simple graph on at most ORACLE_CAP vertices, as bitsets."""

    def __init__(self, n: int, edges=()):
        if n > ORACLE_CAP:
            raise ResourceLimitError(f"{n} vertices exceeds the oracle cap {ORACLE_CAP}")
        self.n = n
        self.adj = [0] * n
        for a, b in edges:
            self.add_edge(a, b)

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise ParameterError("self loops not allowed")
        self.adj[a] |= 1 << b
        self.adj[b] |= 1 << a

    def remove_edge(self, a: int, b: int) -> None:
        self.adj[a] &= ~(1 << b)
        self.adj[b] &= ~(1 << a)

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a] >> b & 1)

    def copy(self) -> "SmallGraph":
        g = SmallGraph(self.n)
        g.adj = list(self.adj)
        return g

    @staticmethod
    def from_topology(topo) -> "SmallGraph":
        g = SmallGraph(topo.num_vertices)
        for e in topo.edges():
            g.add_edge(topo.uid(e.u), topo.uid(e.v))
        return g

    @staticmethod
    def from_adj(adj: dict) -> tuple["SmallGraph", list]:
        """Build from a node->set adjacency dict; returns (graph, node order)."""
        nodes = sorted(adj)
        index = {v: i for i, v in enumerate(nodes)}
        g = SmallGraph(len(nodes))
        for v, nbrs in adj.items():
            for w in nbrs:
                if index[v] < index[w]:
                    g.add_edge(index[v], index[w])
        return g, nodes


@dataclass
class Certificate:
    """Search outcome: a Hamiltonian path/cycle, or a certified absence."""

    kind: str  # "HP" | "HC" | "NONE"
    sequence: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.kind != "NONE"


def check_certificate(g: SmallGraph, cert: Certificate, active: int | None = None,
                      u: int | None = None, v: int | None = None) -> bool:
    """Independent validity check of a certificate against the graph."""
    if cert.kind == "NONE":
        return True
    seq = cert.sequence
    if active is None:
        active = (1 << g.n) - 1
    want = {i for i in range(g.n) if active >> i & 1}
    if set(seq) != want or len(seq) != len(want):
        return False
    for a, b in zip(seq, seq[1:]):
        if not g.has_edge(a, b):
            return False
    if cert.kind == "HC" and not g.has_edge(seq[-1], seq[0]):
        return False
    if u is not None and seq[0] != u:
        return False
    if v is not None and seq[-1] != v:
        return False
    return True


def _popcount(x: int) -> int:
    return x.bit_count()


def _bits(x: int):
    while x:
        b = x & -x
        yield b.bit_length() - 1
        x ^= b


def _reachable(adj, start: int, allowed: int) -> int:
    """Bitmask of vertices in `allowed` reachable from start (start excluded
    from the requirement but used as the seed)."""
    reach = adj[start] & allowed
    frontier = reach
    while frontier:
        nxt = 0
        for i in _bits(frontier):
            nxt |= adj[i] & allowed & ~reach
        reach |= nxt
        frontier = nxt
    return reach


def find_hp(g: SmallGraph, u: int, v: int, active: int | None = None) -> Certificate:
    """Exhaustive backtracking search for a (u,v)-Hamiltonian path.

    `active` restricts the search to a vertex subset (fault support).
    """
    if active is None:
        active = (1 << g.n) - 1
    if u == v:
        raise ParameterError("endpoints must be distinct")
    if not (active >> u & 1) or not (active >> v & 1):
        raise ParameterError("endpoints must be active vertices")
    if _popcount(active) == 2:
        if g.has_edge(u, v):
            return Certificate("HP", [u, v])
        return Certificate("NONE")
    adj = g.adj
    vbit = 1 << v
    path = [u]

    def rec(cur: int, unvisited: int) -> bool:
        if unvisited == vbit:
            if adj[cur] & vbit:
                path.append(v)
                return True
            return False
        # prune: all unvisited must be reachable from cur
        if _reachable(adj, cur, unvisited) != unvisited:
            return False
        # prune: any unvisited vertex (except the target) with <= 1
        # available neighbor can never be interior to the path
        curbit = 1 << cur
        avail = unvisited | curbit
        for w in _bits(unvisited):
            d = _popcount(adj[w] & avail)
            if d == 0 or (d <= 1 and w != v):
                return False
        cand = adj[cur] & unvisited & ~vbit
        for w in _bits(cand):
            path.append(w)
            if rec(w, unvisited & ~(1 << w)):
                return True
            path.pop()
        return False

    if rec(u, active & ~(1 << u)):
        return Certificate("HP", path)
    return Certificate("NONE")


def find_hc(g: SmallGraph, active: int | None = None) -> Certificate:
    """Exhaustive backtracking search for a Hamiltonian cycle."""
    if active is None:
        active = (1 << g.n) - 1
    count = _popcount(active)
    if count < 3:
        raise ParameterError("a Hamiltonian cycle needs at least 3 vertices")
    adj = g.adj
    s = (active & -active).bit_length() - 1  # lowest active vertex as anchor
    sbit = 1 << s
    path = [s]

    def rec(cur: int, unvisited: int) -> bool:
        if not unvisited:
            return bool(adj[cur] & sbit)
        # prune: the cycle must still be able to close back to the anchor
        if not adj[s] & unvisited:
            return False
        if _reachable(adj, cur, unvisited) != unvisited:
            return False
        curbit = 1 << cur
        avail = unvisited | curbit | sbit
        for w in _bits(unvisited):
            if _popcount(adj[w] & avail) <= 1:
                return False
        for w in _bits(adj[cur] & unvisited):
            path.append(w)
            if rec(w, unvisited & ~(1 << w)):
                return True
            path.pop()
        return False

    if rec(s, active & ~sbit):
        return Certificate("HC", path)
    return Certificate("NONE")


def is_hamiltonian_connected(g: SmallGraph, active: int | None = None):
    """True iff every distinct active pair is joined by a Hamiltonian path.

    Returns (ok, witness): witness is a pair with no HP when ok is False.
    """
    if active is None:
        active = (1 << g.n) - 1
    verts = list(_bits(active))
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if not find_hp(g, u, v, active):
                return False, (u, v)
    return True, None


def _fault_sets(g: SmallGraph, f: int):
    """All fault sets of size exactly 1..f (vertices and/or edges)."""
    elements = [("v", i) for i in range(g.n)]
    elements += [("e", (a, b)) for a in range(g.n) for b in _bits(g.adj[a]) if a < b]
    import itertools

    for size in range(1, f + 1):
        yield from itertools.combinations(elements, size)


def _apply_faults(g: SmallGraph, faults) -> tuple[SmallGraph, int]:
    gg = g.copy()
    active = (1 << g.n) - 1
    for kind, x in faults:
        if kind == "v":
            active &= ~(1 << x)
            for w in list(_bits(gg.adj[x])):
                gg.remove_edge(x, w)
        else:
            gg.remove_edge(*x)
    return gg, active


def fault_check(g: SmallGraph, f: int, mode: str = "hc",
                sampling: str = "exhaustive", count: int = 0, seed: int = 0):
    """Check f-fault Hamiltonicity (mode 'hc') or f-fault Hamiltonian
    connectivity (mode 'hcc') by enumerating or sampling fault sets.

    Returns (ok, counterexample): counterexample is the failing fault set.
    """
    if f < 0:
        raise ParameterError("fault budget must be >= 0")
    if mode not in ("hc", "hcc"):
        raise ParameterError(f"unknown mode {mode!r}")
    if sampling == "exhaustive":
        candidates = list(_fault_sets(g, f))
    elif sampling == "random":
        if count <= 0:
            raise ParameterError("sampling count must be positive")
        pool = list(_fault_sets(g, f))
        rng = random.Random(seed)
        candidates = [rng.choice(pool) for _ in range(count)] if pool else []
    else:
        raise ParameterError(f"unknown sampling {sampling!r}")
    candidates = [()] + candidates  # always include the fault-free case
    for faults in candidates:
        gg, active = _apply_faults(g, faults)
        if mode == "hc":
            ok = bool(find_hc(gg, active))
        else:
            ok, _ = is_hamiltonian_connected(gg, active)
        if not ok:
            return False, faults
    return True, None


# -- base-case certification ----------------------------------------------


def cache_dir() -> Path:
    env = os.environ.get("DCELL_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dcellham"


_CACHE_VERSION = 1
_memory_cache: dict[tuple[int, int], dict[tuple[int, int], list[int]]] = {}


def base_paths(n: int, k: int) -> dict[tuple[int, int], list[int]]:
    """All-pairs Hamiltonian paths (by uid) for a small Hamiltonian-connected
    DCell, computed once and cached in memory and on disk."""
    key = (n, k)
    if key in _memory_cache:
        return _memory_cache[key]
    path = cache_dir() / f"base-paths-n{n}-k{k}.json"
    if path.exists():
        try:
            data = json.loads(path.read_text())
            if data.get("version") == _CACHE_VERSION:
                table = {
                    tuple(map(int, uv.split(","))): seq
                    for uv, seq in data["paths"].items()
                }
                _memory_cache[key] = table
                return table
        except (ValueError, KeyError):
            pass  # stale cache, recompute
    topo = build_graph(Params(n, k))
    g = SmallGraph.from_topology(topo)
    table = {}
    for u in range(g.n):
        for v in range(u + 1, g.n):
            cert = find_hp(g, u, v)
            if not cert:
                raise CertificationError(
                    f"no Hamiltonian path between uids {u},{v} in DCell_{k} n={n}"
                )
            table[(u, v)] = cert.sequence
    _memory_cache[key] = table
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({
            "version": _CACHE_VERSION,
            "n": n, "k": k,
            "paths": {f"{u},{v}": seq for (u, v), seq in table.items()},
        }))
    except OSError:
        pass  # cache is an optimization only
    return table


def certify_base_cases() -> list[dict]:
    """Re-certify the small structural facts the constructions rely on:

    * the n=2 level-1 DCell is a Hamiltonian 6-cycle but not
      Hamiltonian-connected,
    * the n=2 level-2 and n=3 level-1 DCells are Hamiltonian-connected,
    * both of the latter are 1-fault Hamiltonian.

    Returns a machine-readable report and warms the all-pairs path cache.
    """
    report = []

    def entry(claim, fn):
        start = time.perf_counter()
        ok, witness = fn()
        report.append({
            "claim": claim,
            "status": "PASS" if ok else "FAIL",
            "witness": witness,
            "elapsed_ms": round((time.perf_counter() - start) * 1000, 2),
        })
        if not ok:
            raise CertificationError(f"{claim}: FAILED with witness {witness}")

    c6 = SmallGraph.from_topology(build_graph(Params(2, 1)))

    def check_c6():
        if not find_hc(c6):
            return False, "no Hamiltonian cycle"
        ok, witness = is_hamiltonian_connected(c6)
        if ok:
            return False, "unexpectedly Hamiltonian-connected"
        return True, {"no_hp_pair": list(witness)}

    entry("n=2 level-1 DCell is Hamiltonian but not Hamiltonian-connected", check_c6)

    def check_all_pairs(n, k):
        def run():
            table = base_paths(n, k)
            expected = topology.t(n, k)
            expected_pairs = expected * (expected - 1) // 2
            if len(table) != expected_pairs:
                return False, f"{len(table)} pairs cached, expected {expected_pairs}"
            return True, {"pairs": len(table)}
        return run

    entry("n=2 level-2 DCell is Hamiltonian-connected (all pairs)",
          check_all_pairs(2, 2))
    entry("n=3 level-1 DCell is Hamiltonian-connected (all pairs)",
          check_all_pairs(3, 1))

    def check_one_fault():
        for (n, k) in ((2, 2), (3, 1)):
            g = SmallGraph.from_topology(build_graph(Params(n, k)))
            ok, cex = fault_check(g, 1, mode="hc")
            if not ok:
                return False, {"n": n, "k": k, "faults": repr(cex)}
        return True, None

    entry("n=2 level-2 and n=3 level-1 DCells are 1-fault Hamiltonian",
          check_one_fault)
    return report
