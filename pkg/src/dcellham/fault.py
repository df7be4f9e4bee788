"""Fault-tolerant Hamiltonian construction.

Builds a (u,v)-Hamiltonian path of a level-k DCell minus a fault set F of
at most n+k-4 vertices/edges, and a Hamiltonian cycle for |F| <= n+k-3.
The recursion classifies copies by fault load: a copy whose load exceeds
the level-(k-1) path budget ("heavy") is traversed via a Hamiltonian cycle
with a chosen detach edge; light copies are traversed as forced-endpoint
paths.  The surviving copies are arranged by a small search on the copy
graph (the near-complete graph whose edges are usable cross links).
Candidate choices are enumerated deterministically and retried on failure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import oracle
from .construct import dcell_hp
from .errors import (
    ConstructionError, FaultBoundError, InvariantViolationError, ParameterError,
    UnsupportedParametersError,
)
from .oracle import SmallGraph, find_hc, find_hp
from .topology import (
    Label, Params, Topology, all_labels, digit, edge_level, level_edge,
    level_neighbor, t,
)

_CANDIDATE_CAP = 400  # assembly attempts per recursion level


def _norm_edge(a: Label, b: Label) -> tuple[Label, Label]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class FaultSet:
    """A set of failed vertices and/or edges."""

    vertices: frozenset = frozenset()
    edges: frozenset = frozenset()  # normalized (min,max) label pairs

    @staticmethod
    def make(vertices=(), edges=()) -> "FaultSet":
        return FaultSet(
            frozenset(tuple(v) for v in vertices),
            frozenset(_norm_edge(tuple(a), tuple(b)) for a, b in edges),
        )

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    def vertex_ok(self, x: Label) -> bool:
        return x not in self.vertices

    def edge_ok(self, a: Label, b: Label) -> bool:
        return (
            self.vertex_ok(a) and self.vertex_ok(b)
            and _norm_edge(a, b) not in self.edges
        )

    def without(self, element) -> "FaultSet":
        kind, x = element
        if kind == "v":
            return FaultSet(self.vertices - {x}, self.edges)
        return FaultSet(self.vertices, self.edges - {x})

    def elements(self):
        for v in sorted(self.vertices):
            yield ("v", v)
        for e in sorted(self.edges):
            yield ("e", e)


class FaultyView:
    """A topology with a fault set applied; adjacency queries skip faults."""

    def __init__(self, base: Topology, faults: FaultSet):
        n, k = base.params.n, base.params.k
        for v in faults.vertices:
            if v not in base:
                raise ParameterError(f"faulty vertex {v} not in the topology")
        for a, b in faults.edges:
            if edge_level(a, b, n, base.rule) is None:
                raise ParameterError(f"faulty edge {a}--{b} not in the topology")
        self.base = base
        self.faults = faults

    @property
    def params(self) -> Params:
        return self.base.params

    def alive_vertices(self) -> list:
        return [x for x in self.base.vertices if self.faults.vertex_ok(x)]

    def neighbors(self, x: Label) -> set:
        if not self.faults.vertex_ok(x):
            return set()
        return {y for y in self.base.neighbors(x) if self.faults.edge_ok(x, y)}

    def has_edge(self, x: Label, y: Label) -> bool:
        return self.base.has_edge(x, y) and self.faults.edge_ok(x, y)


def per_copy_faults(faults: FaultSet, k: int, n: int, prefix: Label = ()):
    """Partition a fault set by enclosing level-(k-1) copy.

    Returns (by_copy, cross_edges, lam): intra-copy fault elements keyed by
    copy index, the level-k faulty edges (assigned to neither copy), and the
    index of the copy with the most faults (ties to the smallest index).
    """
    pl = len(prefix)
    by_copy: dict[int, list] = {}
    cross = []
    for v in sorted(faults.vertices):
        if v[:pl] == prefix:
            by_copy.setdefault(digit(v, k), []).append(("v", v))
    for a, b in sorted(faults.edges):
        if a[:pl] != prefix or b[:pl] != prefix:
            continue
        if digit(a, k) == digit(b, k):
            by_copy.setdefault(digit(a, k), []).append(("e", (a, b)))
        else:
            cross.append((a, b))
    lam = 0
    best = -1
    for i in range(t(n, k - 1) + 1):
        cnt = len(by_copy.get(i, []))
        if cnt > best:
            best, lam = cnt, i
    return by_copy, cross, lam


# -- region helpers --------------------------------------------------------


def _region_faults(faults: FaultSet, prefix: Label) -> FaultSet:
    """Faults lying entirely inside the sub-DCell with the given prefix."""
    pl = len(prefix)
    return FaultSet(
        frozenset(v for v in faults.vertices if v[:pl] == prefix),
        frozenset(e for e in faults.edges
                  if e[0][:pl] == prefix and e[1][:pl] == prefix),
    )


def _region_labels(n: int, k: int, prefix: Label):
    return [prefix + lab for lab in all_labels(n, k)]


def _oracle_region(n, k, prefix, faults):
    """SmallGraph of the sub-DCell with faults applied, plus the label map."""
    labels = _region_labels(n, k, prefix)
    index = {x: i for i, x in enumerate(labels)}
    g = SmallGraph(len(labels))
    active = (1 << len(labels)) - 1
    for x in labels:
        for y in labels:
            if x < y and edge_level(x, y, n) is not None and faults.edge_ok(x, y):
                g.add_edge(index[x], index[y])
    for v in faults.vertices:
        if v in index:
            active &= ~(1 << index[v])
    return g, labels, index, active


def _oracle_hp(n, k, prefix, faults, u, v):
    g, labels, index, active = _oracle_region(n, k, prefix, faults)
    cert = find_hp(g, index[u], index[v], active)
    if not cert:
        raise ConstructionError(
            f"no Hamiltonian path {u}..{v} in sub-DCell {prefix} under faults")
    return [labels[i] for i in cert.sequence]


def _oracle_hc(n, k, prefix, faults):
    g, labels, index, active = _oracle_region(n, k, prefix, faults)
    cert = find_hc(g, active)
    if not cert:
        raise ConstructionError(
            f"no Hamiltonian cycle in sub-DCell {prefix} under faults")
    return [labels[i] for i in cert.sequence]


def _alive_in_copy(n, k, prefix, copy, faults):
    return [x for x in _region_labels(n, k - 1, prefix + (copy,))
            if faults.vertex_ok(x)]


# -- copy-graph arrangement ------------------------------------------------


def _copy_adj(n, k, prefix, faults):
    """Adjacency bitmasks over the level-(k-1) copies; an edge is present
    when the unique cross link between the two copies survives."""
    m = t(n, k - 1) + 1
    adj = [0] * m
    for a in range(m):
        for b in range(a + 1, m):
            x, y = level_edge(k, a, b, n, prefix)
            if faults.edge_ok(x, y):
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return adj


def _arrangement(adj, restrict, path_ends=None):
    """Order the copies into a cycle, or a path between `path_ends`, so that
    a restricted copy's arrangement neighbors are exactly its allowed set.

    The copy graph is near-complete, so restricted copies are contracted
    into forced segments first; a short DFS then orders the contracted
    units.  The generic oracle search is unsuitable here: it cannot refute
    an infeasible forced structure on a dense graph quickly.
    """
    m = len(adj)
    adj = list(adj)
    ends = tuple(path_ends) if path_ends is not None else ()
    # exact-neighbor restrictions drop every other edge at that copy
    for r, allowed in restrict.items():
        mask = 0
        for s in allowed:
            mask |= 1 << s
        for other in list(oracle._bits(adj[r] & ~mask)):
            adj[r] &= ~(1 << other)
            adj[other] &= ~(1 << r)
    forced = set()
    for r, allowed in restrict.items():
        need = 1 if r in ends else 2
        if len(allowed) < need:
            raise ConstructionError(f"copy {r} under-restricted")
        for s in allowed:
            if not adj[r] >> s & 1:
                raise ConstructionError(f"restricted copy {r} lost edge to {s}")
        if len(allowed) == need:
            for s in allowed:
                forced.add((min(r, s), max(r, s)))
    fadj: dict[int, list[int]] = {}
    for a, b in sorted(forced):
        fadj.setdefault(a, []).append(b)
        fadj.setdefault(b, []).append(a)
    for x, ns in fadj.items():
        if len(ns) > (1 if x in ends else 2):
            raise ConstructionError(f"forced degree conflict at copy {x}")
    # contract maximal forced paths into units
    units: list[list[int]] = []
    seen: set[int] = set()
    for x in sorted(fadj):
        if x in seen or len(fadj[x]) != 1:
            continue
        seg, prev, cur = [x], None, x
        seen.add(x)
        while True:
            nxt = [w for w in fadj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seg.append(cur)
            seen.add(cur)
        units.append(seg)
    for x in sorted(fadj):
        if x not in seen:  # forced component with no degree-1 node: a cycle
            raise ConstructionError("forced edges close a premature cycle")
    for x in range(m):
        if x not in fadj:
            units.append([x])
    units.sort()
    return _order_units(adj, units, ends)


def _order_units(adj, units, ends):
    """DFS over contracted units (each usable in either orientation)."""
    nu = len(units)
    if ends:
        ua = next(i for i, s in enumerate(units) if ends[0] in s)
        ub = next(i for i, s in enumerate(units) if ends[1] in s)
        if ua == ub:
            seg = units[ua]
            if nu == 1 and {seg[0], seg[-1]} == set(ends):
                return seg if seg[0] == ends[0] else list(reversed(seg))
            raise ConstructionError("endpoints forced into one partial segment")
        first = units[ua] if units[ua][0] == ends[0] else list(reversed(units[ua]))
        if first[0] != ends[0]:
            raise ConstructionError("path endpoint buried inside a forced segment")
        last = units[ub] if units[ub][-1] == ends[1] else list(reversed(units[ub]))
        if last[-1] != ends[1]:
            raise ConstructionError("path endpoint buried inside a forced segment")
        starts = [(ua, first)]
        goal = (ub, last)
    else:
        seg = units[0]
        starts = [(0, seg), (0, list(reversed(seg)))]
        goal = None
    # unit-level adjacency (any end to any end) for the connectivity prune
    umask = [0] * nu
    for i in range(nu):
        for j in range(i + 1, nu):
            if any(adj[a] >> b & 1
                   for a in (units[i][0], units[i][-1])
                   for b in (units[j][0], units[j][-1])):
                umask[i] |= 1 << j
                umask[j] |= 1 << i

    def reach_ok(cur_unit, unused):
        reach = umask[cur_unit] & unused
        frontier = reach
        while frontier:
            nxt = 0
            for i in oracle._bits(frontier):
                nxt |= umask[i] & unused & ~reach
            reach |= nxt
            frontier = nxt
        return reach == unused

    out: list[int] = []

    def dfs(cur_unit, cur_end, unused):
        if goal is not None and unused == 1 << goal[0]:
            if adj[cur_end] >> goal[1][0] & 1:
                out.extend(goal[1])
                return True
            return False
        if not unused:
            return bool(adj[cur_end] >> out[0] & 1)  # close the cycle
        if not reach_ok(cur_unit, unused):
            return False
        for i in oracle._bits(unused):
            if goal is not None and i == goal[0]:
                continue
            seg = units[i]
            for cand in ((seg, seg[0], seg[-1]),
                         (list(reversed(seg)), seg[-1], seg[0])):
                oriented, head, tail = cand
                if not adj[cur_end] >> head & 1:
                    continue
                out.extend(oriented)
                if dfs(i, tail, unused & ~(1 << i)):
                    return True
                del out[-len(oriented):]
                if head == tail:
                    break  # single-copy unit: one orientation only
        return False

    full = (1 << nu) - 1
    for si, seg in starts:
        out.clear()
        out.extend(seg)
        if dfs(si, seg[-1], full & ~(1 << si)):
            return list(out)
    raise ConstructionError("no copy arrangement honors the constraints")


def _cross(k, a, b, n, prefix):
    """Cross edge between copies a and b as (vertex in a, vertex in b)."""
    x, y = level_edge(k, min(a, b), max(a, b), n, prefix)
    return (x, y) if digit(x, k) == a else (y, x)


def _stitch_chain(n, k, prefix, faults, seq, start, end, overrides=None):
    """Path covering every alive vertex of the copies in `seq`, in order,
    entering the first at `start` and leaving the last at `end`.  Copies in
    `overrides` supply their own traversal (entry -> fixed path)."""
    overrides = overrides or {}
    out: list = []
    entry = start
    for idx, c in enumerate(seq):
        if idx + 1 < len(seq):
            exit_v, nxt = _cross(k, c, seq[idx + 1], n, prefix)
        else:
            exit_v, nxt = end, None
        if c in overrides:
            inner = overrides[c](entry)
            if inner[0] != entry or inner[-1] != exit_v:
                raise ConstructionError("override traversal endpoints mismatch")
        elif entry == exit_v:
            if len(_alive_in_copy(n, k, prefix, c, faults)) != 1:
                raise ConstructionError(f"copy {c} entered and left at {entry}")
            inner = [entry]
        else:
            inner = _hp(n, k - 1, prefix + (c,), faults, entry, exit_v)
        if out:
            out += inner
        else:
            out = inner
        entry = nxt
    return out


def _cycle_cut(order, k, n, prefix):
    """Turn a cyclic copy order into (seq, start, end) for _stitch_chain so
    that the chain plus the closing cross edge forms the full cycle."""
    last, first = order[-1], order[0]
    end_v, start_v = _cross(k, last, first, n, prefix)
    return list(order), start_v, end_v


def _detach_choices(n, k, prefix, faults, copy, avoid_copies, cycle=None):
    """For a heavy copy: enumerate (restriction, override) pairs obtained by
    detaching one edge of its Hamiltonian cycle and leaving via the two
    cross links at the detached edge's endpoints."""
    if cycle is None:
        cycle = _hc(n, k - 1, prefix + (copy,), faults)
    m = len(cycle)
    for i in range(m):
        w, z = cycle[i], cycle[(i + 1) % m]
        wp = level_neighbor(w, k, n)
        zp = level_neighbor(z, k, n)
        if not faults.edge_ok(w, wp) or not faults.edge_ok(z, zp):
            continue
        gw, gz = digit(wp, k), digit(zp, k)
        if gw in avoid_copies or gz in avoid_copies or gw == gz:
            continue
        rot = cycle[(i + 1) % m:] + cycle[: (i + 1) % m]  # z .. w

        def override(entry, w=w, z=z, rot=rot):
            if entry == z:
                return rot
            if entry == w:
                return list(reversed(rot))
            raise ConstructionError("heavy copy entered off its detach edge")

        yield {copy: {gw, gz}}, {copy: override}


def _heavy_product(n, k, prefix, faults, heavies, avoid):
    """Deterministic product of detach choices over all heavy copies.

    Two heavy copies may claim each other as cycle neighbors; inconsistent
    combinations fail at assembly and the next one is tried.
    """
    per_copy = []
    for c in heavies:
        choices = list(_detach_choices(n, k, prefix, faults, c, set(avoid)))
        if not choices:
            raise ConstructionError(f"heavy copy {c} has no usable detach edge")
        per_copy.append(choices)
    for combo in itertools.product(*per_copy):
        restrict: dict = {}
        overrides: dict = {}
        for r, o in combo:
            restrict.update(r)
            overrides.update(o)
        yield restrict, overrides


# -- recursion -------------------------------------------------------------


def _is_base(n: int, k: int) -> bool:
    return k == 0 or (k, n) in ((2, 2), (1, 3))


def _hp(n, k, prefix, faults, u, v, jump=True):
    rf = _region_faults(faults, prefix)
    if rf.size == 0 and (k, n) != (1, 2):
        return dcell_hp(u, v, k, n)
    if _is_base(n, k):
        return _oracle_hp(n, k, prefix, rf, u, v)
    try:
        return _hp_cases(n, k, prefix, rf, u, v)
    except ConstructionError:
        if not jump:
            raise
    # fall back to detaching an endpoint: send it straight out on its
    # cross edge and cover the rest of the graph without it; needed when
    # an endpoint's own cross edge is the only route to some copy
    for variant in _jump_variants(n, k, prefix, rf, u, v):
        try:
            return variant()
        except ConstructionError:
            continue
    raise ConstructionError(f"no Hamiltonian path {u}..{v} under faults")


def _hp_cases(n, k, prefix, rf, u, v):
    by_copy, cross, lam = per_copy_faults(rf, k, n, prefix)
    light_budget = n + k - 5  # level-(k-1) forced-endpoint path budget
    heavies = sorted(i for i, fs in by_copy.items() if len(fs) > light_budget)
    uk, vk = digit(u, k), digit(v, k)
    if uk == vk:
        return _hp_same_copy(n, k, prefix, rf, u, v, heavies)
    if heavies and heavies[0] == vk and uk not in heavies:
        return list(reversed(_hp_diff_copy(n, k, prefix, rf, v, u, heavies)))
    return _hp_diff_copy(n, k, prefix, rf, u, v, heavies)


def _jump_variants(n, k, prefix, faults, u, v):
    """Deferred endpoint-detach fallbacks: start with the edge u--N(u,k)
    (u excluded from the remainder), end with N(v,k)--v, or both."""
    up = level_neighbor(u, k, n)
    vp = level_neighbor(v, k, n)
    u_ok = faults.edge_ok(u, up) and up != v
    v_ok = faults.edge_ok(v, vp) and vp != u
    fu = FaultSet(faults.vertices | {u}, faults.edges)
    fv = FaultSet(faults.vertices | {v}, faults.edges)
    if u_ok:
        yield lambda: [u] + _hp(n, k, prefix, fu, up, v, jump=False)
    if v_ok:
        yield lambda: _hp(n, k, prefix, fv, u, vp, jump=False) + [v]
    if u_ok and v_ok and up != vp:
        fuv = FaultSet(faults.vertices | {u, v}, faults.edges)
        yield lambda: [u] + _hp(n, k, prefix, fuv, up, vp, jump=False) + [v]


def _hp_same_copy(n, k, prefix, faults, u, v, heavies):
    alpha = digit(u, k)
    attempts = 0
    if alpha in heavies:
        # heavy endpoint copy: traverse it as a cycle split at u and v
        cycle = _hc(n, k - 1, prefix + (alpha,), faults)
        candidates = _same_copy_heavy_candidates(cycle, u, v, n, k)
    else:
        q = _hp(n, k - 1, prefix + (alpha,), faults, u, v)
        candidates = _same_copy_light_candidates(q, n, k, faults)
    last_err = None
    adj = _copy_adj(n, k, prefix, faults)
    for p_head, x, p_tail, y in candidates:
        attempts += 1
        if attempts > _CANDIDATE_CAP:
            break
        xp = level_neighbor(x, k, n)
        yp = level_neighbor(y, k, n)
        gx, gy = digit(xp, k), digit(yp, k)
        assert len({x, y, xp, yp}) == 4 and gx != gy and alpha not in (gx, gy)
        try:
            for hrestrict, overrides in _arrange_options(
                    n, k, prefix, faults, [h for h in heavies if h != alpha],
                    avoid=set()):
                try:
                    restrict = {alpha: {gx, gy}}
                    restrict.update(hrestrict)
                    order = _arrangement(adj, restrict)
                    order = _orient_at(order, alpha, gx)
                    # order = [alpha, gx, ..., gy]; traverse the non-alpha arc
                    arc = order[1:]
                    chain = _stitch_chain(n, k, prefix, faults, arc, xp, yp,
                                          overrides)
                    return p_head + chain + p_tail
                except ConstructionError as err:
                    last_err = err
        except ConstructionError as err:
            last_err = err
    raise ConstructionError(f"same-copy assembly exhausted: {last_err}")


def _same_copy_light_candidates(q, n, k, faults):
    """Detach pairs (x,y) consecutive on the inner path q, yielding
    (head u..x, x, tail y..v, y)."""
    for i in range(len(q) - 1):
        x, y = q[i], q[i + 1]
        xp = level_neighbor(x, k, n)
        yp = level_neighbor(y, k, n)
        if not faults.edge_ok(x, xp) or not faults.edge_ok(y, yp):
            continue
        yield q[: i + 1], x, q[i + 1:], y


def _same_copy_heavy_candidates(cycle, u, v, n, k):
    """Split a heavy endpoint copy's Hamiltonian cycle into a (u..x') head
    and (y'..v) tail covering the whole copy."""
    m = len(cycle)
    for direction in (1, -1):
        seq = cycle if direction == 1 else list(reversed(cycle))
        iu = seq.index(u)
        seq = seq[iu:] + seq[:iu]  # starts at u
        iv = seq.index(v)
        if iv == m - 1:
            # v is u's predecessor on the cycle: drop v, walk the rest, and
            # re-enter at v from outside
            head = seq[:-1]
            yield head, head[-1], [v], v
        else:
            # split at the edges (u, succ u) and (v, succ v): walk backward
            # arc u..succ(v), jump out, return at succ(u)..v
            head = [u] + list(reversed(seq[iv + 1:]))
            tail = seq[1: iv + 1]
            yield head, head[-1], tail, tail[0]


def _hp_diff_copy(n, k, prefix, faults, u, v, heavies):
    alpha, beta = digit(u, k), digit(v, k)
    x_cands = _exit_candidates(n, k, prefix, faults, u, heavies, avoid={alpha, beta})
    attempts = 0
    last_err = None
    adj = _copy_adj(n, k, prefix, faults)
    for x, xp in x_cands:
        gx = digit(xp, k)
        y_cands = _exit_candidates(n, k, prefix, faults, v, heavies,
                                   avoid={alpha, beta, gx})
        for y, yp in y_cands:
            gy = digit(yp, k)
            attempts += 1
            if attempts > _CANDIDATE_CAP:
                raise ConstructionError(f"cross-copy assembly exhausted: {last_err}")
            mid_heavies = [h for h in heavies if h not in (alpha, beta)]
            for hrestrict, overrides in _arrange_options(
                    n, k, prefix, faults, mid_heavies, avoid=set()):
                restrict = {alpha: {gx}, beta: {gy}}
                restrict.update(hrestrict)
                try:
                    seq = _arrangement(adj, restrict, path_ends=(alpha, beta))
                    head = _endpoint_block(n, k, prefix, faults, u, x, heavies)
                    tail = _endpoint_block(n, k, prefix, faults, v, y, heavies)
                    chain = _stitch_chain(n, k, prefix, faults, seq[1:-1],
                                          xp, yp, overrides)
                    return head + chain + list(reversed(tail))
                except ConstructionError as err:
                    last_err = err
    raise ConstructionError(f"cross-copy assembly exhausted: {last_err}")


def _endpoint_block(n, k, prefix, faults, u, x, heavies):
    """Traversal of an endpoint copy from u to its exit x."""
    c = digit(u, k)
    if c in heavies:
        cycle = _hc(n, k - 1, prefix + (c,), faults)
        i = cycle.index(u)
        m = len(cycle)
        if cycle[(i + 1) % m] == x:
            return [u] + list(reversed(cycle[i + 1:] + cycle[:i]))
        if cycle[(i - 1) % m] == x:
            return cycle[i:] + cycle[:i]
        raise ConstructionError("heavy endpoint exit not adjacent on cycle")
    if u == x:
        raise ConstructionError("endpoint equals its exit vertex")
    return _hp(n, k - 1, prefix + (c,), faults, u, x)


def _exit_candidates(n, k, prefix, faults, u, heavies, avoid):
    """Exit vertices x != u of u's copy whose cross link leaves toward an
    unclaimed copy.  Heavy copies only allow the cycle neighbors of u."""
    c = digit(u, k)
    if c in heavies:
        cycle = _hc(n, k - 1, prefix + (c,), faults)
        i = cycle.index(u)
        m = len(cycle)
        pool = [cycle[(i + 1) % m], cycle[(i - 1) % m]]
    else:
        pool = sorted(x for x in _alive_in_copy(n, k, prefix, c, faults) if x != u)
    for x in pool:
        xp = level_neighbor(x, k, n)
        if not faults.edge_ok(x, xp):
            continue
        if digit(xp, k) in avoid:
            continue
        yield x, xp


def _arrange_options(n, k, prefix, faults, heavies, avoid):
    """Restriction/override combinations for the mid-route heavy copies
    (a single trivial option when there are none)."""
    if not heavies:
        yield {}, {}
        return
    yield from _heavy_product(n, k, prefix, faults, heavies, avoid)


def _orient_at(cycle, pivot, nxt):
    """Rotate/flip a cyclic order to start at `pivot` with `nxt` second."""
    i = cycle.index(pivot)
    fwd = cycle[i:] + cycle[:i]
    if fwd[1] == nxt:
        return fwd
    rev = [fwd[0]] + list(reversed(fwd[1:]))
    if rev[1] == nxt:
        return rev
    raise InvariantViolationError("pivot not adjacent to requested neighbor")


def _hc(n, k, prefix, faults):
    rf = _region_faults(faults, prefix)
    if _is_base(n, k) or (rf.size == 0 and (k, n) == (1, 2)):
        return _oracle_hc(n, k, prefix, rf)
    if rf.size == 0:
        u = prefix + tuple([0] * (k + 1))
        w = level_neighbor(u, 1, n) if k >= 1 else u[:-1] + (1,)
        return dcell_hp(u, w, k, n)  # closes on the level-1 (or K_n) edge
    by_copy, cross, lam = per_copy_faults(rf, k, n, prefix)
    light_budget = n + k - 5
    cycle_budget = n + k - 4  # level-(k-1) Hamiltonian budget
    lam_load = len(by_copy.get(lam, []))
    last_err = None
    if lam_load > cycle_budget:
        # one copy holds every fault and exceeds even the cycle budget:
        # drop one of its faulty elements, cycle the rest, and bridge the
        # gap left by the dropped element through the other copies
        for elem in list(rf.elements()):
            kind, data = elem
            in_lam = (kind == "v" and digit(data, k) == lam) or (
                kind == "e" and digit(data[0], k) == lam
                and digit(data[1], k) == lam)
            if not in_lam:
                continue
            try:
                return _hc_overloaded(n, k, prefix, rf, lam, elem)
            except ConstructionError as err:
                last_err = err
        raise ConstructionError(f"overloaded-copy assembly exhausted: {last_err}")
    heavies = sorted(i for i, fs in by_copy.items() if len(fs) > light_budget)
    adj = _copy_adj(n, k, prefix, rf)
    for restrict, overrides in _arrange_options(n, k, prefix, rf, heavies,
                                                avoid=set()):
        try:
            order = _arrangement(adj, restrict)
            seq, start, end = _cycle_cut(order, k, n, prefix)
            return _stitch_chain(n, k, prefix, rf, seq, start, end, overrides)
        except ConstructionError as err:
            last_err = err
    raise ConstructionError(f"cycle assembly exhausted: {last_err}")


def _hc_overloaded(n, k, prefix, faults, lam, elem):
    """Hamiltonian cycle when one copy holds all faults and exceeds the
    cycle budget: remove one faulty element there, cycle the remainder, and
    route the resulting path's ends through the other copies."""
    reduced = faults.without(elem)
    cycle = _hc(n, k - 1, prefix + (lam,), reduced)
    kind, data = elem
    if kind == "v":
        i = cycle.index(data)
        rot = cycle[i + 1:] + cycle[:i]  # drop the faulty vertex
        u, v = rot[0], rot[-1]
        inner = rot
    else:
        a, b = data
        ia = cycle.index(a)
        m = len(cycle)
        if cycle[(ia + 1) % m] == b:
            inner = cycle[(ia + 1) % m:] + cycle[: (ia + 1) % m]  # b .. a
        elif cycle[(ia - 1) % m] == b:
            inner = cycle[ia:] + cycle[:ia]  # a .. b, skipping the (b,a) edge
        else:
            # the faulty edge is not on the cycle: detach any usable edge
            last_err = None
            adj = _copy_adj(n, k, prefix, faults)
            for restrict, overrides in _detach_choices(
                    n, k, prefix, faults, lam, set(), cycle=cycle):
                try:
                    order = _arrangement(adj, restrict)
                    seq, start, end = _cycle_cut(order, k, n, prefix)
                    return _stitch_chain(n, k, prefix, faults, seq, start, end,
                                         overrides)
                except ConstructionError as err:
                    last_err = err
            raise ConstructionError(
                f"no usable detach edge on reduced cycle: {last_err}")
        u, v = inner[0], inner[-1]
    up = level_neighbor(u, k, n)
    vp = level_neighbor(v, k, n)
    assert faults.vertex_ok(up) and faults.vertex_ok(vp)
    gu, gv = digit(up, k), digit(vp, k)
    restrict = {lam: {gu, gv}}

    def override(entry, inner=inner, u=u, v=v):
        if entry == u:
            return inner
        if entry == v:
            return list(reversed(inner))
        raise ConstructionError("overloaded copy entered off its gap")

    order = _arrangement(_copy_adj(n, k, prefix, faults), restrict)
    seq, start, end = _cycle_cut(order, k, n, prefix)
    return _stitch_chain(n, k, prefix, faults, seq, start, end, {lam: override})


# -- public entry points ---------------------------------------------------


def ft_hp(params: Params, faults: FaultSet, u: Label, v: Label) -> list:
    """A (u,v)-Hamiltonian path of the surviving graph, |F| <= n+k-4."""
    n, k = params.n, params.k
    if (k, n) == (1, 2):
        raise UnsupportedParametersError(
            "the n=2 level-1 DCell is a 6-cycle and not Hamiltonian-connected")
    bound = n + k - 4
    if faults.size > bound:
        raise FaultBoundError(
            f"|F|={faults.size} exceeds the path bound n+k-4={bound}")
    if u == v:
        raise ParameterError("endpoints must be distinct")
    if not faults.vertex_ok(u) or not faults.vertex_ok(v):
        raise ParameterError("endpoints must be alive")
    try:
        return _hp(n, k, (), faults, u, v)
    except ConstructionError as err:
        if params.num_vertices <= oracle.ORACLE_CAP:
            return _oracle_hp(n, k, (), faults, u, v)
        raise InvariantViolationError(str(err)) from err


def ft_hc(params: Params, faults: FaultSet) -> list:
    """A Hamiltonian cycle of the surviving graph, |F| <= n+k-3.

    Returned as a vertex list; the closing edge (last, first) is implied.
    """
    n, k = params.n, params.k
    bound = n + k - 3
    if faults.size > bound:
        raise FaultBoundError(
            f"|F|={faults.size} exceeds the cycle bound n+k-3={bound}")
    try:
        return _hc(n, k, (), faults)
    except ConstructionError as err:
        if params.num_vertices <= oracle.ORACLE_CAP:
            return _oracle_hc(n, k, (), faults)
        raise InvariantViolationError(str(err)) from err


def verify_fault_certificate(view: FaultyView, cert: list, endpoints=None,
                             cycle: bool = False, diagnostics=None) -> bool:
    """Check a path/cycle against the surviving graph: exact coverage of the
    alive vertices, surviving edges only, endpoints honored when given."""
    def fail(msg):
        if diagnostics is not None:
            diagnostics.append(msg)
        return False

    alive = set(view.alive_vertices())
    if set(cert) != alive or len(cert) != len(alive):
        return fail(f"covers {len(set(cert))} vertices, expected {len(alive)}")
    for a, b in zip(cert, cert[1:]):
        if not view.has_edge(a, b):
            return fail(f"dead or missing edge {a} -- {b}")
    if cycle and not view.has_edge(cert[-1], cert[0]):
        return fail(f"dead or missing closing edge {cert[-1]} -- {cert[0]}")
    if endpoints is not None:
        eu, ev = endpoints
        if cert[0] != eu or cert[-1] != ev:
            return fail("endpoints not honored")
    return True
