"""Incrementally deployed (partial) DCells.

A partial DCell is a union of complete level-1 units, added one at a time
in a fixed canonical order.  This module implements the incremental
enumeration, O(1) prefix emptiness/fullness queries, the K_c-connectivity
predicate that the Hamiltonian-path construction relies on, and the
construction itself, which routes a Hamiltonian cycle over the top-level
cross edges via the Bondy-Chvatal closure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import prod

from . import oracle
from .construct import dcell_hp
from .errors import (
    ExhaustedError, InvariantViolationError, ParameterError,
    ResourceLimitError, UnsupportedParametersError,
)
from .topology import Label, Params, digit, level_edge, level_neighbor, t

Prefix = tuple  # digits of the high end of a unit tuple; () allowed

DEFAULT_VERTEX_CAP = 100_000


@dataclass(frozen=True)
class ShapeA:
    """Digit bounds (a_k, ..., a_2) of the unit tuples, high level first."""

    bounds: tuple

    def __post_init__(self) -> None:
        if not self.bounds:
            raise ParameterError("shape needs at least one bound")
        if any(b < 1 for b in self.bounds):
            raise ParameterError(f"bounds must be positive, got {self.bounds}")
        a2 = self.bounds[-1]
        if any(b < a2 for b in self.bounds):
            raise ParameterError(
                f"lowest bound a_2={a2} must not exceed the others: {self.bounds}"
            )

    @property
    def k(self) -> int:
        return len(self.bounds) + 1

    @property
    def a2(self) -> int:
        return self.bounds[-1]

    @property
    def total(self) -> int:
        return prod(self.bounds)

    def check_tuple(self, alpha) -> None:
        if len(alpha) != len(self.bounds) or any(
            not 0 <= d < b for d, b in zip(alpha, self.bounds)
        ):
            raise ParameterError(f"tuple {alpha} does not fit shape {self.bounds}")

    def check_prefix(self, p: Prefix) -> None:
        if len(p) > len(self.bounds) or any(
            not 0 <= d < b for d, b in zip(p, self.bounds)
        ):
            raise ParameterError(f"prefix {p} does not fit shape {self.bounds}")


def dcell_shape(n: int, k: int) -> ShapeA:
    """The shape whose tuples index the level-1 units of a level-k DCell."""
    if k < 2:
        raise ParameterError(f"unit tuples need k >= 2, got k={k}")
    return ShapeA(tuple(t(n, j - 1) + 1 for j in range(k, 1, -1)))


class Listing:
    """A growing set of listed unit tuples, always a prefix of the canonical
    enumeration order.  Mutated only through next(); queries are read-only."""

    def __init__(self, shape: ShapeA):
        self.shape = shape
        self._listed: set = set()
        self._order: list = []

    # -- basic queries -----------------------------------------------------

    @property
    def d(self) -> int:
        return len(self._listed)

    @property
    def listed_in_order(self) -> list:
        return list(self._order)

    def phi(self, alpha) -> bool:
        self.shape.check_tuple(tuple(alpha))
        return tuple(alpha) in self._listed

    def is_full(self) -> bool:
        return len(self._listed) == self.shape.total

    # Emptiness and fullness of a prefix take one membership query each:
    # the all-zeros extension is always the first tuple listed under a
    # prefix, and the all-max extension is always the last.
    def _empty(self, p: Prefix) -> bool:
        pad = (0,) * (len(self.shape.bounds) - len(p))
        return tuple(p) + pad not in self._listed

    def _full(self, p: Prefix) -> bool:
        rest = self.shape.bounds[len(p):]
        return tuple(p) + tuple(b - 1 for b in rest) in self._listed

    # -- growth ------------------------------------------------------------

    def next(self):
        """List the next tuple in the canonical order and return it.

        Recursive descent: take the first empty child; once the first a_2
        children of a prefix are all non-empty, descend into the first
        non-full child instead, completing it before opening another.
        """
        if self.is_full():
            raise ExhaustedError("listing is already full")
        a2 = self.shape.a2
        p: tuple = ()
        while True:
            bound = self.shape.bounds[len(p)]
            leaf = len(p) == len(self.shape.bounds) - 1
            m = next((i for i in range(bound) if self._empty(p + (i,))), bound)
            if leaf:
                alpha = p + (m,)
                self._listed.add(alpha)
                self._order.append(alpha)
                return alpha
            if m >= a2:
                m = next(i for i in range(bound) if not self._full(p + (i,)))
            p = p + (m,)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "shape": list(self.shape.bounds),
                "listed": [list(a) for a in self._order],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Listing":
        data = json.loads(text)
        listing = cls(ShapeA(tuple(data["shape"])))
        for a in data["listed"]:
            alpha = tuple(a)
            listing.shape.check_tuple(alpha)
            if alpha in listing._listed:
                raise ParameterError(f"tuple {alpha} listed twice")
            listing._listed.add(alpha)
            listing._order.append(alpha)
        return listing


def is_empty_prefix(listing: Listing, p: Prefix) -> bool:
    """True when no listed tuple extends p.  One membership query."""
    listing.shape.check_prefix(tuple(p))
    return listing._empty(tuple(p))


def is_full_prefix(listing: Listing, p: Prefix) -> bool:
    """True when every tuple extending p is listed.  One membership query."""
    listing.shape.check_prefix(tuple(p))
    return listing._full(tuple(p))


def _all_prefixes(listing: Listing):
    """Every proper prefix (including ()) of at least one listed tuple."""
    seen = set()
    for alpha in listing._order:
        for l in range(len(alpha)):
            seen.add(alpha[:l])
    return seen


def kc_violation(listing: Listing, c: int):
    """A prefix witnessing that the listing is not K_c-connected, or None.

    The condition: for every prefix p, if child 1 of p is non-empty then
    child c-1 is non-empty too.  Prefixes whose child bound is below c are
    skipped (the consequent names a child that cannot exist).
    """
    if not 0 < c <= listing.shape.a2:
        raise ParameterError(f"c must be in (0, {listing.shape.a2}], got {c}")
    for p in sorted(_all_prefixes(listing), key=lambda q: (len(q), q)):
        bound = listing.shape.bounds[len(p)]
        if bound < 2 or c - 1 >= bound:
            continue
        if not listing._empty(p + (1,)) and listing._empty(p + (c - 1,)):
            return p
    return None


def is_kc_connected(listing: Listing, c: int) -> bool:
    return kc_violation(listing, c) is None


def make_kc_connected(listing: Listing, c: int) -> int:
    """Grow the listing until it is K_c-connected; returns the number of
    next() calls performed (at most c-2 for listings grown via next())."""
    calls = 0
    while not is_kc_connected(listing, c):
        listing.next()
        calls += 1
    return calls


# -- materialized partial topology ----------------------------------------


class PartialTopology:
    """Explicit graph of a partial DCell: the listed level-1 units plus
    every connection-rule edge with both endpoints present."""

    def __init__(self, listing: Listing, params: Params,
                 vertex_cap: int = DEFAULT_VERTEX_CAP):
        n, k = params.n, params.k
        if listing.shape != dcell_shape(n, k):
            raise ParameterError(
                f"listing shape {listing.shape.bounds} is not the unit-tuple "
                f"shape of a level-{k} DCell with n={n}"
            )
        t1 = t(n, 1)
        if listing.d * t1 > vertex_cap:
            raise ResourceLimitError(
                f"{listing.d} units x {t1} vertices exceeds cap {vertex_cap}"
            )
        self.listing = listing
        self.params = params
        verts: set = set()
        for alpha in listing._listed:
            for a1 in range(n + 1):
                for a0 in range(n):
                    verts.add(alpha + (a1, a0))
        adj: dict = {x: set() for x in verts}
        for x in verts:
            base = x[:-1]
            for a0 in range(n):
                y = base + (a0,)
                if y != x:
                    adj[x].add(y)
            for j in range(1, k + 1):
                y = level_neighbor(x, j, n)
                if y in adj:
                    adj[x].add(y)
        self.vertices = verts
        self.adj = adj

    def __contains__(self, x: Label) -> bool:
        return x in self.adj

    @property
    def num_vertices(self) -> int:
        return len(self.adj)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def neighbors(self, x: Label) -> set:
        return self.adj[x]

    def has_edge(self, x: Label, y: Label) -> bool:
        return y in self.adj.get(x, ())

    def edges(self):
        return sorted({tuple(sorted((x, y))) for x in self.adj for y in self.adj[x]})


def materialize_partial(listing: Listing, n: int, k: int,
                        vertex_cap: int = DEFAULT_VERTEX_CAP) -> PartialTopology:
    return PartialTopology(listing, Params(n=n, k=k), vertex_cap)


def check_copy_connectivity(partial: PartialTopology, p: Prefix, l: int) -> dict:
    """Linkage report for the level-l children of the sub-partial at p.

    With m the largest non-empty child index: every pair i < j < m must be
    linked by a surviving level-(l+1) edge, and child m must be linked to at
    least min(m, t_1) of its siblings.
    """
    n, k = partial.params.n, partial.params.k
    if not 1 <= l <= k - 1 or len(p) != k - l - 1:
        raise ParameterError(f"prefix length {len(p)} does not match level {l}")
    listing = partial.listing
    bound = t(n, l) + 1

    def nonempty(i: int) -> bool:
        q = tuple(p) + (i,)
        if len(q) == len(listing.shape.bounds):
            return listing.phi(q)
        return not listing._empty(q)

    def linked(i: int, j: int) -> bool:
        a, b = level_edge(l + 1, i, j, n, prefix=tuple(p))
        return a in partial.adj and b in partial.adj

    m = max((i for i in range(bound) if nonempty(i)), default=None)
    if m is None:
        raise ParameterError(f"sub-partial at prefix {p} is empty")
    missing = [(i, j) for i in range(m) for j in range(i + 1, m) if not linked(i, j)]
    m_linked = sum(1 for j in range(m) if linked(j, m))
    required = min(m, t(n, 1))
    return {
        "prefix": tuple(p),
        "level": l,
        "m": m,
        "checked_pairs": m * (m - 1) // 2,
        "missing_links": missing,
        "m_linked_count": m_linked,
        "m_required": required,
        "passed": not missing and m_linked >= required,
    }


# -- Bondy-Chvatal closure -------------------------------------------------


def _closure_trace(g: dict):
    """(closure adjacency, added edges in insertion order)."""
    cl = {v: set(ns) for v, ns in g.items()}
    nv = len(cl)
    verts = sorted(cl)
    added = []
    changed = True
    while changed:
        changed = False
        for i, x in enumerate(verts):
            for y in verts[i + 1:]:
                if y not in cl[x] and len(cl[x]) + len(cl[y]) >= nv:
                    cl[x].add(y)
                    cl[y].add(x)
                    added.append((x, y))
                    changed = True
    return cl, added


def bc_closure(g: dict) -> dict:
    """The Bondy-Chvatal closure: repeatedly join non-adjacent x, y with
    d(x) + d(y) >= |V|.  Idempotent supergraph of g."""
    return _closure_trace(g)[0]


def _unwind_added_edge(cycle: list, x, y, allowed: dict) -> list:
    """Replace the cycle's use of chord (x, y) using edges of `allowed`.

    Opens the cycle into a path x..y and closes it with a crossing pair
    (p_i, y), (p_{i+1}, x); the degree condition that admitted the chord
    guarantees such a pair exists.
    """
    nv = len(cycle)
    i = cycle.index(x)
    if cycle[(i + 1) % nv] == y:
        path = cycle[i + 1:] + cycle[: i + 1]  # y .. x
        path.reverse()
    else:
        if cycle[i - 1] != y:
            raise InvariantViolationError("chord not on cycle")
        path = cycle[i:] + cycle[:i]  # x .. y
    for j in range(1, nv - 1):
        if path[-1] in allowed[path[j]] and path[0] in allowed[path[j + 1]]:
            return path[: j + 1] + list(reversed(path[j + 1:]))
    raise InvariantViolationError("no crossing pair despite the degree condition")


def hc_via_closure(g: dict, oracle_cap: int = 20):
    """A Hamiltonian cycle of g, or None.

    When the closure of g is complete, the cycle is built constructively:
    start from a cycle of the complete closure and discharge each added
    edge in reverse insertion order.  Otherwise a bounded exhaustive search
    decides graphs of at most `oracle_cap` vertices.
    """
    nv = len(g)
    if nv < 3:
        return None
    cl, added = _closure_trace(g)
    if all(len(ns) == nv - 1 for ns in cl.values()):
        cycle = sorted(g)
        for idx in range(len(added) - 1, -1, -1):
            x, y = added[idx]
            pos = cycle.index(x)
            if cycle[(pos + 1) % nv] == y or cycle[pos - 1] == y:
                allowed = {v: set(ns) for v, ns in g.items()}
                for a, b in added[:idx]:
                    allowed[a].add(b)
                    allowed[b].add(a)
                cycle = _unwind_added_edge(cycle, x, y, allowed)
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            if b not in g[a]:
                raise InvariantViolationError(f"unwound cycle uses non-edge {a}-{b}")
        return cycle
    if nv <= oracle_cap:
        sg, verts = oracle.SmallGraph.from_adj(g)
        cert = oracle.find_hc(sg)
        return [verts[i] for i in cert.sequence] if cert else None
    return None


# -- Hamiltonian paths in partial DCells -----------------------------------


def anchor_breaks(path: list, anchor: set) -> list:
    """1-based ranks r where the r-th anchor vertex on the path is not
    immediately followed by the (r+1)-st.  Empty means one contiguous run."""
    positions = [i for i, x in enumerate(path) if x in anchor]
    return [
        r + 1
        for r, (i, j) in enumerate(zip(positions, positions[1:]))
        if j != i + 1
    ]


def _anchor_set(prefix: tuple, kk: int, omega: int, n: int) -> set:
    """Vertices of the all-zeros level-omega sub-unit below `prefix`."""
    zeros = (0,) * (kk - 1 - omega)
    base = tuple(prefix) + zeros
    if omega == 0:
        return {base + (a0,) for a0 in range(n)}
    return {base + (a1, a0) for a1 in range(n + 1) for a0 in range(n)}


def _d1_hp(u: Label, v: Label, n: int) -> list:
    """(u,v)-HP of a complete level-1 unit keeping the group-0 vertices in
    one run, except that both endpoints in group 0 force the path to open
    with u alone before the remaining group-0 block closes at v."""
    if digit(u, 1) == 0 and digit(v, 1) == 0:
        return list(reversed(dcell_hp(v, u, 1, n)))
    return dcell_hp(u, v, 1, n)


class _PartialHP:
    """One construction run; carries the topology and theorem parameters."""

    def __init__(self, partial: PartialTopology, omega: int):
        self.partial = partial
        self.n = partial.params.n
        self.k = partial.params.k
        self.omega = omega

    def _copy_graph(self, prefix: tuple, kk: int, m: int) -> dict:
        """Level-kk cross edges among the non-empty copies 0..m."""
        g: dict = {i: set() for i in range(m + 1)}
        for i in range(m):
            for j in range(i + 1, m + 1):
                a, b = level_edge(kk, i, j, self.n, prefix=prefix)
                if a in self.partial.adj and b in self.partial.adj:
                    g[i].add(j)
                    g[j].add(i)
        return g

    def _largest_copy(self, prefix: tuple, kk: int) -> int:
        listing = self.partial.listing
        bound = t(self.n, kk - 1) + 1

        def nonempty(i: int) -> bool:
            q = prefix + (i,)
            if len(q) == len(listing.shape.bounds):
                return listing.phi(q)
            return not listing._empty(q)

        m = max((i for i in range(bound) if nonempty(i)), default=None)
        if m is None:
            raise InvariantViolationError(f"empty sub-partial at {prefix}")
        return m

    def _chain(self, prefix: tuple, kk: int, seq: list, entry: Label,
               last_exit: Label) -> list:
        """One path through the copies of seq in order, from `entry` (inside
        the first copy) to `last_exit` (inside the last), stitched by the
        unique level-kk cross edge between consecutive copies."""
        out: list = []
        pos = entry
        for idx, ci in enumerate(seq):
            if idx + 1 < len(seq):
                a, b = level_edge(kk, ci, seq[idx + 1], self.n, prefix=prefix)
                ext = a if digit(a, kk) == ci else b
                nxt = b if ext is a else a
            else:
                ext = last_exit
                nxt = None
            if pos == ext:
                raise InvariantViolationError(
                    f"copy {ci} entered and left at the same vertex {pos}"
                )
            out.extend(self.hp(prefix + (ci,), kk - 1, pos, ext))
            if nxt is not None:
                pos = nxt
        return out

    def hp(self, prefix: tuple, kk: int, u: Label, v: Label) -> list:
        if kk == 1:
            return _d1_hp(u, v, self.n)
        m = self._largest_copy(prefix, kk)
        alpha, beta = digit(u, kk), digit(v, kk)
        if m == 0:
            return self.hp(prefix + (0,), kk - 1, u, v)
        if alpha == beta:
            return self._same_copy(prefix, kk, m, u, v, alpha)
        return self._distinct_copies(prefix, kk, m, u, v, alpha, beta)

    def _same_copy(self, prefix: tuple, kk: int, m: int, u: Label, v: Label,
                   alpha: int) -> list:
        inner = self.hp(prefix + (alpha,), kk - 1, u, v)
        anchor = _anchor_set(prefix + (alpha,), kk, self.omega, self.n)
        base = self._copy_graph(prefix, kk, m)
        # every vertex of the anchor unit has a present level-kk neighbor;
        # scan the inner path for an anchor edge whose partners survive
        for i in range(len(inner) - 1):
            x, y = inner[i], inner[i + 1]
            if x not in anchor or y not in anchor:
                continue
            xp = level_neighbor(x, kk, self.n)
            yp = level_neighbor(y, kk, self.n)
            if xp not in self.partial.adj or yp not in self.partial.adj:
                continue
            gamma, delta = digit(xp, kk), digit(yp, kk)
            g = {c: set(ns) for c, ns in base.items()}
            for j in list(g[alpha]):
                if j not in (gamma, delta):
                    g[alpha].discard(j)
                    g[j].discard(alpha)
            cyc = hc_via_closure(g)
            if cyc is None:
                continue
            pos = cyc.index(alpha)
            cyc = cyc[pos:] + cyc[:pos]
            if cyc[1] != gamma:
                cyc = [alpha] + list(reversed(cyc[1:]))
            if cyc[1] != gamma or cyc[-1] != delta:
                raise InvariantViolationError("cycle does not pass the cut copies")
            middle = self._chain(prefix, kk, cyc[1:], xp, yp)
            return inner[: i + 1] + middle + inner[i + 1:]
        raise InvariantViolationError(
            f"no detachable anchor edge in copy {alpha} admits a level-{kk} cycle"
        )

    def _distinct_copies(self, prefix: tuple, kk: int, m: int, u: Label,
                         v: Label, alpha: int, beta: int) -> list:
        g = self._copy_graph(prefix, kk, m)
        up = level_neighbor(u, kk, self.n)
        vp = level_neighbor(v, kk, self.n)
        gamma = digit(up, kk) if up in self.partial.adj else None
        delta = digit(vp, kk) if vp in self.partial.adj else None
        tee = -1
        g[tee] = {alpha, beta}
        g[alpha].add(tee)
        g[beta].add(tee)
        # the copy path must not leave u's copy on u's own cross edge, nor
        # enter v's copy on v's; drop those copy-graph edges up front
        for a, b in ((alpha, gamma), (delta, beta)):
            if a is not None and b is not None and b in g.get(a, ()):
                g[a].discard(b)
                g[b].discard(a)
        cyc = hc_via_closure(g)
        if cyc is None:
            raise InvariantViolationError(
                f"no level-{kk} copy path from {alpha} to {beta}"
            )
        pos = cyc.index(tee)
        cyc = cyc[pos:] + cyc[:pos]
        seq = cyc[1:]
        if seq[0] != alpha:
            seq = list(reversed(seq))
        if seq[0] != alpha or seq[-1] != beta:
            raise InvariantViolationError("copy path misses an endpoint copy")
        a, b = level_edge(kk, seq[-2], seq[-1], self.n, prefix=prefix)
        last_exit = a if digit(a, kk) == seq[-2] else b
        last_entry = b if last_exit is a else a
        if last_entry == v:
            raise InvariantViolationError("copy path enters v's copy at v")
        head = self._chain(prefix, kk, seq[:-1], u, last_exit)
        return head + self.hp(prefix + (beta,), kk - 1, last_entry, v)


def partial_hp(partial: PartialTopology, c: int, u: Label, v: Label,
               debug: dict | None = None) -> list:
    """A (u,v)-Hamiltonian path of a K_c-connected partial DCell.

    Requires 4 <= n <= c-1 < t_1+1 and either c < t_1+1 with k+1 <= n
    (anchor unit is a level-0 group) or c = t_1+1 with k+1 <= t_1 (anchor
    unit is a level-1 unit).
    """
    n, k = partial.params.n, partial.params.k
    t1 = t(n, 1)
    if not 4 <= n <= c - 1 < t1 + 1:
        raise UnsupportedParametersError(
            f"need 4 <= n <= c-1 < t_1+1, got n={n}, c={c}, t_1={t1}"
        )
    if c < t1 + 1 and k + 1 <= n:
        omega = 0
    elif c == t1 + 1 and k + 1 <= t1:
        omega = 1
    else:
        raise UnsupportedParametersError(
            f"no admissible anchor level for n={n}, k={k}, c={c}"
        )
    witness = kc_violation(partial.listing, c)
    if witness is not None:
        raise UnsupportedParametersError(
            f"listing is not K_{c}-connected: prefix {witness} has child 1 "
            f"non-empty but child {c - 1} empty"
        )
    if u == v:
        raise ParameterError("endpoints must be distinct")
    for x in (u, v):
        if x not in partial.adj:
            raise ParameterError(f"vertex {x} is not in the partial DCell")
    run = _PartialHP(partial, omega)
    path = run.hp((), k, u, v)
    if debug is not None:
        debug["omega"] = omega
        debug["anchor"] = _anchor_set((), k, omega, n)
        debug["breaks"] = anchor_breaks(path, debug["anchor"])
    if len(path) != partial.num_vertices:
        raise InvariantViolationError(
            f"path covers {len(path)} of {partial.num_vertices} vertices"
        )
    return path


def verify_partial_path(partial: PartialTopology, path: list, u: Label,
                        v: Label, diagnostics: list | None = None) -> bool:
    """Certificate check: path runs u..v over surviving edges and covers
    every vertex of the partial exactly once."""
    def fail(msg: str) -> bool:
        if diagnostics is not None:
            diagnostics.append(msg)
        return False

    if not path or path[0] != u or path[-1] != v:
        return fail("endpoint mismatch")
    if len(set(path)) != len(path):
        return fail("repeated vertex")
    if set(path) != set(partial.adj):
        return fail(f"covers {len(set(path))} of {partial.num_vertices} vertices")
    for a, b in zip(path, path[1:]):
        if not partial.has_edge(a, b):
            return fail(f"non-edge {a} -- {b}")
    return True
