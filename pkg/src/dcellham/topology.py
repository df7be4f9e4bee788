"""DCell topology construction.

A level-k DCell over n-port switches: level 0 is the complete graph K_n,
and level k stitches t_{k-1}+1 disjoint copies of level k-1 together with
exactly one cross ("level k") edge per pair of copies.  A vertex is a digit
tuple (a_k, ..., a_1, a_0) with a_0 in [n] and a_j in [t_{j-1}+1] for j >= 1.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import ParameterError, ResourceLimitError

Label = tuple[int, ...]

DEFAULT_VERTEX_CAP = 100_000


def t(n: int, k: int) -> int:
    """Server count of a level-k DCell: t_0 = n, t_k = t_{k-1} * (t_{k-1} + 1)."""
    if n < 2:
        raise ParameterError(f"port count n must be >= 2, got {n}")
    if k < 0:
        raise ParameterError(f"level k must be >= 0, got {k}")
    val = n
    for _ in range(k):
        val = val * (val + 1)
    return val


def digit(label: Label, j: int) -> int:
    """Digit of `label` at level j (level 0 is the last entry)."""
    return label[len(label) - 1 - j]


def digit_bounds(n: int, k: int) -> list[int]:
    """Exclusive upper bound of each digit of a level-k label, high level first."""
    return [t(n, j - 1) + 1 for j in range(k, 0, -1)] + [n]


def check_label(label: Label, n: int, k: int) -> None:
    if len(label) != k + 1:
        raise ParameterError(f"label {label} has {len(label)} digits, expected {k + 1}")
    for d, bound in zip(label, digit_bounds(n, k)):
        if not 0 <= d < bound:
            raise ParameterError(f"label {label} digit {d} out of range [0,{bound})")


def uid(label: Label, j: int, n: int) -> int:
    """Integer id of the level-j suffix of `label`: a_0 + sum a_l * t_{l-1}.

    Bijective onto {0, ..., t_j - 1} for a fixed prefix.
    """
    u = digit(label, 0)
    for l in range(1, j + 1):
        u += digit(label, l) * t(n, l - 1)
    return u


def label_from_uid(prefix: Label, u: int, j: int, n: int) -> Label:
    """Inverse of `uid`: the unique label with the given prefix whose level-j
    suffix id equals u."""
    if not 0 <= u < t(n, j):
        raise ParameterError(f"uid {u} out of range [0,{t(n, j)}) for level {j}")
    digits = []
    for l in range(j, 0, -1):
        tl = t(n, l - 1)
        digits.append(u // tl)
        u %= tl
    digits.append(u)
    return tuple(prefix) + tuple(digits)


class ConnectionRule:
    """Assigns the unique level-k edge between copy pair (a, b), a < b.

    Subclasses return the uids (within each copy) of the two endpoints.
    The generalization requirement is that every vertex ends up incident
    with exactly one level-k edge; `validate` checks it for one level.
    """

    def endpoint_uids(self, k: int, a: int, b: int, n: int) -> tuple[int, int]:
        raise NotImplementedError

    def neighbor(self, x: Label, j: int, n: int) -> Label:
        """Level-j neighbor of x (generic O(t_{j-1}) scan over copy pairs)."""
        if j < 1:
            raise ParameterError("level-0 neighbors are plural; use level0_neighbors")
        i = digit(x, j)
        su = uid(x, j - 1, n)
        prefix = x[: len(x) - 1 - j]
        for c in range(t(n, j - 1) + 1):
            if c == i:
                continue
            a, b = (i, c) if i < c else (c, i)
            ua, ub = self.endpoint_uids(j, a, b, n)
            mine, theirs = (ua, ub) if i == a else (ub, ua)
            if mine == su:
                return label_from_uid(prefix + (c,), theirs, j - 1, n)
        raise ParameterError(f"no level-{j} edge at {x} under rule {self!r}")

    def validate(self, k: int, n: int) -> None:
        """Check the one-level-k-edge-per-vertex requirement at level k."""
        copies = t(n, k - 1) + 1
        size = t(n, k - 1)
        seen: dict[tuple[int, int], tuple[int, int]] = {}
        for a in range(copies):
            for b in range(a + 1, copies):
                ua, ub = self.endpoint_uids(k, a, b, n)
                for copy, u in ((a, ua), (b, ub)):
                    if not 0 <= u < size:
                        raise ParameterError(
                            f"rule assigns out-of-range uid {u} in copy {copy}"
                        )
                    if (copy, u) in seen:
                        raise ParameterError(
                            f"vertex uid {u} of copy {copy} gets two level-{k} edges"
                        )
                    seen[(copy, u)] = (a, b)
        if len(seen) != copies * size:
            raise ParameterError(f"rule leaves vertices without a level-{k} edge")


class DefaultRule(ConnectionRule):
    """The standard rule: uid b-1 of copy a is joined to uid a of copy b."""

    def endpoint_uids(self, k: int, a: int, b: int, n: int) -> tuple[int, int]:
        return b - 1, a

    def neighbor(self, x: Label, j: int, n: int) -> Label:
        if j < 1:
            raise ParameterError("level-0 neighbors are plural; use level0_neighbors")
        i = digit(x, j)
        su = uid(x, j - 1, n)
        prefix = x[: len(x) - 1 - j]
        if su >= i:
            # x is the a-side endpoint of the pair (i, su+1)
            return label_from_uid(prefix + (su + 1,), i, j - 1, n)
        # x is the b-side endpoint of the pair (su, i)
        return label_from_uid(prefix + (su,), i - 1, j - 1, n)


DEFAULT_RULE = DefaultRule()


def level_neighbor(x: Label, j: int, n: int, rule: ConnectionRule = DEFAULT_RULE) -> Label:
    """The unique level-j neighbor of x, 1 <= j.  An involution."""
    return rule.neighbor(x, j, n)


def level_edge(
    k: int, a: int, b: int, n: int, prefix: Label = (), rule: ConnectionRule = DEFAULT_RULE
) -> tuple[Label, Label]:
    """The unique level-k edge joining copy a to copy b (a < b), as the pair
    (vertex in copy a, vertex in copy b)."""
    if a == b:
        raise ParameterError(f"copy pair must be distinct, got ({a},{b})")
    if a > b:
        a, b = b, a
    ua, ub = rule.endpoint_uids(k, a, b, n)
    return (
        label_from_uid(prefix + (a,), ua, k - 1, n),
        label_from_uid(prefix + (b,), ub, k - 1, n),
    )


def level0_neighbors(x: Label, n: int) -> set[Label]:
    """The n-1 labels differing from x only in the last digit."""
    base = x[:-1]
    return {base + (a,) for a in range(n) if a != digit(x, 0)}


def all_labels(n: int, k: int):
    """All vertex labels of a level-k DCell in ascending uid order."""
    return itertools.product(*[range(b) for b in digit_bounds(n, k)])


@dataclass(frozen=True)
class Params:
    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"port count n must be >= 2, got {self.n}")
        if self.k < 0:
            raise ParameterError(f"level k must be >= 0, got {self.k}")

    @property
    def num_vertices(self) -> int:
        return t(self.n, self.k)

    @property
    def degree(self) -> int:
        return self.n - 1 + self.k


@dataclass(frozen=True)
class Edge:
    """An undirected edge with its construction level."""

    u: Label
    v: Label
    level: int

    def __post_init__(self) -> None:
        if self.u > self.v:
            object.__setattr__(self, "u", self.v)
            object.__setattr__(self, "v", self.u)

    @staticmethod
    def of(a: Label, b: Label, level: int) -> "Edge":
        return Edge(min(a, b), max(a, b), level)


def edge_level(x: Label, y: Label, n: int, rule: ConnectionRule = DEFAULT_RULE):
    """Level of the edge (x, y), or None if not adjacent.  Works directly on
    labels, so it scales past what build_graph can materialize."""
    if x == y or len(x) != len(y):
        return None
    j = max(i for i in range(len(x)) if digit(x, i) != digit(y, i))
    if j == 0:
        return 0
    return j if rule.neighbor(x, j, n) == y else None


class Topology:
    """Explicit level-k DCell graph: vertex set plus per-edge-level adjacency.

    Immutable once constructed; safe to share across threads.
    """

    def __init__(self, params: Params, rule: ConnectionRule = DEFAULT_RULE,
                 vertex_cap: int = DEFAULT_VERTEX_CAP):
        n, k = params.n, params.k
        if params.num_vertices > vertex_cap:
            raise ResourceLimitError(
                f"t_{k} = {params.num_vertices} exceeds the vertex cap {vertex_cap}"
            )
        if rule is not DEFAULT_RULE:
            for j in range(1, k + 1):
                rule.validate(j, n)
        self.params = params
        self.rule = rule
        self.vertices: list[Label] = list(all_labels(n, k))
        adj: dict[Label, set[tuple[Label, int]]] = {x: set() for x in self.vertices}
        for x in self.vertices:
            for y in level0_neighbors(x, n):
                adj[x].add((y, 0))
            for j in range(1, k + 1):
                adj[x].add((rule.neighbor(x, j, n), j))
        self.adj = adj
        for x, nbrs in adj.items():
            if len(nbrs) != params.degree:
                raise ParameterError(
                    f"vertex {x} has degree {len(nbrs)}, expected {params.degree}"
                )

    def __contains__(self, x: Label) -> bool:
        return x in self.adj

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def uid(self, x: Label) -> int:
        return uid(x, self.params.k, self.params.n)

    def label(self, u: int) -> Label:
        return label_from_uid((), u, self.params.k, self.params.n)

    def neighbors(self, x: Label) -> set[Label]:
        return {y for y, _ in self.adj[x]}

    def has_edge(self, x: Label, y: Label) -> bool:
        return any(y == z for z, _ in self.adj.get(x, ()))

    def edges(self):
        """All edges once each, as Edge records sorted by (uid_u, uid_v)."""
        out = set()
        for x, nbrs in self.adj.items():
            for y, lvl in nbrs:
                out.add(Edge.of(x, y, lvl))
        return sorted(out, key=lambda e: (self.uid(e.u), self.uid(e.v)))

    # -- export formats ----------------------------------------------------

    def to_edgelist(self) -> str:
        n, k = self.params.n, self.params.k
        lines = [f"# dcell n={n} k={k} t={self.num_vertices}"]
        for e in self.edges():
            lines.append(f"{self.uid(e.u)} {self.uid(e.v)} {e.level}")
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        def name(x: Label) -> str:
            return '"' + ".".join(str(d) for d in x) + '"'

        lines = ["graph dcell {"]
        for e in self.edges():
            lines.append(f"  {name(e.u)} -- {name(e.v)} [label={e.level}];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.params.n,
                "k": self.params.k,
                "t": self.num_vertices,
                "vertices": [
                    {"uid": self.uid(x), "label": list(x)} for x in self.vertices
                ],
                "edges": [
                    [self.uid(e.u), self.uid(e.v), e.level] for e in self.edges()
                ],
            },
            indent=None,
        )


def parse_edgelist(text: str) -> tuple[Params, list[tuple[int, int, int]]]:
    """Parse the edge-list text format back into (params, [(uid, uid, level)])."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0]
    if not header.startswith("# dcell"):
        raise ParameterError("missing edge-list header")
    fields = dict(part.split("=") for part in header.split()[2:])
    params = Params(n=int(fields["n"]), k=int(fields["k"]))
    edges = []
    for ln in lines[1:]:
        a, b, lvl = ln.split()
        edges.append((int(a), int(b), int(lvl)))
    return params, edges


def build_graph(params: Params, rule: ConnectionRule = DEFAULT_RULE,
                vertex_cap: int = DEFAULT_VERTEX_CAP) -> Topology:
    """Materialize the level-k DCell graph."""
    return Topology(params, rule, vertex_cap)
