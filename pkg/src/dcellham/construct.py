"""Recursive O(t_k) construction of Hamiltonian paths in a DCell.

The construction mirrors the inductive Hamiltonian-connectivity argument:
small graphs are looked up (complete-graph level 0 directly, the two
computer-certified small DCells from the oracle cache), and a level-k path
is assembled by routing a permutation of the level-(k-1) copies, stitching
consecutive copies with their unique cross edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import oracle
from .errors import InfeasibleError, InvariantViolationError, ParameterError, \
    UnsupportedParametersError
from .topology import (
    Label, Params, digit, edge_level, label_from_uid, level_edge,
    level_neighbor, t, uid,
)

Path = list  # ordered list of Label


@dataclass
class OpCounter:
    """Tally of recursive construction calls, per level."""

    total: int = 0
    per_level: dict = field(default_factory=dict)

    def hit(self, k: int) -> None:
        self.total += 1
        self.per_level[k] = self.per_level.get(k, 0) + 1


def make_sigma(universe, exclusions=(), first_forbidden=None, last_forbidden=None):
    """Deterministic permutation of `universe` minus `exclusions` whose first
    element differs from `first_forbidden` and last from `last_forbidden`.

    Starts from ascending order and swaps the offending end pair; falls back
    to swapping the ends together.  Raises InfeasibleError when no ordering
    satisfies the constraints.
    """
    sigma = sorted(set(universe) - set(exclusions))

    def ok(seq):
        if not seq:
            return first_forbidden is None and last_forbidden is None
        return seq[0] != first_forbidden and seq[-1] != last_forbidden

    if ok(sigma):
        return sigma
    if len(sigma) >= 2:
        cand = list(sigma)
        if cand[0] == first_forbidden:
            cand[0], cand[1] = cand[1], cand[0]
        if cand[-1] == last_forbidden:
            cand[-1], cand[-2] = cand[-2], cand[-1]
        if ok(cand):
            return cand
        # ends forced into each other: exchange first and last outright
        cand = list(sigma)
        cand[0], cand[-1] = cand[-1], cand[0]
        if ok(cand):
            return cand
    raise InfeasibleError(
        f"no permutation of {sigma} avoids first={first_forbidden}, "
        f"last={last_forbidden}"
    )


def _concat(a: Path, b: Path) -> Path:
    """Join two paths sharing the junction vertex (last of a == first of b)."""
    if a and b:
        if a[-1] != b[0]:
            raise InvariantViolationError("paths do not share a junction vertex")
        return a + b[1:]
    return a or b


def _complete_hp(u: Label, v: Label, n: int) -> Path:
    """Hamiltonian path of a level-0 complete copy: u, rest ascending, v."""
    base = u[:-1]
    a, b = digit(u, 0), digit(v, 0)
    middle = [base + (c,) for c in range(n) if c not in (a, b)]
    return [u] + middle + [v]


def _base_lookup(u: Label, v: Label, k: int, n: int) -> Path:
    """Path for a certified base case, via the oracle all-pairs cache."""
    prefix = u[: len(u) - 1 - k]
    uu, vv = uid(u, k, n), uid(v, k, n)
    table = oracle.base_paths(n, k)
    if uu < vv:
        seq = table[(uu, vv)]
    else:
        seq = list(reversed(table[(vv, uu)]))
    return [label_from_uid(prefix, w, k, n) for w in seq]


def dcell_hp(u: Label, v: Label, k: int, n: int, counter: OpCounter | None = None) -> Path:
    """A (u,v)-Hamiltonian path of the level-k DCell containing both labels.

    Only the last k+1 digits of u and v are consulted; any common higher
    digits are carried through unchanged.  Deterministic.  Refused for the
    (k,n) = (1,2) ring, which is not Hamiltonian-connected.
    """
    if u == v:
        raise ParameterError("endpoints must be distinct")
    if (k, n) == (1, 2):
        raise UnsupportedParametersError(
            "the n=2 level-1 DCell is a 6-cycle and not Hamiltonian-connected"
        )
    if n < 2 or k < 0:
        raise ParameterError(f"invalid parameters n={n}, k={k}")
    if counter is not None:
        counter.hit(k)
    if k == 0:
        return _complete_hp(u, v, n)
    if (k, n) in ((2, 2), (1, 3)):
        return _base_lookup(u, v, k, n)

    uk, vk = digit(u, k), digit(v, k)
    copies = t(n, k - 1) + 1
    if uk == vk:
        # same copy: recurse inside it, detach the last edge, and route the
        # remaining copies between the two cross edges leaving x and v
        p_inner = dcell_hp(u, v, k - 1, n, counter)
        x = p_inner[-2]
        xp = level_neighbor(x, k, n)
        vp = level_neighbor(v, k, n)
        if digit(xp, k) == digit(vp, k):
            raise InvariantViolationError("cross edges from x and v must leave "
                                          "toward distinct copies")
        sigma = make_sigma(range(copies), {uk, digit(vp, k), digit(xp, k)})
        seq = [digit(xp, k)] + sigma + [digit(vp, k)]
        p = p_inner[:-1] + [xp]
        return _concat(p, hp_seq(seq, k, n, xp, vp, counter)) + [v]
    # distinct copies: route every copy once, entering at u's and leaving at
    # v's, keeping the cross edges at u and v themselves unused
    up = level_neighbor(u, k, n)
    vp = level_neighbor(v, k, n)
    sigma = make_sigma(range(copies), {uk, vk},
                       first_forbidden=digit(up, k), last_forbidden=digit(vp, k))
    seq = [uk] + sigma + [vk]
    return hp_seq(seq, k, n, u, v, counter)


def hp_seq(H, k: int, n: int, u: Label, v: Label,
           counter: OpCounter | None = None) -> Path:
    """Path from u to v visiting every vertex of every copy listed in H, in
    order, stitched by the unique level-k edge between consecutive copies."""
    H = list(H)
    if not H or digit(u, k) != H[0] or digit(v, k) != H[-1]:
        raise ParameterError("endpoints must lie in the first/last copies of H")
    if len(set(H)) != len(H):
        raise ParameterError("copy sequence must not repeat")
    if len(H) == 1:
        return dcell_hp(u, v, k - 1, n, counter)
    prefix = u[: len(u) - 1 - k]
    x, xp = level_edge(k, H[0], H[1], n, prefix)
    if digit(x, k) != H[0]:
        x, xp = xp, x
    return _concat(dcell_hp(u, x, k - 1, n, counter),
                   _concat([x, xp], hp_seq(H[1:], k, n, xp, v, counter)))


def counted_dcell_hp(u: Label, v: Label, k: int, n: int):
    """dcell_hp plus the recursive-call tally (linear in t_k)."""
    counter = OpCounter()
    path = dcell_hp(u, v, k, n, counter)
    return path, counter


def verify_path(params: Params, p: Path, u: Label, v: Label,
                hamiltonian: bool = True, diagnostics: list | None = None) -> bool:
    """Contract check: p runs from u to v, repeats nothing, follows edges,
    and (if hamiltonian) covers all t_k vertices.  Appends the first
    violation to `diagnostics` when provided."""
    def fail(msg):
        if diagnostics is not None:
            diagnostics.append(msg)
        return False

    if not p:
        return fail("empty path")
    if p[0] != u or p[-1] != v:
        return fail(f"endpoints {p[0]}..{p[-1]} != requested {u}..{v}")
    if len(set(p)) != len(p):
        return fail("repeated vertex")
    for a, b in zip(p, p[1:]):
        if edge_level(a, b, params.n) is None:
            return fail(f"non-edge {a} -- {b}")
    if hamiltonian and len(p) != params.num_vertices:
        return fail(f"covers {len(p)} of {params.num_vertices} vertices")
    return True
