import itertools
import random

import pytest

from dcellham.construct import dcell_hp
from dcellham.errors import ExhaustedError, ParameterError, UnsupportedParametersError
from dcellham.partial import (
    Listing, ShapeA, anchor_breaks, bc_closure, check_copy_connectivity,
    dcell_shape, hc_via_closure, is_empty_prefix, is_full_prefix,
    is_kc_connected, kc_violation, make_kc_connected, materialize_partial,
    partial_hp, verify_partial_path,
)
from dcellham.topology import Params, build_graph, t

GOLDEN_332 = [
    (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1), (0, 2, 0),
    (0, 2, 1), (1, 1, 0), (1, 0, 1), (1, 1, 1), (1, 2, 0), (1, 2, 1),
    (2, 0, 0), (2, 1, 0), (2, 0, 1), (2, 1, 1), (2, 2, 0), (2, 2, 1),
]


def grow(shape, d):
    listing = Listing(shape)
    for _ in range(d):
        listing.next()
    return listing


def brute_empty(listing, p):
    return not any(a[:len(p)] == tuple(p) for a in listing.listed_in_order)


def brute_full(listing, p):
    rest = listing.shape.bounds[len(p):]
    listed = set(listing.listed_in_order)
    return all(tuple(p) + ext in listed
               for ext in itertools.product(*(range(b) for b in rest)))


def test_shape_validation():
    with pytest.raises(ParameterError):
        ShapeA((2, 3))  # a_2 exceeds a higher bound
    with pytest.raises(ParameterError):
        ShapeA(())
    shape = ShapeA((3, 3, 2))
    assert shape.k == 4 and shape.a2 == 2 and shape.total == 18
    with pytest.raises(ParameterError):
        shape.check_tuple((0, 3, 0))
    with pytest.raises(ParameterError):
        dcell_shape(3, 1)
    assert dcell_shape(4, 3).bounds == (421, 21)


def test_enumeration_golden_order():
    listing = Listing(ShapeA((3, 3, 2)))
    order = [listing.next() for _ in range(18)]
    assert order == GOLDEN_332
    assert listing.is_full()
    with pytest.raises(ExhaustedError):
        listing.next()


def test_prefix_queries_match_brute_force():
    rng = random.Random(99)
    shapes = [ShapeA((3, 3, 2)), ShapeA((4, 2)), ShapeA((5, 3, 3)), ShapeA((2,))]
    for _ in range(300):
        shape = rng.choice(shapes)
        listing = grow(shape, rng.randint(0, shape.total))
        depth = rng.randint(0, len(shape.bounds))
        p = tuple(rng.randrange(b) for b in shape.bounds[:depth])
        assert is_empty_prefix(listing, p) == brute_empty(listing, p)
        assert is_full_prefix(listing, p) == brute_full(listing, p)


def test_kc_growth_cost():
    rng = random.Random(5)
    for _ in range(200):
        shape = ShapeA((6, 5, 4))
        listing = grow(shape, rng.randint(1, shape.total))
        c = rng.randint(2, shape.a2)
        calls = make_kc_connected(listing, c)
        assert calls <= c - 2, (listing.d, c, calls)
        assert is_kc_connected(listing, c)


def test_kc_violation_witness():
    listing = Listing(ShapeA((4, 4)))
    listing._listed = {(0, 0), (0, 1)}
    listing._order = [(0, 0), (0, 1)]
    # child 1 of () is empty, so the top level passes, but prefix (0,)
    # has child 1 listed and child 2 missing
    assert kc_violation(listing, 3) == (0,)
    with pytest.raises(ParameterError):
        kc_violation(listing, 5)


def test_json_round_trip():
    listing = grow(ShapeA((3, 3, 2)), 7)
    clone = Listing.from_json(listing.to_json())
    assert clone.listed_in_order == listing.listed_in_order
    assert clone.shape == listing.shape


def test_full_materialization_matches_complete_graph():
    n, k = 2, 2
    listing = grow(dcell_shape(n, k), dcell_shape(n, k).total)
    partial = materialize_partial(listing, n, k)
    topo = build_graph(Params(n, k))
    assert partial.num_vertices == topo.num_vertices
    assert partial.num_edges == topo.num_edges
    for x in topo.vertices:
        want = {y + () for y in topo.neighbors(x)}
        assert partial.neighbors(x) == want


def test_copy_connectivity_report():
    n, k = 4, 2
    listing = grow(dcell_shape(n, k), 6)
    partial = materialize_partial(listing, n, k)
    report = check_copy_connectivity(partial, (), 1)
    assert report["m"] == 5
    assert report["passed"], report
    with pytest.raises(ParameterError):
        check_copy_connectivity(partial, (0,), 1)


def test_closure_hamiltonicity():
    # C_4 closes to K_4 (endpoint degrees 2+2 >= 4), so a cycle falls out
    c4 = {0: {1, 3}, 1: {0, 2}, 2: {1, 3}, 3: {0, 2}}
    cl = bc_closure(c4)
    assert all(len(ns) == 3 for ns in cl.values())
    cyc = hc_via_closure(c4)
    assert cyc is not None and len(cyc) == 4
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert b in c4[a]
    # P_3 has no cycle and the closure adds nothing
    assert hc_via_closure({0: {1}, 1: {0, 2}, 2: {1}}) is None


def test_anchor_breaks():
    path = [(0, 0), (0, 1), (9, 9), (0, 2)]
    anchor = {(0, 0), (0, 1), (0, 2)}
    assert anchor_breaks(path, anchor) == [2]


@pytest.mark.parametrize("d", [3, 7, 12, 18])
def test_partial_hp_various_sizes(d):
    n, k, c = 4, 2, 5
    listing = grow(dcell_shape(n, k), d)
    make_kc_connected(listing, c)
    partial = materialize_partial(listing, n, k)
    rng = random.Random(d)
    verts = sorted(partial.adj)
    for _ in range(25):
        u, v = rng.sample(verts, 2)
        debug: dict = {}
        path = partial_hp(partial, c, u, v, debug=debug)
        diag: list = []
        assert verify_partial_path(partial, path, u, v, diagnostics=diag), (
            d, u, v, diag)
        assert all(r <= k for r in debug["breaks"]), (d, u, v, debug["breaks"])


def test_partial_hp_omega_one():
    # c = t_1 + 1 forces the level-1 anchor unit
    n, k = 4, 2
    c = t(n, 1) + 1
    listing = grow(dcell_shape(n, k), 8)
    make_kc_connected(listing, c)
    partial = materialize_partial(listing, n, k)
    rng = random.Random(1)
    verts = sorted(partial.adj)
    for _ in range(10):
        u, v = rng.sample(verts, 2)
        debug: dict = {}
        path = partial_hp(partial, c, u, v, debug=debug)
        assert debug["omega"] == 1
        assert verify_partial_path(partial, path, u, v)


def test_partial_hp_level_three():
    n, k, c = 4, 3, 5
    listing = grow(dcell_shape(n, k), 25)
    make_kc_connected(listing, c)
    partial = materialize_partial(listing, n, k)
    rng = random.Random(3)
    verts = sorted(partial.adj)
    for _ in range(8):
        u, v = rng.sample(verts, 2)
        path = partial_hp(partial, c, u, v)
        diag: list = []
        assert verify_partial_path(partial, path, u, v, diagnostics=diag), (
            u, v, diag)


def test_partial_hp_full_listing_agrees_with_complete_construction():
    n, k, c = 4, 2, 5
    shape = dcell_shape(n, k)
    listing = grow(shape, shape.total)
    partial = materialize_partial(listing, n, k)
    u, v = (0, 0, 0), (20, 4, 3)
    path = partial_hp(partial, c, u, v)
    assert verify_partial_path(partial, path, u, v)
    # the complete construction covers the same vertex set
    assert set(path) == set(dcell_hp(u, v, k, n))


def test_partial_hp_refusals():
    n, k = 4, 2
    listing = grow(dcell_shape(n, k), 5)
    partial = materialize_partial(listing, n, k)
    with pytest.raises(UnsupportedParametersError):
        partial_hp(partial, 3, (0, 0, 0), (0, 0, 1))  # c-1 < n
    with pytest.raises(UnsupportedParametersError):
        partial_hp(partial, 40, (0, 0, 0), (0, 0, 1))  # c-1 > t_1
    broken = Listing(dcell_shape(n, k))
    broken._listed = {(0,), (1,)}
    broken._order = [(0,), (1,)]
    broken_partial = materialize_partial(broken, n, k)
    with pytest.raises(UnsupportedParametersError):
        partial_hp(broken_partial, 5, (0, 0, 0), (1, 0, 0))
    with pytest.raises(ParameterError):
        partial_hp(partial, 5, (0, 0, 0), (0, 0, 0))
