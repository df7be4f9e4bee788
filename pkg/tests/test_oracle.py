import pytest

from dcellham import oracle
from dcellham.errors import ParameterError
from dcellham.oracle import (
    Certificate, SmallGraph, check_certificate, certify_base_cases,
    fault_check, find_hc, find_hp, is_hamiltonian_connected,
)
from dcellham.topology import Params, build_graph


def ring(n):
    return SmallGraph(n, [(i, (i + 1) % n) for i in range(n)])


def test_small_graph_edges():
    g = SmallGraph(3)
    g.add_edge(0, 1)
    assert g.has_edge(1, 0)
    g.remove_edge(0, 1)
    assert not g.has_edge(0, 1)
    with pytest.raises(ParameterError):
        g.add_edge(0, 0)


def test_from_topology_preserves_structure():
    topo = build_graph(Params(2, 2))
    g = SmallGraph.from_topology(topo)
    assert g.n == 42
    for e in topo.edges():
        assert g.has_edge(topo.uid(e.u), topo.uid(e.v))


def test_from_adj_keeps_node_order():
    g, nodes = SmallGraph.from_adj({5: {9}, 9: {5, 7}, 7: {9}})
    assert sorted(nodes) == [5, 7, 9]
    i = {x: j for j, x in enumerate(nodes)}
    assert g.has_edge(i[5], i[9]) and g.has_edge(i[9], i[7])
    assert not g.has_edge(i[5], i[7])


def test_find_hp_on_a_ring():
    g = ring(6)
    cert = find_hp(g, 0, 1)
    assert cert and cert.kind == "HP"
    assert check_certificate(g, cert, u=0, v=1)
    # distance-2 endpoints on an even ring leave no room for a full path
    assert not find_hp(g, 0, 2)


def test_find_hc():
    g = ring(5)
    cert = find_hc(g)
    assert cert and cert.kind == "HC"
    assert check_certificate(g, cert)
    path = SmallGraph(4, [(0, 1), (1, 2), (2, 3)])
    assert not find_hc(path)


def test_check_certificate_rejects_garbage():
    g = ring(4)
    assert not check_certificate(g, Certificate("HP", [0, 2, 1, 3]))
    assert not check_certificate(g, Certificate("HP", [0, 1, 2]))
    assert check_certificate(g, Certificate("NONE"))


def test_hamiltonian_connected_witness():
    ok, witness = is_hamiltonian_connected(ring(6))
    assert not ok
    assert witness is not None
    g4 = SmallGraph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    ok, witness = is_hamiltonian_connected(g4)
    assert ok and witness is None


def test_fault_check_modes():
    g4 = SmallGraph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    ok, cex = fault_check(g4, 1, mode="hc")
    assert ok and cex is None
    ok, cex = fault_check(ring(6), 1, mode="hc")
    assert not ok and cex is not None
    # K_4 minus an edge leaves its former endpoints with no Hamiltonian path
    ok, cex = fault_check(g4, 1, mode="hcc")
    assert not ok and cex is not None
    g5 = SmallGraph(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])
    ok, cex = fault_check(g5, 1, mode="hcc", sampling="random", count=5, seed=7)
    assert ok
    with pytest.raises(ParameterError):
        fault_check(g4, 1, sampling="random", count=0)
    with pytest.raises(ParameterError):
        fault_check(g4, 1, mode="nope")


def test_base_paths_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("DCELL_CACHE_DIR", str(tmp_path))
    oracle._memory_cache.clear()
    table = oracle.base_paths(3, 1)
    assert len(table) == 12 * 11 // 2
    assert (tmp_path / "base-paths-n3-k1.json").exists()
    oracle._memory_cache.clear()
    again = oracle.base_paths(3, 1)  # disk hit this time
    assert again == table


def test_certify_base_cases_all_pass():
    results = certify_base_cases()
    assert len(results) == 4
    for entry in results:
        assert entry["status"] == "PASS", entry
        assert entry["elapsed_ms"] >= 0
