import math

import pytest

from dcellham.broadcast import (
    SimConfig, fault_success_experiment, fixed_cycle_strategy, ham_cycle_order,
    simulate, simulate_flood, simulate_ham_cycle, simulate_hierarchical,
)
from dcellham.errors import ParameterError, UnsupportedParametersError
from dcellham.topology import Params, build_graph, level_neighbor, t


def cfg(n, k, **kw):
    return SimConfig(n=n, k=k, **kw)


def test_config_validation():
    with pytest.raises(ParameterError):
        cfg(2, 1, scheme="smoke-signals")
    with pytest.raises(ParameterError):
        cfg(2, 1, link_fault_probability=1.5)
    with pytest.raises(ParameterError):
        cfg(2, 1, trials=0)
    assert cfg(2, 2).source_label() == (0, 0, 0)


@pytest.mark.parametrize("n,k", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_flood_fault_free_counts(n, k):
    res = simulate_flood(cfg(n, k))
    topo = build_graph(Params(n, k))
    # every vertex forwards once except the t_k - 1 non-sources stay silent
    # on the link they heard from
    assert res.messages_sent == 2 * topo.num_edges - (t(n, k) - 1)
    assert res.coverage_fraction == 1.0


def bfs_eccentricity(topo, src):
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for y in topo.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return max(dist.values())


def test_flood_round_counts():
    assert simulate_flood(cfg(2, 1)).rounds_to_full_coverage == 3
    for n, k in [(2, 2), (3, 1)]:
        topo = build_graph(Params(n, k))
        res = simulate_flood(cfg(n, k))
        assert res.rounds_to_full_coverage == bfs_eccentricity(topo, (0,) * (k + 1))


def test_ham_cycle_order_is_a_cycle():
    for n, k in [(3, 1), (2, 2), (4, 1)]:
        order = ham_cycle_order(n, k, (0,) * (k + 1))
        topo = build_graph(Params(n, k))
        assert len(order) == t(n, k) and len(set(order)) == t(n, k)
        for a, b in zip(order, order[1:] + order[:1]):
            assert topo.has_edge(a, b)
    ring = ham_cycle_order(2, 1, (0, 0))
    assert len(ring) == 6  # the 6-cycle special case


def test_ham_token_walk_counts():
    for n, k, msgs in [(2, 2, 41), (3, 1, 11)]:
        res = simulate_ham_cycle(cfg(n, k, scheme="ham"))
        assert res.messages_sent == msgs == t(n, k) - 1
        assert res.rounds_to_full_coverage == msgs
        assert res.coverage_fraction == 1.0
    with pytest.raises(UnsupportedParametersError):
        simulate_ham_cycle(cfg(2, 1, scheme="ham"))


def test_hierarchical_counts():
    for n, k, msgs, rounds in [(2, 2, 47, 11), (3, 2, 167, 23), (3, 1, 14, 5)]:
        res = simulate_hierarchical(cfg(n, k, scheme="hier"))
        assert res.messages_sent == msgs
        assert res.rounds_to_full_coverage == rounds
        assert res.coverage_fraction == 1.0


def test_hierarchical_beats_token_walk_on_rounds():
    ham = simulate_ham_cycle(cfg(2, 2, scheme="ham"))
    hier = simulate_hierarchical(cfg(2, 2, scheme="hier"))
    assert hier.rounds_to_full_coverage < ham.rounds_to_full_coverage


def test_dispatcher_and_result_shape():
    res = simulate(cfg(3, 1, scheme="flood", trials=3, seed=11,
                       link_fault_probability=0.2))
    assert len(res.per_trial) == 3
    agg = res.aggregate
    assert 0.0 <= agg["success_rate"] <= 1.0
    lo, hi = agg["ci95"]
    assert lo <= agg["success_rate"] <= hi
    data = res.to_dict(cfg(3, 1, scheme="flood", trials=3, seed=11,
                           link_fault_probability=0.2))
    assert data["config"]["scheme"] == "flood"


def test_determinism():
    base = cfg(3, 1, scheme="flood", trials=5, seed=4, link_fault_probability=0.3)
    a = simulate(base)
    b = simulate(base)
    assert a.per_trial == b.per_trial
    other = cfg(3, 1, scheme="flood", trials=5, seed=5, link_fault_probability=0.3)
    assert simulate(other).per_trial != a.per_trial


def test_faulty_flood_can_fail():
    res = simulate_flood(cfg(2, 1, trials=50, seed=2, link_fault_probability=0.5))
    fractions = [rec["coverage"] for rec in res.per_trial]
    assert min(fractions) < 1.0
    assert all(0.0 < f <= 1.0 for f in fractions)


def test_fixed_cycle_baseline_matches_analysis():
    p, trials = 0.1, 4000
    out = fault_success_experiment(
        cfg(2, 1, scheme="ham", link_fault_probability=p, trials=trials, seed=13))
    analytic = (1 - p) ** t(2, 1)
    assert out["analytic_fixed_cycle"] == pytest.approx(analytic)
    sigma = math.sqrt(analytic * (1 - analytic) / trials)
    assert abs(out["success_rate"] - analytic) < 3 * sigma
    assert out["trials"] == trials and out["p"] == p


def test_strategy_hook_is_consulted():
    seen = []

    def strategy(current, faulty_incident, visited):
        seen.append(current)
        return fixed_cycle_strategy(current, faulty_incident, visited)

    fault_success_experiment(
        cfg(2, 1, scheme="ham", link_fault_probability=0.6, trials=20, seed=3),
        strategy=strategy)
    assert seen  # invoked whenever the fixed walk hits a dead link


def test_bad_strategy_is_rejected():
    def teleport(current, faulty_incident, visited):
        return (1, 1) if current != (1, 1) else (0, 0)

    with pytest.raises(ParameterError):
        fault_success_experiment(
            cfg(2, 1, scheme="ham", link_fault_probability=0.9, trials=50,
                seed=1),
            strategy=teleport)


def test_level_neighbor_start_variants():
    # closing edge of the constructed cycle is the level-k link at the start
    n, k = 3, 1
    start = (2, 1)
    order = ham_cycle_order(n, k, start)
    assert order[0] == start
    assert order[-1] == level_neighbor(start, k, n)
