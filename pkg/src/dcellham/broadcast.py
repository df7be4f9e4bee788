"""Round-synchronous broadcast simulation over a DCell.

Three schemes are compared: flood (forward on first receipt to every
neighbor except the sender), a single Hamiltonian-cycle token walk, and a
hierarchical scheme where a cycle in the source's level-(k-1) copy branches
along level-k edges so every copy broadcasts in parallel.  Link faults are
drawn independently per trial with a fixed rate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .construct import dcell_hp
from .errors import ParameterError, UnsupportedParametersError
from .topology import (
    Label, Params, build_graph, digit, label_from_uid, level_neighbor, t,
)

FLOOD = "flood"
HAM_CYCLE = "ham"
HIERARCHICAL = "hier"
SCHEMES = (FLOOD, HAM_CYCLE, HIERARCHICAL)


@dataclass(frozen=True)
class SimConfig:
    n: int
    k: int
    source: Label | None = None
    scheme: str = FLOOD
    link_fault_probability: float = 0.0
    trials: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}, want {SCHEMES}")
        if not 0.0 <= self.link_fault_probability <= 1.0:
            raise ParameterError("link fault probability must be in [0, 1]")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")

    @property
    def params(self) -> Params:
        return Params(n=self.n, k=self.k)

    def source_label(self) -> Label:
        if self.source is not None:
            return self.source
        return label_from_uid((), 0, self.k, self.n)


@dataclass
class SimResult:
    scheme: str
    per_trial: list = field(default_factory=list)

    # single-trial conveniences (the first record)
    @property
    def messages_sent(self) -> int:
        return self.per_trial[0]["messages"]

    @property
    def rounds_to_full_coverage(self):
        return self.per_trial[0]["rounds"]

    @property
    def coverage_fraction(self) -> float:
        return self.per_trial[0]["coverage"]

    @property
    def aggregate(self) -> dict:
        msgs = [r["messages"] for r in self.per_trial]
        full = [r for r in self.per_trial if r["coverage"] == 1.0]
        rate = len(full) / len(self.per_trial)
        return {
            "mean_messages": sum(msgs) / len(msgs),
            "mean_rounds": (
                sum(r["rounds"] for r in full) / len(full) if full else None
            ),
            "success_rate": rate,
            "ci95": ci95(rate, len(self.per_trial)),
        }

    def to_dict(self, config: SimConfig | None = None) -> dict:
        out = {"scheme": self.scheme, "per_trial": self.per_trial,
               "aggregate": self.aggregate}
        if config is not None:
            out["config"] = {
                "n": config.n, "k": config.k,
                "source": list(config.source_label()),
                "scheme": config.scheme,
                "p": config.link_fault_probability,
                "trials": config.trials, "seed": config.seed,
            }
        return out


def ci95(rate: float, trials: int) -> tuple:
    """Normal-approximation 95% interval for a success fraction."""
    half = 1.96 * math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)
    return (max(rate - half, 0.0), min(rate + half, 1.0))


def _edge_key(a: Label, b: Label):
    return (a, b) if a <= b else (b, a)


def _draw_faults(edges, p: float, rng: random.Random) -> set:
    if p <= 0.0:
        return set()
    return {e for e in edges if rng.random() < p}


# -- cycle construction ----------------------------------------------------


def _ring_walk(topo, start: Label) -> list:
    """Vertex order of a cycle graph, starting at `start` (used for the
    n=2 level-1 DCell, which is a 6-cycle and outside dcell_hp's domain)."""
    prev, cur = None, start
    out = [start]
    while True:
        nxt = min(y for y in topo.neighbors(cur) if y != prev)
        if nxt == start:
            return out
        out.append(nxt)
        prev, cur = cur, nxt


def ham_cycle_order(n: int, k: int, start: Label, topo=None) -> list:
    """Vertex order of a Hamiltonian cycle from `start`; the closing edge
    (last, start) is implicit.  The path endpoint is a neighbor of start."""
    if (k, n) == (1, 2):
        if topo is None:
            topo = build_graph(Params(n=n, k=k))
        return _ring_walk(topo, start)
    if k >= 1:
        w = level_neighbor(start, k, n)
    else:
        a0 = digit(start, 0)
        w = start[:-1] + ((a0 + 1) % n,)
    return dcell_hp(start, w, k, n)


def _copy_cycle_order(n: int, kk: int, entry: Label) -> tuple:
    """(vertex order, closes) for a cycle of entry's level-kk sub-DCell.

    `closes` is False only for the K_2 copies of n=2 at kk=0, which have no
    cycle at all; the walk is then the single edge.
    """
    if kk == 0 and n == 2:
        a0 = digit(entry, 0)
        return [entry, entry[:-1] + (1 - a0,)], False
    if (kk, n) == (1, 2):
        # per-copy 6-ring: follow level-0/level-1 edges alternately
        seq = [entry]
        prev, cur = None, entry
        while True:
            cands = {level_neighbor(cur, 1, n), cur[:-1] + (1 - digit(cur, 0),)}
            nxt = min(y for y in cands if y != prev)
            if nxt == entry:
                return seq, True
            seq.append(nxt)
            prev, cur = cur, nxt
    if kk >= 1:
        w = level_neighbor(entry, 1, n)
    else:
        a0 = digit(entry, 0)
        w = entry[:-1] + ((a0 + 1) % n,)
    return dcell_hp(entry, w, kk, n), True


# -- schemes ---------------------------------------------------------------


def _flood_trial(topo, source: Label, faulty: set) -> dict:
    informed = {source: 0}
    frontier = [(source, None)]
    rnd = 0
    messages = 0
    while frontier:
        rnd += 1
        nxt = []
        for x, sender in frontier:
            for y in sorted(topo.neighbors(x)):
                if y == sender or _edge_key(x, y) in faulty:
                    continue
                messages += 1
                if y not in informed:
                    informed[y] = rnd
                    nxt.append((y, x))
        frontier = nxt
    covered = len(informed)
    full = covered == topo.num_vertices
    return {
        "messages": messages,
        "rounds": max(informed.values()) if full else None,
        "coverage": covered / topo.num_vertices,
    }


def _token_walk(order: list, faulty: set, closes: bool = False):
    """(vertices reached, hops made) walking `order`, stopping at the first
    faulty link.  With `closes`, a final hop retraces the closing edge."""
    reached = [order[0]]
    hops = 0
    for a, b in zip(order, order[1:]):
        if _edge_key(a, b) in faulty:
            return reached, hops
        reached.append(b)
        hops += 1
    if closes and len(order) > 2 and _edge_key(order[-1], order[0]) not in faulty:
        hops += 1
    return reached, hops


def _ham_trial(topo, order: list, faulty: set) -> dict:
    reached, hops = _token_walk(order, faulty)
    full = len(reached) == topo.num_vertices
    return {
        "messages": hops,
        "rounds": hops if full else None,
        "coverage": len(reached) / topo.num_vertices,
    }


def _hier_trial(topo, n: int, k: int, source: Label, faulty: set) -> dict:
    """Token path in the source's copy; every vertex of that copy branches
    on its level-k edge the round after it is reached, and each receiving
    copy runs its own closed Hamiltonian cycle concurrently."""
    hub_order, _ = _copy_cycle_order(n, k - 1, source)
    hub_reached, hub_hops = _token_walk(hub_order, faulty)
    messages = hub_hops
    informed_at = {x: i for i, x in enumerate(hub_reached)}
    last_round = hub_hops
    for i, x in enumerate(hub_reached):
        y = level_neighbor(x, k, n)
        if _edge_key(x, y) in faulty:
            continue
        messages += 1
        entry_round = i + 1
        informed_at[y] = min(informed_at.get(y, entry_round), entry_round)
        order, closes = _copy_cycle_order(n, k - 1, y)
        reached, hops = _token_walk(order, faulty, closes=closes)
        messages += hops
        for j, z in enumerate(reached):
            r = entry_round + j
            informed_at[z] = min(informed_at.get(z, r), r)
        last_round = max(last_round, entry_round + hops)
    covered = len(informed_at)
    full = covered == topo.num_vertices
    return {
        "messages": messages,
        "rounds": max(informed_at.values()) if full else None,
        "coverage": covered / topo.num_vertices,
    }


def _run(config: SimConfig, trial) -> SimResult:
    topo = build_graph(config.params)
    edges = [_edge_key(e.u, e.v) for e in topo.edges()]
    rng = random.Random(config.seed)
    result = SimResult(scheme=config.scheme)
    for _ in range(config.trials):
        faulty = _draw_faults(edges, config.link_fault_probability, rng)
        result.per_trial.append(trial(topo, faulty))
    return result


def simulate_flood(config: SimConfig) -> SimResult:
    src = config.source_label()
    return _run(config, lambda topo, faulty: _flood_trial(topo, src, faulty))


def simulate_ham_cycle(config: SimConfig) -> SimResult:
    n, k = config.n, config.k
    if (k, n) == (1, 2):
        raise UnsupportedParametersError(
            "the n=2 level-1 DCell is outside the path construction's domain"
        )
    src = config.source_label()
    order = ham_cycle_order(n, k, src)
    return _run(config, lambda topo, faulty: _ham_trial(topo, order, faulty))


def simulate_hierarchical(config: SimConfig) -> SimResult:
    n, k = config.n, config.k
    if k < 1:
        raise ParameterError("hierarchical broadcast needs k >= 1")
    src = config.source_label()
    return _run(config, lambda topo, faulty: _hier_trial(topo, n, k, src, faulty))


def simulate(config: SimConfig) -> SimResult:
    fn = {FLOOD: simulate_flood, HAM_CYCLE: simulate_ham_cycle,
          HIERARCHICAL: simulate_hierarchical}[config.scheme]
    return fn(config)


# -- fault-tolerance experiment --------------------------------------------


def fixed_cycle_strategy(current, faulty_incident, visited):
    """Baseline rerouting hook: never reroute; abort at any faulty link."""
    return None


def fault_success_experiment(config: SimConfig, strategy=fixed_cycle_strategy) -> dict:
    """Monte-Carlo full-broadcast success rate over a precomputed
    Hamiltonian cycle under iid link faults.

    The baseline strategy succeeds iff every edge of the cycle (closing
    edge included) survives, so its rate estimates (1-p)^t_k.  A custom
    strategy is called at each blocked hop with (current vertex, faulty
    incident links, visited set) and returns the next vertex or None.
    """
    n, k = config.n, config.k
    topo = build_graph(config.params)
    src = config.source_label()
    order = ham_cycle_order(n, k, src, topo=topo)
    cycle_edges = [_edge_key(a, b) for a, b in zip(order, order[1:] + order[:1])]
    edges = [_edge_key(e.u, e.v) for e in topo.edges()]
    p = config.link_fault_probability
    rng = random.Random(config.seed)
    successes = 0
    for _ in range(config.trials):
        faulty = _draw_faults(edges, p, rng)
        if strategy is fixed_cycle_strategy:
            ok = all(e not in faulty for e in cycle_edges)
        else:
            ok = _strategy_walk(topo, order, faulty, strategy)
        successes += ok
    rate = successes / config.trials
    return {
        "success_rate": rate,
        "trials": config.trials,
        "p": p,
        "ci95": ci95(rate, config.trials),
        "analytic_fixed_cycle": (1.0 - p) ** topo.num_vertices,
    }


def _strategy_walk(topo, order, faulty, strategy) -> bool:
    nxt_on_cycle = {a: b for a, b in zip(order, order[1:] + order[:1])}
    visited = {order[0]}
    cur = order[0]
    budget = 4 * topo.num_vertices  # a rogue strategy must not loop forever
    while len(visited) < topo.num_vertices and budget > 0:
        budget -= 1
        want = nxt_on_cycle[cur]
        if _edge_key(cur, want) in faulty:
            bad = {y for y in topo.neighbors(cur) if _edge_key(cur, y) in faulty}
            want = strategy(cur, bad, set(visited))
            if want is None:
                return False
            if want not in topo.neighbors(cur) or _edge_key(cur, want) in faulty:
                raise ParameterError(
                    f"strategy proposed unusable hop {cur} -> {want}"
                )
        cur = want
        visited.add(cur)
    return len(visited) == topo.num_vertices
