"""Cheapest-route statistics over the undirected channel graph.

Route cost is the sum of the fees charged by strictly intermediate nodes.
Among equally cheap routes the ones with fewest hops are kept, which makes
the tight-edge graph a DAG even when some fees are zero.  For uniform fees
this is plain hop-count shortest paths.  A pair whose cheapest route costs
at least the blockchain fee (or has no route) settles on-chain.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .model import FeePolicy, Pair, PaymentScenario, StrategyProfile, Uniform

Adjacency = Sequence[frozenset[int]]


@dataclass
class ShortestPathDag:
    """Single-source cheapest-route DAG (Brandes-style bookkeeping)."""

    source: int
    order: list[int]                     # nondecreasing (cost, hops)
    cost: dict[int, Fraction]            # fee sum of intermediates to reach v
    hops: dict[int, int]
    sigma: dict[int, int]                # number of cheapest routes source -> v
    preds: dict[int, list[int]]


def _bfs_dag(adj: Adjacency, source: int, f0: Fraction) -> ShortestPathDag:
    hops = {source: 0}
    sigma = {source: 1}
    preds: dict[int, list[int]] = {source: []}
    order = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        hv = hops[v] + 1
        for w in adj[v]:
            if w not in hops:
                hops[w] = hv
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if hops[w] == hv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    cost = {v: (h - 1) * f0 if h > 1 else Fraction(0) for v, h in hops.items()}
    return ShortestPathDag(source, order, cost, hops, sigma, preds)


def _dijkstra_dag(adj: Adjacency, source: int, fees: Sequence[Fraction]) -> ShortestPathDag:
    zero = Fraction(0)
    best: dict[int, tuple[Fraction, int]] = {source: (zero, 0)}
    sigma = {source: 1}
    preds: dict[int, list[int]] = {source: []}
    done: set[int] = set()
    order = []
    heap = [(zero, 0, source)]
    while heap:
        c, h, v = heapq.heappop(heap)
        if v in done or best[v] != (c, h):
            continue
        done.add(v)
        order.append(v)
        step = zero if v == source else fees[v]
        key = (c + step, h + 1)
        for w in adj[v]:
            if w in done:
                continue
            old = best.get(w)
            if old is None or key < old:
                best[w] = key
                sigma[w] = sigma[v]
                preds[w] = [v]
                heapq.heappush(heap, (key[0], key[1], w))
            elif key == old:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return ShortestPathDag(
        source, order,
        {v: best[v][0] for v in order}, {v: best[v][1] for v in order},
        sigma, preds,
    )


def cheapest_route_dag(adj: Adjacency, source: int, policy: FeePolicy) -> ShortestPathDag:
    if isinstance(policy, Uniform):
        return _bfs_dag(adj, source, policy.f0)
    return _dijkstra_dag(adj, source, policy.fees)


ON_CHAIN = "ON_CHAIN"


@dataclass
class RouteStats:
    pair: Pair
    min_cost: Fraction | str             # ON_CHAIN marker when settled on-chain
    route_count: int = 0
    intermediary_count_of: dict[int, int] = field(default_factory=dict)

    @property
    def on_chain(self) -> bool:
        return self.min_cost == ON_CHAIN

    def share_of(self, node: int) -> Fraction:
        if self.on_chain:
            return Fraction(0)
        return Fraction(self.intermediary_count_of.get(node, 0), self.route_count)


def _stats_from_dag(dag: ShortestPathDag, target: int, blockchain_fee: Fraction) -> RouteStats:
    pair = (dag.source, target)
    if target not in dag.sigma or dag.cost[target] >= blockchain_fee:
        return RouteStats(pair, ON_CHAIN)
    # paths from every node to target inside the DAG
    succ: dict[int, list[int]] = {}
    for w, ps in dag.preds.items():
        for v in ps:
            succ.setdefault(v, []).append(w)
    to_target = {target: 1}
    for v in reversed(dag.order):
        if v != target:
            to_target[v] = sum(to_target.get(w, 0) for w in succ.get(v, ()))
    inter = {}
    for v in dag.order:
        if v in (dag.source, target):
            continue
        through = dag.sigma[v] * to_target.get(v, 0)
        if through:
            inter[v] = through
    return RouteStats(pair, dag.cost[target], dag.sigma[target], inter)


def route_stats(profile: StrategyProfile, policy: FeePolicy, pair: Pair,
                blockchain_fee: Fraction) -> RouteStats:
    s, t = pair
    if s == t:
        raise ValueError(f"sender and receiver coincide ({s})")
    for v in pair:
        if not 0 <= v < profile.n_nodes:
            raise ValueError(f"node {v} out of range")
    dag = cheapest_route_dag(profile.adjacency(), s, policy)
    return _stats_from_dag(dag, t, Fraction(blockchain_fee))


route_cost_per_edge_model = route_stats


def all_route_stats(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                    blockchain_fee: Fraction) -> dict[Pair, RouteStats]:
    adj = profile.adjacency()
    fb = Fraction(blockchain_fee)
    out = {}
    for s in scenario.senders():
        dag = cheapest_route_dag(adj, s, policy)
        for t in sorted(scenario.sent_by(s)):
            out[(s, t)] = _stats_from_dag(dag, t, fb)
    return out


@dataclass
class TrafficSummary:
    """Per-node aggregates needed by the cost function."""

    onchain_payments: list[int]
    sending_fees: list[Fraction]
    transit: list[Fraction]              # expected routed payments forwarded by each node


def traffic_summary(adj: Adjacency, policy: FeePolicy, scenario: PaymentScenario,
                    blockchain_fee: Fraction) -> TrafficSummary:
    """One cheapest-route pass per sender with dependency accumulation.

    transit[u] = sum over routed (s, t) of demand * sigma_st(u) / sigma_st,
    i.e. the expected number of payments u forwards when each cheapest route
    is picked uniformly at random.
    """
    n = len(adj)
    fb = Fraction(blockchain_fee)
    onchain = [0] * n
    fees = [Fraction(0)] * n
    transit = [Fraction(0)] * n
    for s in scenario.senders():
        row = scenario.sent_by(s)
        dag = cheapest_route_dag(adj, s, policy)
        weight: dict[int, int] = {}
        for t, count in row.items():
            if t in dag.sigma and dag.cost[t] < fb:
                weight[t] = count
                fees[s] += count * dag.cost[t]
            else:
                onchain[s] += count
        if not weight:
            continue
        delta: dict[int, Fraction] = {}
        for w in reversed(dag.order):
            carried = weight.get(w, 0) + delta.get(w, 0)
            if not carried:
                continue
            share = Fraction(carried, dag.sigma[w]) if isinstance(carried, int) else carried / dag.sigma[w]
            for v in dag.preds[w]:
                delta[v] = delta.get(v, 0) + dag.sigma[v] * share
        for v, amount in delta.items():
            if v != s:
                transit[v] += amount
    return TrafficSummary(onchain, fees, transit)
