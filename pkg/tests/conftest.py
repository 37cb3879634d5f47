import random
from fractions import Fraction

import networkx as nx
import pytest

from channelgame.model import PaymentScenario, PerNode, StrategyProfile, Uniform


def random_profile(rng: random.Random, n: int, density: float = 0.4) -> StrategyProfile:
    peers = [[] for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                opener, other = (u, v) if rng.random() < 0.5 else (v, u)
                peers[opener].append(other)
    return StrategyProfile(n, tuple(tuple(p) for p in peers))


def random_scenario(rng: random.Random, n: int) -> PaymentScenario:
    return PaymentScenario({(s, t): rng.randint(0, 3)
                            for s in range(n) for t in range(n) if s != t})


def random_policy(rng: random.Random, n: int):
    if rng.random() < 0.5:
        return Uniform(Fraction(rng.randint(0, 6), rng.randint(1, 5)))
    return PerNode(tuple(Fraction(rng.randint(0, 4), rng.randint(1, 4)) for _ in range(n)))


def oracle_routes(profile: StrategyProfile, policy, s: int, t: int, fb: Fraction):
    """Cheapest routes by full simple-path enumeration, ties to fewest hops."""
    g = nx.Graph()
    g.add_nodes_from(range(profile.n_nodes))
    g.add_edges_from((u, v) for u, v in profile.channels() if u != v)
    paths = list(nx.all_simple_paths(g, s, t))
    if not paths:
        return None, []
    keyed = [(sum((policy.fee_of(v) for v in p[1:-1]), Fraction(0)), len(p), p) for p in paths]
    best = min((c, h) for c, h, _ in keyed)
    chosen = [p for c, h, p in keyed if (c, h) == best]
    if best[0] >= fb:
        return best[0], []
    return best[0], chosen


def oracle_costs(profile, policy, scenario, fb):
    """Per-node (channel, on-chain, fees paid, revenue) from enumerated routes."""
    n = profile.n_nodes
    chan = [profile.mu_of(u) * fb for u in range(n)]
    onchain = [Fraction(0)] * n
    paid = [Fraction(0)] * n
    revenue = [Fraction(0)] * n
    for (s, t), count in scenario.demands.items():
        cost, routes = oracle_routes(profile, policy, s, t, fb)
        if not routes:
            onchain[s] += count * fb
            continue
        paid[s] += count * cost
        for p in routes:
            for v in p[1:-1]:
                revenue[v] += Fraction(count, len(routes)) * policy.fee_of(v)
    return chan, onchain, paid, revenue


@pytest.fixture
def rng():
    return random.Random(20240611)


def simulated_cost(family, n, k, fb, f0, node, alternative=None):
    """Cost of ``node`` in the generated profile, optionally after a deviation."""
    from channelgame.cost import node_cost
    from channelgame.model import GameParams, homogeneous_scenario
    from channelgame.topology import generate

    prof = generate(family, n)
    if alternative is not None:
        prof = prof.with_strategy(node, alternative)
    return node_cost(prof, Uniform(f0), homogeneous_scenario(GameParams(n, fb, k)), node, fb).total


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
