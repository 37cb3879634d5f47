"""Nash-equilibrium verification by unilateral deviation.

Exhaustive mode tries every peer subset for every node and is exact but
exponential.  Restricted mode walks only the structured deviation families
of a named topology (see :mod:`channelgame.closedform`) and scales to
thousands of nodes.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

from .closedform import catalogue
from .cost import all_node_costs
from .model import (FeePolicy, GameParams, PaymentScenario, StrategyProfile, Uniform,
                    format_rational, homogeneous_scenario)
from .routing import traffic_summary
from .topology import Family, generate

STRICT_NE = "STRICT_NE"
WEAK_NE = "WEAK_NE"
NOT_NE = "NOT_NE"

DEFAULT_EXHAUSTIVE_LIMIT = 10


class ExhaustiveLimitError(RuntimeError):
    """Raised when brute force is requested above the configured node limit."""


def exhaustive_limit() -> int:
    raw = os.environ.get("CHANNELGAME_EXHAUSTIVE_LIMIT")
    return int(raw) if raw else DEFAULT_EXHAUSTIVE_LIMIT


def _check_limit(n: int) -> None:
    limit = exhaustive_limit()
    if n > limit:
        raise ExhaustiveLimitError(
            f"exhaustive search over 2^(N-1) strategies per node is capped at N <= {limit} "
            f"(got N = {n}); use check_nash_restricted for a named family or raise "
            "CHANNELGAME_EXHAUSTIVE_LIMIT")


@dataclass(frozen=True)
class DeviationWitness:
    node: int
    alternative: tuple[int, ...]
    old_cost: Fraction
    new_cost: Fraction
    kind: str | None = None

    def to_json(self) -> dict:
        out = {"node": self.node, "alternative": list(self.alternative),
               "old_cost": format_rational(self.old_cost), "new_cost": format_rational(self.new_cost)}
        if self.kind:
            out["deviation"] = self.kind
        return out


@dataclass(frozen=True)
class EquilibriumVerdict:
    status: str
    witness: DeviationWitness | None = None
    ties: int = 0

    @property
    def is_ne(self) -> bool:
        return self.status != NOT_NE

    def to_json(self) -> dict:
        return {"status": self.status,
                "witness": None if self.witness is None else self.witness.to_json(),
                "ties": self.ties}


def candidate_strategies(profile: StrategyProfile, node: int,
                         allow_duplicates: bool = False) -> Iterator[tuple[int, ...]]:
    """Peer subsets in lexicographic order.

    Peers that already opened a channel to ``node`` are skipped unless
    duplicates are allowed: a second channel only adds cost.
    """
    n = profile.n_nodes
    peers = [v for v in range(n) if v != node
             and (allow_duplicates or node not in profile.channels_of[v])]
    subsets = [s for r in range(len(peers) + 1) for s in combinations(peers, r)]
    yield from sorted(subsets)


def _node_total(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                fb: Fraction, node: int) -> Fraction:
    summary = traffic_summary(profile.adjacency(), policy, scenario, fb)
    return (profile.mu_of(node) * fb + summary.onchain_payments[node] * fb
            + summary.sending_fees[node] - policy.fee_of(node) * summary.transit[node])


def check_nash_exhaustive(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                          blockchain_fee, allow_duplicates: bool = False) -> EquilibriumVerdict:
    _check_limit(profile.n_nodes)
    fb = Fraction(blockchain_fee)
    current = all_node_costs(profile, policy, scenario, fb)
    ties = 0
    for u in range(profile.n_nodes):
        old = current[u].total
        mine = profile.channels_of[u]
        improving = None
        for alt in candidate_strategies(profile, u, allow_duplicates):
            if alt == mine:
                continue
            new = _node_total(profile.with_strategy(u, alt), policy, scenario, fb, u)
            if new < old:
                improving = DeviationWitness(u, alt, old, new)
                break               # candidates come in lexicographic order
            if new == old:
                ties += 1
        if improving is not None:
            return EquilibriumVerdict(NOT_NE, improving)
    return EquilibriumVerdict(WEAK_NE if ties else STRICT_NE, None, ties)


def _homogeneous_k(profile: StrategyProfile, scenario: PaymentScenario) -> int:
    k = scenario.homogeneous_k(profile.n_nodes)
    if k is None:
        raise ValueError("restricted checks need the homogeneous payment scenario")
    return k


def check_nash_restricted(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                          family: Family, blockchain_fee) -> EquilibriumVerdict:
    """Verdict against the named family's structured deviations only."""
    n = profile.n_nodes
    if not isinstance(policy, Uniform):
        raise ValueError("restricted checks need a uniform fee policy")
    if profile != generate(family, n):
        raise ValueError(f"profile is not the {family} profile on {n} nodes")
    k = _homogeneous_k(profile, scenario)
    return restricted_verdict(family, n, k, blockchain_fee, policy.f0)


def restricted_verdict(family: Family, n: int, k: int, blockchain_fee, f0) -> EquilibriumVerdict:
    fb, f0 = Fraction(blockchain_fee), Fraction(f0)
    cat = catalogue(family, n)
    base = {node: rc.evaluate(fb, k, f0) for node, rc in cat.base.items()}
    best = None
    ties = 0
    for dv in cat.deviations:
        new = dv.cost.evaluate(fb, k, f0)
        old = base[dv.node]
        if new < old:
            key = (dv.node, dv.alternative)
            if best is None or key < (best.node, best.alternative):
                best = DeviationWitness(dv.node, dv.alternative, old, new, dv.kind)
        elif new == old:
            ties += 1
    if best is not None:
        return EquilibriumVerdict(NOT_NE, best)
    return EquilibriumVerdict(WEAK_NE if ties else STRICT_NE, None, ties)


def best_response(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                  node: int, blockchain_fee, family: Family | None = None,
                  allow_duplicates: bool = False) -> tuple[tuple[int, ...], Fraction]:
    """Cheapest strategy for ``node``; ties go to fewer channels, then lexicographic."""
    fb = Fraction(blockchain_fee)
    if family is not None:
        if not isinstance(policy, Uniform):
            raise ValueError("family-restricted best response needs a uniform fee policy")
        k = _homogeneous_k(profile, scenario)
        cat = catalogue(family, profile.n_nodes)
        if node not in cat.base:
            raise ValueError(f"node {node} has no structured deviations in {family}")
        options = [(cat.base[node].evaluate(fb, k, policy.f0), profile.channels_of[node])]
        options += [(dv.cost.evaluate(fb, k, policy.f0), dv.alternative)
                    for dv in cat.deviations if dv.node == node]
    else:
        _check_limit(profile.n_nodes)
        options = [(_node_total(profile.with_strategy(node, alt), policy, scenario, fb, node), alt)
                   for alt in candidate_strategies(profile, node, allow_duplicates)]
    cost, _, alt = min((c, len(a), a) for c, a in options)
    return alt, cost


@dataclass
class DynamicsTrace:
    profiles: list[StrategyProfile]
    rounds: int
    converged: bool
    moves: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)  # (round, node, new)

    @property
    def final(self) -> StrategyProfile:
        return self.profiles[-1]


def best_response_dynamics(initial: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                           blockchain_fee, max_rounds: int) -> DynamicsTrace:
    """Round-robin best response; a node moves only on strict improvement."""
    fb = Fraction(blockchain_fee)
    profile = initial
    trace = DynamicsTrace([initial], 0, False)
    for rnd in range(1, max_rounds + 1):
        changed = False
        for u in range(profile.n_nodes):
            alt, cost = best_response(profile, policy, scenario, u, fb)
            if alt != profile.channels_of[u] and cost < _node_total(profile, policy, scenario, fb, u):
                profile = profile.with_strategy(u, alt)
                trace.moves.append((rnd, u, alt))
                changed = True
        trace.rounds = rnd
        if not changed:
            trace.converged = True
            break
        trace.profiles.append(profile)
    return trace


# Lemma scan ------------------------------------------------------------------

@dataclass
class LemmaScanReport:
    n_nodes: int
    multiplicity: int
    profiles: int = 0
    strict: int = 0
    weak: int = 0
    not_ne: int = 0
    strict_with_duplicates: int = 0
    strict_with_onchain: int = 0
    weak_with_duplicates: int = 0
    weak_with_onchain: int = 0
    examples: dict[str, StrategyProfile] = field(default_factory=dict)

    @property
    def lemma1_holds(self) -> bool:
        return self.strict_with_duplicates == 0

    @property
    def lemma2_holds(self) -> bool:
        return self.strict_with_onchain == 0

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "n_nodes", "multiplicity", "profiles", "strict", "weak", "not_ne",
            "strict_with_duplicates", "strict_with_onchain", "weak_with_duplicates",
            "weak_with_onchain", "lemma1_holds", "lemma2_holds")}
        out["examples"] = {k: [list(c) for c in p.channels()] for k, p in self.examples.items()}
        return out


SCAN_LIMITS = {2: 4, 1: 5}     # multiplicity -> largest N scanned


def lemma_properties_scan(params: GameParams, policy: FeePolicy, multiplicity: int = 2,
                          scenario: PaymentScenario | None = None) -> LemmaScanReport:
    """Classify every strategy profile (peer multiplicities 0..multiplicity).

    A node's cost splits into F_B per opened channel plus a term that only
    depends on the simple graph, so the graph term is tabulated once per
    graph and best responses are computed per (node, others' strategies).
    """
    n = params.n_nodes
    if multiplicity not in SCAN_LIMITS or n > SCAN_LIMITS[multiplicity]:
        raise ExhaustiveLimitError(
            f"lemma scan supports N <= {SCAN_LIMITS.get(multiplicity, 0)} at multiplicity "
            f"{multiplicity}; got N = {n}")
    fb = params.blockchain_fee
    scenario = scenario or homogeneous_scenario(params)
    pairs = list(combinations(range(n), 2))
    bit = {p: 1 << i for i, p in enumerate(pairs)}
    bit.update({(b, a): m for (a, b), m in list(bit.items())})

    graph_term = []
    graph_onchain = []
    for mask in range(1 << len(pairs)):
        adj = [set() for _ in range(n)]
        for (a, b) in pairs:
            if mask & bit[(a, b)]:
                adj[a].add(b)
                adj[b].add(a)
        s = traffic_summary([frozenset(x) for x in adj], policy, scenario, fb)
        graph_term.append([s.onchain_payments[u] * fb + s.sending_fees[u]
                           - policy.fee_of(u) * s.transit[u] for u in range(n)])
        graph_onchain.append(any(s.onchain_payments))

    # per node: strategies as multiplicity vectors over the other nodes
    others = [[v for v in range(n) if v != u] for u in range(n)]
    strategies = list(product(range(multiplicity + 1), repeat=n - 1))
    n_strat = len(strategies)
    smask = [[sum(bit[(u, v)] for v, m in zip(others[u], st) if m) for st in strategies]
             for u in range(n)]
    schan = [sum(st) for st in strategies]

    # status[u][profile_index]: 0 not best, 1 tied best, 2 unique best
    total = n_strat ** n
    status = [bytearray(total) for _ in range(n)]
    stride = [n_strat ** u for u in range(n)]
    for u in range(n):
        rest = [v for v in range(n) if v != u]
        for combo in product(range(n_strat), repeat=n - 1):
            omask = 0
            base_index = 0
            for v, s in zip(rest, combo):
                omask |= smask[v][s]
                base_index += s * stride[v]
            costs = [schan[s] * fb + graph_term[omask | smask[u][s]][u] for s in range(n_strat)]
            low = min(costs)
            unique = costs.count(low) == 1
            arr = status[u]
            for s, c in enumerate(costs):
                if c == low:
                    arr[base_index + s * stride[u]] = 2 if unique else 1

    report = LemmaScanReport(n, multiplicity)
    for idx in range(total):
        worst = min(status[u][idx] for u in range(n))
        report.profiles += 1
        if worst == 0:
            report.not_ne += 1
            continue
        choice = [(idx // stride[u]) % n_strat for u in range(n)]
        mult: dict[tuple[int, int], int] = {}
        mask = 0
        for u, s in enumerate(choice):
            mask |= smask[u][s]
            for v, m in zip(others[u], strategies[s]):
                if m:
                    key = (min(u, v), max(u, v))
                    mult[key] = mult.get(key, 0) + m
        dup = any(m > 1 for m in mult.values())
        onchain = graph_onchain[mask]
        tag = "strict" if worst == 2 else "weak"
        if worst == 2:
            report.strict += 1
            report.strict_with_duplicates += dup
            report.strict_with_onchain += onchain
        else:
            report.weak += 1
            report.weak_with_duplicates += dup
            report.weak_with_onchain += onchain
        for flag, name in ((True, tag), (dup, f"{tag}_duplicate"), (onchain, f"{tag}_onchain")):
            if flag and name not in report.examples:
                report.examples[name] = StrategyProfile(n, tuple(
                    tuple(v for v, m in zip(others[u], strategies[s]) for _ in range(m))
                    for u, s in enumerate(choice)))
    return report
