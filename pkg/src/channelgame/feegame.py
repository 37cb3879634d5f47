"""The free-fee game on a fixed channel graph.

Nodes pick a fee, channels are frozen.  Equilibria are characterised by
zero-fee redundancy: every pair without a direct channel needs two
internally node-disjoint routes whose intermediaries all charge nothing.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .analytic import BoundCondition, bipartite_bounds, star_bounds
from .closedform import bip_center_cost, bip_dev_a
from .cost import all_node_costs
from .equilibrium import (NOT_NE, EquilibriumVerdict, check_nash_exhaustive, exhaustive_limit,
                          restricted_verdict)
from .model import (GameParams, Pair, PaymentScenario, PerNode, StrategyProfile, Uniform,
                    format_rational, homogeneous_scenario)
from .topology import STAR, bipartite, generate


def _as_fees(fees, n: int) -> tuple[Fraction, ...]:
    if isinstance(fees, PerNode):
        fees = fees.fees
    fees = tuple(Fraction(f) for f in fees)
    if len(fees) != n:
        raise ValueError(f"expected {n} fees, got {len(fees)}")
    if any(f < 0 for f in fees):
        raise ValueError("fees must be nonnegative")
    return fees


def disjoint_paths(adj: Sequence[frozenset[int]], s: int, t: int, usable, limit: int = 2) -> list[list[int]]:
    """Up to ``limit`` internally node-disjoint s-t paths through usable nodes.

    Unit-capacity max flow on the node-split graph (v_in = 2v, v_out = 2v+1),
    augmenting along BFS paths.  The direct edge s-t, if any, is ignored.
    """
    cap: dict[tuple[int, int], int] = {}
    out: dict[int, list[int]] = {}

    def arc(a, b, c):
        if (a, b) not in cap:
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
            cap.setdefault((b, a), 0)
        cap[(a, b)] = cap.get((a, b), 0) + c

    inner = [v for v in range(len(adj)) if v not in (s, t) and usable(v)]
    for v in inner:
        arc(2 * v, 2 * v + 1, 1)
    allowed = set(inner) | {s, t}
    for v in allowed:
        for w in adj[v]:
            if w in allowed and {v, w} != {s, t} and w != s and v != t:
                arc(2 * v + 1, 2 * w, 1)
    source, sink = 2 * s + 1, 2 * t

    flow = 0
    while flow < limit:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in out.get(a, ()):
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            break
        b = sink
        while parent[b] is not None:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1

    # decompose: an arc carries flow when its reverse residual is positive
    paths = []
    used: set[tuple[int, int]] = set()
    for _ in range(flow):
        path, a = [s], source
        while a != sink:
            for b in out[a]:
                if (a, b) not in used and cap.get((b, a), 0) > 0 and _forward(a, b):
                    used.add((a, b))
                    a = b
                    break
            if a % 2 == 0 and a != sink:       # entered v_in, hop to v_out
                path.append(a // 2)
                used.add((a, a + 1))
                a = a + 1
        path.append(t)
        paths.append(path)
    return paths


def _forward(a: int, b: int) -> bool:
    # original arcs go v_out -> w_in or v_in -> v_out
    return (a % 2 == 1 and b % 2 == 0) or (b == a + 1 and a % 2 == 0)


@dataclass
class Lemma3Result:
    holds: bool
    paths: dict[Pair, list[list[int]]] = field(default_factory=dict)
    violation: Pair | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds,
                "violation": None if self.violation is None else list(self.violation),
                "reason": self.reason,
                "paths": {f"{s}-{t}": p for (s, t), p in sorted(self.paths.items())}}


def lemma3_predicate(profile: StrategyProfile, fees, scenario: PaymentScenario, k: int) -> Lemma3Result:
    """True iff every demanded indirect pair has two disjoint zero-fee routes."""
    if k <= 2:
        raise ValueError("the zero-fee redundancy characterisation needs k > 2")
    n = profile.n_nodes
    fees = _as_fees(fees, n)
    adj = profile.adjacency()
    result = Lemma3Result(True)
    for (s, t) in sorted(scenario.demands):
        if t in adj[s]:
            continue
        paths = disjoint_paths(adj, s, t, lambda v: fees[v] == 0)
        if len(paths) < 2:
            return Lemma3Result(False, result.paths, (s, t),
                                f"only {len(paths)} node-disjoint zero-fee route(s) from {s} to {t}")
        result.paths[(s, t)] = paths
    return result


def verify_certificate(profile: StrategyProfile, fees, result: Lemma3Result) -> bool:
    """Independent check of the disjoint-path certificate."""
    fees = _as_fees(fees, profile.n_nodes)
    adj = profile.adjacency()
    for (s, t), paths in result.paths.items():
        if len(paths) < 2:
            return False
        seen: set[int] = set()
        for p in paths:
            if p[0] != s or p[-1] != t or len(set(p)) != len(p):
                return False
            if any(b not in adj[a] for a, b in zip(p, p[1:])):
                return False
            mids = set(p[1:-1])
            if seen & mids or any(fees[v] != 0 for v in mids):
                return False
            seen |= mids
    return True


@dataclass
class FreeFeeVerdict:
    status: str
    reason: str
    pair: Pair | None = None
    zero_fee_routes: int | None = None
    active_lower: BoundCondition | None = None
    deviation: dict | None = None

    def to_json(self) -> dict:
        out = {"status": self.status, "reason": self.reason,
               "pair": None if self.pair is None else list(self.pair),
               "zero_fee_routes": self.zero_fee_routes}
        if self.active_lower is not None:
            out["active_lower"] = {"label": self.active_lower.label,
                                   "value_exact": format_rational(self.active_lower.value)}
        if self.deviation is not None:
            out["deviation"] = self.deviation
        return out


def bipartite_free_fee_verdict(params: GameParams, c: int, fees=None) -> FreeFeeVerdict:
    """The complete bipartite graph is never stable once fees are free.

    Either some indirect pair lacks two zero-fee disjoint routes, or the
    routes that carry traffic are free, which sits below the positive
    fixed-fee lower bound: a center then profits from dropping a channel.
    Disjoint-route counts use the structure of K_{c,d}: an outer-outer
    route must start at a center and a center-center route at an outer.
    """
    params.require_analytic()
    n = params.n_nodes
    bipartite(c).check(n)
    if params.k <= 2:
        raise ValueError("the free-fee analysis needs k > 2")
    fees = (Fraction(0),) * n if fees is None else _as_fees(fees, n)
    zero_centers = sum(1 for v in range(c) if fees[v] == 0)
    zero_outers = sum(1 for v in range(c, n) if fees[v] == 0)
    if zero_centers < 2:
        return FreeFeeVerdict(NOT_NE, "undercut: fewer than two zero-fee disjoint routes",
                              (c, c + 1), zero_centers)
    if zero_outers < 2:
        return FreeFeeVerdict(NOT_NE, "undercut: fewer than two zero-fee disjoint routes",
                              (0, 1), zero_outers)
    lower = bipartite_bounds(n, c).active_lower
    fb, k, zero = params.blockchain_fee, params.k, Fraction(0)
    d = n - c
    old = bip_center_cost(n, c, k, fb, zero)
    new = bip_dev_a(n, c, k, fb, zero, d - 1)
    return FreeFeeVerdict(
        NOT_NE, "free routes sit below the fixed-fee lower bound",
        None, min(zero_centers, zero_outers), lower,
        {"node": 0, "drops_channel_to": n - 1, "kind": "Bip-A",
         "old_cost": format_rational(old), "new_cost": format_rational(new)},
    )


@dataclass
class StarFeeResult:
    fee: Fraction
    at_fee: EquilibriumVerdict
    above_bound: EquilibriumVerdict
    center_revenue: Fraction
    mode: str

    @property
    def confirmed(self) -> bool:
        return self.at_fee.is_ne and not self.above_bound.is_ne

    def to_json(self) -> dict:
        return {"fee": format_rational(self.fee), "mode": self.mode,
                "at_fee": self.at_fee.to_json(), "above_bound": self.above_bound.to_json(),
                "center_revenue": format_rational(self.center_revenue), "confirmed": self.confirmed}


def star_fee_equilibrium(params: GameParams, epsilon) -> StarFeeResult:
    """Star with the common fee set just under its fixed-fee upper bound."""
    params.require_analytic()
    n, k, fb = params.n_nodes, params.k, params.blockchain_fee
    bound = star_bounds(n).upper * params.unit
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < bound:
        raise ValueError(f"epsilon must lie in (0, {format_rational(bound)})")
    fee, above = bound - epsilon, bound + epsilon
    star = generate(STAR, n)
    if n <= exhaustive_limit():
        scenario = homogeneous_scenario(params)
        at = check_nash_exhaustive(star, Uniform(fee), scenario, fb)
        over = check_nash_exhaustive(star, Uniform(above), scenario, fb)
        revenue = all_node_costs(star, Uniform(fee), scenario, fb)[0].revenue
        mode = "exhaustive"
    else:
        at = restricted_verdict(STAR, n, k, fb, fee)
        over = restricted_verdict(STAR, n, k, fb, above)
        revenue = (n - 1) * (n - 2) * k * fee
        mode = "restricted"
    return StarFeeResult(fee, at, over, revenue, mode)
