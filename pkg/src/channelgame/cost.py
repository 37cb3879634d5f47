"""Per-node cost function, social cost and social optimum."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .model import (FeePolicy, PaymentScenario, StrategyProfile, format_decimal,
                    format_rational)
from .routing import traffic_summary


@dataclass(frozen=True)
class CostBreakdown:
    node: int
    channel_cost: Fraction
    onchain_cost: Fraction
    sending_fees: Fraction
    revenue: Fraction

    @property
    def total(self) -> Fraction:
        return self.channel_cost + self.onchain_cost + self.sending_fees - self.revenue


def all_node_costs(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                   blockchain_fee) -> list[CostBreakdown]:
    fb = Fraction(blockchain_fee)
    summary = traffic_summary(profile.adjacency(), policy, scenario, fb)
    return [
        CostBreakdown(
            node=u,
            channel_cost=profile.mu_of(u) * fb,
            onchain_cost=summary.onchain_payments[u] * fb,
            sending_fees=summary.sending_fees[u],
            revenue=policy.fee_of(u) * summary.transit[u],
        )
        for u in range(profile.n_nodes)
    ]


def node_cost(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
              node: int, blockchain_fee) -> CostBreakdown:
    if not 0 <= node < profile.n_nodes:
        raise ValueError(f"unknown node {node}")
    return all_node_costs(profile, policy, scenario, blockchain_fee)[node]


@dataclass(frozen=True)
class SocialCostReport:
    social_cost: Fraction
    mu: int
    b: int
    optimum: Fraction

    @property
    def is_social_optimum(self) -> bool:
        return self.social_cost == self.optimum

    @property
    def ratio_to_optimum(self) -> Fraction:
        return self.social_cost / self.optimum


def social_cost(profile: StrategyProfile, policy: FeePolicy, scenario: PaymentScenario,
                blockchain_fee) -> SocialCostReport:
    fb = Fraction(blockchain_fee)
    costs = all_node_costs(profile, policy, scenario, fb)
    total = sum((c.total for c in costs), Fraction(0))
    b = sum(int(c.onchain_cost / fb) for c in costs)
    closed = (profile.mu + b) * fb
    if total != closed:
        # fees paid must equal fees earned; anything else is a routing bug
        raise ArithmeticError(f"social cost mismatch: {total} != {closed}")
    return SocialCostReport(total, profile.mu, b, (profile.n_nodes - 1) * fb)


CSV_COLUMNS = ("node", "channel_cost", "onchain_cost", "sending_fees", "revenue", "total")


def breakdowns_to_csv(costs: list[CostBreakdown], digits: int = 7) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + ("total_exact",))
    for c in costs:
        values = (c.channel_cost, c.onchain_cost, c.sending_fees, c.revenue, c.total)
        writer.writerow([c.node, *(format_decimal(v, digits) for v in values),
                         format_rational(c.total)])
    return buf.getvalue()
