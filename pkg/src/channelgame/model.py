"""Domain types for the channel creation game.

Money values are :class:`fractions.Fraction` throughout.  Decimal rendering
happens only at the output edge (see :func:`format_decimal`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

Pair = tuple[int, int]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, a decimal string, an int or a Fraction exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass 'p/q' or a decimal string")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 7) -> str:
    """Render with ``digits`` significant digits, round-half-even."""
    value = Fraction(value)
    if value == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = max(digits + 30, 60)
        exact = Decimal(value.numerator) / Decimal(value.denominator)
        quantum = Decimal(1).scaleb(exact.adjusted() - digits + 1)
        rounded = exact.quantize(quantum, rounding=ROUND_HALF_EVEN)
    # quantize may carry into a new decade (0.9999 -> 1.000)
    if rounded.adjusted() != exact.adjusted():
        rounded = rounded.quantize(quantum.scaleb(1), rounding=ROUND_HALF_EVEN)
    return format(rounded, "f")


@dataclass(frozen=True)
class GameParams:
    n_nodes: int
    blockchain_fee: Fraction
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "blockchain_fee", parse_rational(self.blockchain_fee))
        if not isinstance(self.n_nodes, int) or self.n_nodes < 2:
            raise ValueError(f"n_nodes must be an integer >= 2, got {self.n_nodes!r}")
        if self.blockchain_fee <= 0:
            raise ValueError("blockchain_fee must be > 0")
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    def require_analytic(self) -> None:
        if self.n_nodes <= 3:
            raise ValueError(f"bound analysis needs n_nodes > 3, got {self.n_nodes}")

    @property
    def unit(self) -> Fraction:
        """F_B/k, the unit all bounds are expressed in."""
        return self.blockchain_fee / self.k


@dataclass(frozen=True)
class StrategyProfile:
    """For every node, the peers it opens (and pays for) channels to.

    Peers are kept as sorted tuples.  Repeated peers are only meaningful in
    multiset mode, which exists to exercise the duplicate-channel lemma.
    """

    n_nodes: int
    channels_of: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        chans = tuple(tuple(sorted(int(p) for p in peers)) for peers in self.channels_of)
        if len(chans) != self.n_nodes:
            raise ValueError(f"expected {self.n_nodes} strategies, got {len(chans)}")
        object.__setattr__(self, "channels_of", chans)

    @classmethod
    def empty(cls, n_nodes: int) -> "StrategyProfile":
        return cls(n_nodes, ((),) * n_nodes)

    @classmethod
    def from_channels(cls, n_nodes: int, channels: Iterable[Sequence[int]]) -> "StrategyProfile":
        peers: list[list[int]] = [[] for _ in range(n_nodes)]
        for opener, peer in channels:
            if not 0 <= opener < n_nodes:
                raise ValueError(f"opener {opener} out of range")
            peers[opener].append(peer)
        return cls(n_nodes, tuple(tuple(p) for p in peers))

    def mu_of(self, node: int) -> int:
        return len(self.channels_of[node])

    @property
    def mu(self) -> int:
        return sum(len(p) for p in self.channels_of)

    def channels(self) -> list[Pair]:
        return [(u, v) for u, peers in enumerate(self.channels_of) for v in peers]

    def has_duplicates(self) -> bool:
        seen = set()
        for u, v in self.channels():
            key = (min(u, v), max(u, v))
            if key in seen:
                return True
            seen.add(key)
        return False

    def adjacency(self) -> tuple[frozenset[int], ...]:
        """Undirected simple graph used for routing."""
        adj: list[set[int]] = [set() for _ in range(self.n_nodes)]
        for u, v in self.channels():
            if u != v and 0 <= v < self.n_nodes:
                adj[u].add(v)
                adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def with_strategy(self, node: int, peers: Iterable[int]) -> "StrategyProfile":
        chans = list(self.channels_of)
        chans[node] = tuple(peers)
        return StrategyProfile(self.n_nodes, tuple(chans))


@dataclass(frozen=True)
class Uniform:
    f0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "f0", parse_rational(self.f0))
        if self.f0 < 0:
            raise ValueError("fees must be nonnegative")

    def fee_of(self, node: int) -> Fraction:
        return self.f0


@dataclass(frozen=True)
class PerNode:
    fees: tuple[Fraction, ...]

    def __post_init__(self):
        fees = tuple(parse_rational(f) for f in self.fees)
        if any(f < 0 for f in fees):
            raise ValueError("fees must be nonnegative")
        object.__setattr__(self, "fees", fees)

    def fee_of(self, node: int) -> Fraction:
        return self.fees[node]


FeePolicy = Uniform | PerNode


@dataclass(frozen=True, eq=False)
class PaymentScenario:
    """Ordered (sender, receiver) demands with transaction counts."""

    demands: Mapping[Pair, int]
    _rows: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for (s, t), count in self.demands.items():
            if s == t:
                raise ValueError(f"sender equals receiver in pair ({s}, {t})")
            if count < 0:
                raise ValueError(f"negative demand for pair ({s}, {t})")
            if count:
                clean[(int(s), int(t))] = int(count)
        object.__setattr__(self, "demands", clean)
        rows: dict[int, dict[int, int]] = {}
        for (s, t), count in clean.items():
            rows.setdefault(s, {})[t] = count
        object.__setattr__(self, "_rows", rows)

    def __eq__(self, other):
        return isinstance(other, PaymentScenario) and self.demands == other.demands

    @property
    def total(self) -> int:
        return sum(self.demands.values())

    def sent_by(self, sender: int) -> dict[int, int]:
        return self._rows.get(sender, {})

    def senders(self) -> list[int]:
        return sorted(self._rows)

    def homogeneous_k(self, n_nodes: int) -> int | None:
        """k if every ordered pair carries the same count k, else None."""
        if len(self.demands) != n_nodes * (n_nodes - 1):
            return None
        counts = set(self.demands.values())
        return counts.pop() if len(counts) == 1 else None


def homogeneous_scenario(params: GameParams) -> PaymentScenario:
    n = params.n_nodes
    return PaymentScenario({(u, v): params.k for u in range(n) for v in range(n) if u != v})


@dataclass(frozen=True)
class Violation:
    node: int
    rule: str
    message: str
    severity: str = "error"


def validate_profile(profile: StrategyProfile, params: GameParams | None = None) -> list[Violation]:
    n = profile.n_nodes if params is None else params.n_nodes
    out = []
    if params is not None and profile.n_nodes != n:
        out.append(Violation(-1, "size", f"profile has {profile.n_nodes} nodes, game has {n}"))
    seen: set[tuple[int, int]] = set()
    for u, peers in enumerate(profile.channels_of):
        for v in peers:
            if not 0 <= v < n:
                out.append(Violation(u, "peer-range", f"peer {v} of node {u} out of range"))
                continue
            if u == v:
                out.append(Violation(u, "self-loop", f"self-loop at node {u}"))
                continue
            key = (min(u, v), max(u, v))
            if key in seen:
                out.append(Violation(u, "duplicate", f"duplicate channel {u}-{v}", "info"))
            seen.add(key)
    return out


def require_valid(profile: StrategyProfile, params: GameParams | None = None) -> None:
    errors = [v for v in validate_profile(profile, params) if v.severity == "error"]
    if errors:
        raise ValueError("; ".join(v.message for v in errors))


# JSON documents -------------------------------------------------------------

def policy_to_json(policy: FeePolicy) -> dict:
    if isinstance(policy, Uniform):
        return {"uniform": format_rational(policy.f0)}
    return {"per_node": [format_rational(f) for f in policy.fees]}


def policy_from_json(doc: Mapping) -> FeePolicy:
    if "uniform" in doc:
        return Uniform(parse_rational(doc["uniform"]))
    if "per_node" in doc:
        return PerNode(tuple(parse_rational(f) for f in doc["per_node"]))
    raise ValueError("fee_policy needs a 'uniform' or 'per_node' key")


def profile_to_json(params: GameParams, profile: StrategyProfile,
                    policy: FeePolicy | None = None) -> dict:
    doc = {
        "n_nodes": params.n_nodes,
        "blockchain_fee": format_rational(params.blockchain_fee),
        "k": params.k,
        "channels": [list(c) for c in profile.channels()],
    }
    if policy is not None:
        doc["fee_policy"] = policy_to_json(policy)
    return doc


def profile_from_json(doc: Mapping) -> tuple[GameParams, StrategyProfile, FeePolicy | None]:
    params = GameParams(int(doc["n_nodes"]), parse_rational(doc["blockchain_fee"]), int(doc.get("k", 1)))
    profile = StrategyProfile.from_channels(params.n_nodes, doc.get("channels", []))
    policy = policy_from_json(doc["fee_policy"]) if "fee_policy" in doc else None
    return params, profile, policy


def scenario_to_json(scenario: PaymentScenario) -> dict:
    return {"demands": [[s, t, c] for (s, t), c in sorted(scenario.demands.items())]}


def scenario_from_json(doc: Mapping) -> PaymentScenario:
    return PaymentScenario({(int(s), int(t)): int(c) for s, t, c in doc["demands"]})


def fees_to_json(fees: Sequence[Fraction]) -> dict:
    return {"fees": [format_rational(f) for f in fees]}


def fees_from_json(doc: Mapping) -> tuple[Fraction, ...]:
    return tuple(parse_rational(f) for f in doc["fees"])


def all_pairs(n: int) -> list[Pair]:
    return [p for a, b in combinations(range(n), 2) for p in ((a, b), (b, a))]
