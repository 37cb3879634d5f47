"""Named strategy profiles and unilateral deviations.

Conventions: the star center is node 0; two-star centers are 0 and 1;
bipartite centers are 0..c-1; path and clique connect i to higher ids.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import GameParams, StrategyProfile


@dataclass(frozen=True)
class Family:
    name: str          # path | star | two-star | bipartite | clique
    c: int | None = None

    def __str__(self):
        return f"bipartite:{self.c}" if self.name == "bipartite" else self.name

    def check(self, n: int) -> None:
        if self.name == "bipartite":
            if self.c is None or not 2 <= self.c <= n // 2:
                raise ValueError(f"bipartite needs 2 <= c <= N/2, got c={self.c}, N={n}")
        elif self.name not in ("path", "star", "two-star", "clique"):
            raise ValueError(f"unknown family {self.name!r}")
        if self.name == "two-star" and n < 4:
            raise ValueError("two-star needs at least 4 nodes")

    def expected_mu(self, n: int) -> int:
        if self.name == "bipartite":
            return self.c * (n - self.c)
        return {"path": n - 1, "star": n - 1, "two-star": 2 * (n - 2),
                "clique": n * (n - 1) // 2}[self.name]


PATH = Family("path")
STAR = Family("star")
TWO_STAR = Family("two-star")
CLIQUE = Family("clique")


def bipartite(c: int) -> Family:
    return Family("bipartite", c)


def parse_family(text: str) -> Family:
    """``path|star|two-star|bipartite:<c>|clique``."""
    text = text.strip().lower()
    if text.startswith("bipartite"):
        _, _, c = text.partition(":")
        if not c:
            raise ValueError("bipartite family needs a center count, e.g. bipartite:3")
        return bipartite(int(c))
    if text in ("path", "star", "two-star", "clique"):
        return Family(text)
    raise ValueError(f"unknown family {text!r}")


def generate(family: Family, n: int | GameParams) -> StrategyProfile:
    if isinstance(n, GameParams):
        n = n.n_nodes
    family.check(n)
    name = family.name
    if name == "path":
        chans = [(i + 1,) for i in range(n - 1)] + [()]
    elif name == "star":
        chans = [tuple(range(1, n))] + [()] * (n - 1)
    elif name == "two-star":
        chans = [tuple(range(2, n))] * 2 + [()] * (n - 2)
    elif name == "bipartite":
        c = family.c
        chans = [tuple(range(c, n))] * c + [()] * (n - c)
    else:
        chans = [tuple(range(i + 1, n)) for i in range(n)]
    return StrategyProfile(n, tuple(chans))


def apply_deviation(profile: StrategyProfile, node: int, peers: Iterable[int]) -> StrategyProfile:
    n = profile.n_nodes
    if not 0 <= node < n:
        raise ValueError(f"node {node} out of range")
    peers = tuple(peers)
    for p in peers:
        if not 0 <= p < n:
            raise ValueError(f"peer {p} out of range")
        if p == node:
            raise ValueError(f"self-loop at node {node}")
    return profile.with_strategy(node, peers)
