"""Closed-form node costs for the named topologies and their deviations.

Two representations live here:

* ``RoleCost`` counts, for one node, its channels, the ordered pairs it
  sends to grouped by number of intermediates, and the pairs it forwards
  for together with its expected share.  Evaluating it applies the on-chain
  fallback exactly, so it is valid for every fee level.
* The ``*_cost`` polynomials are the textbook formulas, valid while every
  route is cheaper than the blockchain fee.

All costs assume the homogeneous scenario with k payments per ordered pair.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .topology import Family

F = Fraction


@dataclass(frozen=True)
class RoleCost:
    channels: int
    sends: tuple[tuple[int, int], ...] = ()            # (ordered pairs, intermediates)
    transit: tuple[tuple[int, Fraction, int], ...] = ()  # (ordered pairs, share, intermediates)

    def fee_coefficient(self) -> Fraction:
        """Coefficient of k*f0 when nothing falls back on-chain."""
        sent = sum(F(n * h) for n, h in self.sends)
        earned = sum(n * share for n, share, _ in self.transit)
        return sent - earned

    def evaluate(self, blockchain_fee, k: int, f0) -> Fraction:
        fb, f0 = F(blockchain_fee), F(f0)
        total = self.channels * fb
        for n, h in self.sends:
            if h:
                total += n * k * (h * f0 if h * f0 < fb else fb)
        for n, share, h in self.transit:
            if h * f0 < fb:
                total -= n * k * share * f0
        return total


@dataclass(frozen=True)
class Deviation:
    kind: str                 # e.g. "Bip-B"
    node: int
    alternative: tuple[int, ...]
    cost: RoleCost
    a: int | None = None
    b: int | None = None


@dataclass(frozen=True)
class Catalogue:
    family: Family
    n_nodes: int
    base: dict[int, RoleCost]      # representative nodes only
    deviations: tuple[Deviation, ...]


def _rng(lo: int, count: int) -> tuple[int, ...]:
    return tuple(range(lo, lo + count))


def _star(n: int) -> Catalogue:
    base = {0: RoleCost(n - 1, transit=((((n - 1) * (n - 2)), F(1), 1),)),
            1: RoleCost(0, sends=((n - 2, 1),))}
    devs = tuple(
        Deviation("Star", 1, _rng(2, a),
                  RoleCost(a, ((n - 2 - a, 1),), ((a * (a - 1), F(1, 2), 1),)), a=a)
        for a in range(1, n - 1)
    )
    return Catalogue(Family("star"), n, base, devs)


def _two_star(n: int) -> Catalogue:
    half = F(1, 2)
    base = {0: RoleCost(n - 2, ((1, 1),), (((n - 2) * (n - 3), half, 1),)),
            2: RoleCost(0, ((n - 3, 1),), ((2, F(1, n - 2), 1),))}
    devs = []
    for b in range(1, n - 2):
        devs.append(Deviation("TwoStar-A", 0, _rng(2, b),
                              RoleCost(b, ((1, 1), (n - 2 - b, 2)), ((b * (b - 1), half, 1),)), b=b))
    for b in range(0, n - 1):
        devs.append(Deviation("TwoStar-B", 0, (1,) + _rng(2, b),
                              RoleCost(b + 1, ((n - 2 - b, 1),), ((b * (b - 1), half, 1),)), b=b))
    for b in range(1, n - 2):
        devs.append(Deviation("TwoStar-C", 2, _rng(3, b),
                              RoleCost(b, ((n - 3 - b, 1),),
                                       ((2, F(1, n - 2), 1), (b * (b - 1), F(1, 3), 1))), b=b))
    return Catalogue(Family("two-star"), n, base, tuple(devs))


def _bipartite(n: int, c: int) -> Catalogue:
    d = n - c
    base = {0: RoleCost(d, ((c - 1, 1),), ((d * (d - 1), F(1, c), 1),)),
            c: RoleCost(0, ((d - 1, 1),), ((c * (c - 1), F(1, d), 1),))}
    devs = []
    for b in range(1, d):
        devs.append(Deviation("Bip-A", 0, _rng(c, b),
                              RoleCost(b, ((c - 1, 1), (d - b, 2)), ((b * (b - 1), F(1, c), 1),)), b=b))
    for a in range(1, c):
        for b in range(1, d + 1):
            devs.append(Deviation("Bip-B", 0, _rng(1, a) + _rng(c, b),
                                  RoleCost(a + b, ((c - 1 - a, 1), (d - b, 1)),
                                           ((b * (b - 1), F(1, c), 1), (a * (a - 1), F(1, d + 1), 1))),
                                  a=a, b=b))
    for a in range(1, c):
        devs.append(Deviation("Bip-C", 0, _rng(1, a),
                              RoleCost(a, ((d, 1), (c - 1 - a, 2)), ((a * (a - 1), F(1, d + 1), 1),)), a=a))
    for b in range(1, d):
        devs.append(Deviation("Bip-D", c, _rng(c + 1, b),
                              RoleCost(b, ((d - 1 - b, 1),),
                                       ((c * (c - 1), F(1, d), 1), (b * (b - 1), F(1, c + 1), 1))), b=b))
    return Catalogue(Family("bipartite", c), n, base, tuple(devs))


def _clique(n: int) -> Catalogue:
    base = {i: RoleCost(n - 1 - i) for i in range(n - 1)}
    devs = [Deviation("Clique-A", 0, _rng(1, a), RoleCost(a, ((n - 1 - a, 1),)), a=a)
            for a in range(1, n - 1)]
    for i in range(1, n - 1):
        for a in range(0, n - 1 - i):
            devs.append(Deviation("Clique-B", i, _rng(i + 1, a), RoleCost(a, ((n - 1 - i - a, 1),)), a=a))
    return Catalogue(Family("clique"), n, base, tuple(devs))


def _path_sends(n: int, hub: int, skip: int) -> tuple[tuple[int, int], ...]:
    hist = Counter(abs(hub - j) for j in range(n) if j not in (hub, skip))
    return tuple((cnt, h) for h, cnt in sorted(hist.items()))


def _path(n: int) -> Catalogue:
    # endpoint 0 owns the channel 0-1; rewiring it to m pulls 0 closer to the rest
    base = {0: RoleCost(1, tuple((1, j - 1) for j in range(2, n)))}
    devs = tuple(Deviation("Path-rewire", 0, (m,), RoleCost(1, _path_sends(n, m, 0)), a=m)
                 for m in range(2, n))
    return Catalogue(Family("path"), n, base, devs)


CATALOGUE_NODE_LIMIT = 2000     # deviation peer lists take O(N^2) memory


class CatalogueLimitError(RuntimeError):
    """Raised when a deviation catalogue would be too large to build."""


def catalogue(family: Family, n: int) -> Catalogue:
    family.check(n)
    if n > CATALOGUE_NODE_LIMIT:
        raise CatalogueLimitError(f"deviation catalogue is capped at N <= {CATALOGUE_NODE_LIMIT} "
                         f"(got N = {n}); use the closed-form bounds instead")
    if family.name == "star":
        return _star(n)
    if family.name == "two-star":
        return _two_star(n)
    if family.name == "bipartite":
        return _bipartite(n, family.c)
    if family.name == "clique":
        return _clique(n)
    return _path(n)


def iter_deviations(family: Family, n: int) -> Iterator[Deviation]:
    yield from catalogue(family, n).deviations


# Textbook polynomials -------------------------------------------------------

def star_center_cost(n, k, fb, f0):
    return (n - 1) * fb - (n - 1) * (n - 2) * k * f0


def star_outer_cost(n, k, fb, f0, a=0):
    return a * fb + (n - 2 - a) * k * f0 - F(a * (a - 1), 2) * k * f0


def two_star_center_cost(n, k, fb, f0):
    return (n - 2) * fb + k * f0 - F((n - 2) * (n - 3), 2) * k * f0


def two_star_outer_cost(n, k, fb, f0):
    return (n - 3) * k * f0 - 2 * k * F(1, n - 2) * f0


def two_star_dev_a(n, k, fb, f0, b):
    return b * fb + k * f0 + (n - 2 - b) * k * 2 * f0 - F(b * (b - 1), 2) * k * f0


def two_star_dev_b(n, k, fb, f0, b):
    return (b + 1) * fb + (n - 2 - b) * k * f0 - F(b * (b - 1), 2) * k * f0


def two_star_dev_c(n, k, fb, f0, b):
    return (b * fb + (n - 3 - b) * k * f0 - 2 * k * F(1, n - 2) * f0
            - F(b * (b - 1), 3) * k * f0)


def bip_center_cost(n, c, k, fb, f0):
    d = n - c
    return d * fb + (c - 1) * k * f0 - d * (d - 1) * k * F(1, c) * f0


def bip_outer_cost(n, c, k, fb, f0):
    d = n - c
    return (d - 1) * k * f0 - c * (c - 1) * k * F(1, d) * f0


def bip_dev_a(n, c, k, fb, f0, b):
    d = n - c
    return b * fb + (c - 1) * k * f0 + (d - b) * k * 2 * f0 - b * (b - 1) * k * F(1, c) * f0


def bip_dev_b(n, c, k, fb, f0, a, b):
    d = n - c
    return ((a + b) * fb + (d - b) * k * f0 + (c - 1 - a) * k * f0
            - b * (b - 1) * k * F(1, c) * f0 - a * (a - 1) * k * F(1, d + 1) * f0)


def bip_dev_c(n, c, k, fb, f0, a):
    d = n - c
    return a * fb + d * k * f0 + (c - 1 - a) * k * 2 * f0 - a * (a - 1) * k * F(1, d + 1) * f0


def bip_dev_d(n, c, k, fb, f0, b):
    # printed with an undefined "n"; b*(b-1) is the consistent reading
    d = n - c
    return (b * fb + (d - 1 - b) * k * f0 - c * (c - 1) * k * F(1, d) * f0
            - b * (b - 1) * k * F(1, c + 1) * f0)


def clique_cost(n, i, k, fb, f0, a=None):
    """Node i (0-based) keeping ``a`` of its n-1-i channels to higher ids."""
    own = n - 1 - i
    a = own if a is None else a
    return a * fb + (own - a) * k * f0
