"""Equilibrium fee bounds for the named topologies, in units of F_B/k.

The ``*_bounds`` functions evaluate the published corner formulas.
:func:`bounds_from_costs` re-derives every corner from the closed-form
cost functions instead; the two agree everywhere except the bipartite
(a=1, b=1) corner, whose published formula does not follow from its own
cost function.  Table and figure data use the published formulas.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .closedform import Catalogue, catalogue
from .model import GameParams, format_decimal, format_rational
from .topology import Family, bipartite

F = Fraction
LOWER = "LOWER"
UPPER = "UPPER"


@dataclass(frozen=True)
class BoundCondition:
    label: str
    direction: str
    value: Fraction

    def holds(self, f0_units: Fraction) -> bool:
        if self.direction == LOWER:
            return f0_units > self.value
        return f0_units < self.value


@dataclass(frozen=True)
class BoundsReport:
    family: Family
    n_nodes: int
    conditions: tuple[BoundCondition, ...]
    active_lower: BoundCondition | None = field(init=False)
    active_upper: BoundCondition | None = field(init=False)

    def __post_init__(self):
        lows = [c for c in self.conditions if c.direction == LOWER]
        ups = [c for c in self.conditions if c.direction == UPPER]
        # first label wins on ties so the choice is stable
        lo = max(lows, key=lambda c: c.value, default=None)
        hi = min(ups, key=lambda c: c.value, default=None)
        object.__setattr__(self, "active_lower", lo)
        object.__setattr__(self, "active_upper", hi)

    @property
    def lower(self) -> Fraction:
        return self.active_lower.value if self.active_lower else F(0)

    @property
    def upper(self) -> Fraction | None:
        return self.active_upper.value if self.active_upper else None

    @property
    def feasible(self) -> tuple[Fraction, Fraction | None] | None:
        """Open interval (lower, upper); None when empty."""
        if self.upper is not None and self.lower >= self.upper:
            return None
        return (self.lower, self.upper)

    def contains(self, f0_units: Fraction) -> bool:
        return all(c.holds(f0_units) for c in self.conditions)

    def condition(self, label: str) -> BoundCondition:
        for c in self.conditions:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_json(self, params: GameParams | None = None) -> dict:
        def cond(c):
            if c is None:
                return None
            out = {"label": c.label, "direction": c.direction,
                   "value_exact": format_rational(c.value), "value_decimal": format_decimal(c.value)}
            if params is not None:
                out["money_exact"] = format_rational(c.value * params.unit)
            return out

        feas = self.feasible
        return {
            "family": str(self.family),
            "n_nodes": self.n_nodes,
            "units": "F_B/k",
            "conditions": [cond(c) for c in self.conditions],
            "active_lower": cond(self.active_lower),
            "active_upper": cond(self.active_upper),
            "feasible": None if feas is None else [
                format_rational(feas[0]), None if feas[1] is None else format_rational(feas[1])],
        }


def _n(params) -> int:
    if isinstance(params, GameParams):
        params.require_analytic()
        return params.n_nodes
    if params <= 3:
        raise ValueError(f"bound analysis needs N > 3, got {params}")
    return params


def star_bounds(params) -> BoundsReport:
    n = _n(params)
    return BoundsReport(Family("star"), n, (
        BoundCondition("Star-a1", UPPER, F(1)),
        BoundCondition("Star-aNminus2", UPPER, F(2, n - 1)),
    ))


def two_star_bounds(params) -> BoundsReport:
    n = _n(params)
    return BoundsReport(Family("two-star"), n, (
        BoundCondition("TwoStar-A-b1", LOWER, F(2, n + 2)),
        BoundCondition("TwoStar-A-bNminus3", LOWER, F(1, n - 1)),
        BoundCondition("TwoStar-B-b0", LOWER, F(2, n)),
        BoundCondition("TwoStar-B-bNminus2", UPPER, F(1)),
        BoundCondition("TwoStar-C-b1", UPPER, F(1)),
        BoundCondition("TwoStar-C-bNminus3", UPPER, F(3, n - 1)),
    ))


def bipartite_lower1(n: int, c: int) -> Fraction:
    return F(c * n - c * c - 2 * c, n * n - c * n + n - 3 * c)


def bipartite_lower2(n: int, c: int) -> Fraction:
    return F(c * n - c * c - c, n * n - c * n - n + c * c - 2 * c)


def bipartite_upper(n: int, c: int) -> Fraction:
    return F(c + 1, n - 1)


def bipartite_bounds(params, c: int) -> BoundsReport:
    n = _n(params)
    bipartite(c).check(n)
    cN, c2, c3, N2, N3 = c * n, c * c, c ** 3, n * n, n ** 3
    return BoundsReport(bipartite(c), n, (
        BoundCondition("Bip-A-b1", LOWER, F(c, n + c)),
        BoundCondition("Bip-A-bDminus1", LOWER, F(c, 2 * n - 2)),
        BoundCondition("Bip-B-a1b1", LOWER, bipartite_lower1(n, c)),
        BoundCondition("Bip-B-a1bD", UPPER, F(1)),
        BoundCondition("Bip-B-aCminus1b1", LOWER,
                       F(c * N2 - 3 * c2 * n + cN + 2 * c3 - 2 * c2,
                         N3 - 2 * c * N2 + cN - n + c2 - c)),
        BoundCondition("Bip-B-aCminus1bD", UPPER, F(n - c + 1, n - 1)),
        BoundCondition("Bip-C-a1", LOWER, bipartite_lower2(n, c)),
        BoundCondition("Bip-C-aCminus1", LOWER,
                       F(c * N2 - 3 * c2 * n + 2 * cN + 2 * c3 - 3 * c2 + c,
                         N3 - 2 * c * N2 + 2 * cN - n)),
        BoundCondition("Bip-D-b1", UPPER, F(1)),
        BoundCondition("Bip-D-bDminus1", UPPER, bipartite_upper(n, c)),
    ))


def clique_bounds(params) -> BoundsReport:
    n = _n(params)
    return BoundsReport(Family("clique"), n, (
        BoundCondition("Clique-A", LOWER, F(1)),
        BoundCondition("Clique-B", LOWER, F(1)),
    ))


def clique_threshold(params) -> BoundCondition:
    return clique_bounds(params).active_lower


def bounds_for(family: Family, params) -> BoundsReport:
    if family.name == "star":
        return star_bounds(params)
    if family.name == "two-star":
        return two_star_bounds(params)
    if family.name == "bipartite":
        return bipartite_bounds(params, family.c)
    if family.name == "clique":
        return clique_bounds(params)
    raise ValueError(f"no fee bounds for family {family}; see path_verdict")


# Re-derivation from the closed-form costs ----------------------------------

_CORNERS = {
    "star": [("Star-a1", "Star", "a", lambda n, c: 1), ("Star-aNminus2", "Star", "a", lambda n, c: n - 2)],
    "two-star": [
        ("TwoStar-A-b1", "TwoStar-A", "b", lambda n, c: 1),
        ("TwoStar-A-bNminus3", "TwoStar-A", "b", lambda n, c: n - 3),
        ("TwoStar-B-b0", "TwoStar-B", "b", lambda n, c: 0),
        ("TwoStar-B-bNminus2", "TwoStar-B", "b", lambda n, c: n - 2),
        ("TwoStar-C-b1", "TwoStar-C", "b", lambda n, c: 1),
        ("TwoStar-C-bNminus3", "TwoStar-C", "b", lambda n, c: n - 3),
    ],
    "bipartite": [
        ("Bip-A-b1", "Bip-A", "b", lambda n, c: 1),
        ("Bip-A-bDminus1", "Bip-A", "b", lambda n, c: n - c - 1),
        ("Bip-B-a1b1", "Bip-B", "ab", lambda n, c: (1, 1)),
        ("Bip-B-a1bD", "Bip-B", "ab", lambda n, c: (1, n - c)),
        ("Bip-B-aCminus1b1", "Bip-B", "ab", lambda n, c: (c - 1, 1)),
        ("Bip-B-aCminus1bD", "Bip-B", "ab", lambda n, c: (c - 1, n - c)),
        ("Bip-C-a1", "Bip-C", "a", lambda n, c: 1),
        ("Bip-C-aCminus1", "Bip-C", "a", lambda n, c: c - 1),
        ("Bip-D-b1", "Bip-D", "b", lambda n, c: 1),
        ("Bip-D-bDminus1", "Bip-D", "b", lambda n, c: n - c - 1),
    ],
    "clique": [("Clique-A", "Clique-A", "a", lambda n, c: 1)],
}


def threshold(channel_delta: int, coefficient_delta: Fraction) -> BoundCondition | None:
    """Condition on f0 (F_B/k units) making ``delta_ch*F_B + k*f0*delta_coef > 0``."""
    if coefficient_delta > 0:
        return BoundCondition("", LOWER, F(-channel_delta) / coefficient_delta)
    if coefficient_delta < 0:
        return BoundCondition("", UPPER, F(channel_delta) / -coefficient_delta)
    return None


def _find(cat: Catalogue, kind: str, which: str, at):
    for dv in cat.deviations:
        if dv.kind != kind:
            continue
        if which == "a" and dv.a == at or which == "b" and dv.b == at or which == "ab" and (dv.a, dv.b) == at:
            return dv
    raise LookupError(f"{kind} {which}={at} not in catalogue")


def bounds_from_costs(family: Family, n: int) -> BoundsReport:
    """Corner conditions solved directly from the closed-form cost functions."""
    cat = catalogue(family, n)
    conds = []
    for label, kind, which, at in _CORNERS[family.name]:
        dv = _find(cat, kind, which, at(n, family.c))
        base = cat.base[dv.node]
        cond = threshold(dv.cost.channels - base.channels,
                         dv.cost.fee_coefficient() - base.fee_coefficient())
        if cond is not None:
            conds.append(BoundCondition(label, cond.direction, cond.value))
    if family.name == "clique":
        conds.append(BoundCondition("Clique-B", LOWER, F(1)))
    return BoundsReport(family, n, tuple(conds))


# Path ------------------------------------------------------------------------

WEAK_NE = "WEAK_NE"
NOT_NE = "NOT_NE"
STRICT_NE = "STRICT_NE"


@dataclass(frozen=True)
class PathVerdict:
    status: str
    node: int | None = None
    alternative: tuple[int, ...] | None = None
    old_cost: Fraction | None = None
    new_cost: Fraction | None = None


def path_verdict(params: GameParams, f0) -> PathVerdict:
    """Weak equilibrium at zero fee; otherwise the endpoint moves its channel inward."""
    params.require_analytic()
    f0 = F(f0)
    if f0 < 0:
        raise ValueError("fees must be nonnegative")
    if f0 == 0:
        return PathVerdict(WEAK_NE)
    n, fb, k = params.n_nodes, params.blockchain_fee, params.k
    cat = catalogue(Family("path"), n)
    old = cat.base[0].evaluate(fb, k, f0)
    mid = n // 2
    dev = next(d for d in cat.deviations if d.alternative == (mid,))
    new = dev.cost.evaluate(fb, k, f0)
    if new < old:
        return PathVerdict(NOT_NE, 0, (mid,), old, new)
    if k >= 2:
        # every multi-hop payment is on-chain; a direct channel to node 2 saves (k-1)*F_B
        return PathVerdict(NOT_NE, 0, (1, 2), old, old + fb - k * fb)
    raise ValueError("path verdict is only decided for f0 < F_B or k >= 2")


# Table and figure ------------------------------------------------------------

# (N, c, significant digits printed for the lower bound, for the upper bound)
PUBLISHED_TABLE_ROWS = (
    (1000, 2, 7, 5), (1000, 3, 7, 5), (1000, 5, 7, 5), (1000, 10, 7, 5),
    (1000, 100, 7, 5), (1000, 499, 7, 5), (1000, 500, 7, 5),
    (10**4, 2, 5, 5), (10**4, 3, 5, 5), (10**4, 5, 5, 5), (10**4, 10, 5, 5),
    (10**4, 100, 5, 5), (10**4, 1000, 5, 5), (10**4, 4999, 5, 5), (10**4, 5000, 5, 5),
    (10**5, 2, 6, 6), (10**5, 3, 6, 6), (10**5, 5, 6, 6), (10**5, 10, 6, 6),
    (10**5, 100, 6, 6), (10**5, 1000, 6, 6), (10**5, 10000, 6, 6),
    (10**5, 49999, 6, 6), (10**5, 50000, 6, 6),
)

# The published "active lb/ub" columns use integer tags that are never
# defined.  Matching values row by row suggests this correspondence.
ACTIVE_INDEX_CONJECTURE = {
    LOWER: {3: "Bip-B-a1b1", 5: "Bip-C-a1"},
    UPPER: {3: "Bip-D-bDminus1"},
}


def published_index(cond: BoundCondition) -> int | None:
    for idx, label in ACTIVE_INDEX_CONJECTURE[cond.direction].items():
        if label == cond.label:
            return idx
    return None


@dataclass(frozen=True)
class Table1Row:
    n_nodes: int
    c: int
    lower: BoundCondition
    upper: BoundCondition
    lower_digits: int = 7
    upper_digits: int = 7

    @property
    def lower_text(self) -> str:
        return format_decimal(self.lower.value, self.lower_digits)

    @property
    def upper_text(self) -> str:
        return format_decimal(self.upper.value, self.upper_digits)

    def to_json(self) -> dict:
        return {
            "N": self.n_nodes, "c": self.c,
            "lower": self.lower_text, "upper": self.upper_text,
            "lower_exact": format_rational(self.lower.value),
            "upper_exact": format_rational(self.upper.value),
            "lower_decimal7": format_decimal(self.lower.value, 7),
            "upper_decimal7": format_decimal(self.upper.value, 7),
            "active_lower": self.lower.label, "active_upper": self.upper.label,
            "published_index_lower": published_index(self.lower),
            "published_index_upper": published_index(self.upper),
        }


def table1(rows=PUBLISHED_TABLE_ROWS) -> list[Table1Row]:
    out = []
    for row in rows:
        n, c = row[0], row[1]
        digits = tuple(row[2:4]) if len(row) >= 4 else (7, 7)
        rep = bipartite_bounds(n, c)
        out.append(Table1Row(n, c, rep.active_lower, rep.active_upper, *digits))
    return out


def table1_csv(rows: list[Table1Row]) -> str:
    buf = io.StringIO()
    cols = ["N", "c", "lower", "upper", "lower_exact", "upper_exact", "lower_decimal7",
            "upper_decimal7", "active_lower", "active_upper", "published_index_lower", "published_index_upper"]
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.to_json())
    return buf.getvalue()


def figure1_data(n: int) -> list[BoundsReport]:
    """One bipartite report per c = 2..N/2."""
    _n(n)
    return [bipartite_bounds(n, c) for c in range(2, n // 2 + 1)]


FIGURE_COLUMNS = ("c", "condition_label", "direction", "value_exact", "value_decimal")


def figure1_csv(reports: list[BoundsReport], digits: int = 7) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIGURE_COLUMNS)
    for rep in reports:
        for cond in rep.conditions:
            w.writerow([rep.family.c, cond.label, cond.direction,
                        format_rational(cond.value), format_decimal(cond.value, digits)])
    return buf.getvalue()
