"""Acceptance gate: one test (or group) per criterion, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session.
"""
import random
import time
from decimal import Decimal
from fractions import Fraction

import networkx as nx

from channelgame.analytic import (PUBLISHED_TABLE_ROWS, bipartite_bounds, figure1_csv, figure1_data,
                                  table1, two_star_bounds)
from channelgame.closedform import catalogue
from channelgame.cost import all_node_costs, social_cost
from channelgame.equilibrium import NOT_NE, STRICT_NE, WEAK_NE, check_nash_exhaustive, lemma_properties_scan
from channelgame.feegame import (bipartite_free_fee_verdict, lemma3_predicate, star_fee_equilibrium,
                                 verify_certificate)
from channelgame.model import (GameParams, StrategyProfile, Uniform,
                               homogeneous_scenario)
from channelgame.plot import band_svg
from channelgame.topology import CLIQUE, PATH, STAR, TWO_STAR, bipartite, generate

from conftest import random_policy, random_profile, random_scenario, simulated_cost

F = Fraction
RESULTS: list[str] = []


def record(label: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


# Published table: (mantissa digits, power of ten) for lower and upper, row order of PUBLISHED_TABLE_ROWS.
PUBLISHED = [
    ("2000000", -2, "30030", -2), ("2999991", -2, "40040", -2), ("4999925", -2, "60060", -2),
    ("9999192", -2, "11011", -1), ("9970024", -1, "10110", 0), ("4975016", 0, "50050", 0),
    ("4984984", 0, "50150", 0),
    ("20000", -3, "30003", -3), ("29997", -3, "40004", -3), ("49995", -3, "60006", -3),
    ("99990", -3, "11001", -2), ("99981", -2, "10101", -1), ("99971", -1, "10011", 0),
    ("49976", 0, "50005", 0), ("49985", 0, "50015", 0),
    ("200000", -4, "300003", -4), ("299997", -4, "400004", -4), ("499995", -4, "600006", -4),
    ("999990", -4, "110001", -3), ("999990", -3, "101001", -2), ("999971", -2, "100101", -1),
    ("999971", -1, "100011", 0), ("499976", 0, "500005", 0), ("499985", 0, "500015", 0),
]


def _published(digits: str, power: int) -> Decimal:
    return Decimal(f"0.{digits}E{power}")


def _table_mismatches(side: str):
    start = time.perf_counter()
    rows = table1()
    elapsed = time.perf_counter() - start
    bad = []
    for row, (ld, lp, ud, up) in zip(rows, PUBLISHED):
        text = row.lower_text if side == "lower" else row.upper_text
        want = _published(ld, lp) if side == "lower" else _published(ud, up)
        digits = len(ld) if side == "lower" else len(ud)
        assert len(text.replace("0.", "", 1).lstrip("0")) >= 1
        if Decimal(text) != want or (row.lower_digits if side == "lower" else row.upper_digits) != digits:
            bad.append(f"N={row.n_nodes} c={row.c} got {text} want {want}")
    return rows, bad, elapsed


def test_criterion1_table_upper_bounds():
    rows, bad, elapsed = _table_mismatches("upper")
    ok = len(rows) == len(PUBLISHED) and not bad and elapsed < 1
    record("criterion 1a bound table upper bounds", ok,
           f"{len(rows) - len(bad)}/{len(rows)} rows match, {elapsed:.3f}s" + ("; " + "; ".join(bad) if bad else ""))


def test_criterion1_table_lower_bounds():
    rows, bad, elapsed = _table_mismatches("lower")
    ok = len(rows) == len(PUBLISHED) and not bad and elapsed < 1
    record("criterion 1b bound table lower bounds", ok,
           f"{len(rows) - len(bad)}/{len(rows)} rows match, {elapsed:.3f}s" + ("; " + "; ".join(bad) if bad else ""))


def test_criterion2_figure_band(tmp_path):
    start = time.perf_counter()
    reports = figure1_data(1000)
    csv_text = figure1_csv(reports)
    svg = band_svg(reports, "N=1000")
    (tmp_path / "band.csv").write_text(csv_text)
    (tmp_path / "band.svg").write_text(svg)
    elapsed = time.perf_counter() - start
    cs = [r.family.c for r in reports]
    empty = [r.family.c for r in reports if not r.lower < r.upper]
    ok = cs == list(range(2, 501)) and not empty and elapsed < 5 \
        and len(csv_text.splitlines()) == 1 + 499 * 10 and svg == band_svg(figure1_data(1000), "N=1000")
    record("criterion 2 bipartite band nonempty for c=2..500", ok,
           f"{len(cs)} values of c, empty at {empty or 'none'}, {elapsed:.2f}s")


def test_criterion3_closed_forms_match_simulation():
    start = time.perf_counter()
    checked, bad = 0, []
    for n in range(5, 13):
        families = [STAR, TWO_STAR, CLIQUE, PATH] + [bipartite(c) for c in range(2, n // 2 + 1)]
        for fam in families:
            cat = catalogue(fam, n)
            for k, f0 in ((1, F(1, 7)), (3, F(1, 2))):
                for node, rc in cat.base.items():
                    checked += 1
                    if rc.evaluate(1, k, f0) != simulated_cost(fam, n, k, 1, f0, node):
                        bad.append((str(fam), n, node))
                for dv in cat.deviations:
                    checked += 1
                    if dv.cost.evaluate(1, k, f0) != simulated_cost(fam, n, k, 1, f0, dv.node, dv.alternative):
                        bad.append((str(fam), n, dv.kind, dv.a, dv.b))
    elapsed = time.perf_counter() - start
    record("criterion 3 closed forms equal simulated costs (4<N<=12)", not bad and elapsed < 60,
           f"{checked} costs checked, {len(bad)} mismatches, {elapsed:.1f}s")


def _ne(family, f0, n=6):
    return check_nash_exhaustive(generate(family, n), Uniform(f0),
                                 homogeneous_scenario(GameParams(n, 1, 1)), 1)


def test_criterion4_star():
    a, b = _ne(STAR, F(3, 10)), _ne(STAR, F(1, 2))
    record("criterion 4a star STRICT_NE at 3/10, NOT_NE at 1/2",
           a.status == STRICT_NE and b.status == NOT_NE, f"{a.status}, {b.status}")


def test_criterion4_clique():
    a, b = _ne(CLIQUE, F(3, 2)), _ne(CLIQUE, F(1, 2))
    record("criterion 4b clique STRICT_NE at 3/2, NOT_NE at 1/2",
           a.status == STRICT_NE and b.status == NOT_NE,
           f"{a.status} (ties={a.ties}), {b.status}")


def test_criterion4_path():
    a, b = _ne(PATH, F(0)), _ne(PATH, F(1, 10))
    record("criterion 4c path WEAK_NE at 0, NOT_NE at 1/10",
           a.status == WEAK_NE and b.status == NOT_NE, f"{a.status}, {b.status}")


def test_criterion4_two_star_band():
    start = time.perf_counter()
    grid = sorted({F(i, 40) for i in range(0, 41)} | {F(1, 3) + F(1, 1000), F(3, 5) - F(1, 1000), F(3, 2),
                                                       F(1, 3) - F(1, 1000), F(3, 5) + F(1, 1000)})
    grid = [f for f in grid if f not in (F(1, 3), F(3, 5))]
    bad = []
    for fam in (TWO_STAR, bipartite(2)):
        for f0 in grid:
            inside = F(1, 3) < f0 < F(3, 5)
            if _ne(fam, f0).is_ne != inside:
                bad.append(f"{fam}@{f0}")
    elapsed = time.perf_counter() - start
    below_fb = [b for b in bad if F(b.split("@")[1]) < 1]
    record("criterion 4d two-star/bipartite(2) NE exactly inside (1/3, 3/5)", not bad and elapsed < 30,
           f"{2 * len(grid)} checks, {len(below_fb)} wrong below F_B, {elapsed:.1f}s"
           + (f"; wrong at {bad}" if bad else ""))


def test_criterion5_conservation():
    rng = random.Random(5)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n = rng.randint(2, 10)
        prof = random_profile(rng, n, rng.uniform(0.1, 0.7))
        pol = random_policy(rng, n)
        sc = random_scenario(rng, n)
        fb = F(rng.randint(1, 5), rng.randint(1, 3))
        costs = all_node_costs(prof, pol, sc, fb)
        rep = social_cost(prof, pol, sc, fb)
        fees_ok = sum(c.sending_fees for c in costs) == sum(c.revenue for c in costs)
        total_ok = sum(c.total for c in costs) == (rep.mu + rep.b) * fb == rep.social_cost
        bad += not (fees_ok and total_ok)
    trees_bad = 0
    for _ in range(200):
        n = rng.randint(2, 10)
        tree = nx.random_labeled_tree(n, seed=rng.randint(0, 10**6))
        prof = StrategyProfile.from_channels(n, [(u, v) if rng.random() < 0.5 else (v, u) for u, v in tree.edges])
        fb = F(rng.randint(1, 4))
        f0 = fb / (n * rng.randint(1, 4))          # every route is cheaper than F_B
        rep = social_cost(prof, Uniform(f0), homogeneous_scenario(GameParams(n, fb, rng.randint(1, 3))), fb)
        trees_bad += not (rep.b == 0 and rep.social_cost == (n - 1) * fb)
    elapsed = time.perf_counter() - start
    record("criterion 5 conservation and spanning-tree optimum", bad == 0 and trees_bad == 0 and elapsed < 60,
           f"1000 random games ({bad} violations), 200 trees ({trees_bad} violations), {elapsed:.1f}s")


def test_criterion6_lemma_scan():
    start = time.perf_counter()
    lines, ok = [], True
    for f0 in (F(0), F(1, 10), F(2, 5)):
        rep = lemma_properties_scan(GameParams(4, 1, 2), Uniform(f0), multiplicity=2)
        ok &= rep.lemma1_holds and rep.lemma2_holds and rep.profiles == 3 ** 12
        lines.append(f"f0={f0}: {rep.strict} strict, dup {rep.strict_with_duplicates}, "
                     f"on-chain {rep.strict_with_onchain}")
    elapsed = time.perf_counter() - start
    record("criterion 6 lemma scan N=4 k=2", ok and elapsed < 300, "; ".join(lines) + f"; {elapsed:.0f}s")


def test_criterion7_fee_game():
    start = time.perf_counter()
    problems = []
    for n in (5, 6, 7, 8, 9):
        sc = homogeneous_scenario(GameParams(n, 1, 3))
        for c in range(2, n // 2 + 1):
            prof, fees = generate(bipartite(c), n), [F(0)] * n
            res = lemma3_predicate(prof, fees, sc, 3)
            if not (res.holds and verify_certificate(prof, fees, res)):
                problems.append(f"bipartite {n},{c}")
        star = lemma3_predicate(generate(STAR, n), [F(0)] * n, sc, 3)
        if star.holds:
            problems.append(f"star {n}")
    grid = {(n, c) for n, c, *_ in PUBLISHED_TABLE_ROWS} | {(n, c) for n in (6, 10, 50) for c in range(2, n // 2 + 1)}
    for n, c in sorted(grid):
        if bipartite_free_fee_verdict(GameParams(n, 1, 3), c).status != NOT_NE:
            problems.append(f"free-fee {n},{c}")
    star = star_fee_equilibrium(GameParams(6, 1, 1), F(1, 100))
    if not (star.mode == "exhaustive" and star.fee == F(39, 100) and star.at_fee.is_ne
            and not star.above_bound.is_ne):
        problems.append("star fee")
    elapsed = time.perf_counter() - start
    record("criterion 7 fee game", not problems and elapsed < 30,
           f"{len(grid)} free-fee pairs, star fee {star.at_fee.status}/{star.above_bound.status}, "
           f"{elapsed:.1f}s" + (f"; problems {problems}" if problems else ""))


# Bipartite condition label -> two-star condition label when c = 2.
REDUCTION = {
    "Bip-A-b1": "TwoStar-A-b1", "Bip-A-bDminus1": "TwoStar-A-bNminus3",
    "Bip-B-a1bD": "TwoStar-B-bNminus2", "Bip-C-a1": "TwoStar-B-b0",
    "Bip-D-b1": "TwoStar-C-b1", "Bip-D-bDminus1": "TwoStar-C-bNminus3",
}


def test_criterion8_reduction():
    bad = []
    for n in (5, 6, 10, 100, 1000, 10**5):
        bip, two = bipartite_bounds(n, 2), two_star_bounds(n)
        for b_label, t_label in REDUCTION.items():
            x, y = bip.condition(b_label), two.condition(t_label)
            if (x.direction, x.value) != (y.direction, y.value):
                bad.append(f"N={n} {b_label}")
        if (bip.lower, bip.upper) != (two.lower, two.upper):
            bad.append(f"N={n} band")
    record("criterion 8 bipartite(N,2) reduces to two-star(N)", not bad,
           "N in {5,6,10,100,1000,100000}" + (f"; {bad}" if bad else ""))
