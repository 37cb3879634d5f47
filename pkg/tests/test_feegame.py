import random
from fractions import Fraction

import networkx as nx
import pytest

from channelgame.feegame import (bipartite_free_fee_verdict, disjoint_paths, lemma3_predicate,
                                 star_fee_equilibrium, verify_certificate)
from channelgame.model import GameParams, homogeneous_scenario
from channelgame.topology import CLIQUE, PATH, STAR, TWO_STAR, bipartite, generate

from conftest import random_profile

F = Fraction


def test_disjoint_paths_match_networkx_connectivity():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(3, 9)
        prof = random_profile(rng, n, 0.45)
        adj = prof.adjacency()
        g = nx.Graph(prof.channels())
        g.add_nodes_from(range(n))
        s, t = rng.sample(range(n), 2)
        if g.has_edge(s, t):
            g.remove_edge(s, t)
        expected = min(2, nx.node_connectivity(g, s, t)) if nx.has_path(g, s, t) else 0
        paths = disjoint_paths(adj, s, t, lambda v: True)
        assert len(paths) == expected
        inner = [v for p in paths for v in p[1:-1]]
        assert len(inner) == len(set(inner))
        assert all(b in adj[a] for p in paths for a, b in zip(p, p[1:]))


def test_disjoint_paths_respect_usable_nodes():
    adj = generate(bipartite(3), 7).adjacency()
    assert len(disjoint_paths(adj, 3, 4, lambda v: v != 0)) == 2
    assert len(disjoint_paths(adj, 3, 4, lambda v: v == 0)) == 1


def _lemma3(family, n, fees=None, k=3):
    prof = generate(family, n)
    fees = fees or [F(0)] * n
    res = lemma3_predicate(prof, fees, homogeneous_scenario(GameParams(n, 1, k)), k)
    return prof, fees, res


@pytest.mark.parametrize("family", [bipartite(2), bipartite(3), CLIQUE, TWO_STAR], ids=str)
def test_lemma3_holds_with_certificates(family):
    prof, fees, res = _lemma3(family, 7)
    assert res.holds and verify_certificate(prof, fees, res)


@pytest.mark.parametrize("family", [STAR, PATH], ids=str)
def test_lemma3_fails_on_cut_vertices(family):
    _, _, res = _lemma3(family, 7)
    assert not res.holds and res.violation is not None


def test_lemma3_fails_when_a_center_charges():
    fees = [F(0)] * 7
    fees[1] = F(1, 10)
    _, _, res = _lemma3(bipartite(2), 7, fees)
    assert not res.holds


def test_certificate_checker_rejects_forgeries():
    prof, fees, res = _lemma3(bipartite(2), 6)
    pair = next(iter(res.paths))
    res.paths[pair] = [res.paths[pair][0], res.paths[pair][0]]
    assert not verify_certificate(prof, fees, res)


def test_lemma3_needs_k_above_two():
    with pytest.raises(ValueError):
        _lemma3(bipartite(2), 6, k=2)


def test_bipartite_free_fee_zero_fees():
    v = bipartite_free_fee_verdict(GameParams(1000, 1, 3), 2)
    assert v.status == "NOT_NE" and v.active_lower.label == "Bip-C-a1"
    assert F(v.deviation["new_cost"]) < F(v.deviation["old_cost"])


def test_bipartite_free_fee_undercut():
    v = bipartite_free_fee_verdict(GameParams(6, 1, 3), 3, [F(1, 10)] * 6)
    assert v.status == "NOT_NE" and v.zero_fee_routes == 0 and v.pair == (3, 4)


def test_star_fee_equilibrium():
    res = star_fee_equilibrium(GameParams(6, 1), F(1, 100))
    assert res.fee == F(39, 100) and res.mode == "exhaustive" and res.confirmed
    assert res.center_revenue == 20 * F(39, 100)


def test_star_fee_restricted_mode_for_larger_star():
    res = star_fee_equilibrium(GameParams(40, 1), F(1, 1000))
    assert res.mode == "restricted" and res.confirmed


def test_star_fee_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        star_fee_equilibrium(GameParams(6, 1), F(1))
