from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from algworkbench.graphs import (LinearOrderSpec, SimpleGraph, band_graph, chromatic_number, clique_number,
                                 complete_graph, cycle_graph, disjoint_cliques, girth, graph_from_name,
                                 is_proper_colouring, path_graph, seeded_random_graph)


def test_complete_graph_edges():
    assert len(complete_graph(4).edges) == 6


def test_band_graph_is_a_path_for_n2():
    assert sorted(band_graph(5, 2).edges) == [(0, 1), (1, 2), (2, 3), (3, 4)]


@pytest.mark.parametrize("G, chi", [
    (disjoint_cliques([3, 3]), 3),
    (complete_graph(4), 4),
    (cycle_graph(5), 3),
    (band_graph(6, 3), 3),
    (path_graph(4), 2),
    (SimpleGraph.from_edges(3, []), 1),
])
def test_chromatic_number(G, chi):
    res = chromatic_number(G)
    assert res.status == "exact" and res.value == chi
    assert is_proper_colouring(G, res.colouring)
    assert len(set(res.colouring)) == chi


def test_c5_is_not_two_colourable():
    from itertools import product

    G = cycle_graph(5)
    assert not any(is_proper_colouring(G, list(c)) for c in product(range(2), repeat=5))


def test_chromatic_budget_exceeded_is_explicit():
    res = chromatic_number(complete_graph(5), budget=4)
    assert res.status == "exceeded" and res.value is None


@pytest.mark.parametrize("G, g", [(complete_graph(3), 3), (cycle_graph(5), 5), (path_graph(5), float("inf")),
                                  (disjoint_cliques([2, 2]), float("inf")), (complete_graph(4), 3)])
def test_girth(G, g):
    assert girth(G) == g


def test_random_graph_is_deterministic_per_seed():
    a = seeded_random_graph(8, 0.4, 7)
    b = seeded_random_graph(8, 0.4, 7)
    assert a.edges == b.edges
    assert seeded_random_graph(8, 0.0, 1).edges == seeded_random_graph(8, 0.0, 2).edges == type(a.edges)()


def test_bad_parameters():
    with pytest.raises(ValueError):
        seeded_random_graph(3, 1.5, 0)
    with pytest.raises(ValueError):
        LinearOrderSpec("naturals", 0)
    with pytest.raises(ValueError):
        graph_from_name("zz9")


def test_graph_names_and_json_round_trip():
    G = graph_from_name("cliques3-3")
    assert G.n == 6 and len(G.edges) == 6
    assert SimpleGraph.from_json_dict(G.to_json_dict()).edges == G.edges


def test_linear_orders():
    assert LinearOrderSpec("reversed-naturals", 3).elements == (-2, -1, 0)
    assert LinearOrderSpec("naturals", 3).elements == (0, 1, 2)


def _union_find_acyclic(G):
    parent = list(range(G.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in G.edges:
        a, b = find(i), find(j)
        if a == b:
            return False
        parent[a] = b
    return True


def _brute_clique(G):
    best = 1 if G.n else 0
    for k in range(2, G.n + 1):
        if any(all(G.adjacent(a, b) for a, b in combinations(c, 2)) for c in combinations(range(G.n), k)):
            best = k
    return best


graphs = st.builds(seeded_random_graph, st.integers(1, 9), st.floats(0, 1), st.integers(0, 10_000))


@given(graphs)
def test_chromatic_at_least_clique(G):
    assert chromatic_number(G).value >= _brute_clique(G) == clique_number(G)


@given(graphs)
def test_girth_infinite_iff_acyclic(G):
    assert (girth(G) == float("inf")) == _union_find_acyclic(G)
