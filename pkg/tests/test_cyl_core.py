from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from algworkbench.constructions import monk_ra
from algworkbench.cyl_core import (ColouredGraph, Palette, agree_off, basic_matrices, ca_axiom_check,
                                   coloured_graph_check, complex_ca, find_cones, forbidden_triangle,
                                   is_basic_matrix, is_cylindric_basis, isomorphic, matrices_ca, parse_colour,
                                   rainbow_ca_atoms, required_amalgams, set_algebra_atoms)
from algworkbench.cyl_core import structure
from algworkbench.errors import BudgetExceeded, StructuralError
from algworkbench.graphs import complete_graph
from algworkbench.ra_core import compose_atoms, one_atom, two_atom

MONK_K3 = monk_ra(complete_graph(3), 3)

# ---------------------------------------------------------------- matrices


def test_one_atom_has_one_matrix():
    ms = basic_matrices(one_atom(), 3)
    assert ms.size == 1 and (ms.mats == 0).all()
    assert is_cylindric_basis(ms).ok


def test_monk_k3_matrix_count_and_basis():
    ms = basic_matrices(MONK_K3, 3)
    assert ms.size == 748  # regression value from exhaustive enumeration
    assert is_cylindric_basis(ms).ok
    assert is_cylindric_basis(ms, polyadic=True).ok


def test_required_amalgam_deletion_flips_basis():
    ms = basic_matrices(MONK_K3, 3)
    req = required_amalgams(ms)
    assert len(req) == 28
    for k in req:
        rep = is_cylindric_basis(ms.without(k))
        assert not rep.ok and rep.witness is not None


def test_converse_mismatch_rejected():
    S = MONK_K3
    M = np.zeros((3, 3), dtype=np.int64)
    M[0, 1] = S.index("(0,0)")
    M[1, 0] = S.index("(1,0)")
    assert not is_basic_matrix(S, M)


def test_matrix_budget():
    with pytest.raises(BudgetExceeded):
        basic_matrices(MONK_K3, 3, budget=10)


def _brute_matrices(S, n):
    out = []
    offd = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ids = sorted(S.identities)
    for e in product(ids, repeat=n):
        for labs in product(range(S.size), repeat=len(offd)):
            M = np.zeros((n, n), dtype=np.int64)
            for k in range(n):
                M[k, k] = e[k]
            for (i, j), a in zip(offd, labs):
                M[i, j], M[j, i] = a, S.conv(a)
            if all(M[k, l] in compose_atoms(S, M[k, j], M[j, l]) for k in range(n) for j in range(n)
                   for l in range(n)):
                out.append(tuple(M.ravel()))
    return sorted(out)


@pytest.mark.parametrize("S", [two_atom(), monk_ra(complete_graph(2), 2)])
def test_matrices_match_triangle_oracle(S):
    got = sorted(basic_matrices(S, 3).keys())
    assert got == _brute_matrices(S, 3)


@pytest.mark.parametrize("S", [two_atom(), monk_ra(complete_graph(2), 2)])
def test_fast_basis_check_matches_brute_relation(S):
    ms = basic_matrices(S, 3)
    assert is_cylindric_basis(ms).ok == is_cylindric_basis(ms, relation=agree_off).ok
    for k in range(min(ms.size, 6)):
        sub = ms.without(k)
        assert is_cylindric_basis(sub).ok == is_cylindric_basis(sub, relation=agree_off).ok


# ---------------------------------------------------------------- coloured graphs

PAL = Palette(n=3, tints=3, reds=3)


def test_order_preserving_red_allowed():
    g1, g2 = parse_colour("g0^-1"), parse_colour("g0^0")
    assert not forbidden_triangle(g1, parse_colour("r0,1^0"), g2, 3)
    assert forbidden_triangle(g1, parse_colour("r1,0^0"), g2, 3)


def test_all_green_forbidden():
    g = parse_colour("g1")
    assert forbidden_triangle(g, parse_colour("g0^0"), g, 3)


def test_unknown_colour():
    with pytest.raises(StructuralError):
        parse_colour("q7")


def _cone(tints, yellow):
    """Base nodes 0, 1 joined by w0; one apex per tint."""
    edges = {(0, 1): "w0"}
    for k, t in enumerate(tints):
        z = 2 + k
        edges[(0, z)] = f"g0^{t}"
        edges[(1, z)] = "g1"
    for a in range(2, 2 + len(tints)):
        for b in range(a + 1, 2 + len(tints)):
            edges[(a, b)] = "w1"
    return ColouredGraph.from_symbols(2 + len(tints), edges, {(0, 1): yellow})


def test_cones():
    assert find_cones(ColouredGraph.from_symbols(3, {(0, 1): "w0", (0, 2): "w0", (1, 2): "w1"}, {}), 3) == []
    assert len(find_cones(_cone([0], {0}), 3)) == 1
    hits = find_cones(_cone([0, -1], {0, -1}), 3)
    assert sorted(t for _, _, t in hits) == [-1, 0]


def test_cone_clause():
    assert coloured_graph_check(_cone([0], {0}), PAL).ok
    rep = coloured_graph_check(_cone([0], {-1}), PAL)
    assert [v.law for v in rep.violations] == ["cone"]


def test_coloured_graph_json_and_iso():
    G = _cone([0, -1], {0, -1})
    H = ColouredGraph.from_json_dict(G.to_json_dict())
    assert H.certificate() == G.certificate()
    assert isomorphic(G, G.relabel([1, 0, 3, 2]).relabel([1, 0, 3, 2]))


# ---------------------------------------------------------------- frames


def test_one_white_rainbow_atoms():
    F = rainbow_ca_atoms(Palette(tints=0, reds=0, whites=(0,), plain_greens=False))
    # surjections onto all-white graphs on <= 3 nodes: one per set partition of 3
    assert F.size == 5
    assert ca_axiom_check(F, "PEA").ok_with_commutativity


@pytest.mark.parametrize("F", [
    set_algebra_atoms(2, 3),
    matrices_ca(basic_matrices(two_atom(), 3)),
    rainbow_ca_atoms(Palette(tints=1, reds=1)),
])
def test_frame_soundness(F):
    n = F.dim
    for i in range(n):
        # classes form a partition; reflexivity is built in
        assert all(F.equiv(i, a, a) for a in range(F.size))
        for j in range(n):
            sw = F.swaps[i, j]
            assert (sw[sw] == np.arange(F.size)).all()
    rep = ca_axiom_check(F, "PEA", check_commutativity=F.size <= 200)
    assert rep.ok


def test_complex_ca_closure_operator():
    F = matrices_ca(basic_matrices(two_atom(), 3))
    A = complex_ca(F)
    assert not A.cyl(0, A.bottom).any()
    assert (A.d(1, 1) == A.top).all()
    for X in A.elements():
        for i in range(3):
            C = A.cyl(i, X)
            assert (C >= X).all() and (A.cyl(i, C) == C).all()


def test_diagonal_axioms_over_matrices():
    rep = ca_axiom_check(matrices_ca(basic_matrices(MONK_K3, 3)), "CA", check_commutativity=False)
    assert rep.ok


def test_ca_json_round_trip():
    F = set_algebra_atoms(2, 3)
    text = structure.dumps(F)
    G = structure.loads(text)
    assert structure.dumps(G) == text


@given(st.integers(1, 3), st.data())
def test_cyl_monotone(base, data):
    F = set_algebra_atoms(base, 3)
    A = complex_ca(F)
    X = np.array(data.draw(st.lists(st.booleans(), min_size=F.size, max_size=F.size)))
    Y = X | np.array(data.draw(st.lists(st.booleans(), min_size=F.size, max_size=F.size)))
    for i in range(3):
        assert (A.cyl(i, Y) >= A.cyl(i, X)).all()
