import numpy as np
import pytest
from hypothesis import given, strategies as st

from algworkbench import ra_core
from algworkbench.constructions import monk_ra
from algworkbench.errors import BudgetExceeded, StructuralError
from algworkbench.graphs import complete_graph, cycle_graph
from algworkbench.ra_core import (RaAtomStructure, complex_algebra, compose_atoms, from_triples, one_atom,
                                  two_atom, validate_atom_structure)


def _brute_cycle_violations(S):
    cons = S.dense()
    n = S.size
    bad = 0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                x = cons[a, b, c]
                if x != cons[S.conv(a), c, b] or x != cons[c, S.conv(b), a]:
                    bad += 1
    return bad


def test_one_atom_is_valid():
    assert validate_atom_structure(one_atom()).ok


def test_monk_k3_is_valid_by_full_enumeration():
    S = monk_ra(complete_graph(3), 3)
    rep = validate_atom_structure(S)
    assert S.size == 10 and rep.ok and rep.checked_triples == 1000
    assert _brute_cycle_violations(S) == 0


def test_planted_identity_defect_is_reported():
    S = monk_ra(complete_graph(2), 3)
    cons = S.dense().copy()
    e, u, v = 0, S.index("(0,0)"), S.index("(1,0)")
    cons[e, u, v] = True
    T = RaAtomStructure(S.names, S.identities, S.converse, cons=cons)
    rep = validate_atom_structure(T)
    assert "identity-law" in rep.laws()
    assert any(v_.law == "identity-law" and v_.witness == (e, u, v) for v_ in rep.violations)


def test_malformed_converse_is_structural():
    with pytest.raises(StructuralError):
        from_triples(["1'", "a"], [0], [0, 5], [])
    with pytest.raises(StructuralError):
        from_triples(["1'", "a"], [0], [0], [])


def test_compose_identity():
    S = two_atom()
    assert compose_atoms(S, 0, 1) == {1}


def test_compose_monk_k2_worked_example():
    S = monk_ra(complete_graph(2), 3)
    got = {S.names[c] for c in compose_atoms(S, S.index("(0,0)"), S.index("(0,0)"))}
    assert got == {"1'", "(0,1)", "(1,1)", "(0,2)", "(1,2)", "(1,0)"}


def test_compose_unknown_atom():
    with pytest.raises(StructuralError):
        compose_atoms(one_atom(), 0, 3)


def test_complex_algebra_examples():
    S = monk_ra(complete_graph(3), 3)
    A = complex_algebra(S)
    assert A.compose(A.identity, A.identity) == A.identity
    assert A.compose(A.top, A.top) == A.top
    assert A.compose(A.element([1, 2]), A.bottom) == A.bottom
    with pytest.raises(BudgetExceeded):
        complex_algebra(S, budget=4, lazy=False)
    with pytest.raises(BudgetExceeded):
        list(complex_algebra(S, budget=4).elements())


def test_json_round_trip_is_bit_exact():
    for S in (monk_ra(cycle_graph(5), 3), two_atom()):
        text = ra_core.dumps(S)
        T = ra_core.loads(text)
        assert ra_core.dumps(T) == text
        assert np.array_equal(T.dense(), S.dense())
        explicit = ra_core.dumps(S, explicit=True)
        assert np.array_equal(ra_core.loads(explicit).dense(), S.dense())


def test_validation_is_pure():
    S = monk_ra(complete_graph(2), 4)
    before = S.dense().copy()
    a, b = validate_atom_structure(S), validate_atom_structure(S)
    assert a == b and np.array_equal(S.dense(), before)


structures = st.sampled_from([one_atom(), two_atom(), monk_ra(complete_graph(2), 3), monk_ra(complete_graph(3), 2)])


@given(structures, st.data())
def test_cycle_law_at_operation_level(S, data):
    a = data.draw(st.integers(0, S.size - 1))
    b = data.draw(st.integers(0, S.size - 1))
    c = data.draw(st.integers(0, S.size - 1))
    assert (c in compose_atoms(S, a, b)) == (b in compose_atoms(S, S.conv(a), c))


@given(structures, st.data())
def test_complex_composition_matches_triple_scan(S, data):
    A = complex_algebra(S)
    xs = data.draw(st.sets(st.integers(0, S.size - 1)))
    ys = data.draw(st.sets(st.integers(0, S.size - 1)))
    naive = {c for a in xs for b in ys for c in range(S.size) if S.consistent(a, b, c)}
    assert set(A.atoms_of(A.compose(A.element(xs), A.element(ys)))) == naive


@given(st.integers(2, 4), st.integers(0, 10_000))
def test_random_defects_are_caught(n, seed):
    rng = np.random.default_rng(seed)
    S = monk_ra(complete_graph(2), n)
    cons = S.dense().copy()
    a, b, c = rng.integers(1, S.size, 3)
    cons[a, b, c] = ~cons[a, b, c]
    T = RaAtomStructure(S.names, S.identities, S.converse, cons=cons)
    assert validate_atom_structure(T).ok == (_brute_cycle_violations(T) == 0)
