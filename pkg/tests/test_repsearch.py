import copy
import json

import pytest

from algworkbench.constructions import monk_ra
from algworkbench.cyl_core import set_algebra_atoms
from algworkbench.cyl_core.matrices import basic_matrices, matrices_ca
from algworkbench.errors import StructuralError
from algworkbench.graphs import complete_graph
from algworkbench.ra_core import one_atom, two_atom
from algworkbench.repsearch import (Representation, find_ca_representation, find_square_representation, mutations,
                                    pad_representation, verify_representation)


def _all_mutations_fail(S, R):
    count = 0
    for M in mutations(S, R):
        ok, why = verify_representation(S, M)
        assert not ok and why is not None
        count += 1
    return count


@pytest.mark.parametrize("build, base", [(one_atom, 1), (two_atom, 3)], ids=["one-atom", "two-atom"])
def test_smallest_square_representation(build, base):
    S = build()
    rep = find_square_representation(S, max_base=4)
    assert rep.ok and rep.found.base == base
    assert rep.tried == list(range(1, base))
    assert verify_representation(S, rep.found) == (True, None)
    n = _all_mutations_fail(S, rep.found)
    assert n == (base * (base + 1) // 2) * (S.size - 1)


def test_representation_json_round_trip():
    S = two_atom()
    R = find_square_representation(S, 4).found
    R2 = Representation.from_json_dict(json.loads(R.dumps()))
    assert R2.labels == R.labels and verify_representation(S, R2)[0]


def test_hand_built_representations():
    S = two_atom()
    ident = next(iter(S.identities))
    div = 1 - ident
    for B, expect in ((2, "witness"), (3, None), (5, None)):
        lab = {(x, y): ident if x == y else div for x in range(B) for y in range(B)}
        ok, why = verify_representation(S, Representation("ra", B, lab))
        assert ok == (expect is None)
        assert expect is None or why[0] == expect


def test_padding():
    S = two_atom()
    R = find_square_representation(S, 4).found
    P = pad_representation(S, R)
    assert P is not None and P.base == 4 and verify_representation(S, P)[0]
    one = one_atom()
    assert pad_representation(one, find_square_representation(one, 2).found) is None


def test_no_small_representation_and_cache():
    S = monk_ra(complete_graph(1), 3)
    rep = find_square_representation(S, max_base=4)
    assert not rep.ok and rep.tried == [1, 2, 3, 4]
    assert rep.message() == "no representation with base <= 4"
    again = find_square_representation(S, max_base=4)
    # exhausted bases are cached, so the second search visits no nodes
    assert not again.ok and again.nodes == 0 and again.tried == [1, 2, 3, 4]


def test_set_algebra_ca_base_two():
    F = set_algebra_atoms(2, 3)
    rep = find_ca_representation(F, 3, max_base=3)
    assert rep.ok and rep.found.base == 2
    assert verify_representation(F, rep.found) == (True, None)
    assert _all_mutations_fail(F, rep.found) == 8 * (F.size - 1)


def test_matrices_ca_of_two_atom():
    F = matrices_ca(basic_matrices(two_atom(), 3))
    rep = find_ca_representation(F, 3, max_base=3)
    assert rep.ok and rep.found.base == 3
    assert verify_representation(F, rep.found)[0]


def test_dimension_and_shape_mismatch():
    F = set_algebra_atoms(2, 3)
    with pytest.raises(StructuralError):
        find_ca_representation(F, 4)
    R = find_square_representation(two_atom(), 3).found
    with pytest.raises(StructuralError):
        verify_representation(F, R)


def test_diagonal_failure_refused():
    F = copy.copy(set_algebra_atoms(2, 3))
    F.diag = F.diag.copy()
    F.diag[0, 0, 0] = False
    with pytest.raises(StructuralError, match="refused"):
        find_ca_representation(F, 3)
    G = copy.copy(set_algebra_atoms(2, 3))
    G.diag = G.diag.copy()
    G.diag[0, 1, 0] = not G.diag[0, 1, 0]
    with pytest.raises(StructuralError, match="differ"):
        find_ca_representation(G, 3)


def test_verify_catches_missing_atom():
    F = set_algebra_atoms(3, 3)
    sub = find_ca_representation(set_algebra_atoms(2, 3), 3, 2).found
    # a base-2 labelling never realises the three-distinct-points atom of the base-3 frame
    lab = {x: F.names.index(set_algebra_atoms(2, 3).names[a]) for x, a in sub.labels.items()}
    ok, why = verify_representation(F, Representation("ca", 2, lab, 3))
    assert not ok and why[0] in ("witness", "unrealised-atom")
