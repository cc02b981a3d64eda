import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from algworkbench import kernels
from algworkbench._accel import HAVE_NUMBA
from algworkbench.constructions import HirschParams, hirsch_algebra
from algworkbench.constructions.blur import blur_structure, f_family
from algworkbench.constructions.hirsch import forb_table, triangle_ok


@pytest.fixture(params=[False, True], ids=["numpy", "numba"])
def path(request, monkeypatch):
    if request.param and not HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(kernels, "use_numba", lambda: request.param)
    return request.param


def both(fn, *args, **kw):
    orig = kernels.use_numba
    try:
        kernels.use_numba = lambda: False
        a = fn(*args, **kw)
        if not HAVE_NUMBA:
            return a, a
        kernels.use_numba = lambda: True
        b = fn(*args, **kw)
    finally:
        kernels.use_numba = orig
    return a, b


def _brute_cycle(cons, conv):
    n = cons.shape[0]
    out = []
    for a in range(n):
        for b in range(n):
            for c in range(n):
                x = cons[a, b, c]
                if x != cons[conv[a], c, b] or x != cons[c, conv[b], a]:
                    out.append((a, b, c))
    return out


@given(st.integers(1, 6), st.integers(0, 10_000), st.floats(0, 1))
def test_cycle_law_paths_agree_with_brute(n, seed, p):
    rng = np.random.default_rng(seed)
    cons = rng.random((n, n, n)) < p
    conv = np.arange(n)
    (wa, ka), (wb, kb) = both(kernels.cycle_law_violations, cons, conv, 1000)
    brute = _brute_cycle(cons, conv)
    assert ka == kb == len(brute)
    assert sorted(map(tuple, np.asarray(wa).tolist())) == sorted(map(tuple, np.asarray(wb).tolist())) == brute


@given(st.integers(1, 3), st.integers(0, 10_000))
def test_extend_by_node_paths_agree(m_old, seed):
    rng = np.random.default_rng(seed)
    nv = 3
    ok3 = rng.random((nv, nv, nv)) < 0.6
    ne = m_old * (m_old - 1) // 2
    parent = rng.integers(0, nv, (5, ne))
    (pa, va), (pb, vb) = both(kernels.extend_by_node, parent, m_old, ok3)
    assert np.array_equal(pa, pb) and np.array_equal(va, vb)
    # brute oracle
    from itertools import product

    want = []
    for k, row in enumerate(parent):
        for v in product(range(nv), repeat=m_old):
            if all(ok3[row[kernels.edge_index(x, y)], v[x], v[y]] for y in range(m_old) for x in range(y)):
                want.append((k, v))
    assert [(int(p), tuple(int(t) for t in v)) for p, v in zip(pa, va)] == sorted(want)


def test_fibre_signature_paths_agree():
    H = hirsch_algebra(HirschParams(3, 3, 1))
    for x in range(3):
        a, b = both(kernels.fibre_signatures, H.F[:50], 3, x, H.ok3)
        assert np.array_equal(a, b)


def test_blur_brute_paths_agree():
    bu = blur_structure(*f_family())
    rng = np.random.default_rng(1)
    X = rng.choice(bu.ra.size, 10, replace=False)
    Y = rng.choice(bu.ra.size, 10, replace=False)
    Z = np.arange(bu.ra.size)
    a, b = both(bu.brute_compose, X, Y, Z)
    assert np.array_equal(a, b)
    cons = bu.ra.dense()
    assert a.tolist() == [bool(cons[np.ix_(X, Y, [z])].any()) for z in Z]


def test_hirsch_enumeration_same_on_both_paths(path):
    H = hirsch_algebra(HirschParams(3, 3, 1))
    assert H.size == 409


def test_env_switch_disables_numba():
    code = ("import json; from algworkbench._accel import HAVE_NUMBA; "
            "from algworkbench.constructions import monk_ra; from algworkbench.graphs import cycle_graph; "
            "from algworkbench.ra_core import validate_atom_structure as v; "
            "print(json.dumps([HAVE_NUMBA, v(monk_ra(cycle_graph(5), 3)).ok]))")
    env = dict(os.environ, ALGWB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == [False, True]


def test_triangle_ok_is_symmetric():
    ok = triangle_ok(forb_table(3, 1))
    for p in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]:
        assert np.array_equal(ok, ok.transpose(p))
