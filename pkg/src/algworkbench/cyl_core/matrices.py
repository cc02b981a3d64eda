"""Basic matrices over a relation-algebra atom structure and cylindric bases.

``M ≡_{ij} N`` means: ``M`` and ``N`` agree on every entry ``(k, l)`` with
``{k, l}`` disjoint from ``{i, j}``; ``M ≡_i N`` likewise avoids ``i`` only.
A set of matrices is a cylindric basis when every ``≡_{ij}`` pair is joined
by some ``L`` with ``M ≡_i L ≡_j N``; the polyadic variant also asks for
closure under node transpositions.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from ..errors import BudgetExceeded, StructuralError
from ..kernels import extend_by_node
from ..ra_core import RaAtomStructure, validate_atom_structure
from .structure import CaAtomStructure

MATRIX_BUDGET = 2_000_000


@dataclass(eq=False)
class MatrixSet:
    n: int
    S: RaAtomStructure
    mats: np.ndarray  # (K, n, n)

    @property
    def size(self):
        return self.mats.shape[0]

    def keys(self):
        return [tuple(M.ravel().tolist()) for M in self.mats]

    def without(self, k):
        return MatrixSet(self.n, self.S, np.delete(self.mats, k, axis=0))


def triangle_table(S: RaAtomStructure):
    """``ok3[a, b, c]`` for a triangle with ``M_xy = a, M_xw = b, M_yw = c``,
    requiring every orientation of the triangle to be consistent."""
    cons = S.dense(limit=1024)
    cv = np.asarray(S.converse)
    N = S.size
    a, b, c = np.indices((N, N, N))
    ca, cb, cc = cv[a], cv[b], cv[c]
    return (cons[a, c, b] & cons[ca, b, c] & cons[b, cc, a] & cons[cb, a, c]
            & cons[c, cb, ca] & cons[cc, ca, cb])


def is_basic_matrix(S: RaAtomStructure, M):
    M = np.asarray(M)
    n = M.shape[0]
    for i in range(n):
        if M[i, i] not in S.identities:
            return False
        for j in range(n):
            if M[i, j] != S.conv(M[j, i]):
                return False
            for k in range(n):
                if not S.consistent(int(M[i, j]), int(M[j, k]), int(M[i, k])):
                    return False
    return True


def basic_matrices(S: RaAtomStructure, n, budget=MATRIX_BUDGET) -> MatrixSet:
    if n < 2:
        raise ValueError("parameter bound violated: n >= 2")
    rep = validate_atom_structure(S)
    if not rep.ok:
        raise StructuralError(f"atom structure fails {rep.laws()}")
    N = S.size
    if len(S.identities) == 1:
        e = next(iter(S.identities))
        ok3 = triangle_table(S)
        rows = np.zeros((1, 0), dtype=np.int64)
        for m_old in range(1, n):
            p, v = extend_by_node(rows, m_old, ok3, budget=budget)
            rows = np.concatenate([rows[p], v], axis=1)
        mats = np.full((rows.shape[0], n, n), e, dtype=np.int64)
        col = 0
        cv = np.asarray(S.converse)
        for y in range(1, n):
            for x in range(y):
                mats[:, x, y] = rows[:, col]
                mats[:, y, x] = cv[rows[:, col]]
                col += 1
        # degenerate triangles (repeated nodes) hold by the identity law; recheck a few
        return MatrixSet(n, S, mats)
    # several identities: plain backtracking over the upper triangle
    out = []
    cells = [(x, y) for y in range(n) for x in range(y + 1)]
    M = -np.ones((n, n), dtype=np.int64)

    def rec(k):
        if len(out) > budget:
            raise BudgetExceeded(f"more than {budget} basic matrices", len(out), budget)
        if k == len(cells):
            out.append(M.copy())
            return
        x, y = cells[k]
        for a in range(N):
            if x == y and a not in S.identities:
                continue
            M[x, y] = a
            M[y, x] = S.conv(a)
            if _partial_ok(S, M, x, y):
                rec(k + 1)
        M[x, y] = M[y, x] = -1

    rec(0)
    mats = np.array(out, dtype=np.int64).reshape(-1, n, n)
    return MatrixSet(n, S, mats)


def _partial_ok(S, M, x, y):
    n = M.shape[0]
    for i, j, k in product(range(n), repeat=3):
        if x not in (i, j, k) and y not in (i, j, k):
            continue
        a, b, c = M[i, j], M[j, k], M[i, k]
        if a < 0 or b < 0 or c < 0:
            continue
        if not S.consistent(int(a), int(b), int(c)):
            return False
    return True


# --------------------------------------------------------------------------


def _proj_ids(mats, avoid):
    """Class ids for 'agree on entries (k, l) with k, l not in avoid'."""
    n = mats.shape[1]
    keep = [(k, l) for k in range(n) for l in range(n) if k not in avoid and l not in avoid]
    if not keep:
        return np.zeros(mats.shape[0], dtype=np.int64)
    cols = np.stack([mats[:, k, l] for k, l in keep], axis=1)
    _, inv = np.unique(cols, axis=0, return_inverse=True)
    return inv.reshape(-1)


@dataclass
class BasisReport:
    ok: bool
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def is_cylindric_basis(ms: MatrixSet, polyadic=False, relation=None) -> BasisReport:
    """Amalgamation (and optionally transposition closure) over ``ms``.

    ``relation(M, N, avoid) -> bool`` replaces the default 'agree off avoid'
    reading; the check then falls back to a cubic scan.
    """
    mats = ms.mats
    n = ms.n
    if mats.shape[0] == 0:
        raise ValueError("empty matrix set")
    if relation is not None:
        return _basis_brute(mats, n, relation, polyadic)
    for i, j in permutations(range(n), 2):
        gij = _proj_ids(mats, (i, j))
        pi = _proj_ids(mats, (i,))
        pj = _proj_ids(mats, (j,))
        realised = set(zip(pi.tolist(), pj.tolist()))
        # within each ≡_ij group every (pi of M, pj of N) pair must be realised
        groups = {}
        first = {}
        for k, g in enumerate(gij.tolist()):
            A, B = groups.setdefault(g, (set(), set()))
            A.add(pi[k])
            B.add(pj[k])
            first.setdefault((g, "i", pi[k]), k)
            first.setdefault((g, "j", pj[k]), k)
        for g in sorted(groups):
            A, B = groups[g]
            for a in sorted(A):
                for b in sorted(B):
                    if (a, b) not in realised:
                        return BasisReport(False, {"i": i, "j": j, "M": mats[first[g, "i", a]].tolist(),
                                                   "N": mats[first[g, "j", b]].tolist()})
    if polyadic:
        w = _transposition_gap(mats, n)
        if w:
            return BasisReport(False, w)
    return BasisReport(True)


def _transposition_gap(mats, n):
    keys = {tuple(M.ravel().tolist()) for M in mats}
    for i, j in permutations(range(n), 2):
        if i > j:
            continue
        sigma = list(range(n))
        sigma[i], sigma[j] = j, i
        for M in mats:
            T = M[np.ix_(sigma, sigma)]
            if tuple(T.ravel().tolist()) not in keys:
                return {"transposition": [i, j], "M": M.tolist()}
    return None


def agree_off(M, N, avoid):
    n = M.shape[0]
    return all(M[k, l] == N[k, l] for k in range(n) for l in range(n) if k not in avoid and l not in avoid)


def _basis_brute(mats, n, relation, polyadic):
    K = mats.shape[0]
    for i, j in permutations(range(n), 2):
        for a in range(K):
            for b in range(K):
                if not relation(mats[a], mats[b], (i, j)):
                    continue
                if not any(relation(mats[a], mats[c], (i,)) and relation(mats[c], mats[b], (j,))
                           for c in range(K)):
                    return BasisReport(False, {"i": i, "j": j, "M": mats[a].tolist(), "N": mats[b].tolist()})
    if polyadic:
        w = _transposition_gap(mats, n)
        if w:
            return BasisReport(False, w)
    return BasisReport(True)


def required_amalgams(ms: MatrixSet):
    """Indices of matrices that are the only amalgam for some pair of other matrices."""
    mats = ms.mats
    n = ms.n
    out = set()
    for i, j in permutations(range(n), 2):
        gij = _proj_ids(mats, (i, j))
        pi = _proj_ids(mats, (i,))
        pj = _proj_ids(mats, (j,))
        count = {}
        for k in range(len(mats)):
            count.setdefault((pi[k], pj[k]), []).append(k)
        for (a, b), ks in count.items():
            if len(ks) != 1:
                continue
            L = ks[0]
            g = gij[L]
            # need some M != L with pi = a and N != L with pj = b in L's group
            hasM = any(pi[k] == a and k != L for k in np.nonzero(gij == g)[0])
            hasN = any(pj[k] == b and k != L for k in np.nonzero(gij == g)[0])
            if hasM and hasN:
                out.add(int(L))
    return sorted(out)


def matrices_ca(ms: MatrixSet) -> CaAtomStructure:
    """Atom frame whose atoms are the matrices; transpositions permute nodes."""
    mats = ms.mats
    n = ms.n
    K = mats.shape[0]
    classes = np.stack([_proj_ids(mats, (i,)) for i in range(n)])
    ids = np.array(sorted(ms.S.identities))
    diag = np.zeros((n, n, K), dtype=bool)
    for i in range(n):
        for j in range(n):
            diag[i, j] = np.isin(mats[:, i, j], ids)
    index = {tuple(M.ravel().tolist()): k for k, M in enumerate(mats)}
    swaps = np.zeros((n, n, K), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            sigma = list(range(n))
            sigma[i], sigma[j] = sigma[j], sigma[i]
            for k, M in enumerate(mats):
                key = tuple(M[np.ix_(sigma, sigma)].ravel().tolist())
                if key not in index:
                    raise StructuralError("matrix set is not closed under transpositions")
                swaps[i, j, k] = index[key]
    names = tuple("[" + ";".join(",".join(ms.S.names[a] for a in row) for row in M) + "]" for M in mats)
    return CaAtomStructure(n, names, classes, diag, swaps, [M.tolist() for M in mats],
                           {"construction": "basic-matrices", "n": n})
