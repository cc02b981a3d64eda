"""Finite cylindric/polyadic atom structures and their complex algebras.

A frame of dimension ``n`` on atoms ``0..N-1`` is stored as

* ``classes[i, a]``  class id of ``a`` under ``≡_i`` (so ``c_i`` saturates),
* ``diag[i, j, a]``  membership of ``a`` in ``d_ij``,
* ``swaps[i, j, a]`` the atom ``s_[i,j]`` sends ``a`` to (an involution).

Substitutions act on atom sets by preimage, ``s_[i,j] X = {a : swaps[i,j,a] in X}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np

from ..errors import BudgetExceeded, StructuralError

SCHEMA_VERSION = 1
CARRIER_BUDGET = 16


@dataclass(eq=False)
class CaAtomStructure:
    dim: int
    names: tuple
    classes: np.ndarray
    diag: np.ndarray
    swaps: np.ndarray
    payload: list | None = None  # per-atom data (matrices, graphs, tuples)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n, N = self.dim, len(self.names)
        self.classes = np.asarray(self.classes, dtype=np.int64)
        self.diag = np.asarray(self.diag, dtype=bool)
        self.swaps = np.asarray(self.swaps, dtype=np.int64)
        if self.classes.shape != (n, N):
            raise StructuralError(f"classes has shape {self.classes.shape}, expected {(n, N)}")
        if self.diag.shape != (n, n, N):
            raise StructuralError(f"diag has shape {self.diag.shape}, expected {(n, n, N)}")
        if self.swaps.shape != (n, n, N):
            raise StructuralError(f"swaps has shape {self.swaps.shape}, expected {(n, n, N)}")
        if N and (self.swaps.min() < 0 or self.swaps.max() >= N):
            raise StructuralError("transposition map leaves the atom range")

    @property
    def size(self):
        return len(self.names)

    def equiv(self, i, a, b):
        return self.classes[i, a] == self.classes[i, b]

    def restrict(self, keep):
        """Substructure on the atoms flagged in ``keep`` (transpositions must stay inside)."""
        keep = np.asarray(keep, dtype=bool)
        ids = np.nonzero(keep)[0]
        new = -np.ones(self.size, dtype=np.int64)
        new[ids] = np.arange(len(ids))
        sw = new[self.swaps[:, :, ids]]
        if (sw < 0).any():
            raise StructuralError("restriction is not closed under transpositions")
        payload = [self.payload[a] for a in ids] if self.payload is not None else None
        return CaAtomStructure(self.dim, tuple(self.names[a] for a in ids), self.classes[:, ids],
                               self.diag[:, :, ids], sw, payload, dict(self.meta))


def frame_from_functions(n, atoms, key, in_diag, swap, names=None, payload=None, meta=None):
    """Build a frame from per-atom callables.

    ``key(a, i)`` is any hashable describing ``a`` up to ``≡_i``; ``in_diag(a, i, j)``
    and ``swap(a, i, j) -> atom index`` give the rest.
    """
    N = len(atoms)
    classes = np.zeros((n, N), dtype=np.int64)
    for i in range(n):
        ids = {}
        for a in range(N):
            classes[i, a] = ids.setdefault(key(a, i), len(ids))
    diag = np.zeros((n, n, N), dtype=bool)
    swaps = np.zeros((n, n, N), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            for a in range(N):
                diag[i, j, a] = i == j or in_diag(a, i, j)
                swaps[i, j, a] = a if i == j else swap(a, i, j)
    names = tuple(names) if names is not None else tuple(str(x) for x in atoms)
    return CaAtomStructure(n, names, classes, diag, swaps, payload, meta or {})


# --------------------------------------------------------------------------
# concrete frames


def set_algebra_atoms(base_size, n, points=None):
    """Atoms are the points of ``base^n`` (or of ``points``); ``≡_i`` forgets coordinate i.

    ``points`` must be closed under permuting coordinates; restricting to it gives
    the atom frame of a relativized set algebra.
    """
    pts = sorted(set(map(tuple, points))) if points is not None else list(product(range(base_size), repeat=n))
    index = {p: k for k, p in enumerate(pts)}

    def swap(a, i, j):
        p = list(pts[a])
        p[i], p[j] = p[j], p[i]
        return index[tuple(p)]

    return frame_from_functions(
        n, pts,
        key=lambda a, i: pts[a][:i] + pts[a][i + 1:],
        in_diag=lambda a, i, j: pts[a][i] == pts[a][j],
        swap=swap,
        names=["(" + ",".join(map(str, p)) + ")" for p in pts],
        payload=pts,
        meta={"construction": "set-algebra", "base": base_size, "relativized": points is not None},
    )


def hirsch_ca(H):
    """Atom frame of C(m, n, r): ``≡_x`` agrees off x, ``d_xy`` has Id at (x, y)."""
    from ..constructions.hirsch import label_name

    m = H.m
    N = H.size
    classes = np.stack([H.class_ids(x) for x in range(m)])
    diag = np.stack([np.stack([H.diag(x, y) for y in range(m)]) for x in range(m)])
    swaps = np.zeros((m, m, N), dtype=np.int64)
    for x in range(m):
        for y in range(m):
            if x == y:
                swaps[x, y] = np.arange(N)
            else:
                tau = [y if v == x else x if v == y else v for v in range(m)]
                swaps[x, y] = H.tau_map(tau)
    names = []
    for a in range(N):
        M = H.matrix(a)
        names.append("[" + ",".join(label_name(H.labels[M[x, y]]) for y in range(1, m) for x in range(y)) + "]")
    p = H.params
    return CaAtomStructure(m, tuple(names), classes, diag, swaps, None,
                           {"construction": "hirsch", "m": p.m, "n": p.n, "r": p.r})


# --------------------------------------------------------------------------
# complex algebra


class ComplexCa:
    """Operations on atom sets (boolean masks)."""

    def __init__(self, F: CaAtomStructure, budget=CARRIER_BUDGET):
        self.F = F
        self.budget = budget
        self.top = np.ones(F.size, dtype=bool)
        self.bottom = np.zeros(F.size, dtype=bool)

    def mask(self, atoms):
        X = self.bottom.copy()
        X[list(atoms)] = True
        return X

    def cyl(self, i, X):
        cls = self.F.classes[i]
        return np.isin(cls, cls[np.asarray(X, dtype=bool)])

    def d(self, i, j):
        return self.F.diag[i, j].copy()

    def s(self, i, j, X):
        return np.asarray(X, dtype=bool)[self.F.swaps[i, j]]

    def sub(self, i, j, X):
        """``s_i^j X = c_i(d_ij . X)`` (identity when i = j)."""
        X = np.asarray(X, dtype=bool)
        if i == j:
            return X.copy()
        return self.cyl(i, self.d(i, j) & X)

    def elements(self):
        N = self.F.size
        if N > self.budget:
            raise BudgetExceeded(f"carrier has 2^{N} elements", N, self.budget)
        for bits in range(1 << N):
            yield np.array([(bits >> a) & 1 for a in range(N)], dtype=bool)


def complex_ca(F, budget=CARRIER_BUDGET):
    return ComplexCa(F, budget)


# --------------------------------------------------------------------------
# axiom check


SIGNATURES = ("Sc", "CA", "PA", "PEA")


@dataclass
class AxiomReport:
    signature: str
    results: dict  # axiom name -> witness or None
    commutativity: object = None  # witness or None

    @property
    def ok(self):
        return all(w is None for w in self.results.values())

    @property
    def ok_with_commutativity(self):
        return self.ok and self.commutativity is None

    def failed(self):
        return sorted(k for k, w in self.results.items() if w is not None)

    def to_json_dict(self):
        conv = lambda w: None if w is None else json.loads(json.dumps(w, default=int))
        return {"signature": self.signature, "ok": self.ok,
                "axioms": {k: conv(w) for k, w in sorted(self.results.items())},
                "commutativity": conv(self.commutativity)}


def _first(mask):
    idx = np.nonzero(mask)[0]
    return None if len(idx) == 0 else int(idx[0])


def _same_partition(p, q):
    """True iff class ids ``p`` and ``q`` induce the same partition."""
    pairs = np.unique(np.stack([p, q], axis=1), axis=0)
    return len(pairs) == len(np.unique(p)) == len(np.unique(q))


def _partition_witness(p, q):
    # two atoms together under one partition and apart under the other
    order = np.lexsort((q, p))
    ps, qs = p[order], q[order]
    bad = (ps[1:] == ps[:-1]) & (qs[1:] != qs[:-1])
    k = _first(bad)
    if k is not None:
        return [int(order[k]), int(order[k + 1])]
    order = np.lexsort((p, q))
    ps, qs = p[order], q[order]
    bad = (qs[1:] == qs[:-1]) & (ps[1:] != ps[:-1])
    k = _first(bad)
    return None if k is None else [int(order[k]), int(order[k + 1])]


def commutativity_violation(F: CaAtomStructure, i, j):
    """First ``(f, h)`` with ``h`` in exactly one of ``c_i c_j {f}``, ``c_j c_i {f}``.

    ``h in c_i c_j {f}`` iff some g has ``g ≡_j f`` and ``g ≡_i h``; with the set U of
    realised pairs ``(cls_i g, cls_j g)`` this is ``(cls_i h, cls_j f) in U``.
    """
    ci, cj = F.classes[i], F.classes[j]
    U, rep = np.unique(np.stack([ci, cj], axis=1), axis=0, return_index=True)
    B = np.zeros((ci.max() + 1, cj.max() + 1), dtype=bool)
    B[U[:, 0], U[:, 1]] = True
    ui, uj = U[:, 0], U[:, 1]
    step = max(1, (1 << 22) // max(1, len(U)))
    for start in range(0, len(U), step):
        # rows: u plays f's class pair; columns: v plays h's
        su, sj = ui[start:start + step], uj[start:start + step]
        lhs = B[ui[None, :], sj[:, None]]  # (cls_i h, cls_j f) realised
        rhs = B[su[:, None], uj[None, :]]  # (cls_i f, cls_j h) realised
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            u, v = bad[0]
            return {"i": i, "j": j, "f": int(rep[start + u]), "h": int(rep[v])}
    return None


def ca_axiom_check(F: CaAtomStructure, signature="PEA", check_commutativity=True) -> AxiomReport:
    """Atom-wise check of the equational axioms of ``signature``.

    Every operation is additive, so each axiom reduces to a statement about
    single atoms and the frame relations; commutativity of cylindrifiers is
    reported separately.
    """
    if signature not in SIGNATURES:
        raise ValueError(f"unknown signature {signature!r}")
    n, N = F.dim, F.size
    A = complex_ca(F)
    res = {}
    ids = np.arange(N)

    # cylindrifiers: c_i X is the union of the classes X meets, so c_i is a
    # closure operator as soon as every atom carries a valid class id
    for i in range(n):
        a = _first(F.classes[i] < 0)
        res[f"c{i}-closure"] = None if a is None else {"i": i, "atom": a}
    res["c-normal"] = None if not any(A.cyl(i, A.bottom).any() for i in range(n)) else {"reason": "c_i 0 != 0"}

    if signature in ("CA", "PEA"):
        for i in range(n):
            k = _first(~F.diag[i, i])
            res[f"d{i}{i}-unit"] = None if k is None else {"atom": k}
        for i, j in combinations(range(n), 2):
            k = _first(F.diag[i, j] != F.diag[j, i])
            res[f"d{i}{j}-symmetric"] = None if k is None else {"atom": k}
        for i, j in permutations(range(n), 2):
            for k in range(n):
                if k in (i, j):
                    continue
                got = A.cyl(k, F.diag[i, k] & F.diag[k, j])
                a = _first(got != F.diag[i, j])
                res[f"c{k}(d{i}{k}.d{k}{j})=d{i}{j}"] = None if a is None else {"atom": a}
            # each i-class meets d_ij in at most one atom
            cls = F.classes[i][F.diag[i, j]]
            u, cnt = np.unique(cls, return_counts=True)
            bad = u[cnt > 1]
            res[f"c{i}-d{i}{j}-functional"] = None if len(bad) == 0 else {
                "atoms": [int(a) for a in ids[F.diag[i, j] & (F.classes[i] == bad[0])][:2]]}

    if signature in ("PA", "PEA"):
        for i in range(n):
            a = _first(F.swaps[i, i] != ids)
            res[f"s[{i},{i}]-identity"] = None if a is None else {"atom": a}
        for i, j in combinations(range(n), 2):
            t = F.swaps[i, j]
            a = _first(F.swaps[j, i] != t)
            res[f"s[{i},{j}]-symmetric"] = None if a is None else {"atom": a}
            a = _first(t[t] != ids)
            res[f"s[{i},{j}]-involution"] = None if a is None else {"atom": a}
            # s c_i = c_j s: the partition by cls_i o t equals the partition by cls_j
            for (p, q) in ((i, j), (j, i)):
                ok = _same_partition(F.classes[p][t], F.classes[q])
                res[f"s[{i},{j}]c{p}=c{q}s[{i},{j}]"] = None if ok else {
                    "atoms": _partition_witness(F.classes[p][t], F.classes[q])}
            for k in range(n):
                if k in (i, j):
                    continue
                ok = _same_partition(F.classes[k][t], F.classes[k])
                res[f"s[{i},{j}]c{k}=c{k}s[{i},{j}]"] = None if ok else {
                    "atoms": _partition_witness(F.classes[k][t], F.classes[k])}
        for i, j, k in permutations(range(n), 3):
            lhs = F.swaps[i, j][F.swaps[j, k][F.swaps[i, j]]]
            a = _first(lhs != F.swaps[i, k])
            res[f"s[{i},{j}]s[{j},{k}]s[{i},{j}]=s[{i},{k}]"] = None if a is None else {"atom": a}

    if signature == "PEA":
        for i, j in combinations(range(n), 2):
            t = F.swaps[i, j]
            sig = list(range(n))
            sig[i], sig[j] = j, i
            w = None
            for k in range(n):
                for l in range(n):
                    a = _first(F.diag[k, l][t] != F.diag[sig[k], sig[l]])
                    if a is not None:
                        w = {"k": k, "l": l, "atom": a}
                        break
                if w:
                    break
            res[f"s[{i},{j}]-diagonals"] = w

    if signature == "Sc":
        for i, j in permutations(range(n), 2):
            # the sets s_i^j {a} partition the atoms
            cover = np.zeros(N, dtype=np.int64)
            for a in np.nonzero(F.diag[i, j])[0]:
                cover += A.cyl(i, A.mask([a]))
            a = _first(cover != 1)
            res[f"s{i}^{j}-boolean"] = None if a is None else {"atom": a}
            w = None
            for a in range(N):
                X = A.mask([a])
                if (A.sub(i, j, A.cyl(i, X)) != A.cyl(i, X)).any() or (A.cyl(i, A.sub(i, j, X)) != A.sub(i, j, X)).any():
                    w = {"atom": a}
                    break
                for k in range(n):
                    if k not in (i, j) and (A.sub(i, j, A.cyl(k, X)) != A.cyl(k, A.sub(i, j, X))).any():
                        w = {"atom": a, "k": k}
                        break
                if w:
                    break
            res[f"s{i}^{j}-cylindrifiers"] = w

    comm = None
    if check_commutativity:
        for i, j in combinations(range(n), 2):
            comm = commutativity_violation(F, i, j)
            if comm:
                break
    return AxiomReport(signature, res, comm)


# --------------------------------------------------------------------------
# JSON


def to_json_dict(F: CaAtomStructure):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ca_atom_structure",
        "dim": F.dim,
        "atoms": list(F.names),
        "classes": F.classes.tolist(),
        "diag": F.diag.astype(int).tolist(),
        "swaps": F.swaps.tolist(),
        "meta": F.meta,
    }
    return doc


def from_json_dict(doc):
    try:
        return CaAtomStructure(doc["dim"], tuple(doc["atoms"]), np.array(doc["classes"]),
                               np.array(doc["diag"], dtype=bool), np.array(doc["swaps"]),
                               None, doc.get("meta", {}))
    except KeyError as e:
        raise StructuralError(f"CA document lacks field {e}") from None


def dumps(F):
    return json.dumps(to_json_dict(F), sort_keys=True)


def loads(text):
    return from_json_dict(json.loads(text))
