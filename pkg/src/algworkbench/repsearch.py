"""Backtracking search for square representations of small finite RAs and CAs.

A relation algebra representation on base ``B`` labels every ordered pair with
an atom; a CA_n representation labels every n-tuple. Search results are
checked by :func:`verify_representation`, which shares no code with the
search: it re-reads the atom structure and loops over the whole base.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cyl_core.structure import CaAtomStructure
from .cyl_core.structure import dumps as ca_dumps
from .errors import BudgetExceeded, StructuralError
from .ra_core import RaAtomStructure
from .ra_core import dumps as ra_dumps

SCHEMA_VERSION = 1
SEARCH_BUDGET = 2_000_000
_EXHAUSTED = {}  # (structure hash, base) -> True when no representation exists on that base


@dataclass
class Representation:
    kind: str  # "ra" or "ca"
    base: int
    labels: dict  # pair or n-tuple -> atom
    n: int = 2

    def to_json_dict(self):
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind, "base": self.base, "n": self.n,
                "labels": [[list(x), int(a)] for x, a in sorted(self.labels.items())]}

    @classmethod
    def from_json_dict(cls, d):
        return cls(d["kind"], d["base"], {tuple(x): a for x, a in d["labels"]}, d.get("n", 2))

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass
class SearchReport:
    found: Representation | None
    max_base: int
    tried: list = field(default_factory=list)  # bases exhausted without success
    nodes: int = 0

    @property
    def ok(self):
        return self.found is not None

    def message(self):
        if self.found is not None:
            return f"representation on base {self.found.base}"
        return f"no representation with base <= {self.max_base}"


def structure_hash(S):
    text = ra_dumps(S) if isinstance(S, RaAtomStructure) else ca_dumps(S)
    return hashlib.sha256(text.encode()).hexdigest()


# --------------------------------------------------------------------------
# relation algebras


def find_square_representation(S: RaAtomStructure, max_base=8, budget=SEARCH_BUDGET) -> SearchReport:
    cons = np.asarray(S.dense(), dtype=bool)
    conv = [S.conv(a) for a in S.atoms()]
    ids = sorted(S.identities)
    div = [a for a in S.atoms() if a not in S.identities]
    h = structure_hash(S)
    rep = SearchReport(None, max_base)
    count = [0]
    for B in range(1, max_base + 1):
        if _EXHAUSTED.get((h, B)):
            rep.tried.append(B)
            continue
        pairs = [(x, y) for x in range(B) for y in range(x + 1, B)]
        lab = {}

        def fits(x, y, a):
            for z in range(B):
                if z in (x, y):
                    continue
                if (x, z) in lab and (z, y) in lab and not cons[lab[x, z], lab[z, y], a]:
                    return False
                if (y, z) in lab and (z, x) in lab and not cons[lab[y, z], lab[z, x], conv[a]]:
                    return False
                if (x, z) in lab and (y, z) in lab and not cons[a, lab[y, z], lab[x, z]]:
                    return False
            return True

        def diag_rec(x):
            if x == B:
                yield from pair_rec(0)
                return
            for e in ids:
                lab[x, x] = e
                if all(cons[e, e, e] for _ in [0]):
                    yield from diag_rec(x + 1)
            lab.pop((x, x), None)

        def pair_rec(k):
            count[0] += 1
            if count[0] > budget:
                raise BudgetExceeded(f"search passed {budget} nodes", count[0], budget)
            if k == len(pairs):
                yield dict(lab)
                return
            x, y = pairs[k]
            for a in div:
                if not (cons[lab[x, x], a, a] and cons[a, lab[y, y], a]):
                    continue
                if fits(x, y, a):
                    lab[x, y], lab[y, x] = a, conv[a]
                    yield from pair_rec(k + 1)
                    del lab[x, y], lab[y, x]

        for cand in diag_rec(0):
            R = Representation("ra", B, cand)
            if _ra_saturated(S, cons, R):
                rep.found = R
                rep.nodes = count[0]
                return rep
        _EXHAUSTED[h, B] = True
        rep.tried.append(B)
    rep.nodes = count[0]
    return rep


def _ra_saturated(S, cons, R):
    B = R.base
    seen = set(R.labels.values())
    if len(seen) != S.size:
        return False
    for (x, y), c in R.labels.items():
        for a, b in zip(*np.nonzero(cons[:, :, c])):
            if not any(R.labels[x, z] == a and R.labels[z, y] == b for z in range(B)):
                return False
    return True


def pad_representation(S: RaAtomStructure, R: Representation):
    """Try to add a point duplicating an existing one; returns a verified representation or None."""
    B = R.base
    for p in range(B):
        for d in range(S.size):
            if d in S.identities:
                continue
            lab = dict(R.labels)
            lab[B, B] = R.labels[p, p]
            for y in range(B):
                if y != p:
                    lab[B, y] = R.labels[p, y]
                    lab[y, B] = R.labels[y, p]
            lab[p, B], lab[B, p] = d, S.conv(d)
            cand = Representation("ra", B + 1, lab)
            if verify_representation(S, cand)[0]:
                return cand
    return None


# --------------------------------------------------------------------------
# cylindric atom structures


def _check_diagonals(F: CaAtomStructure):
    n = F.dim
    for a in range(F.size):
        for i in range(n):
            if not F.diag[i, i, a]:
                return f"atom {F.names[a]} is outside d_{i}{i}"
            for j in range(n):
                if F.diag[i, j, a] != F.diag[j, i, a]:
                    return f"d_{i}{j} and d_{j}{i} differ at atom {F.names[a]}"
                for k in range(n):
                    if F.diag[i, j, a] and F.diag[j, k, a] and not F.diag[i, k, a]:
                        return f"diagonals of atom {F.names[a]} are not transitive"
    return None


def find_ca_representation(F: CaAtomStructure, n=None, max_base=4, budget=SEARCH_BUDGET) -> SearchReport:
    from .games.network import Extender

    n = F.dim if n is None else n
    if n != F.dim:
        raise StructuralError(f"structure has dimension {F.dim}, asked for {n}")
    why = _check_diagonals(F)
    if why:
        raise StructuralError(f"refused: {why}")
    ext = Extender(F)
    h = structure_hash(F)
    rep = SearchReport(None, max_base)
    count = 0
    for B in range(1, max_base + 1):
        if _EXHAUSTED.get((h, B)):
            rep.tried.append(B)
            continue
        for net in ext.complete({}, range(B)):
            count += 1
            if count > budget:
                raise BudgetExceeded(f"search passed {budget} candidates", count, budget)
            R = Representation("ca", B, net.as_dict(), n)
            if _ca_saturated(F, R):
                rep.found = R
                rep.nodes = count
                return rep
        _EXHAUSTED[h, B] = True
        rep.tried.append(B)
    rep.nodes = count
    return rep


def _ca_saturated(F, R):
    if len(set(R.labels.values())) != F.size:
        return False
    n = R.n
    for x, a in R.labels.items():
        for i in range(n):
            for j in range(n):
                if F.diag[i, j, a] and x[i] != x[j]:
                    return False
            have = {R.labels[x[:i] + (v,) + x[i + 1:]] for v in range(R.base)}
            want = np.nonzero(F.classes[i] == F.classes[i, a])[0]
            if any(int(b) not in have for b in want):
                return False
    return True


# --------------------------------------------------------------------------
# verification (independent of the search)


def verify_representation(S, R: Representation):
    """Full check of every representation condition; returns (ok, first violation or None)."""
    if isinstance(S, RaAtomStructure):
        if R.kind != "ra":
            raise StructuralError("shape mismatch: RA structure with a CA representation")
        return _verify_ra(S, R)
    if R.kind != "ca" or R.n != S.dim:
        raise StructuralError("shape mismatch: CA structure needs an n-tuple labelling")
    return _verify_ca(S, R)


def _verify_ra(S: RaAtomStructure, R: Representation):
    B = R.base
    L = R.labels
    pts = range(B)
    if set(L) != {(x, y) for x in pts for y in pts}:
        return False, ("domain",)
    for x in pts:
        for y in pts:
            a = L[x, y]
            if not 0 <= a < S.size:
                return False, ("unknown-atom", (x, y))
            if x == y and a not in S.identities:
                return False, ("identity", (x, y))
            if x != y and a in S.identities:
                return False, ("identity", (x, y))
            if L[y, x] != S.conv(a):
                return False, ("converse", (x, y))
    for x in pts:
        for y in pts:
            for z in pts:
                if not S.consistent(L[x, y], L[y, z], L[x, z]):
                    return False, ("triangle", (x, y, z))
    for x in pts:
        for y in pts:
            c = L[x, y]
            for a in range(S.size):
                for b in range(S.size):
                    if S.consistent(a, b, c) and not any(L[x, z] == a and L[z, y] == b for z in pts):
                        return False, ("witness", (x, y, a, b))
    missing = set(range(S.size)) - set(L.values())
    if missing:
        return False, ("unrealised-atom", min(missing))
    return True, None


def _verify_ca(F: CaAtomStructure, R: Representation):
    B, n, L = R.base, R.n, R.labels
    tuples = list(product(range(B), repeat=n))
    if set(L) != set(tuples):
        return False, ("domain",)
    for x in tuples:
        a = L[x]
        if not 0 <= a < F.size:
            return False, ("unknown-atom", x)
        for i in range(n):
            for j in range(n):
                if bool(F.diag[i, j, a]) != (x[i] == x[j]):
                    return False, ("diagonal", x, i, j)
                if i < j:
                    y = list(x)
                    y[i], y[j] = y[j], y[i]
                    if L[tuple(y)] != F.swaps[i, j, a]:
                        return False, ("transposition", x, i, j)
        for i in range(n):
            line = [L[x[:i] + (v,) + x[i + 1:]] for v in range(B)]
            for b in line:
                if F.classes[i, b] != F.classes[i, a]:
                    return False, ("cylindrifier", x, i)
            for b in range(F.size):
                if F.classes[i, b] == F.classes[i, a] and b not in line:
                    return False, ("witness", x, i, b)
    missing = set(range(F.size)) - set(L.values())
    if missing:
        return False, ("unrealised-atom", min(missing))
    return True, None


def mutations(S, R: Representation):
    """Every representation differing from ``R`` at one edge (RA: one pair with its converse; CA: one tuple)."""
    if R.kind == "ra":
        for x in range(R.base):
            for y in range(x, R.base):
                for a in range(S.size):
                    if a == R.labels[x, y]:
                        continue
                    lab = dict(R.labels)
                    lab[x, y] = a
                    lab[y, x] = S.conv(a)
                    yield Representation("ra", R.base, lab)
    else:
        for x in sorted(R.labels):
            for a in range(S.size):
                if a != R.labels[x]:
                    lab = dict(R.labels)
                    lab[x] = a
                    yield Representation("ca", R.base, lab, R.n)
