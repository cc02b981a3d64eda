"""Atomic networks over a finite cylindric/polyadic atom frame.

A network on nodes ``Δ`` labels every tuple in ``Δ^n`` with an atom and must
satisfy, literally against the frame relations:

* ``N(x) in d_ij`` whenever ``x_i = x_j``,
* ``N(x[i -> d]) ≡_i N(x)``,
* ``swaps[i, j, N(x ∘ [i, j])] = N(x)`` (that is ``N(x∘[i,j]) ≤ s_[i,j] N(x)``).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from ..cyl_core.structure import CaAtomStructure

CANON_PERM_LIMIT = 6


@dataclass(frozen=True)
class Network:
    n: int
    nodes: tuple  # sorted node names
    labels: tuple  # atom per tuple of product(nodes, repeat=n), in that order

    def tuples(self):
        return product(self.nodes, repeat=self.n)

    def as_dict(self):
        return dict(zip(self.tuples(), self.labels))

    def __call__(self, x):
        pos = {v: k for k, v in enumerate(self.nodes)}
        s = len(self.nodes)
        idx = 0
        for v in x:
            idx = idx * s + pos[v]
        return self.labels[idx]

    @classmethod
    def from_dict(cls, n, nodes, labels: dict):
        nodes = tuple(sorted(nodes))
        return cls(n, nodes, tuple(int(labels[x]) for x in product(nodes, repeat=n)))

    def restrict(self, keep):
        keep = tuple(sorted(keep))
        d = self.as_dict()
        return Network.from_dict(self.n, keep, {x: d[x] for x in product(keep, repeat=self.n)})

    def rename(self, theta: dict):
        """Relabel nodes by an injective map."""
        d = self.as_dict()
        return Network.from_dict(self.n, [theta[v] for v in self.nodes],
                                 {tuple(theta[v] for v in x): a for x, a in d.items()})

    def to_json_dict(self):
        return {"n": self.n, "nodes": list(self.nodes), "labels": list(self.labels)}

    @classmethod
    def from_json_dict(cls, d):
        return cls(d["n"], tuple(d["nodes"]), tuple(d["labels"]))


def tuple_at(face, l, v):
    return tuple(face[:l]) + (v,) + tuple(face[l:])


def network_violations(F: CaAtomStructure, N: Network, limit=1):
    """Literal check of the three network conditions; returns up to ``limit`` witnesses."""
    out = []
    d = N.as_dict()
    n = N.n
    for x, a in d.items():
        for i in range(n):
            for j in range(n):
                if i != j and x[i] == x[j] and not F.diag[i, j, a]:
                    out.append(("diagonal", x, i, j))
            for v in N.nodes:
                y = x[:i] + (v,) + x[i + 1:]
                if F.classes[i, d[y]] != F.classes[i, a]:
                    out.append(("cylindrifier", x, i, v))
                    break
            for j in range(i + 1, n):
                y = list(x)
                y[i], y[j] = y[j], y[i]
                if F.swaps[i, j, d[tuple(y)]] != a:
                    out.append(("transposition", x, i, j))
        if len(out) >= limit:
            return out[:limit]
    return out


def is_network(F, N):
    return not network_violations(F, N)


# --------------------------------------------------------------------------
# extension search (used by the solver)


class Extender:
    """Enumerate networks on ``old nodes + new nodes`` extending a given one."""

    def __init__(self, F: CaAtomStructure):
        self.F = F
        self.n = F.dim
        self.N = F.size
        self.all_atoms = np.arange(self.N)

    def extensions(self, base: Network | None, new_nodes, fixed=None, limit=None):
        old = base.as_dict() if base is not None else {}
        old_nodes = base.nodes if base is not None else ()
        return self.complete(old, set(old_nodes) | set(new_nodes), fixed, limit)

    def complete(self, partial: dict, nodes, fixed=None, limit=None):
        """Networks on ``nodes`` agreeing with ``partial`` (assumed consistent) and ``fixed``."""
        n = self.n
        F = self.F
        nodes = tuple(sorted(nodes))
        todo = [x for x in product(nodes, repeat=n) if x not in partial]
        fixed = fixed or {}
        lab = dict(partial)
        # static diagonal masks
        static = []
        for x in todo:
            m = np.ones(self.N, dtype=bool)
            for i in range(n):
                for j in range(n):
                    if i != j and x[i] == x[j]:
                        m &= F.diag[i, j]
            if x in fixed:
                keep = np.zeros(self.N, dtype=bool)
                keep[fixed[x]] = True
                m &= keep
            static.append(m)
        found = [0]

        def candidates(k):
            x = todo[k]
            m = static[k].copy()
            for i in range(n):
                for v in nodes:
                    if v == x[i]:
                        continue
                    y = x[:i] + (v,) + x[i + 1:]
                    b = lab.get(y)
                    if b is not None:
                        m &= F.classes[i] == F.classes[i, b]
                        break
                for j in range(i + 1, n):
                    y = list(x)
                    y[i], y[j] = y[j], y[i]
                    b = lab.get(tuple(y))
                    if b is not None:
                        # a must satisfy swaps[i,j,b] == a
                        keep = np.zeros(self.N, dtype=bool)
                        keep[F.swaps[i, j, b]] = True
                        m &= keep
            # the tuple itself under a transposition of equal entries
            for i in range(n):
                for j in range(i + 1, n):
                    if x[i] == x[j]:
                        m &= F.swaps[i, j] == self.all_atoms
            return np.nonzero(m)[0]

        def rec(k):
            if k == len(todo):
                found[0] += 1
                yield Network.from_dict(n, nodes, lab)
                return
            x = todo[k]
            for a in candidates(k):
                lab[x] = int(a)
                yield from rec(k + 1)
                if limit is not None and found[0] >= limit:
                    break
            lab.pop(x, None)

        yield from rec(0)


# --------------------------------------------------------------------------
# canonical keys


def canonical_key(N: Network):
    """Least label sequence over node renamings onto 0..s-1 (literal order above the limit)."""
    s = len(N.nodes)
    d = N.as_dict()
    if s > CANON_PERM_LIMIT:
        return (s, tuple(d[x] for x in product(N.nodes, repeat=N.n)))
    best = None
    for perm in permutations(range(s)):
        inv = [None] * s
        for k, p in enumerate(perm):
            inv[p] = N.nodes[k]
        seq = tuple(d[tuple(inv[p] for p in y)] for y in product(range(s), repeat=N.n))
        if best is None or seq < best:
            best = seq
    return (s, best)
