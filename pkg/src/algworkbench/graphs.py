"""Simple graphs, linear-order truncations, exact chromatic number and girth."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, StructuralError

CHROMATIC_VERTEX_BUDGET = 20


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset  # pairs (i, j) with i < j

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise StructuralError(f"bad edge {(i, j)} for {self.n} vertices")

    @classmethod
    def from_edges(cls, n, edges):
        es = set()
        for i, j in edges:
            if i == j:
                raise StructuralError(f"loop at vertex {i}")
            es.add((min(i, j), max(i, j)))
        return cls(n, frozenset(es))

    def adjacent(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def neighbours(self):
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def to_json_dict(self):
        return {"vertices": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json_dict(cls, doc):
        return cls.from_edges(doc["vertices"], [tuple(e) for e in doc["edges"]])


def complete_graph(k):
    _need(k >= 1, "k >= 1")
    return SimpleGraph.from_edges(k, combinations(range(k), 2))


def disjoint_cliques(sizes):
    _need(all(s >= 1 for s in sizes) and sizes, "clique sizes >= 1")
    edges, base = [], 0
    for s in sizes:
        edges += [(base + i, base + j) for i, j in combinations(range(s), 2)]
        base += s
    return SimpleGraph.from_edges(base, edges)


def band_graph(m, N):
    """Vertices 0..m-1 with i ~ j iff 0 < |i-j| < N."""
    _need(m >= 1, "m >= 1")
    return SimpleGraph.from_edges(m, [(i, j) for i, j in combinations(range(m), 2) if 0 < j - i < N])


def cycle_graph(k):
    _need(k >= 3, "k >= 3")
    return SimpleGraph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k):
    _need(k >= 1, "k >= 1")
    return SimpleGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def seeded_random_graph(m, p, seed):
    _need(m >= 1, "m >= 1")
    _need(0.0 <= p <= 1.0, "0 <= p <= 1")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(m), 2))
    draws = rng.random(len(pairs))
    return SimpleGraph.from_edges(m, [e for e, r in zip(pairs, draws) if r < p])


def _need(cond, what):
    if not cond:
        raise ValueError(f"parameter bound violated: {what}")


# --------------------------------------------------------------------------


@dataclass
class ChromaticResult:
    status: str  # "exact" | "exceeded"
    value: int | None
    colouring: list | None


def chromatic_number(G: SimpleGraph, budget=CHROMATIC_VERTEX_BUDGET) -> ChromaticResult:
    if G.n > budget:
        return ChromaticResult("exceeded", None, None)
    if G.n == 0:
        return ChromaticResult("exact", 0, [])
    adj = G.neighbours()
    order = sorted(range(G.n), key=lambda v: -len(adj[v]))
    for k in range(1, G.n + 1):
        col = _colour_with(adj, order, k)
        if col is not None:
            return ChromaticResult("exact", k, col)
    raise AssertionError("unreachable: n colours always suffice")


def _colour_with(adj, order, k):
    col = [-1] * len(adj)

    def rec(i, used):
        if i == len(order):
            return True
        v = order[i]
        taken = {col[u] for u in adj[v]}
        # new colours are symmetric: only try the first unused one
        for c in range(min(used + 1, k)):
            if c not in taken:
                col[v] = c
                if rec(i + 1, max(used, c + 1)):
                    return True
        col[v] = -1
        return False

    return list(col) if rec(0, 0) else None


def is_proper_colouring(G, colouring):
    return all(colouring[i] != colouring[j] for i, j in G.edges)


def clique_number(G: SimpleGraph, budget=12):
    if G.n > budget:
        raise BudgetExceeded(f"{G.n} vertices exceed clique budget {budget}", G.n, budget)
    best = min(G.n, 1)
    for r in range(2, G.n + 1):
        if any(all(G.adjacent(i, j) for i, j in combinations(c, 2)) for c in combinations(range(G.n), r)):
            best = r
        else:
            break
    return best


def girth(G: SimpleGraph):
    """Length of a shortest cycle, ``float('inf')`` for forests."""
    adj = G.neighbours()
    best = float("inf")
    for s in range(G.n):
        dist = [-1] * G.n
        parent = [-1] * G.n
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


# --------------------------------------------------------------------------
# linear orders used to index greens and reds


@dataclass(frozen=True)
class LinearOrderSpec:
    """A finite truncation of N, N reversed, or a plain chain.

    ``elements`` lists the members in increasing order of the given order.
    Reversed naturals are written as non-positive ints ``0, -1, -2, ...`` so
    the ambient integer order is the right one.
    """

    kind: str
    t: int

    KINDS = ("naturals", "reversed-naturals", "finite-chain")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.t < 1:
            raise ValueError("parameter bound violated: t >= 1")

    @property
    def elements(self):
        if self.kind == "reversed-naturals":
            return tuple(range(-(self.t - 1), 1))
        return tuple(range(self.t))

    def less(self, a, b):
        return a < b

    def to_json_dict(self):
        return {"kind": self.kind, "t": self.t}


def graph_from_name(name):
    """Parse short names used on the command line: k3, c5, p4, cliques3-3, band6-3."""
    name = name.lower()
    if name.startswith("k"):
        return complete_graph(int(name[1:]))
    if name.startswith("c") and not name.startswith("cliques"):
        return cycle_graph(int(name[1:]))
    if name.startswith("p"):
        return path_graph(int(name[1:]))
    if name.startswith("cliques"):
        return disjoint_cliques([int(s) for s in name[len("cliques"):].split("-")])
    if name.startswith("band"):
        m, N = name[4:].split("-")
        return band_graph(int(m), int(N))
    raise ValueError(f"unknown graph name {name!r}")


def dumps(G):
    return json.dumps(G.to_json_dict(), sort_keys=True)
