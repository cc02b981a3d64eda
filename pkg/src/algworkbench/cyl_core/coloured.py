"""Rainbow coloured graphs.

Colour symbols (``n`` is the dimension, tints are ``0, -1, -2, ...`` with the
integer order, red indices are ``0, 1, 2, ...``):

* greens ``g{i}`` for ``1 <= i <= n-2`` and ``g0^{t}`` for tints ``t``,
* whites ``w{i}`` for ``i < n-1``,
* reds ``r{k},{l}^{c}`` (copy ``c``); ``Γ(x, y) = r_kl`` means ``Γ(y, x) = r_lk``,
* the shade of red ``rho`` (allowed in graphs, barred from atoms),
* yellows ``y_S`` on (n-1)-sets of distinct nodes (the ~-classes of tuples), keyed
  by the sorted node tuple and stored as frozensets ``S``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations

from ..errors import StructuralError
from ..ra_core import ValidationReport, Violation

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Palette:
    n: int = 3
    tints: int = 2
    reds: int = 2
    copies: int = 1
    whites: tuple | None = None  # subset of range(n - 1); None = all
    plain_greens: bool = True  # include g_1 .. g_{n-2}

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("parameter bound violated: n >= 3")
        for name in ("tints", "reds"):
            if getattr(self, name) < 0:
                raise ValueError(f"parameter bound violated: {name} >= 0")
        if self.copies < 1:
            raise ValueError("parameter bound violated: copies >= 1")
        if self.whites is not None:
            object.__setattr__(self, "whites", tuple(sorted(set(self.whites))))
            if any(not 0 <= w < self.n - 1 for w in self.whites):
                raise ValueError("parameter bound violated: white index < n - 1")

    @property
    def tint_values(self):
        return tuple(-t for t in range(self.tints))

    @property
    def white_ids(self):
        return tuple(range(self.n - 1)) if self.whites is None else self.whites

    def symbols(self):
        out = []
        if self.plain_greens:
            out += [f"g{i}" for i in range(1, self.n - 1)]
        out += [f"g0^{t}" for t in self.tint_values]
        out += [f"w{i}" for i in self.white_ids]
        out += [f"r{k},{l}^{c}" for c in range(self.copies) for k in range(self.reds) for l in range(self.reds)]
        return out

    def to_json_dict(self):
        return {"n": self.n, "tints": self.tints, "reds": self.reds, "copies": self.copies,
                "whites": list(self.white_ids), "plain_greens": self.plain_greens,
                "symbols": self.symbols() + ["rho"]}

    @classmethod
    def from_json_dict(cls, d):
        return cls(d["n"], d["tints"], d["reds"], d["copies"], tuple(d["whites"]), d["plain_greens"])


# --------------------------------------------------------------------------
# colour symbols


@dataclass(frozen=True)
class Colour:
    kind: str  # "g", "g0", "w", "r", "rho"
    i: int = 0  # green/white index, tint, or first red index
    j: int = 0  # second red index
    c: int = 0  # red copy

    def __str__(self):
        if self.kind == "g":
            return f"g{self.i}"
        if self.kind == "g0":
            return f"g0^{self.i}"
        if self.kind == "w":
            return f"w{self.i}"
        if self.kind == "r":
            return f"r{self.i},{self.j}^{self.c}"
        return "rho"

    @property
    def green(self):
        return self.kind in ("g", "g0")

    def conv(self):
        return Colour("r", self.j, self.i, self.c) if self.kind == "r" else self


def parse_colour(s: str) -> Colour:
    try:
        if s == "rho":
            return Colour("rho")
        if s.startswith("g0^"):
            return Colour("g0", int(s[3:]))
        if s.startswith("g"):
            return Colour("g", int(s[1:]))
        if s.startswith("w"):
            return Colour("w", int(s[1:]))
        if s.startswith("r"):
            body, c = s[1:].split("^")
            k, l = body.split(",")
            return Colour("r", int(k), int(l), int(c))
    except ValueError:
        pass
    raise StructuralError(f"unknown colour symbol {s!r}")


def in_palette(col: Colour, pal: Palette, allow_rho=True):
    if col.kind == "rho":
        return allow_rho
    if col.kind == "g":
        return pal.plain_greens and 1 <= col.i <= pal.n - 2
    if col.kind == "g0":
        return col.i in pal.tint_values
    if col.kind == "w":
        return col.i in pal.white_ids
    return 0 <= col.i < pal.reds and 0 <= col.j < pal.reds and 0 <= col.c < pal.copies


def forbidden_triangle(a: Colour, b: Colour, c: Colour, n: int) -> bool:
    """Triangle x, y, z with ``Γ(x,y) = a``, ``Γ(y,z) = b``, ``Γ(x,z) = c``."""
    if a.green and b.green and c.green:
        return True
    # two greens at a shared node with a white or a red on the opposite edge;
    # edges at y: (y,x) = conv a, (y,z) = b, opposite (x,z) = c, etc.
    for p, q, opp in ((a.conv(), b, c), (a, c, b), (c.conv(), b.conv(), a)):
        # p = Γ(v, u1), q = Γ(v, u2), opp = Γ(u1, u2)
        if opp.kind == "w":
            if p.kind == "g" and q.kind == "g" and p.i == q.i == opp.i and 1 <= opp.i <= n - 2:
                return True
            if p.kind == "g0" and q.kind == "g0" and opp.i == 0:
                return True
        if opp.kind == "r" and p.kind == "g0" and q.kind == "g0":
            if not _order_preserving(((p.i, opp.i), (q.i, opp.j))):
                return True
    if a.kind == "r" and b.kind == "r" and c.kind == "r":
        # node indices: x carries a.i = c.i, y carries a.j = b.i, z carries b.j = c.j
        if not (a.i == c.i and a.j == b.i and b.j == c.j):
            return True
    return False


def _order_preserving(pairs):
    (i, k), (j, l) = pairs
    if i == j:
        return k == l
    return (k < l) if i < j else (k > l)


# --------------------------------------------------------------------------
# graphs


@dataclass(eq=False)
class ColouredGraph:
    size: int
    edges: list  # size x size, Colour or None on the diagonal
    yellow: dict = field(default_factory=dict)  # sorted (n-1)-tuple of distinct nodes -> frozenset

    @classmethod
    def from_symbols(cls, size, edges, yellow=None):
        """``edges``: dict {(x, y): symbol} for x < y (converses filled in)."""
        E = [[None] * size for _ in range(size)]
        for (x, y), s in edges.items():
            col = parse_colour(s) if isinstance(s, str) else s
            E[x][y] = col
            E[y][x] = col.conv()
        Y = {tuple(sorted(k)): frozenset(v) for k, v in (yellow or {}).items()}
        return cls(size, E, Y)

    def edge(self, x, y):
        return self.edges[x][y]

    def restrict(self, nodes):
        nodes = list(nodes)
        pos = {v: k for k, v in enumerate(nodes)}
        E = [[self.edges[x][y] if x != y else None for y in nodes] for x in nodes]
        Y = {tuple(sorted(pos[v] for v in t)): S for t, S in self.yellow.items() if all(v in pos for v in t)}
        return ColouredGraph(len(nodes), E, Y)

    def relabel(self, perm):
        """Node ``v`` becomes ``perm[v]``."""
        k = self.size
        E = [[None] * k for _ in range(k)]
        for x in range(k):
            for y in range(k):
                E[perm[x]][perm[y]] = self.edges[x][y]
        Y = {tuple(sorted(perm[v] for v in t)): S for t, S in self.yellow.items()}
        return ColouredGraph(k, E, Y)

    def certificate(self):
        E = tuple(str(self.edges[x][y]) for x in range(self.size) for y in range(self.size) if x != y)
        Y = tuple(sorted((t, tuple(sorted(S))) for t, S in self.yellow.items()))
        return (self.size, E, Y)

    def to_json_dict(self):
        return {"schema_version": SCHEMA_VERSION, "nodes": self.size,
                "edges": [[None if c is None else str(c) for c in row] for row in self.edges],
                "yellow": [{"tuple": list(t), "S": sorted(S)} for t, S in sorted(self.yellow.items())]}

    @classmethod
    def from_json_dict(cls, d):
        E = [[None if s is None else parse_colour(s) for s in row] for row in d["edges"]]
        Y = {tuple(sorted(e["tuple"])): frozenset(e["S"]) for e in d["yellow"]}
        return cls(d["nodes"], E, Y)

    def dumps(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def canonical_form(G: ColouredGraph):
    """Least certificate over all node permutations (graphs here have <= 4-5 nodes)."""
    best = None
    for perm in permutations(range(G.size)):
        c = G.relabel(perm).certificate()
        if best is None or c < best:
            best = c
    return best


def isomorphic(G: ColouredGraph, H: ColouredGraph):
    return G.size == H.size and canonical_form(G) == canonical_form(H)


def needs_yellow(G: ColouredGraph, t):
    return len(set(t)) == len(t) and not any(G.edges[a][b].green for a, b in combinations(t, 2))


def find_cones(G: ColouredGraph, n):
    """All ``(base, apex, tint)`` where base + apex span an i-cone."""
    out = []
    for z in range(G.size):
        for base in permutations([v for v in range(G.size) if v != z], n - 1):
            col0 = G.edges[base[0]][z]
            if col0 is None or col0.kind != "g0":
                continue
            if not all(G.edges[base[j]][z].kind == "g" and G.edges[base[j]][z].i == j for j in range(1, n - 1)):
                continue
            if any(G.edges[a][b].green for a, b in combinations(base, 2)):
                continue
            out.append((tuple(base), z, col0.i))
    return out


def coloured_graph_check(G: ColouredGraph, pal: Palette, n=None, allow_rho=True) -> ValidationReport:
    n = pal.n if n is None else n
    out = []
    k = G.size
    for x in range(k):
        for y in range(k):
            c = G.edges[x][y]
            if x == y:
                if c is not None:
                    out.append(Violation("loop-labelled", (x,)))
                continue
            if c is None:
                out.append(Violation("incomplete", (x, y)))
                continue
            if not isinstance(c, Colour):
                raise StructuralError(f"unknown colour symbol {c!r}")
            if not in_palette(c, pal, allow_rho):
                out.append(Violation("colour-outside-palette", (x, y, str(c))))
            if G.edges[y][x] != c.conv():
                out.append(Violation("converse", (x, y)))
    if out:
        return ValidationReport(out, 0, len(out))
    for x, y, z in combinations(range(k), 3):
        if forbidden_triangle(G.edges[x][y], G.edges[y][z], G.edges[x][z], n):
            out.append(Violation("forbidden-triple", (x, y, z)))
    tints = set(pal.tint_values)
    for t in combinations(range(k), n - 1):
        if needs_yellow(G, t):
            if t not in G.yellow:
                out.append(Violation("missing-yellow", t))
            elif not G.yellow[t] <= tints:
                out.append(Violation("yellow-outside-palette", t))
    for t in G.yellow:
        if len(t) != n - 1 or list(t) != sorted(t) or not all(0 <= v < k for v in t) or not needs_yellow(G, t):
            out.append(Violation("stray-yellow", tuple(t)))
    for base, apex, tint in find_cones(G, n):
        S = G.yellow.get(tuple(sorted(base)))
        if S is not None and tint not in S:
            out.append(Violation("cone", (base, apex, tint)))
    return ValidationReport(out, 0, len(out))
