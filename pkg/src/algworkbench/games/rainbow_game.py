"""The green-cone game on rainbow coloured graphs (n = 3).

∀ opens with the graph on nodes 0, 1, 2 where ``Γ(0,1) = w0``,
``Γ(1,2) = g1``, ``Γ(0,2) = g0^0`` and the base ``{0, 1}`` carries the yellow
``y_B`` with ``B`` all tints. In round ``t`` he adds a new apex over the same
base with ``Γ(0, z) = g0^{-t}`` and ``Γ(1, z) = g1``. ∃ must colour the edges
from ``z`` to the earlier apexes (and choose yellows on new non-green pairs) so
that the result is again a coloured graph in the palette. Two apexes over a
green base are joined by a red whose indices are order preserving in the tints,
so a palette with ``R`` red indices runs out after ``R`` apexes.

Yellows chosen by ∃ are the minimal sets forced by the cones already present:
a yellow only restricts which cones ∀ may add later, so a larger set never
helps her.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from ..cyl_core.coloured import (Colour, ColouredGraph, Palette, coloured_graph_check, find_cones,
                                 forbidden_triangle, needs_yellow)

N_DIM = 3


def opening_graph(pal: Palette) -> ColouredGraph:
    E = [[None] * 3 for _ in range(3)]

    def put(x, y, c):
        E[x][y], E[y][x] = c, c.conv()

    put(0, 1, Colour("w", 0))
    put(1, 2, Colour("g", 1))
    put(0, 2, Colour("g0", 0))
    return ColouredGraph(3, E, {(0, 1): frozenset(pal.tint_values)})


def forall_cone_move(G: ColouredGraph, t):
    """∀'s demand in round ``t``: a new apex with tint ``-t`` over base (0, 1)."""
    return {"apex": G.size, "edges": {0: Colour("g0", -t), 1: Colour("g", 1)}}


def _grow(G: ColouredGraph, move):
    z = move["apex"]
    k = G.size + 1
    E = [row[:] + [None] for row in G.edges] + [[None] * k]
    for v, c in move["edges"].items():
        E[v][z], E[z][v] = c, c.conv()
    return E


def _minimal_yellows(G: ColouredGraph):
    Y = dict(G.yellow)
    need = {t: set() for t in combinations(range(G.size), N_DIM - 1) if needs_yellow(G, t) and t not in Y}
    for base, _apex, tint in find_cones(G, N_DIM):
        key = tuple(sorted(base))
        if key in need:
            need[key].add(tint)
    Y.update({t: frozenset(S) for t, S in need.items()})
    return Y


def exists_replies(G: ColouredGraph, move, pal: Palette):
    """Every legal completion of ∃ after ∀'s cone demand (minimal yellows)."""
    E = _grow(G, move)
    z = move["apex"]
    todo = [v for v in range(G.size) if E[v][z] is None]
    cols = [c for c in _palette_colours(pal)]
    out = []

    def rec(p):
        if p == len(todo):
            H = ColouredGraph(G.size + 1, [row[:] for row in E], {})
            H = ColouredGraph(H.size, H.edges, _minimal_yellows(ColouredGraph(H.size, H.edges, G.yellow)))
            if coloured_graph_check(H, pal, allow_rho=False).ok:
                out.append(H)
            return
        v = todo[p]
        for c in cols:
            E[v][z], E[z][v] = c, c.conv()
            if all(not _bad(E, v, z, u) for u in range(G.size + 1)
                   if u not in (v, z) and E[u][v] is not None and E[u][z] is not None):
                rec(p + 1)
        E[v][z] = E[z][v] = None

    rec(0)
    return out


def _bad(E, x, y, z):
    a, b, c = sorted((x, y, z))
    return forbidden_triangle(E[a][b], E[b][c], E[a][c], N_DIM)


def _palette_colours(pal: Palette):
    from ..cyl_core.coloured import parse_colour

    return [parse_colour(s) for s in pal.symbols()]


@dataclass
class ConeGameResult:
    winner: str  # "forall" when every ∃ line is stuck within the horizon
    rounds: int | None  # rounds ∀ needs against best defence (None if ∃ survives the horizon)
    horizon: int
    lines: int  # number of ∃ reply sequences explored

    def to_json_dict(self):
        return {"winner": self.winner, "rounds": self.rounds, "horizon": self.horizon, "lines": self.lines}


def solve_cone_game(pal: Palette, horizon=None) -> ConeGameResult:
    """Exhaustive ∃ against the scripted ∀; rounds counted after the opening."""
    horizon = pal.reds + 2 if horizon is None else horizon
    lines = [0]

    def survive(G, t):
        """Longest number of further rounds ∃ survives from G (capped at the horizon)."""
        if t > horizon:
            lines[0] += 1
            return horizon + 1
        if -t not in pal.tint_values:
            raise ValueError("palette has too few tints for the horizon")
        reps = exists_replies(G, forall_cone_move(G, t), pal)
        if not reps:
            lines[0] += 1
            return t
        return max(survive(H, t + 1) for H in reps)

    if not coloured_graph_check(opening_graph(pal), pal, allow_rho=False).ok:
        raise ValueError("opening graph is not legal in this palette")
    t = survive(opening_graph(pal), 1)
    if t > horizon:
        return ConeGameResult("exists", None, horizon, lines[0])
    return ConeGameResult("forall", t, horizon, lines[0])


# --------------------------------------------------------------------------
# ∃'s ρ strategy


@dataclass
class RhoMap:
    """Order preserving partial map from green tints to red indices, widely spaced."""

    m_total: int
    reds: int
    rho: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    def gap(self, r):
        return 3 ** (self.m_total - r)

    def min_spacing(self):
        vals = sorted(self.rho.values())
        return min((b - a for a, b in zip(vals, vals[1:])), default=None)

    def order_preserving(self):
        items = sorted(self.rho.items())
        return all(a[1] < b[1] for a, b in zip(items, items[1:]))

    def extend(self, tint, r):
        """Add ``tint`` in round ``r``; returns the red index or None when the index space is exhausted."""
        if tint in self.rho:
            return self.rho[tint]
        g = self.gap(r)
        if not self.rho:
            val = (self.reds - 1) // 2
        else:
            below = [t for t in self.rho if t < tint]
            above = [t for t in self.rho if t > tint]
            if not below:
                val = self.rho[min(above)] - g
            elif not above:
                val = self.rho[max(below)] + g
            else:
                lo, hi = self.rho[max(below)], self.rho[min(above)]
                val = lo + g
                if hi - val < g:
                    return None
        if not 0 <= val < self.reds:
            return None
        self.rho[tint] = val
        self.history.append(dict(self.rho))
        return val


class RainbowStrategy:
    """∃'s play: whites where possible, reds between cone apexes via ρ, minimal yellows."""

    def __init__(self, pal: Palette, m_total):
        self.pal = pal
        self.rho = RhoMap(m_total, pal.reds)
        self.diagnostic = ""

    def apex_tint(self, G, v):
        c = G.edges[0][v] if v != 0 else None
        return c.i if c is not None and c.kind == "g0" else None

    def reply(self, G: ColouredGraph, move, r):
        """Return the next graph, or None on resignation."""
        E = _grow(G, move)
        z = move["apex"]
        tz = move["edges"][0].i
        for v in range(1, G.size):
            tv = self.apex_tint(G, v)
            if tv is not None and tv not in self.rho.rho and self.rho.extend(tv, r - 1) is None:
                self.diagnostic = "red index space exhausted before play"
                return None
        if self.rho.extend(tz, r) is None:
            self.diagnostic = f"red index space exhausted at round {r}"
            return None
        for v in range(G.size):
            if E[v][z] is not None:
                continue
            tv = self.apex_tint(G, v)
            if tv is not None:
                c = Colour("r", self.rho.rho[tv], self.rho.rho[tz], 0)
            else:
                c = Colour("w", 0)
            E[v][z], E[z][v] = c, c.conv()
        H = ColouredGraph(G.size + 1, E, G.yellow)
        H = ColouredGraph(H.size, E, _minimal_yellows(H))
        return H


def exists_rainbow_strategy(pal: Palette, m_total) -> RainbowStrategy:
    return RainbowStrategy(pal, m_total)
