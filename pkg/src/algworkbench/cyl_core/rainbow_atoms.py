"""Rainbow cylindric atom structures.

An atom is a surjection ``f: n -> Γ`` onto a coloured graph with at most
``n`` nodes, taken up to isomorphism. Numbering the nodes of ``Γ`` in order of
first appearance in ``f(0), f(1), ...`` picks one representative per class, so
an atom is a pair (restricted growth pattern, graph) and no search over node
permutations is needed.
"""
from __future__ import annotations

from itertools import combinations, product

from ..errors import BudgetExceeded, StructuralError
from .coloured import ColouredGraph, Palette, find_cones, forbidden_triangle, needs_yellow, parse_colour
from .structure import CaAtomStructure, frame_from_functions

ATOM_BUDGET = 200_000


def growth_patterns(n):
    """Restricted growth strings of length n (set partitions of n)."""
    out = []

    def rec(prefix, top):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for v in range(top + 2):
            rec(prefix + [v], max(top, v))

    rec([0], 0)
    return out


def _normalise(f):
    """Relabel values of ``f`` in order of first appearance; return (pattern, old node order)."""
    order = []
    for v in f:
        if v not in order:
            order.append(v)
    pos = {v: k for k, v in enumerate(order)}
    return tuple(pos[v] for v in f), order


def _graphs_on(k, pal: Palette, budget, count):
    cols = [parse_colour(s) for s in pal.symbols()]
    pairs = list(combinations(range(k), 2))
    E = [[None] * k for _ in range(k)]

    def rec(p):
        if p == len(pairs):
            yield from _yellowings(ColouredGraph(k, [row[:] for row in E], {}), pal)
            return
        x, y = pairs[p]
        for c in cols:
            E[x][y], E[y][x] = c, c.conv()
            if all(_triangle_ok(E, x, y, z, pal.n) for z in range(k)
                   if z not in (x, y) and E[x][z] is not None and E[y][z] is not None):
                yield from rec(p + 1)
        E[x][y] = E[y][x] = None

    for G in rec(0):
        count[0] += 1
        if count[0] > budget:
            raise BudgetExceeded(f"rainbow atom enumeration passed {budget} atoms", count[0], budget)
        yield G


def _triangle_ok(E, x, y, z, n):
    a, b, d = sorted((x, y, z))
    return not forbidden_triangle(E[a][b], E[b][d], E[a][d], n)


def _yellowings(G: ColouredGraph, pal: Palette):
    n = pal.n
    tints = pal.tint_values
    need = [t for t in combinations(range(G.size), n - 1) if needs_yellow(G, t)]
    required = {t: set() for t in need}
    for base, _apex, tint in find_cones(G, n):
        key = tuple(sorted(base))
        if key in required:
            required[key].add(tint)
    options = []
    for t in need:
        free = [x for x in tints if x not in required[t]]
        opts = []
        for bits in range(1 << len(free)):
            opts.append(frozenset(required[t] | {free[b] for b in range(len(free)) if bits >> b & 1}))
        options.append(opts)
    for choice in product(*options):
        yield ColouredGraph(G.size, G.edges, dict(zip(need, choice)))


def _atom_name(pattern, G):
    es = ",".join(f"{x}{y}:{G.edges[x][y]}" for x, y in combinations(range(G.size), 2))
    ys = ",".join(f"{''.join(map(str, t))}:y{{{','.join(map(str, sorted(S)))}}}" for t, S in sorted(G.yellow.items()))
    return f"<{''.join(map(str, pattern))}|{es}|{ys}>"


def rainbow_ca_atoms(pal: Palette, n=None, budget=ATOM_BUDGET) -> CaAtomStructure:
    n = pal.n if n is None else n
    if n != pal.n:
        raise StructuralError(f"palette is for dimension {pal.n}, asked for {n}")
    count = [0]
    atoms = []
    for pattern in growth_patterns(n):
        k = max(pattern) + 1
        for G in _graphs_on(k, pal, budget, count):
            atoms.append((pattern, G))
    index = {(p, G.certificate()): a for a, (p, G) in enumerate(atoms)}

    def key(a, i):
        f, G = atoms[a]
        sub = [f[j] for j in range(n) if j != i]
        patt, order = _normalise(sub)
        return patt, G.restrict(order).certificate()

    def swap(a, i, j):
        f, G = atoms[a]
        g = list(f)
        g[i], g[j] = g[j], g[i]
        patt, order = _normalise(g)
        return index[patt, G.restrict(order).certificate()]

    return frame_from_functions(
        n, atoms, key=key,
        in_diag=lambda a, i, j: atoms[a][0][i] == atoms[a][0][j],
        swap=swap,
        names=[_atom_name(p, G) for p, G in atoms],
        payload=[{"pattern": list(p), "graph": G.to_json_dict()} for p, G in atoms],
        meta={"construction": "rainbow-ca", "palette": pal.to_json_dict()},
    )
