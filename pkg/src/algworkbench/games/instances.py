"""Seeded small atom frames for cross-checking the game solvers."""
from __future__ import annotations

import random
from itertools import combinations, product

import numpy as np

from ..cyl_core.coloured import Palette
from ..cyl_core.matrices import basic_matrices, matrices_ca
from ..cyl_core.rainbow_atoms import growth_patterns, rainbow_ca_atoms
from ..cyl_core.structure import CaAtomStructure, frame_from_functions, set_algebra_atoms
from ..ra_core import one_atom, two_atom


def swap_orbits(F: CaAtomStructure):
    """Atoms grouped into orbits of the transposition maps."""
    seen, out = set(), []
    for a in range(F.size):
        if a in seen:
            continue
        orb, todo = {a}, [a]
        while todo:
            x = todo.pop()
            for i, j in combinations(range(F.dim), 2):
                y = int(F.swaps[i, j, x])
                if y not in orb:
                    orb.add(y)
                    todo.append(y)
        seen |= orb
        out.append(sorted(orb))
    return out


def delete_orbits(F: CaAtomStructure, orbit_ids):
    orbs = swap_orbits(F)
    keep = np.ones(F.size, dtype=bool)
    for k in orbit_ids:
        keep[orbs[k]] = False
    G = F.restrict(keep)
    G.meta["deleted-orbits"] = sorted(orbit_ids)
    return G


def triangle_frame(colours, allowed, n=3):
    """Frame of complete graphs on at most 3 nodes with symmetric edge colours.

    ``allowed`` lists the sorted colour triples permitted on 3-node atoms.
    """
    if n != 3:
        raise ValueError("parameter bound violated: triangle frames have n = 3")
    allowed = {tuple(sorted(t)) for t in allowed}
    atoms = []
    for pat in growth_patterns(3):
        k = max(pat) + 1
        pairs = list(combinations(range(k), 2))
        for cols in product(range(colours), repeat=len(pairs)):
            if k == 3 and tuple(sorted(cols)) not in allowed:
                continue
            atoms.append((pat, tuple(zip(pairs, cols))))
    index = {a: i for i, a in enumerate(atoms)}

    def norm(f, edges):
        order = []
        for v in f:
            if v not in order:
                order.append(v)
        pos = {v: i for i, v in enumerate(order)}
        out = []
        for (x, y), c in edges:
            if x in pos and y in pos:
                out.append(((min(pos[x], pos[y]), max(pos[x], pos[y])), c))
        return tuple(pos[v] for v in f), tuple(sorted(out))

    def key(a, i):
        f, E = atoms[a]
        return norm([f[j] for j in range(3) if j != i], E)

    def swap(a, i, j):
        f, E = atoms[a]
        g = list(f)
        g[i], g[j] = g[j], g[i]
        return index[norm(g, E)]

    return frame_from_functions(
        3, atoms, key=key, in_diag=lambda a, i, j: atoms[a][0][i] == atoms[a][0][j], swap=swap,
        names=[f"<{''.join(map(str, p))}|{','.join(f'{x}{y}:{c}' for (x, y), c in E)}>" for p, E in atoms],
        meta={"construction": "triangle-frame", "colours": colours, "allowed": sorted(allowed)})


def relativized_set_frame(base, orbit_reps):
    """Set-algebra frame on the coordinate-permutation closure of ``orbit_reps``."""
    from itertools import permutations

    pts = {tuple(p[i] for i in perm) for p in orbit_reps for perm in permutations(range(len(p)))}
    return set_algebra_atoms(base, len(orbit_reps[0]), sorted(pts))


def instance_pool():
    """(name, builder) pairs; every built frame has at most 12 atoms."""
    sa2 = lambda: set_algebra_atoms(2, 3)
    pool = [
        ("set-algebra-1", lambda: set_algebra_atoms(1, 3)),
        ("set-algebra-2", sa2),
        ("rainbow-one-white", lambda: rainbow_ca_atoms(Palette(tints=0, reds=0, whites=(0,), plain_greens=False))),
        ("matrices-one-atom", lambda: matrices_ca(basic_matrices(one_atom(), 3))),
        ("matrices-two-atom", lambda: matrices_ca(basic_matrices(two_atom(), 3))),
    ]
    for k in range(4):
        pool.append((f"set-algebra-2-minus-orbit-{k}", lambda k=k: delete_orbits(sa2(), [k])))
    for pair in combinations(range(4), 2):
        pool.append((f"set-algebra-2-minus-orbits-{pair[0]}{pair[1]}", lambda p=pair: delete_orbits(sa2(), list(p))))
    # two-colour triangle frames small enough for the reference evaluator at depth 4
    for allowed in [(), ((0, 0, 0),), ((1, 1, 1),), ((0, 0, 0), (1, 1, 1))]:
        tag = "-".join("".join(map(str, t)) for t in allowed) or "none"
        pool.append((f"triangle-frame-{tag}", lambda a=allowed: triangle_frame(2, a)))
    pool.append(("relativized-3-001-012", lambda: relativized_set_frame(3, [(0, 0, 1), (0, 1, 2)])))
    pool.append(("relativized-3-000-112", lambda: relativized_set_frame(3, [(0, 0, 0), (1, 1, 2), (2, 2, 2)])))
    return pool


def seeded_instances(seed=0, count=20):
    """``count`` distinct (name, frame) pairs drawn from the pool by a seeded shuffle."""
    pool = instance_pool()
    rng = random.Random(seed)
    order = list(range(len(pool)))
    rng.shuffle(order)
    if count > len(pool):
        raise ValueError(f"parameter bound violated: at most {len(pool)} instances")
    out = []
    for k in sorted(order[:count]):
        name, build = pool[k]
        F = build()
        F.meta["instance"] = name
        out.append((name, F))
    return out
