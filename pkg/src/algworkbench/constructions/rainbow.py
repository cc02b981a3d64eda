"""Rainbow relation-algebra atom structure with split reds.

Signature used here (all atoms self-converse, rules symmetric in the three
edges of a triangle):

* ``1'``; greens ``g[i]`` indexed by a linear order; one white ``w``;
  reds ``r[j,k]^s`` for red indices ``j <= k`` and copy ``s < t``.
* forbidden: three greens; two greens with the white; two greens ``g[i], g[i']``
  with a red ``r[j,k]`` unless ``i = i'`` exactly when ``j = k`` (the pair map
  ``{(i, j), (i', k)}`` is then a strictly order-preserving partial function
  for one orientation of the red); three reds whose index pairs cannot be
  realised as the edges of a triangle with one red index per node.
* copies ``s`` never matter to consistency.
"""
from itertools import combinations_with_replacement

import numpy as np

from ..graphs import LinearOrderSpec
from ..ra_core import from_rule, register_rule

GREEN, WHITE, RED, IDENT = 0, 1, 2, 3


def _red_triangle_ok(p, q, r):
    # p, q, r: unordered index pairs; find node labels x, y, z with
    # {x,y} = p, {y,z} = q, {x,z} = r
    for y in set(p) & set(q):
        x = p[1] if p[0] == y else p[0]
        z = q[1] if q[0] == y else q[0]
        if tuple(sorted((x, z))) == tuple(sorted(r)):
            return True
    return False


def rainbow_ra(greens: LinearOrderSpec, reds: LinearOrderSpec, red_copies: int = 1):
    if red_copies < 1:
        raise ValueError("parameter bound violated: red_copies >= 1")
    g_el = greens.elements
    r_el = reds.elements
    pairs = list(combinations_with_replacement(r_el, 2))
    names = ["1'"] + [f"g[{i}]" for i in g_el] + ["w"]
    kind = [IDENT] + [GREEN] * len(g_el) + [WHITE]
    gidx = [0] + list(range(len(g_el))) + [0]
    pair_of = [(0, 0)] * len(names)
    for s in range(red_copies):
        for (j, k) in pairs:
            names.append(f"r[{j},{k}]^{s}")
            kind.append(RED)
            gidx.append(0)
            pair_of.append((j, k))
    n = len(names)
    kind = np.array(kind)
    gpos = np.array(gidx)
    same_red = np.array([p[0] == p[1] for p in pair_of])
    # red triangle table over pair ids
    pid = {p: i for i, p in enumerate(pairs)}
    red_pid = np.array([pid.get(p, 0) for p in pair_of])
    rt = np.zeros((len(pairs),) * 3, dtype=bool)
    for a, p in enumerate(pairs):
        for b, q in enumerate(pairs):
            for c, r in enumerate(pairs):
                rt[a, b, c] = _red_triangle_ok(p, q, r)

    def rule(a, b, c):
        a, b, c = np.broadcast_arrays(np.asarray(a), np.asarray(b), np.asarray(c))
        ka, kb, kc = kind[a], kind[b], kind[c]
        ida, idb, idc = ka == IDENT, kb == IDENT, kc == IDENT
        anyid = ida | idb | idc
        id_ok = (ida & (b == c)) | (idb & (a == c)) | (idc & (a == b))
        ng = (ka == GREEN).astype(int) + (kb == GREEN) + (kc == GREEN)
        nw = (ka == WHITE).astype(int) + (kb == WHITE) + (kc == WHITE)
        nr = (ka == RED).astype(int) + (kb == RED) + (kc == RED)
        ok = np.ones(a.shape, dtype=bool)
        ok &= ng < 3
        ok &= ~((ng == 2) & (nw == 1))
        # two greens + red
        ggr = (ng == 2) & (nr == 1)
        if ggr.any():
            # pick the two greens and the red out of (a, b, c)
            red = np.where(ka == RED, a, np.where(kb == RED, b, c))
            g1 = np.where(ka == GREEN, a, b)
            g2 = np.where(kc == GREEN, c, np.where(kb == GREEN, b, a))
            g2 = np.where((ka == GREEN) & (kb == GREEN), b, g2)
            eq_g = gpos[g1] == gpos[g2]
            ok &= ~ggr | (eq_g == same_red[red])
        rrr = nr == 3
        if rrr.any():
            ok &= ~rrr | rt[red_pid[a], red_pid[b], red_pid[c]]
        return np.where(anyid, id_ok, ok)

    source = {"rule": "rainbow", "params": {"greens": greens.to_json_dict(), "reds": reds.to_json_dict(),
                                            "red_copies": red_copies}}
    return from_rule(names, [0], np.arange(n), rule, source=source,
                     meta={"construction": "rainbow", "greens": len(g_el), "reds": len(r_el),
                           "red_copies": red_copies})


@register_rule("rainbow")
def _rainbow_from_params(greens, reds, red_copies=1):
    return rainbow_ra(LinearOrderSpec(**greens), LinearOrderSpec(**reds), red_copies)
