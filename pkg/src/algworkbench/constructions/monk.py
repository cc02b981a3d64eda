"""Graph-based atom structure: identity plus one atom per (vertex, colour)."""
import numpy as np

from ..graphs import SimpleGraph
from ..ra_core import from_rule, register_rule


def monk_ra(G: SimpleGraph, n_colours: int):
    """Atoms ``1'`` and ``(v, i)`` for vertices v and colours i < n_colours.

    Atom id of ``(v, i)`` is ``1 + i * |V| + v``. Every atom is self-converse.
    A non-identity triple is consistent unless all three share a colour and
    their vertices span no edge of G.
    """
    if n_colours < 2:
        raise ValueError("parameter bound violated: n_colours >= 2")
    nv = G.n
    names = ["1'"] + [f"({v},{i})" for i in range(n_colours) for v in range(nv)]
    adj = np.zeros((nv, nv), dtype=bool)
    for i, j in G.edges:
        adj[i, j] = adj[j, i] = True

    def rule(a, b, c):
        a, b, c = np.broadcast_arrays(np.asarray(a), np.asarray(b), np.asarray(c))
        ida, idb, idc = a == 0, b == 0, c == 0
        anyid = ida | idb | idc
        id_ok = (ida & (b == c)) | (idb & (a == c)) | (idc & (a == b))
        va, vb, vc = (a - 1) % nv, (b - 1) % nv, (c - 1) % nv
        ca, cb, cc = (a - 1) // nv, (b - 1) // nv, (c - 1) // nv
        mixed = (ca != cb) | (cb != cc)
        edge = adj[va, vb] | adj[vb, vc] | adj[va, vc]
        return np.where(anyid, id_ok, mixed | edge)

    source = {"rule": "monk", "params": {"graph": G.to_json_dict(), "n_colours": n_colours}}
    return from_rule(names, [0], np.arange(len(names)), rule, source=source,
                     meta={"construction": "monk", "vertices": nv, "colours": n_colours})


def atom_of(G, v, colour):
    return 1 + colour * G.n + v


@register_rule("monk")
def _monk_from_params(graph, n_colours):
    return monk_ra(SimpleGraph.from_json_dict(graph), n_colours)
