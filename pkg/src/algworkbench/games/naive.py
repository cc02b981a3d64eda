"""Independent reference evaluator and certificate replay.

Nothing here reuses the solver's extension search, normal-form helper, move
generator or canonical keys: boards are plain dicts, replies are built by
assigning tuples one at a time and re-checking the literal network conditions
against everything assigned so far, and there is no memoization.
"""
from __future__ import annotations

from itertools import product

from ..cyl_core.structure import CaAtomStructure
from .network import Network


class _Tables:
    """Frame relations as nested lists (plain indexing is much faster than numpy scalars)."""

    def __init__(self, F: CaAtomStructure):
        self.size = F.size
        self.n = F.dim
        self.classes = F.classes.tolist()
        self.diag = F.diag.tolist()
        self.swaps = F.swaps.tolist()


def _tables(F):
    return F if isinstance(F, _Tables) else _Tables(F)


def _ok_so_far(T, lab, x, a, nodes):
    """Literal conditions between ``x -> a`` and every already labelled neighbour of ``x``."""
    n = T.n
    for i in range(n):
        for j in range(n):
            if i != j and x[i] == x[j] and not T.diag[i][j][a]:
                return False
    if x in lab and lab[x] != a:
        return False
    for i in range(n):
        ci = T.classes[i]
        for v in nodes:
            if v == x[i]:
                continue
            y = x[:i] + (v,) + x[i + 1:]
            if y in lab and ci[a] != ci[lab[y]]:
                return False
    for i in range(n):
        for j in range(i + 1, n):
            y = list(x)
            y[i], y[j] = y[j], y[i]
            y = tuple(y)
            if y == x:
                if T.swaps[i][j][a] != a:
                    return False
            elif y in lab and T.swaps[i][j][lab[y]] != a:
                return False
    return True


def naive_completions(F, lab: dict, nodes, demand=None):
    """Yield every full labelling of ``nodes^n`` extending ``lab`` and meeting ``demand = (x, b)``."""
    T = _tables(F)
    n = T.n
    nodes = sorted(nodes)
    todo = [x for x in product(nodes, repeat=n) if x not in lab]
    todo.reverse()  # deliberately a different order from the solver
    cur = dict(lab)

    def rec(k):
        if k == len(todo):
            yield dict(cur)
            return
        x = todo[k]
        opts = [demand[1]] if demand is not None and demand[0] == x else range(T.size)
        for a in opts:
            if _ok_so_far(T, cur, x, a, nodes):
                cur[x] = a
                yield from rec(k + 1)
                del cur[x]

    yield from rec(0)


def is_network_dict(F, lab, nodes):
    T = _tables(F)
    n = T.n
    if set(lab) != set(product(sorted(nodes), repeat=n)):
        return False
    seen = {}
    for x, a in lab.items():
        if not _ok_so_far(T, seen, x, a, nodes):
            return False
        seen[x] = a
    return True


def _class_of_line(T, lab, face, l, nodes):
    x = tuple(face[:l]) + (nodes[0],) + tuple(face[l:])
    return T.classes[l][lab[x]]


def automorphisms(lab, nodes):
    """Node permutations preserving every label (brute force over all permutations)."""
    from itertools import permutations

    nodes = sorted(nodes)
    out = []
    for img in permutations(nodes):
        pi = dict(zip(nodes, img))
        if all(lab[tuple(pi[v] for v in x)] == a for x, a in lab.items()):
            out.append(pi)
    return out


def naive_moves(F, kind, lab, nodes, m, symmetry=False):
    """All cylindrifier moves, one representative per demanded tuple orbit.

    With ``symmetry`` the list is further cut to one move per orbit under the
    board's automorphisms (automorphic moves lead to isomorphic positions).
    """
    T = _tables(F)
    n = T.n
    out = {}
    nodes = sorted(nodes)
    auts = automorphisms(lab, nodes) if symmetry else None
    for face in product(nodes, repeat=n - 1):
        for l in range(n):
            cls = _class_of_line(T, lab, face, l, nodes)
            for b in range(T.size):
                if T.classes[l][b] != cls:
                    continue
                if kind == "G":
                    if any(lab[tuple(face[:l]) + (v,) + tuple(face[l:])] == b for v in nodes):
                        continue
                    ks = [max(nodes) + 1]
                else:
                    free = [p for p in range(m) if p not in nodes]
                    ks = [k for k in nodes + free[:1] if k not in face]
                for k in ks:
                    x = tuple(face[:l]) + (k,) + tuple(face[l:])
                    if k in nodes and lab[x] == b:
                        continue
                    rep = _orbit_rep(T, x, b, k)
                    if auts:
                        rep = min(_orbit_rep(T, tuple(pi.get(v, v) for v in x), b, pi.get(k, k)) for pi in auts)
                    out.setdefault(rep, (face, l, b, k))
    return sorted(out)


def _orbit_rep(T, x, b, k):
    """Smallest (tuple, atom) over all position permutations of the demand, with k first."""
    best = None
    for perm, steps in _perm_steps(len(x)):
        if x[perm[0]] != k:
            continue
        c = b
        for i, j in steps:
            c = T.swaps[i][j][c]
        cand = (tuple(x[p] for p in perm[1:]), c)
        if best is None or cand < best:
            best = cand
    face, c = best
    return face, 0, c, k


_STEPS = {}


def _perm_steps(n):
    """Each permutation with the adjacent transpositions that carry x to x∘perm."""
    if n not in _STEPS:
        from itertools import permutations

        out = []
        for perm in permutations(range(n)):
            cur = list(range(n))
            steps = []
            for i in range(n):
                j = cur.index(perm[i])
                while j > i:
                    cur[j - 1], cur[j] = cur[j], cur[j - 1]
                    steps.append((j - 1, j))
                    j -= 1
            out.append((perm, tuple(steps)))
        _STEPS[n] = out
    return _STEPS[n]


def naive_replies(F, kind, lab, nodes, move):
    face, l, b, k = move
    keep = [v for v in nodes if v != k]
    base = {x: a for x, a in lab.items() if k not in x}
    x = tuple(face[:l]) + (k,) + tuple(face[l:])
    nn = sorted(keep + [k])
    return ((c, nn) for c in naive_completions(F, base, nn, (x, b)))


def naive_initial(F, a):
    from ..cyl_core.rainbow_atoms import growth_patterns

    for pat in growth_patterns(_tables(F).n):
        nodes = list(range(max(pat) + 1))
        for c in naive_completions(F, {}, nodes, (tuple(pat), a)):
            yield c, nodes


def naive_exists_wins(F, kind, lab, nodes, r, m=None, node_budget=8):
    if r == 0:
        return True
    for mv in naive_moves(F, kind, lab, nodes, m, symmetry=True):
        if kind == "G" and mv[3] + 1 > node_budget:
            raise RuntimeError("node budget")
        if not any(naive_exists_wins(F, kind, c, nn, r - 1, m, node_budget)
                   for c, nn in naive_replies(F, kind, lab, nodes, mv)):
            return False
    return True


def naive_outcome(F: CaAtomStructure, kind="G", rounds=2, m=None, node_budget=8):
    F = _tables(F)
    for a in range(F.size):
        if not any(naive_exists_wins(F, kind, c, nn, rounds, m, node_budget) for c, nn in naive_initial(F, a)):
            return "forall"
    return "exists"


# --------------------------------------------------------------------------
# certificate replay


class ReplayError(Exception):
    pass


def _board(F, node):
    N = Network.from_json_dict(node["board"])
    lab = N.as_dict()
    if not is_network_dict(F, lab, N.nodes):
        raise ReplayError(f"board is not a network: {node['board']}")
    return lab, list(N.nodes)


def _key(lab):
    return tuple(sorted(lab.items()))


def replay_certificate(F: CaAtomStructure, cert: dict):
    """Re-validate a certificate from scratch; returns (ok, message)."""
    try:
        _replay(_tables(F), cert)
    except ReplayError as exc:
        return False, str(exc)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        return False, f"malformed certificate: {exc!r}"
    return True, "ok"


def _replay(F, cert):
    nodes = cert["nodes"]
    kind, m, rounds = cert["kind"], cert["m"], cert["rounds"]
    root = nodes[cert["root"]]
    if cert["winner"] == "exists":
        atoms = sorted(mv["atom"] for mv in root["moves"])
        if atoms != list(range(F.size)):
            raise ReplayError("initial round does not cover every atom")
        for mv in root["moves"]:
            child = nodes[mv["reply"]]
            lab, nn = _board(F, child)
            pat_ok = any(lab[x] == mv["atom"] for x in lab)
            if not pat_ok or child["rounds"] != rounds:
                raise ReplayError("initial reply does not realise the atom")
            _replay_exists(F, nodes, mv["reply"], kind, m, set())
    elif cert["winner"] == "forall":
        a = root["atom"]
        want = {_key(c) for c, _ in naive_initial(F, a)}
        got = set()
        for cid in root["replies"]:
            lab, _ = _board(F, nodes[cid])
            got.add(_key(lab))
            if nodes[cid]["rounds"] != rounds:
                raise ReplayError("round counter mismatch")
            _replay_forall(F, nodes, cid, kind, m, set())
        if want != got:
            raise ReplayError("initial replies are not exactly the legal ones")
    else:
        raise ReplayError("certificate has no winner")


def _replay_exists(F, nodes, nid, kind, m, done):
    if nid in done:
        return
    node = nodes[nid]
    lab, nn = _board(F, node)
    r = node["rounds"]
    if r > 0:
        need = naive_moves(F, kind, lab, nn, m)
        have = {}
        for mv in node["moves"]:
            j = mv["move"]
            face, l, b, k = tuple(j["face"]), j["l"], j["b"], j["k"]
            x = face[:l] + (k,) + face[l:]
            have[_orbit_rep(F, x, b, k)] = mv
        for rep in need:
            if rep not in have:
                raise ReplayError(f"forall move {rep} not answered")
        for rep, mv in have.items():
            j = mv["move"]
            child = nodes[mv["reply"]]
            clab, cnn = _board(F, child)
            if child["rounds"] != r - 1:
                raise ReplayError("round counter mismatch")
            _check_reply(F, kind, m, lab, nn, (tuple(j["face"]), j["l"], j["b"], j["k"]), clab, cnn)
            _replay_exists(F, nodes, mv["reply"], kind, m, done)
    done.add(nid)


def _check_reply(F, kind, m, lab, nn, move, clab, cnn):
    face, l, b, k = move
    if kind == "G":
        if k in nn:
            raise ReplayError("G move must use a fresh node")
    else:
        if not 0 <= k < m or k in face:
            raise ReplayError("pebble outside range or inside the face")
    if sorted(cnn) != sorted(set(nn) - {k} | {k}):
        raise ReplayError("reply has the wrong node set")
    for x, a in lab.items():
        if k not in x and clab[x] != a:
            raise ReplayError("reply does not extend the board")
    x = face[:l] + (k,) + face[l:]
    if clab[x] != b:
        raise ReplayError("reply does not realise the demanded atom")
    cls_ok = F.classes[l][b] == F.classes[l][lab[face[:l] + (nn[0],) + face[l:]]]
    if not cls_ok:
        raise ReplayError("demanded atom is not below the cylindrified label")


def _replay_forall(F, nodes, nid, kind, m, done):
    if nid in done:
        return
    node = nodes[nid]
    lab, nn = _board(F, node)
    r = node["rounds"]
    if r <= 0:
        raise ReplayError("exists survived every round on a claimed forall line")
    j = node["move"]
    move = (tuple(j["face"]), j["l"], j["b"], j["k"])
    face, l, b, k = move
    x = face[:l] + (k,) + face[l:]
    if _orbit_rep(F, x, b, k) not in set(naive_moves(F, kind, lab, nn, m)):
        raise ReplayError(f"forall move {move} is not legal here")
    want = {_key(c) for c, _ in naive_replies(F, kind, lab, nn, move)}
    got = set()
    for cid in node["replies"]:
        clab, cnn = _board(F, nodes[cid])
        if nodes[cid]["rounds"] != r - 1:
            raise ReplayError("round counter mismatch")
        _check_reply(F, kind, m, lab, nn, move, clab, cnn)
        got.add(_key(clab))
        _replay_forall(F, nodes, cid, kind, m, done)
    if want != got:
        raise ReplayError("listed replies are not exactly the legal ones")
    done.add(nid)
