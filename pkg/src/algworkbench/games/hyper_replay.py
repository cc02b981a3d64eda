"""Independent replay of H certificates.

Boards are rebuilt from JSON as plain dicts. Moves and ∃'s possible replies are
re-enumerated here with the reference completion routine from :mod:`.naive`;
hyperlabels are checked against the labelling rules rather than recomputed.
"""
from __future__ import annotations

from itertools import combinations, product

from ..cyl_core.structure import CaAtomStructure
from .naive import ReplayError, _tables, is_network_dict, naive_completions, naive_initial


def _load(T, d):
    net = d["network"]
    nodes = list(net["nodes"])
    lab = dict(zip(product(nodes, repeat=net["n"]), net["labels"]))
    if not is_network_dict(T, lab, nodes):
        raise ReplayError("board is not a network")
    hyper = {tuple(s): h for s, h in d["hyper"]}
    return nodes, lab, hyper


def _bkey(board):
    nodes, lab, hyper = board
    return (tuple(nodes), tuple(sorted(lab.items())), tuple(sorted(hyper.items())))


def _sim(T, nodes, lab):
    rel = {}
    for x in nodes:
        for y in nodes:
            rel[x, y] = x == y or any(T.diag[0][1][lab[(x, y) + z]] for z in product(nodes, repeat=T.n - 2))
    return rel


def _check_labels(T, board, max_len, inherited, used):
    """``inherited``: sequences whose labels come from earlier boards; others must be fresh or λ."""
    nodes, lab, hyper = board
    seqs = [s for L in range(1, max_len + 1) for s in product(nodes, repeat=L)]
    if set(hyper) != set(seqs):
        raise ReplayError("hyperlabels do not cover every sequence")
    rel = _sim(T, nodes, lab)

    def related(s, t):
        return len(s) == len(t) and all(rel[a, b] for a, b in zip(s, t))

    for s in seqs:
        classes = []
        for v in s:
            if not any(rel[v, w] for w in classes):
                classes.append(v)
        short = len(classes) <= T.n
        if short and hyper[s] != 0:
            raise ReplayError(f"short sequence {s} is not labelled λ")
    for s, t in combinations(seqs, 2):
        if related(s, t) and hyper[s] != hyper[t]:
            raise ReplayError(f"related sequences {s}, {t} carry different labels")
        if hyper[s] == hyper[t] != 0 and not related(s, t) and s not in inherited and t not in inherited:
            raise ReplayError(f"fresh label {hyper[s]} reused")
    for s in seqs:
        if s in inherited or hyper[s] == 0:
            continue
        if any(related(s, t) for t in inherited):
            continue
        if hyper[s] in used:
            raise ReplayError(f"label {hyper[s]} for {s} is not fresh")


def _agrees(big, small):
    return all(big[1].get(x) == a for x, a in small[1].items()) and all(
        big[2].get(s) == h for s, h in small[2].items())


def _moves(T, hist, cert):
    out = set()
    n = T.n
    budget = cert["node_budget"]
    kinds = cert["moves"]
    for hi, (nodes, lab, hyper) in enumerate(hist):
        if "cyl" in kinds:
            for face in product(nodes, repeat=n - 1):
                if list(face) != sorted(face):
                    continue
                line = [lab[(v,) + face] for v in nodes]
                for b in range(T.size):
                    if T.classes[0][b] != T.classes[0][line[0]] or b in line:
                        continue
                    for k in range(budget):
                        if k not in nodes:
                            out.add(("cyl", hi, tuple(face), b, k))
        if "transform" in kinds:
            top = len(nodes) + cert["theta_extra"]
            for size in range(1, top + 1):
                for dom in combinations(range(budget), size):
                    for img in product(nodes, repeat=size):
                        if set(img) == set(nodes):
                            out.add(("transform", hi, tuple(zip(dom, img))))
    if "amalg" in kinds:
        for i, j in combinations(range(len(hist)), 2):
            A, B = hist[i], hist[j]
            common = set(A[0]) & set(B[0])
            if not common or set(A[0]) <= set(B[0]) or set(B[0]) <= set(A[0]):
                continue
            if all(B[1][x] == a for x, a in A[1].items() if set(x) <= common) and all(
                    B[2][s] == h for s, h in A[2].items() if set(s) <= common):
                out.add(("amalg", i, j))
    return out


def _move_key(j):
    if j["type"] == "cyl":
        return ("cyl", j["board"], tuple(j["face"]), j["b"], j["k"])
    if j["type"] == "transform":
        return ("transform", j["board"], tuple(tuple(p) for p in j["theta"]))
    return ("amalg", *j["boards"])


def _pullback(T, board, theta, max_len):
    nodes, lab, hyper = board
    dom = sorted(x for x in theta if theta[x] in nodes)
    nl = {x: lab[tuple(theta[v] for v in x)] for x in product(dom, repeat=T.n)}
    nh = {s: hyper[tuple(theta[v] for v in s)] for L in range(1, max_len + 1) for s in product(dom, repeat=L)}
    return dom, nl, nh


def _legal_networks(T, hist, mv):
    """Every network ∃ may answer with (as sorted label items)."""
    if mv[0] == "cyl":
        _, hi, face, b, k = mv
        nodes, lab, _ = hist[hi]
        return {tuple(sorted(c.items())) for c in naive_completions(T, lab, sorted(nodes + [k]), ((k,) + face, b))}
    if mv[0] == "transform":
        return None
    A, B = hist[mv[1]], hist[mv[2]]
    lab = dict(A[1])
    lab.update(B[1])
    return {tuple(sorted(c.items())) for c in naive_completions(T, lab, sorted(set(A[0]) | set(B[0])))}


def _check_reply(T, hist, mv, child, max_len):
    used = {h for b in hist for h in b[2].values()}
    nodes, lab, hyper = child
    if mv[0] == "cyl":
        _, hi, face, b, k = mv
        N = hist[hi]
        if sorted(nodes) != sorted(N[0] + [k]) or not _agrees(child, N) or lab[(k,) + face] != b:
            raise ReplayError(f"reply to {mv} is not a legal extension")
        _check_labels(T, child, max_len, set(N[2]), used)
    elif mv[0] == "transform":
        want = _pullback(T, hist[mv[1]], dict(mv[2]), max_len)
        if (list(want[0]), want[1], want[2]) != (list(nodes), lab, hyper):
            raise ReplayError(f"reply to {mv} is not the transformed board")
    else:
        A, B = hist[mv[1]], hist[mv[2]]
        if sorted(nodes) != sorted(set(A[0]) | set(B[0])) or not _agrees(child, A) or not _agrees(child, B):
            raise ReplayError(f"reply to {mv} does not amalgamate")
        _check_labels(T, child, max_len, set(A[2]) | set(B[2]), used)


def _settle(T, hist, keys, mv, new, max_len):
    """A transformation may reproduce a board already in the history."""
    if new is not None:
        return new
    if mv[0] == "transform":
        b = _pullback(T, hist[mv[1]], dict(mv[2]), max_len)
        if _bkey(b) in keys:
            return b
    raise ReplayError("reply adds no board")


def _node(T, nid, cert, winner, max_len, done):
    if nid in done:
        return
    done.add(nid)
    node = cert["nodes"][nid]
    hist = [_load(T, d) for d in node["history"]]
    r = node["rounds"]
    if r == 0:
        if winner == "forall":
            raise ReplayError("exists survived every round on a claimed forall line")
        return
    legal = _moves(T, hist, cert)
    keys = {_bkey(b) for b in hist}

    def child_of(cid):
        c = cert["nodes"][cid]
        if c["rounds"] != r - 1:
            raise ReplayError("round counter mismatch")
        ch = [_load(T, d) for d in c["history"]]
        new = [b for b in ch if _bkey(b) not in keys]
        if not keys <= {_bkey(b) for b in ch} or len(new) > 1:
            raise ReplayError("history is not extended by one board")
        return new[0] if new else None

    if winner == "exists":
        listed = {}
        for e in node["moves"]:
            listed[_move_key(e["move"])] = e
        if set(listed) != legal:
            raise ReplayError("forall moves listed are not exactly the legal ones")
        for mv, e in listed.items():
            new = _settle(T, hist, keys, mv, child_of(e["reply"]), max_len)
            _check_reply(T, hist, mv, new, max_len)
            _node(T, e["reply"], cert, winner, max_len, done)
        return
    mv = _move_key(node["move"])
    if mv not in legal:
        raise ReplayError(f"forall move {mv} is not legal")
    got = set()
    for c in node["replies"]:
        new = _settle(T, hist, keys, mv, child_of(c), max_len)
        _check_reply(T, hist, mv, new, max_len)
        got.add(tuple(sorted(new[1].items())))
        _node(T, c, cert, winner, max_len, done)
    want = _legal_networks(T, hist, mv)
    if want is None:
        want = {tuple(sorted(_pullback(T, hist[mv[1]], dict(mv[2]), max_len)[1].items()))}
    if got != want:
        raise ReplayError("listed replies are not exactly the legal ones")


def replay_hyper_certificate(F: CaAtomStructure, cert: dict):
    """Re-validate an H certificate; returns (ok, message)."""
    T = _tables(F)
    try:
        max_len = cert["max_len"]
        winner = cert["winner"]
        nodes = cert["nodes"]
        done = set()
        if "start" in cert:
            root = nodes[cert["start"]]
            if root["rounds"] != cert["rounds"]:
                raise ReplayError("round counter mismatch")
            for d in root["history"]:
                board = _load(T, d)
                _check_labels(T, board, max_len, set(board[2]), set())
            _node(T, cert["start"], cert, winner, max_len, done)
            return True, "ok"
        if winner == "exists":
            if sorted(e["atom"] for e in cert["initial"]) != list(range(T.size)):
                raise ReplayError("initial round does not cover every atom")
        elif len(cert["initial"]) != 1:
            raise ReplayError("forall certificate must open with one atom")
        for e in cert["initial"]:
            a = e["atom"]
            roots = [e["reply"]] if winner == "exists" else e["replies"]
            got = set()
            for rid in roots:
                root = nodes[rid]
                if root["rounds"] != cert["rounds"] or len(root["history"]) != 1:
                    raise ReplayError("malformed initial position")
                board = _load(T, root["history"][0])
                if a not in board[1].values():
                    raise ReplayError("initial board does not realise the atom")
                _check_labels(T, board, max_len, set(), set())
                got.add(tuple(sorted(board[1].items())))
                _node(T, rid, cert, winner, max_len, done)
            if winner == "forall":
                want = {tuple(sorted(c.items())) for c, _ in naive_initial(T, a)}
                if got != want:
                    raise ReplayError("initial replies are not exactly the legal ones")
    except ReplayError as exc:
        return False, str(exc)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        return False, f"malformed certificate: {exc!r}"
    return True, "ok"
