"""Hypernetworks and the game H.

A hypernetwork is a network plus labels on node sequences of length
``1..max_len``. ``x ~ y`` when some tuple ``(x, y, z...)`` is labelled inside
``d_01``; sequences are ``~``-related entrywise and must carry equal labels.
A sequence is short when its entries meet at most ``n`` ``~``-classes, long
otherwise. Label ``0`` plays the role of λ: a λ-neat hypernetwork labels every
short sequence 0.

∃'s hyperlabelling is fixed: copy the label of a ``~``-related old sequence,
label new short sequences λ, and give each new ``~``-class of long sequences
the least label not used anywhere in the play so far.

The game state is the set of boards played so far; ∀ may work on any of them.
Moves: cylindrifier (fresh node ``k`` relative to the chosen board),
transformation ``(N, θ)`` for a partial surjection ``θ`` with domain inside
the node budget, and amalgamation ``(M, N)`` of boards that agree on a
nonempty overlap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product

from ..cyl_core.structure import CaAtomStructure
from ..errors import BudgetExceeded
from .network import CANON_PERM_LIMIT, Extender, Network, tuple_at

LAMBDA = 0
MOVES = ("cyl", "transform", "amalg")


@dataclass(eq=False)
class Hypernetwork:
    net: Network
    hyper: dict  # node sequence -> label
    owners: dict = field(default_factory=dict)  # frozenset({x, y}) -> "forall" | "exists"
    envelopes: dict = field(default_factory=dict)  # long sequence -> frozenset of nodes

    @property
    def nodes(self):
        return self.net.nodes

    def key(self):
        return (self.net.nodes, self.net.labels, tuple(sorted(self.hyper.items())))

    def __eq__(self, other):
        return isinstance(other, Hypernetwork) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json_dict(self):
        return {"network": self.net.to_json_dict(),
                "hyper": [[list(s), lab] for s, lab in sorted(self.hyper.items())],
                "owners": [[sorted(e), o] for e, o in sorted(self.owners.items(), key=lambda t: sorted(t[0]))],
                "envelopes": [[list(s), sorted(v)] for s, v in sorted(self.envelopes.items())]}

    @classmethod
    def from_json_dict(cls, d):
        return cls(Network.from_json_dict(d["network"]), {tuple(s): lab for s, lab in d["hyper"]},
                   {frozenset(e): o for e, o in d.get("owners", [])},
                   {tuple(s): frozenset(v) for s, v in d.get("envelopes", [])})


def sim_classes(F: CaAtomStructure, net: Network):
    """Map node -> representative of its ~-class."""
    d = net.as_dict()
    n = net.n
    rep = {}
    for x in net.nodes:
        for y in net.nodes:
            if y in rep:
                continue
            if x == y or any(F.diag[0, 1, d[(x, y) + z]] for z in product(net.nodes, repeat=n - 2)):
                rep[y] = rep.get(x, x)
    return {v: rep.get(v, v) for v in net.nodes}


def sequences(nodes, max_len):
    for L in range(1, max_len + 1):
        yield from product(nodes, repeat=L)


def is_short(seq, cls, n):
    return len({cls[v] for v in seq}) <= n


def hyperedge_classify(F: CaAtomStructure, H: Hypernetwork):
    """Per hyperedge: "short"/"long", plus owners and envelopes as tracked during play."""
    cls = sim_classes(F, H.net)
    kinds = {s: ("short" if is_short(s, cls, F.dim) else "long") for s in H.hyper}
    return {"kind": kinds, "owners": dict(H.owners), "envelopes": dict(H.envelopes)}


def hyper_violations(F: CaAtomStructure, H: Hypernetwork, max_len, neat=True):
    cls = sim_classes(F, H.net)
    out = []
    seqs = list(sequences(H.nodes, max_len))
    if set(H.hyper) != set(seqs):
        out.append(("domain",))
        return out
    by_class = {}
    for s in seqs:
        k = tuple(cls[v] for v in s)
        if by_class.setdefault(k, H.hyper[s]) != H.hyper[s]:
            out.append(("sim", s))
        if neat and is_short(s, cls, F.dim) and H.hyper[s] != LAMBDA:
            out.append(("neat", s))
    return out


def _label_new(F, net, old_parts, used):
    """∃'s hyperlabelling of ``net`` given labelled parts (list of Hypernetworks)."""
    cls = sim_classes(F, net)
    n = F.dim
    max_len = old_parts[0][1]
    hyper = {}
    known = {}
    for H, _ in old_parts:
        for s, lab in H.hyper.items():
            if s in hyper and hyper[s] != lab:
                return None
            hyper[s] = lab
            k = tuple(cls[v] for v in s)
            if known.setdefault(k, lab) != lab:
                return None
    fresh = max(used) + 1 if used else 1
    for s in sequences(net.nodes, max_len):
        if s in hyper:
            continue
        k = tuple(cls[v] for v in s)
        if k in known:
            hyper[s] = known[k]
        elif is_short(s, cls, n):
            hyper[s] = known[k] = LAMBDA
        else:
            hyper[s] = known[k] = fresh
            fresh += 1
    return hyper


def initial_hypernetwork(F, net, max_len):
    hyper = _label_new(F, net, [(Hypernetwork(net, {}), max_len)], set())
    owners = {frozenset((x, y)): "forall" for x in net.nodes for y in net.nodes if x < y}
    return Hypernetwork(net, hyper, owners, {})


@dataclass
class HyperResult:
    winner: str
    rounds: int
    positions: int
    certificate: dict | None = None
    reason: str = ""

    def to_json_dict(self):
        return {"winner": self.winner, "rounds": self.rounds, "positions": self.positions,
                "reason": self.reason, "certificate": self.certificate}


class HyperSolver:
    def __init__(self, F: CaAtomStructure, max_len=None, node_budget=5, moves=MOVES, budget=50_000,
                 theta_extra=1):
        self.F = F
        self.theta_extra = theta_extra
        self.n = F.dim
        self.max_len = F.dim + 1 if max_len is None else max_len
        self.node_budget = node_budget
        self.moves = tuple(m for m in MOVES if m in moves)
        self.budget = budget
        self.ext = Extender(F)
        self.memo = {}
        self.positions = 0

    # ---- helpers -------------------------------------------------------

    def used_labels(self, history):
        return {lab for H in history for lab in H.hyper.values()}

    def initial_boards(self, a):
        from ..cyl_core.rainbow_atoms import growth_patterns

        out = []
        for pat in growth_patterns(self.n):
            s = max(pat) + 1
            for net in self.ext.extensions(None, range(s), {pat: int(a)}):
                out.append(initial_hypernetwork(self.F, net, self.max_len))
        return out

    def forall_moves(self, history):
        F, n = self.F, self.n
        hist = sorted(history, key=lambda H: H.key())
        if "cyl" in self.moves:
            for hi, N in enumerate(hist):
                d = N.net.as_dict()
                free = [v for v in range(self.node_budget) if v not in N.nodes]
                for face in sorted({tuple(sorted(f)) for f in product(N.nodes, repeat=n - 1)}):
                    line = [d[tuple_at(face, 0, v)] for v in N.nodes]
                    cls = F.classes[0, line[0]]
                    for b in range(F.size):
                        if F.classes[0, b] != cls or b in line:
                            continue
                        if not free:
                            raise BudgetExceeded(f"node budget {self.node_budget} reached", len(N.nodes) + 1,
                                                 self.node_budget)
                        for k in free:
                            yield ("cyl", hi, face, b, k)
        if "transform" in self.moves:
            for hi, N in enumerate(hist):
                top = len(N.nodes) + self.theta_extra
                for theta in _surjections(list(range(self.node_budget)), list(N.nodes), top):
                    yield ("transform", hi, theta)
        if "amalg" in self.moves:
            for i, M in enumerate(hist):
                for j, N in enumerate(hist):
                    if i < j and _amalgamable(M, N) and not (set(M.nodes) <= set(N.nodes)
                                                             or set(N.nodes) <= set(M.nodes)):
                        yield ("amalg", i, j)

    def replies(self, history, move):
        F = self.F
        hist = sorted(history, key=lambda H: H.key())
        used = self.used_labels(history)
        if move[0] == "cyl":
            _, hi, face, b, k = move
            N = hist[hi]
            out = []
            for net in self.ext.extensions(N.net, [k], {tuple_at(face, 0, k): int(b)}):
                hyper = _label_new(F, net, [(N, self.max_len)], used)
                if hyper is None:
                    continue
                owners = dict(N.owners)
                for v in N.nodes:
                    owners[frozenset((v, k))] = "forall" if v in face else "exists"
                env = {s: e for s, e in N.envelopes.items()}
                cls = sim_classes(F, net)
                for s in hyper:
                    if k in s and not is_short(s, cls, self.n):
                        env[s] = frozenset(net.nodes)
                out.append(Hypernetwork(net, hyper, owners, env))
            return out
        if move[0] == "transform":
            _, hi, theta = move
            return [transform(hist[hi], dict(theta), self.max_len)]
        _, i, j = move
        M, N = hist[i], hist[j]
        partial = dict(M.net.as_dict())
        partial.update(N.net.as_dict())
        nodes = sorted(set(M.nodes) | set(N.nodes))
        out = []
        for net in self.ext.complete(partial, nodes):
            hyper = _label_new(F, net, [(M, self.max_len), (N, self.max_len)], used)
            if hyper is None:
                continue
            owners = {}
            for x in nodes:
                for y in nodes:
                    if x < y:
                        e = frozenset((x, y))
                        owners[e] = "forall" if "forall" in (M.owners.get(e), N.owners.get(e)) else "exists"
            env = {}
            cls = sim_classes(F, net)
            for s in hyper:
                if is_short(s, cls, self.n):
                    continue
                if set(s) <= set(M.nodes):
                    env[s] = M.envelopes.get(s, frozenset(M.nodes))
                elif set(s) <= set(N.nodes):
                    env[s] = N.envelopes.get(s, frozenset(N.nodes))
                else:
                    env[s] = frozenset(M.nodes)
            out.append(Hypernetwork(net, hyper, owners, env))
        return out

    # ---- search ---------------------------------------------------------

    def history_key(self, history):
        """Least sorted board-key tuple over renamings of the node names (up to the perm limit)."""
        if self.node_budget > CANON_PERM_LIMIT:
            return frozenset(H.key() for H in history)
        best = None
        for img in permutations(range(self.node_budget)):
            cand = tuple(sorted(_renamed_key(H, img) for H in history))
            if best is None or cand < best:
                best = cand
        return best

    def exists_wins(self, history: frozenset, r):
        if r == 0:
            return True
        key = (self.history_key(history), r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.positions += 1
        if self.positions > self.budget:
            raise BudgetExceeded(f"position budget {self.budget} exhausted", self.positions, self.budget)
        win = True
        for mv in self.forall_moves(history):
            reps = self.replies(history, mv)
            if mv[0] == "transform" and reps[0] in history:
                continue  # leaves the position unchanged
            if not any(self.exists_wins(history | {L}, r - 1) for L in reps):
                win = False
                break
        self.memo[key] = win
        return win

    def solve(self, rounds, start=None, certificate=True) -> HyperResult:
        self._nodes, self._ids = [], {}
        try:
            if start is not None:
                hist = frozenset(start)
                winner = "exists" if self.exists_wins(hist, rounds) else "forall"
            else:
                winner = "exists"
                for a in range(self.F.size):
                    if not any(self.exists_wins(frozenset([N0]), rounds) for N0 in self.initial_boards(a)):
                        winner = "forall"
                        break
            cert = None
            if certificate:
                cert = {"schema_version": 1, "initial": [], "winner": winner, "rounds": rounds,
                        "max_len": self.max_len, "moves": list(self.moves), "node_budget": self.node_budget,
                        "theta_extra": self.theta_extra, "n": self.n, "nodes": self._nodes}
                if start is not None:
                    cert["start"] = self._cert(frozenset(start), rounds, winner)
                else:
                    for a in range(self.F.size):
                        boards = self.initial_boards(a)
                        wins = [N0 for N0 in boards if self.exists_wins(frozenset([N0]), rounds)]
                        if winner == "exists":
                            cert["initial"].append({"atom": a, "reply": self._cert(frozenset([wins[0]]), rounds,
                                                                                     "exists")})
                        elif not wins:
                            cert["initial"] = [{"atom": a, "replies": [
                                self._cert(frozenset([N0]), rounds, "forall") for N0 in boards]}]
                            break
        except BudgetExceeded as exc:
            return HyperResult("undetermined", rounds, self.positions, None, str(exc))
        return HyperResult(winner, rounds, self.positions, cert)

    def _cert(self, history, r, winner):
        """Id of the certificate node for ``history`` with ``r`` rounds left (shared between paths)."""
        key = (frozenset(H.key() for H in history), r)
        if key in self._ids:
            return self._ids[key]
        node = {"history": [H.to_json_dict() for H in sorted(history, key=lambda H: H.key())], "rounds": r}
        if r > 0 and winner == "exists":
            node["moves"] = []
            for mv in self.forall_moves(history):
                L = next(L for L in self.replies(history, mv) if self.exists_wins(history | {L}, r - 1))
                node["moves"].append({"move": _move_json(mv), "reply": self._cert(history | {L}, r - 1, "exists")})
        elif r > 0:
            for mv in self.forall_moves(history):
                reps = self.replies(history, mv)
                if mv[0] == "transform" and reps[0] in history:
                    continue
                if not any(self.exists_wins(history | {L}, r - 1) for L in reps):
                    node["move"] = _move_json(mv)
                    node["replies"] = [self._cert(history | {L}, r - 1, "forall") for L in reps]
                    break
            else:
                raise AssertionError("position is not a forall win")
        self._ids[key] = len(self._nodes)
        self._nodes.append(node)
        return self._ids[key]


def _renamed_key(H: Hypernetwork, img):
    nodes = tuple(sorted(img[v] for v in H.nodes))
    inv = {img[v]: v for v in H.nodes}
    d = H.net.as_dict()
    labels = tuple(d[tuple(inv[v] for v in x)] for x in product(nodes, repeat=H.net.n))
    hyper = tuple(sorted((tuple(img[v] for v in s), lab) for s, lab in H.hyper.items()))
    return (nodes, labels, hyper)


def _move_json(mv):
    if mv[0] == "cyl":
        return {"type": "cyl", "board": mv[1], "face": list(mv[2]), "b": int(mv[3]), "k": mv[4]}
    if mv[0] == "transform":
        return {"type": "transform", "board": mv[1], "theta": [list(p) for p in mv[2]]}
    return {"type": "amalg", "boards": [mv[1], mv[2]]}


def _surjections(domain_pool, targets, top):
    """Partial maps pool -> targets that are onto with at most ``top`` points, as item tuples."""
    t = len(targets)
    for size in range(t, min(top, len(domain_pool)) + 1):
        for dom in combinations(domain_pool, size):
            for img in product(targets, repeat=size):
                if len(set(img)) == t:
                    yield tuple(zip(dom, img))


def _amalgamable(M: Hypernetwork, N: Hypernetwork):
    common = sorted(set(M.nodes) & set(N.nodes))
    if not common:
        return False
    dm, dn = M.net.as_dict(), N.net.as_dict()
    if any(dm[x] != dn[x] for x in product(common, repeat=M.net.n)):
        return False
    cs = set(common)
    return all(N.hyper[s] == lab for s, lab in M.hyper.items() if set(s) <= cs)


def transform(N: Hypernetwork, theta: dict, max_len):
    """``Nθ``: nodes θ^{-1}(nodes N), labels pulled back along θ."""
    dom = sorted(x for x in theta if theta[x] in N.nodes)
    d = N.net.as_dict()
    net = Network.from_dict(N.net.n, dom, {x: d[tuple(theta[v] for v in x)] for x in product(dom, repeat=N.net.n)})
    hyper = {s: N.hyper[tuple(theta[v] for v in s)] for s in sequences(dom, max_len)}
    owners = {}
    for x in dom:
        for y in dom:
            if x < y and theta[x] != theta[y]:
                owners[frozenset((x, y))] = N.owners.get(frozenset((theta[x], theta[y])), "exists")
    env = {}
    for s in hyper:
        img = tuple(theta[v] for v in s)
        if img in N.envelopes:
            env[s] = frozenset(x for x in dom if theta[x] in N.envelopes[img])
    return Hypernetwork(net, hyper, owners, env)


def solve_hypergame(F: CaAtomStructure, rounds=2, max_len=None, node_budget=5, moves=MOVES, budget=50_000,
                    start=None, certificate=True, theta_extra=1) -> HyperResult:
    return HyperSolver(F, max_len, node_budget, moves, budget, theta_extra).solve(rounds, start, certificate)
