"""Exhaustive solver for the k-round games G and F(m) on atomic networks.

Round structure: an initial round (∀ names an atom, ∃ answers with a network
realising it) followed by ``rounds`` cylindrifier rounds.

Move grammar shared with the independent evaluator in :mod:`.naive`:

* A cylindrifier move ``(face, l, b, k)`` asks for ``M(face[:l] + (k,) + face[l:]) = b``
  with ``b ≡_l`` the label of that tuple's line. Moves are taken in normal form
  (``l = 0`` and the face sorted), which is lossless: permuting a demanded tuple
  permutes the demanded atom by the transposition maps and leaves the set of
  legal answers unchanged.
* In G the demanded node ``k`` is fresh. A request already witnessed on the
  board is answered by leaving the board unchanged; the solver skips such moves
  since the outcome is monotone in the number of rounds left.
* In F(m) the node ``k`` is a pebble outside the face; a pebble on the board
  is lifted and replaced (labels through it are dropped). Unused pebbles are
  interchangeable, so only the least unused one is offered.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..cyl_core.structure import CaAtomStructure
from ..errors import BudgetExceeded
from .network import Extender, Network, canonical_key, tuple_at

SCHEMA_VERSION = 1
POSITION_BUDGET = 200_000
KINDS = ("G", "F")


def normal_move(F: CaAtomStructure, face, l, b, k):
    """Rewrite a demand so that ``k`` sits at position 0 and the face is sorted."""
    x = list(tuple_at(face, l, k))
    b = int(b)
    n = len(x)
    if l != 0:
        x[0], x[l] = x[l], x[0]
        b = int(F.swaps[0, l, b])
    for end in range(n - 1, 1, -1):
        for i in range(1, end):
            if x[i] > x[i + 1]:
                x[i], x[i + 1] = x[i + 1], x[i]
                b = int(F.swaps[i, i + 1, b])
    return tuple(x[1:]), 0, b, k


@dataclass
class GameResult:
    winner: str  # "exists", "forall" or "undetermined"
    kind: str
    rounds: int
    m: int | None
    certificate: dict | None = None
    positions: int = 0
    reason: str = ""

    def to_json_dict(self):
        return {"schema_version": SCHEMA_VERSION, "winner": self.winner, "kind": self.kind,
                "rounds": self.rounds, "m": self.m, "positions": self.positions, "reason": self.reason,
                "certificate": self.certificate}


class GameSolver:
    def __init__(self, F: CaAtomStructure, kind="G", m=None, node_budget=8, budget=POSITION_BUDGET):
        if kind not in KINDS:
            raise ValueError(f"unknown game kind {kind!r}")
        if kind == "F":
            if m is None or m <= F.dim:
                raise ValueError("parameter bound violated: F(m) needs m > n")
        self.F = F
        self.n = F.dim
        self.kind = kind
        self.m = m
        self.node_budget = node_budget if kind == "G" else m
        self.budget = budget
        self.ext = Extender(F)
        self.memo = {}
        self.positions = 0

    # ---- moves ----------------------------------------------------------

    def initial_replies(self, a):
        out = []
        from ..cyl_core.rainbow_atoms import growth_patterns

        for pat in growth_patterns(self.n):
            s = max(pat) + 1
            out.extend(self.ext.extensions(None, range(s), {pat: int(a)}))
        return out

    def forall_moves(self, N: Network):
        """Unwitnessed cylindrifier moves in normal form, sorted."""
        F, n = self.F, self.n
        d = N.as_dict()
        seen = set()
        faces = sorted({tuple(sorted(f)) for f in _product(N.nodes, n - 1)})
        if self.kind == "G":
            ks = [max(N.nodes) + 1]
        else:
            unused = [p for p in range(self.m) if p not in N.nodes]
            ks = list(N.nodes) + unused[:1]
        for face in faces:
            line = [d[tuple_at(face, 0, v)] for v in N.nodes]
            cls = F.classes[0, line[0]]
            for b in range(F.size):
                if F.classes[0, b] != cls:
                    continue
                if self.kind == "G":
                    if b in line:
                        continue
                for k in ks:
                    if k in face:
                        continue
                    if k in N.nodes and d[tuple_at(face, 0, k)] == b:
                        continue
                    mv = (face, 0, b, k)
                    if mv not in seen:
                        seen.add(mv)
                        yield mv

    def replies(self, N: Network, move):
        return list(self.iter_replies(N, move))

    def iter_replies(self, N: Network, move):
        face, l, b, k = move
        if self.kind == "G" and k + 1 > self.node_budget:
            raise BudgetExceeded(f"node budget {self.node_budget} reached", k + 1, self.node_budget)
        base = N.restrict([v for v in N.nodes if v != k]) if k in N.nodes else N
        return self.ext.extensions(base, [k], {tuple_at(face, l, k): int(b)})

    # ---- search ---------------------------------------------------------

    def exists_wins(self, N: Network, r):
        if r == 0:
            return True
        key = (canonical_key(N), r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        win = True
        for mv in self.forall_moves(N):
            # every ∀ move opens a fresh position for ∃
            self.positions += 1
            if self.positions > self.budget:
                raise BudgetExceeded(f"position budget {self.budget} exhausted", self.positions, self.budget)
            if not any(self.exists_wins(M, r - 1) for M in self.iter_replies(N, mv)):
                win = False
                break
        self.memo[key] = win
        return win

    def solve(self, rounds, certificate=True) -> GameResult:
        try:
            winner = "exists"
            for a in range(self.F.size):
                if not any(self.exists_wins(N0, rounds) for N0 in self.initial_replies(a)):
                    winner = "forall"
                    break
            cert = _CertBuilder(self, rounds).build(winner) if certificate else None
        except BudgetExceeded as exc:
            return GameResult("undetermined", self.kind, rounds, self.m, None, self.positions, str(exc))
        return GameResult(winner, self.kind, rounds, self.m, cert, self.positions)


def _product(nodes, r):
    from itertools import product

    return product(nodes, repeat=r)


def solve_game(F: CaAtomStructure, kind="G", rounds=3, node_budget=8, m=None, budget=POSITION_BUDGET,
               certificate=True) -> GameResult:
    return GameSolver(F, kind, m, node_budget, budget).solve(rounds, certificate)


# --------------------------------------------------------------------------
# certificates


class _CertBuilder:
    """Walk the solved game and record a strategy for the winner as a DAG of literal boards."""

    def __init__(self, solver: GameSolver, rounds):
        self.s = solver
        self.rounds = rounds
        self.nodes = []
        self.ids = {}

    def _add(self, key, node):
        self.ids[key] = len(self.nodes)
        self.nodes.append(node)
        return self.ids[key]

    def build(self, winner):
        s = self.s
        root = {"player": "forall", "initial": True, "rounds": self.rounds}
        if winner == "exists":
            root["moves"] = []
            for a in range(s.F.size):
                N0 = next(N for N in s.initial_replies(a) if s.exists_wins(N, self.rounds))
                root["moves"].append({"atom": a, "reply": self.exists_node(N0, self.rounds)})
        else:
            for a in range(s.F.size):
                reps = s.initial_replies(a)
                if not any(s.exists_wins(N, self.rounds) for N in reps):
                    root["atom"] = a
                    root["replies"] = [self.forall_node(N, self.rounds) for N in reps]
                    break
        root_id = len(self.nodes)
        self.nodes.append(root)
        return {"schema_version": SCHEMA_VERSION, "kind": s.kind, "m": s.m, "n": s.n, "rounds": self.rounds,
                "winner": winner, "root": root_id, "nodes": self.nodes}

    def exists_node(self, N, r):
        key = ("e", N, r)
        if key in self.ids:
            return self.ids[key]
        s = self.s
        moves = []
        if r > 0:
            for mv in s.forall_moves(N):
                M = next(M for M in s.replies(N, mv) if s.exists_wins(M, r - 1))
                moves.append({"move": _mv_json(mv), "reply": self.exists_node(M, r - 1)})
        return self._add(key, {"player": "forall", "board": N.to_json_dict(), "rounds": r, "moves": moves})

    def forall_node(self, N, r):
        key = ("a", N, r)
        if key in self.ids:
            return self.ids[key]
        s = self.s
        for mv in s.forall_moves(N):
            reps = s.replies(N, mv)
            if not any(s.exists_wins(M, r - 1) for M in reps):
                kids = [self.forall_node(M, r - 1) for M in reps]
                return self._add(key, {"player": "forall", "board": N.to_json_dict(), "rounds": r,
                                       "move": _mv_json(mv), "replies": kids})
        raise AssertionError("position is not a forall win")


def _mv_json(mv):
    face, l, b, k = mv
    return {"face": list(face), "l": l, "b": int(b), "k": k}


def dumps_certificate(cert):
    return json.dumps(cert, sort_keys=True)
