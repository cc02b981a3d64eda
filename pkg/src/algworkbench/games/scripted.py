"""Game states, legal moves and scripted plays."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from ..cyl_core.coloured import ColouredGraph, Palette, coloured_graph_check
from ..cyl_core.structure import CaAtomStructure
from ..errors import IllegalMove
from .network import Network, network_violations, tuple_at
from .rainbow_game import forall_cone_move, opening_graph
from .solver import GameSolver, normal_move


@dataclass
class GameState:
    F: CaAtomStructure
    kind: str = "G"  # "G", "F" or "H"
    rounds_left: int = 3
    node_budget: int = 8
    m: int | None = None
    history: list = field(default_factory=list)  # boards played so far

    @property
    def board(self):
        return self.history[-1] if self.history else None


@dataclass(frozen=True)
class CylMove:
    face: tuple
    k: int
    b: int
    l: int = 0
    board: int = -1  # index into the history (H only)


@dataclass(frozen=True)
class AtomMove:
    atom: int


@dataclass(frozen=True)
class TransformMove:
    board: int
    theta: tuple  # sorted (x, θ(x)) pairs


@dataclass(frozen=True)
class AmalgMove:
    left: int
    right: int


def legal_moves(state: GameState):
    """All of ∀'s legal moves in ``state`` (cylindrifier moves in every position ``l``)."""
    F = state.F
    n = F.dim
    if not state.history:
        return [AtomMove(a) for a in range(F.size)]
    if state.kind == "H":
        return _hyper_moves(state)
    N = state.board
    d = N.as_dict()
    out = []
    if state.kind == "G":
        ks = [max(N.nodes) + 1]
    else:
        ks = list(range(state.m))
    for face in product(N.nodes, repeat=n - 1):
        for l in range(n):
            cls = F.classes[l, d[tuple_at(face, l, N.nodes[0])]]
            for b in range(F.size):
                if F.classes[l, b] != cls:
                    continue
                for k in ks:
                    if k not in face:
                        out.append(CylMove(tuple(face), k, b, l))
    return out


def _hyper_moves(state):
    from .hyper import HyperSolver

    hs = HyperSolver(state.F, node_budget=state.node_budget)
    hist = sorted(state.history, key=lambda H: H.key())
    out = []
    for mv in hs.forall_moves(frozenset(hist)):
        if mv[0] == "cyl":
            out.append(CylMove(mv[2], mv[4], int(mv[3]), 0, mv[1]))
        elif mv[0] == "transform":
            out.append(TransformMove(mv[1], mv[2]))
        else:
            out.append(AmalgMove(mv[1], mv[2]))
    return out


def check_reply(state: GameState, move, M: Network):
    """Raise IllegalMove naming the first violated rule for ∃'s reply ``M``."""
    F = state.F
    bad = network_violations(F, M, 1)
    if bad:
        raise IllegalMove(f"reply is not a network: {bad[0]}", f"network-{bad[0][0]}")
    if state.kind == "F" and any(not 0 <= v < state.m for v in M.nodes):
        raise IllegalMove("F(m) boards must use nodes below m", "pebble-range")
    if isinstance(move, AtomMove):
        if move.atom not in M.labels:
            raise IllegalMove("initial board does not realise the atom", "initial-atom")
        return
    N = state.board
    k = move.k
    if sorted(M.nodes) != sorted(set(N.nodes) | {k}):
        raise IllegalMove("reply has the wrong node set", "node-set")
    d, e = N.as_dict(), M.as_dict()
    if any(e[x] != a for x, a in d.items() if k not in x):
        raise IllegalMove("reply does not extend the board", "extension")
    if e[tuple_at(move.face, move.l, k)] != move.b:
        raise IllegalMove("reply does not realise the demanded atom", "demand")


def check_move(state: GameState, move):
    F = state.F
    if isinstance(move, AtomMove):
        if state.history or not 0 <= move.atom < F.size:
            raise IllegalMove("atom moves only open the game", "initial-atom")
        return
    N = state.board
    if not isinstance(move, CylMove):
        raise IllegalMove("only cylindrifier moves in G and F(m)", "move-kind")
    if state.kind == "G" and move.k in N.nodes:
        raise IllegalMove("G needs a fresh node", "fresh-node")
    if state.kind == "F" and (not 0 <= move.k < state.m or move.k in move.face):
        raise IllegalMove("pebble outside m or inside the face", "pebble-range")
    if any(v not in N.nodes for v in move.face):
        raise IllegalMove("face is not on the board", "face")
    line = N(tuple_at(move.face, move.l, N.nodes[0]))
    if F.classes[move.l, move.b] != F.classes[move.l, line]:
        raise IllegalMove("b is not below the cylindrified label", "cylindrifier-bound")


@dataclass
class Transcript:
    moves: list
    boards: list
    outcome: str  # "exists" survives or "forall" wins
    reason: str = ""

    def to_json_dict(self):
        return {"moves": [repr(m) for m in self.moves], "boards": [B.to_json_dict() for B in self.boards],
                "outcome": self.outcome, "reason": self.reason}


def run_scripted(F: CaAtomStructure, exists_strategy, forall_script, kind="G", rounds=3, m=None,
                 node_budget=8) -> Transcript:
    """Play ``forall_script(state) -> move`` against ``exists_strategy(state, move) -> board or None``."""
    state = GameState(F, kind, rounds, node_budget, m)
    moves, boards = [], []
    total = rounds + 1
    for _ in range(total):
        mv = forall_script(state)
        if mv is None:
            break
        check_move(state, mv)
        moves.append(mv)
        M = exists_strategy(state, mv)
        if M is None:
            return Transcript(moves, boards, "forall", "exists has no legal reply")
        check_reply(state, mv, M)
        boards.append(M)
        state.history.append(M)
        if not isinstance(mv, AtomMove):
            state.rounds_left -= 1
    return Transcript(moves, boards, "exists")


# --------------------------------------------------------------------------
# strategies driven by the solver


def solver_exists_strategy(F, kind="G", rounds=3, m=None, node_budget=8):
    """∃ copies a winning reply found by the solver (any legal reply if she has none)."""
    s = GameSolver(F, kind, m, node_budget)

    def play(state: GameState, mv):
        r = state.rounds_left
        if isinstance(mv, AtomMove):
            reps = s.initial_replies(mv.atom)
            r = rounds
        else:
            reps = s.replies(state.board, _solver_move(F, state.board, mv))
        for M in reps:
            if s.exists_wins(M, r if isinstance(mv, AtomMove) else r - 1):
                return M
        return reps[0] if reps else None

    return play


def solver_forall_script(F, kind="G", rounds=3, m=None, node_budget=8):
    """∀ plays a winning move found by the solver when one exists, else the first legal move."""
    s = GameSolver(F, kind, m, node_budget)

    def play(state: GameState):
        if not state.history:
            for a in range(F.size):
                if not any(s.exists_wins(N0, rounds) for N0 in s.initial_replies(a)):
                    return AtomMove(a)
            return AtomMove(0)
        if state.rounds_left <= 0:
            return None
        first = None
        for face, l, b, k in s.forall_moves(state.board):
            mv = CylMove(face, k, int(b), l)
            first = first or mv
            if not any(s.exists_wins(M, state.rounds_left - 1) for M in s.replies(state.board, (face, l, b, k))):
                return mv
        return first

    return play


def _solver_move(F, N, mv: CylMove):
    face, l, b, k = normal_move(F, mv.face, mv.l, mv.b, mv.k)
    return face, l, b, k


# --------------------------------------------------------------------------
# rainbow cone script


@dataclass
class RainbowTranscript:
    graphs: list
    outcome: str
    rounds: int
    rho_history: list
    reason: str = ""


def run_rainbow_script(pal: Palette, strategy, rounds) -> RainbowTranscript:
    """∀'s green-cone script against a rainbow strategy; every graph is re-checked."""
    G = opening_graph(pal)
    graphs = [G]
    for r in range(1, rounds + 1):
        if -r not in pal.tint_values:
            raise IllegalMove("no tint left for the next cone", "palette-tints")
        H = strategy.reply(G, forall_cone_move(G, r), r)
        if H is None:
            return RainbowTranscript(graphs, "forall", r, list(strategy.rho.history), strategy.diagnostic)
        rep = coloured_graph_check(H, pal, allow_rho=False)
        if not rep.ok:
            raise IllegalMove(f"reply breaks {rep.violations[0].law}", rep.violations[0].law)
        graphs.append(H)
        G = H
    return RainbowTranscript(graphs, "exists", rounds, list(strategy.rho.history))
