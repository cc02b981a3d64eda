"""Blow-up-and-blur atom structures over a finite symmetric base.

Each non-identity base atom ``P`` is split into ``a_i^{P,W}`` for every
index ``i`` and every blur ``W`` containing ``P``. Two partitions of the
non-identity atoms matter: ``H^P`` (fixed base atom) and ``E^W`` (fixed
blur). Consistency, in the package convention ``z <= x ; y``:

    (x, y, z) consistent  iff  safe(W_z, W_x, W_y)  or  (E(i_x, i_y, i_z) and P_z <= P_x ; P_y)

Only indices ``i < t`` are materialised. Because neither rule looks at ``t``,
two truncations agree wherever both are defined.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..errors import BudgetExceeded, StructuralError, VerificationError
from ..kernels import blur_compose_brute
from ..ra_core import RaAtomStructure, from_json_dict, from_rule, register_rule, to_json_dict


def evenly_distributed(i, j, k):
    """Some ordering ``p, q, r`` of ``{i, j, k}`` (as a set) has ``r - q = q - p``."""
    s = sorted({i, j, k})
    if len(s) == 1:
        return True
    if len(s) == 2:
        return False
    return s[2] - s[1] == s[1] - s[0]


def partners(i, j):
    """All k >= 0 with E(i, j, k)."""
    if i == j:
        return {i}
    out = {2 * j - i, 2 * i - j}
    if (i + j) % 2 == 0:
        out.add((i + j) // 2)
    return {k for k in out if k >= 0}


def safe(U, V, W, base: RaAtomStructure):
    """Every ``a in U`` lies below ``b ; c`` for all ``b in V``, ``c in W``."""
    return all(base.consistent(b, c, a) for a in U for b in V for c in W)


@dataclass(frozen=True)
class BlurSpec:
    I: tuple  # non-identity base atoms, in a fixed order
    J: tuple  # blurs: (frozenset of base atoms, copy tag)
    t: int = 3

    def __post_init__(self):
        if self.t < 3:
            raise StructuralError("truncation t must be at least 3")
        if not self.J:
            raise StructuralError("blur family is empty")
        seen = set()
        cover = set()
        for W, tag in self.J:
            if not W:
                raise StructuralError("blur family contains the empty set")
            if not set(W) <= set(self.I):
                raise StructuralError(f"blur {sorted(W)} is not a subset of I")
            if (W, tag) in seen:
                raise StructuralError(f"blur {sorted(W)} listed twice with tag {tag}")
            seen.add((W, tag))
            cover |= set(W)
        if cover != set(self.I):
            raise StructuralError("blurs do not cover I")

    @classmethod
    def all_subsets(cls, I, l, mu=1, t=3):
        """Blurs are all ``l``-element subsets of ``I``, each in ``mu`` copies."""
        from itertools import combinations

        I = tuple(I)
        J = tuple((frozenset(c), tag) for tag in range(mu) for c in combinations(I, l))
        return cls(I, J, t)

    def with_t(self, t):
        return BlurSpec(self.I, self.J, t)

    def to_json_dict(self):
        return {"I": list(self.I), "J": [[sorted(W), tag] for W, tag in self.J], "t": self.t}

    @classmethod
    def from_json_dict(cls, doc):
        return cls(tuple(doc["I"]), tuple((frozenset(W), tag) for W, tag in doc["J"]), doc["t"])


def _check_base(base: RaAtomStructure, spec: BlurSpec):
    if len(base.identities) != 1:
        raise StructuralError("blur base must have exactly one identity atom")
    ident = next(iter(base.identities))
    if ident in spec.I:
        raise StructuralError("I must consist of non-identity atoms")
    if any(base.conv(a) != a for a in base.atoms()):
        raise StructuralError("blur base must have only self-converse atoms")


@dataclass(eq=False)
class BlownUp:
    """Truncated blown-up structure together with the tables its rule reads."""

    spec: BlurSpec
    base: RaAtomStructure
    ra: RaAtomStructure
    blocks: list  # per block: sorted base atoms of W
    offsets: list
    width: int  # atoms per index level
    base_tab: np.ndarray  # over positions in I
    safe_tab: np.ndarray  # over block ids: safe[w_z, w_x, w_y]
    idx: np.ndarray
    row: np.ndarray  # position in I
    blk: np.ndarray
    pos: dict = field(default_factory=dict)  # base atom -> position in I

    def atom(self, i, P, w):
        W = self.blocks[w]
        if P not in W:
            raise StructuralError(f"base atom {P} not in blur {w}")
        if not 0 <= i < self.spec.t:
            raise StructuralError(f"index {i} outside truncation {self.spec.t}")
        return 1 + i * self.width + self.offsets[w] + W.index(P)

    def decode(self, a):
        if a == 0:
            return None
        return int(self.idx[a]), self.spec.I[int(self.row[a])], int(self.blk[a])

    def E_table(self, t=None):
        t = self.spec.t if t is None else t
        i, j, k = np.indices((t, t, t))
        lo = np.minimum(np.minimum(i, j), k)
        hi = np.maximum(np.maximum(i, j), k)
        mid = i + j + k - lo - hi
        alleq = lo == hi
        distinct = (lo < mid) & (mid < hi)
        return alleq | (distinct & (hi - mid == mid - lo))

    def consistent_symbolic(self, x, y, z):
        """Consistency for untruncated atoms given as ``(i, P, w)`` or ``None`` for Id."""
        if x is None or y is None or z is None:
            return (x is None and y == z) or (y is None and x == z) or (z is None and x == y)
        (i, P, wx), (j, Q, wy), (k, R, wz) = x, y, z
        if self.safe_tab[wz, wx, wy]:
            return True
        return evenly_distributed(i, j, k) and bool(self.base_tab[self.pos[P], self.pos[Q], self.pos[R]])

    def brute_compose(self, X, Y, Z):
        E = self.E_table()
        return blur_compose_brute(np.asarray(X), np.asarray(Y), np.asarray(Z), self.idx, self.row,
                                  self.blk, self.safe_tab, E, self.base_tab)

    def block_atoms(self, w, rows=None):
        W = self.blocks[w]
        rows = W if rows is None else rows
        return [self.atom(i, P, w) for i in range(self.spec.t) for P in rows]

    def h_atoms(self, P):
        return [self.atom(i, P, w) for i in range(self.spec.t)
                for w, W in enumerate(self.blocks) if P in W]


def blur_structure(spec: BlurSpec, base: RaAtomStructure) -> BlownUp:
    _check_base(base, spec)
    I = spec.I
    pos = {P: n for n, P in enumerate(I)}
    Ia = np.array(I)
    base_tab = base.consistent_many(Ia[:, None, None], Ia[None, :, None], Ia[None, None, :])
    blocks = [sorted(W) for W, _ in spec.J]
    nb = len(blocks)
    # safe[wz, wx, wy]: every R in W_z is below P;Q for P in W_x, Q in W_y
    masks = np.zeros((nb, len(I)), dtype=bool)
    for w, W in enumerate(blocks):
        masks[w, [pos[P] for P in W]] = True
    safe_tab = np.zeros((nb, nb, nb), dtype=bool)
    for wx in range(nb):
        for wy in range(nb):
            sub = base_tab[np.ix_(masks[wx], masks[wy])]  # (P, Q, R)
            below = sub.all(axis=(0, 1))  # R below every P;Q
            safe_tab[:, wx, wy] = ~(masks & ~below[None, :]).any(axis=1)
    offsets = list(np.cumsum([0] + [len(W) for W in blocks[:-1]]))
    width = sum(len(W) for W in blocks)
    n = 1 + spec.t * width
    idx = np.zeros(n, dtype=np.int64)
    row = np.zeros(n, dtype=np.int64)
    blk = np.zeros(n, dtype=np.int64)
    names = ["Id"]
    for i in range(spec.t):
        for w, W in enumerate(blocks):
            for P in W:
                a = len(names)
                idx[a], row[a], blk[a] = i, pos[P], w
                names.append(f"a[{i}]^({base.names[P]},{w})")
    E = None

    def rule(a, b, c):
        nonlocal E
        if E is None:
            E = out.E_table()
        a, b, c = np.broadcast_arrays(np.asarray(a), np.asarray(b), np.asarray(c))
        ident = (a == 0) | (b == 0) | (c == 0)
        id_ok = ((a == 0) & (b == c)) | ((b == 0) & (a == c)) | ((c == 0) & (a == b))
        gen = safe_tab[blk[c], blk[a], blk[b]] | (E[idx[a], idx[b], idx[c]] & base_tab[row[a], row[b], row[c]])
        return np.where(ident, id_ok, gen)

    out = BlownUp(spec, base, None, blocks, offsets, width, base_tab, safe_tab, idx, row, blk, pos)
    source = {"rule": "blur", "params": {"spec": spec.to_json_dict(), "base": to_json_dict(base)}}
    out.ra = from_rule(names, [0], np.arange(n), rule, source=source,
                       meta={"construction": "blur", "t": spec.t, "blocks": nb})
    return out


@register_rule("blur")
def _blur_from_params(spec, base):
    return blur_structure(BlurSpec.from_json_dict(spec), from_json_dict(base)).ra


def f_family(l=2, n_base=6, mu=1, t=3):
    """The ``F(l, mu)`` instance: base with ``n_base`` non-identity atoms where a
    non-identity triple is consistent unless all three are equal; blurs are all
    ``l``-subsets in ``mu`` copies."""
    from ..graphs import complete_graph
    from .monk import monk_ra

    if n_base < 3 * l:
        raise ValueError("parameter bound violated: |I| >= 3l")
    base = monk_ra(complete_graph(1), n_base)
    spec = BlurSpec.all_subsets(tuple(range(1, n_base + 1)), l, mu=mu, t=t)
    return spec, base


# --------------------------------------------------------------------------
# complex-blur conditions


@dataclass
class BlurReport:
    results: dict  # condition number -> (holds, witness or None)

    @property
    def ok(self):
        return all(h for h, _ in self.results.values())


def check_complex_blur(spec: BlurSpec, base: RaAtomStructure, n: int, budget=5_000_000) -> BlurReport:
    """Evaluate the five complex-blur conditions by enumeration.

    (1) blurs nonempty; (2) blurs cover I; (3) I <= P ; W for P in I, W in J;
    (4) for all V_1..V_n, W_2..W_n in J some T in J has safe(V_i, W_i, T) for
    2 <= i <= n; (5) every W meets P_2;Q_2 . ... . P_n;Q_n.
    """
    I = list(spec.I)
    bit = {P: 1 << k for k, P in enumerate(I)}
    full = (1 << len(I)) - 1
    J = [W for W, _ in spec.J]
    Jm = [sum(bit[P] for P in W if P in bit) for W in J]
    comp = {}  # (b, c) -> bitmask of a in I with a <= b;c
    for b in I:
        for c in I:
            comp[b, c] = sum(bit[a] for a in I if base.consistent(b, c, a))
    res = {}
    empty = [sorted(W) for W in J if not W]
    res[1] = (not empty, empty[0] if empty else None)
    cover = set().union(*J) if J else set()
    miss = sorted(set(I) - cover)
    res[2] = (not miss, miss[0] if miss else None)

    wit = None
    for P in I:
        for W in J:
            got = 0
            for w in W:
                got |= comp[P, w]
            if got != full:
                wit = (P, sorted(W))
                break
        if wit:
            break
    res[3] = (wit is None, wit)

    # (4): safe(V, W, T) iff T-side... here safe(V_i, W_i, T) means every a in V_i is below b;c
    # for b in W_i, c in T; precompute per (W, T) the mask of admissible a
    nJ = len(J)
    if nJ ** (2 * n - 1) > budget:
        raise BudgetExceeded(f"condition (4) needs {nJ}^{2 * n - 1} checks", nJ ** (2 * n - 1), budget)
    below = np.zeros((nJ, nJ), dtype=object)
    for wi, W in enumerate(J):
        for ti, T in enumerate(J):
            m = full
            for b in W:
                for c in T:
                    m &= comp[b, c]
            below[wi, ti] = m
    # ok_T[v, w] = set of T (bitmask over J) with safe(V, W, T)
    okT = [[sum(1 << ti for ti in range(nJ) if Jm[v] & ~below[w, ti] == 0) for w in range(nJ)]
           for v in range(nJ)]
    wit = None
    for pairs in product(range(nJ), repeat=2 * (n - 1)):
        acc = (1 << nJ) - 1
        for q in range(n - 1):
            acc &= okT[pairs[2 * q]][pairs[2 * q + 1]]
            if not acc:
                break
        if not acc:
            wit = tuple(sorted(J[v]) for v in pairs)
            break
    res[4] = (wit is None, wit)

    if len(I) ** (2 * (n - 1)) * max(1, nJ) > budget:
        raise BudgetExceeded("condition (5) enumeration too large", len(I) ** (2 * (n - 1)) * nJ, budget)
    wit = None
    for pq in product(I, repeat=2 * (n - 1)):
        m = full
        for q in range(n - 1):
            m &= comp[pq[2 * q], pq[2 * q + 1]]
        for W, wm in zip(J, Jm):
            if not wm & m:
                wit = (pq, sorted(W))
                break
        if wit:
            break
    res[5] = (wit is None, wit)
    return BlurReport(res)


# --------------------------------------------------------------------------
# term algebra: finite/cofinite per block


@dataclass(frozen=True)
class IndexSet:
    """Subset of the naturals: finite, or cofinite given by its exceptions."""

    cofinite: bool
    items: frozenset

    @staticmethod
    def empty():
        return IndexSet(False, frozenset())

    @staticmethod
    def full():
        return IndexSet(True, frozenset())

    def __contains__(self, k):
        return (k in self.items) != self.cofinite

    def __or__(self, o):
        if self.cofinite and o.cofinite:
            return IndexSet(True, self.items & o.items)
        if self.cofinite:
            return IndexSet(True, self.items - o.items)
        if o.cofinite:
            return IndexSet(True, o.items - self.items)
        return IndexSet(False, self.items | o.items)

    def complement(self):
        return IndexSet(not self.cofinite, self.items)

    def __and__(self, o):
        return (self.complement() | o.complement()).complement()

    def bound(self):
        return max(self.items, default=-1)


@dataclass(frozen=True)
class CofiniteSet:
    """Element of the term algebra: identity flag plus one value per block.

    ``blocks[w]`` is ``(cofinite, members)`` with members pairs ``(i, P)``;
    for a cofinite block the members are the exceptions.
    """

    identity: bool
    blocks: tuple

    def rows(self, bu: BlownUp, w):
        cof, mem = self.blocks[w]
        return {P: IndexSet(cof, frozenset(i for i, Q in mem if Q == P)) for P in bu.blocks[w]}

    @staticmethod
    def from_rows(identity, rows_per_block, bu: BlownUp, witness=None):
        out = []
        for w, rows in enumerate(rows_per_block):
            kinds = {r.cofinite for r in rows.values()}
            if len(kinds) > 1:
                raise VerificationError(f"value on block {w} is neither finite nor cofinite", witness)
            cof = kinds.pop() if kinds else False
            out.append((cof, frozenset((i, P) for P, r in rows.items() for i in r.items)))
        return CofiniteSet(identity, tuple(out))

    def __or__(self, o):
        return self._combine(o, lambda a, b: a | b, self.identity or o.identity)

    def __and__(self, o):
        return self._combine(o, lambda a, b: a & b, self.identity and o.identity)

    def _combine(self, o, op, ident):
        out = []
        for (c1, m1), (c2, m2) in zip(self.blocks, o.blocks):
            r = op(IndexSet(c1, m1), IndexSet(c2, m2))
            out.append((r.cofinite, r.items))
        return CofiniteSet(ident, tuple(out))

    def complement(self):
        return CofiniteSet(not self.identity, tuple((not c, m) for c, m in self.blocks))

    def contains(self, i, P, w):
        c, m = self.blocks[w]
        return ((i, P) in m) != c

    def max_index(self):
        return max((i for _, m in self.blocks for i, _ in m), default=-1)

    def truncate(self, bu: BlownUp, t=None):
        t = bu.spec.t if t is None else t
        out = [0] if self.identity else []
        for i in range(t):
            for w, W in enumerate(bu.blocks):
                out += [bu.atom(i, P, w) for P in W if self.contains(i, P, w)]
        return sorted(out)


class TermAlgebraBlur:
    """Boolean operations, converse, identity and symbolic composition."""

    def __init__(self, bu: BlownUp):
        self.bu = bu
        nb = len(bu.blocks)
        self.zero = CofiniteSet(False, tuple((False, frozenset()) for _ in range(nb)))
        self.one = self.zero.complement()
        self.identity = CofiniteSet(True, self.zero.blocks)

    def block(self, w):
        blocks = list(self.zero.blocks)
        blocks[w] = (True, frozenset())
        return CofiniteSet(False, tuple(blocks))

    def atom(self, i, P, w):
        if P not in self.bu.blocks[w] or i < 0:
            raise StructuralError(f"no atom a[{i}] with base atom {P} in blur {w}")
        blocks = list(self.zero.blocks)
        blocks[w] = (False, frozenset({(i, P)}))
        return CofiniteSet(False, tuple(blocks))

    def converse(self, X):
        return X

    def compose(self, X: CofiniteSet, Y: CofiniteSet) -> CofiniteSet:
        bu = self.bu
        nb = len(bu.blocks)
        rows = [{R: IndexSet.empty() for R in bu.blocks[w]} for w in range(nb)]
        identity = X.identity and Y.identity
        if Y.identity:
            rows = _merge_rows(rows, X, bu)
        if X.identity:
            rows = _merge_rows(rows, Y, bu)
        # identity lands in X;Y when X and Y share an atom
        if any(c1 and c2 or (c1 and m2 - m1) or (c2 and m1 - m2) or (m1 & m2 and not c1 and not c2)
               for (c1, m1), (c2, m2) in zip(X.blocks, Y.blocks)):
            identity = True

        px = _pieces(X, bu)
        py = _pieces(Y, bu)
        for a in px:
            for b in py:
                wx, wy = a[1], b[1]
                safe_targets = [w for w in range(nb) if bu.safe_tab[w, wx, wy]]
                for w in safe_targets:
                    for R in bu.blocks[w]:
                        rows[w][R] = IndexSet.full()
                for w in range(nb):
                    if bu.safe_tab[w, wx, wy]:
                        continue
                    for R in bu.blocks[w]:
                        rows[w][R] = rows[w][R] | _piece_row(a, b, R, bu)
        return CofiniteSet.from_rows(identity, rows, bu, witness=(X, Y))


def _merge_rows(rows, X, bu):
    for w in range(len(rows)):
        for R, r in X.rows(bu, w).items():
            rows[w][R] = rows[w][R] | r
    return rows


def _pieces(X, bu):
    """Atoms ``("atom", w, i, P)`` and cofinite blocks ``("block", w, rows)``."""
    out = []
    for w, (cof, mem) in enumerate(X.blocks):
        if cof:
            out.append(("block", w, X.rows(bu, w)))
        else:
            out.extend(("atom", w, i, P) for i, P in sorted(mem))
    return out


def _fails_against(j, exc: IndexSet):
    # k such that no i outside the finite exception set has E(i, j, k)
    assert exc.cofinite
    bad = exc.items
    top = max(j, exc.bound()) + 1
    return frozenset(k for k in range(top + 1) if all(i in bad for i in partners(j, k)))


def _piece_row(a, b, R, bu) -> IndexSet:
    """Indices k with a_k^{R,.} in a;b via the E-and-base clause (no safe shortcut)."""
    pos = bu.pos
    base = bu.base_tab
    r = pos[R]
    if a[0] == "atom" and b[0] == "atom":
        _, _, i, P = a
        _, _, j, Q = b
        if base[pos[P], pos[Q], r]:
            return IndexSet(False, frozenset(partners(i, j)))
        return IndexSet.empty()
    if a[0] == "block" and b[0] == "block":
        # both sides cofinite: for any k pick a large M outside both exception
        # sets; {k, M, 2M - k} is an arithmetic progression
        if any(base[pos[P], pos[Q], r] for P in a[2] for Q in b[2]):
            return IndexSet.full()
        return IndexSet.empty()
    if a[0] == "atom":
        _, _, j, Q0 = a
        rows = b[2]
        pairs = [(Q0, P) for P in rows]
        block_rows = rows
    else:
        _, _, j, Q0 = b
        rows = a[2]
        pairs = [(P, Q0) for P in rows]
        block_rows = rows
    fails = None
    for (left, right) in pairs:
        P = right if a[0] == "atom" else left
        if not base[pos[left], pos[right], r]:
            continue
        inside = block_rows[P]  # cofinite: indices present in this row
        f = _fails_against(j, IndexSet(True, inside.items))
        fails = f if fails is None else fails & f
    if fails is None:
        return IndexSet.empty()
    return IndexSet(True, fails)


def term_algebra_blur(spec: BlurSpec, base: RaAtomStructure) -> TermAlgebraBlur:
    return TermAlgebraBlur(blur_structure(spec, base))


def cross_check_composition(ta: TermAlgebraBlur, X: CofiniteSet, Y: CofiniteSet, symbolic=None):
    """Compare ``X ; Y`` against brute force on the truncation.

    Explicit indices in X and Y must stay below ``t/4``; the comparison then
    covers every target atom with index below ``t/2``, where each symbolic
    witness has a truncated counterpart. Raises :class:`VerificationError`
    with the first disagreeing target.
    """
    bu = ta.bu
    t = bu.spec.t
    if max(X.max_index(), Y.max_index()) >= t // 4:
        raise ValueError("operand indices must stay below t/4 for the truncated comparison")
    sym = ta.compose(X, Y) if symbolic is None else symbolic
    window = t // 2
    Z = [0] + [bu.atom(k, R, w) for k in range(window) for w, W in enumerate(bu.blocks) for R in W]
    brute = bu.brute_compose(X.truncate(bu), Y.truncate(bu), Z)
    for z, got in zip(Z, brute):
        d = bu.decode(z)
        want = sym.identity if d is None else sym.contains(*d)
        if bool(got) != bool(want):
            raise VerificationError(f"symbolic and truncated composition disagree at {bu.ra.names[z]}",
                                    witness={"target": bu.ra.names[z], "symbolic": bool(want),
                                             "truncated": bool(got)})
    return sym


def h_join_check(bu: BlownUp):
    """For every triple (P, Q, R) of I: H^R meets H^P ; H^Q (truncated) exactly
    when R <= P ; Q in the base, and then it is contained in it entirely.

    Returns a list of failures (empty on success).
    """
    I = bu.spec.I
    H = {P: np.array(bu.h_atoms(P)) for P in I}
    fails = []
    for P in I:
        for Q in I:
            for R in I:
                hit = bu.brute_compose(H[P], H[Q], H[R])
                want = bool(bu.base_tab[bu.pos[P], bu.pos[Q], bu.pos[R]])
                if want and not hit.all():
                    fails.append((P, Q, R, "missing"))
                elif not want and hit.any():
                    fails.append((P, Q, R, "extra"))
    return fails
