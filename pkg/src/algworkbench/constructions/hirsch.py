"""Hirsch's algebras C(m, n, r).

Atoms are symmetric matrices ``f : m x m -> Bin(n, r)`` with ``Id`` on the
diagonal and no triangle whose labels fall in ``Forb`` in any order. Matrices
are stored as edge vectors in the column-major upper-triangle order of
:mod:`algworkbench.kernels`.

Label ids: ``0`` is ``Id``; ``a^k(i, j)`` is ``1 + (i * r + j) * psi + k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from ..errors import BudgetExceeded, StructuralError, VerificationError
from ..kernels import edge_index, extend_by_node, fibre_signatures

ARITH_CAP = 1 << 62
ATOM_BUDGET = 2_000_000


def hirsch_kappa(x, y):
    if x < 0 or y < 0:
        raise ValueError("kappa is defined on naturals")
    v = 0
    for _ in range(y):
        v = 1 + x * v
        if v > ARITH_CAP:
            raise OverflowError(f"kappa({x}, {y}) exceeds {ARITH_CAP}")
    return v


def hirsch_psi(n, r):
    return hirsch_kappa((n - 1) * r, (n - 1) * r) + 1


@dataclass(frozen=True)
class HirschParams:
    m: int
    n: int
    r: int

    def __post_init__(self):
        if not (3 <= self.m and 2 <= self.n and self.r >= 0):
            raise ValueError("parameter bound violated: 3 <= m, 2 <= n, r >= 0")

    @property
    def psi(self):
        return hirsch_psi(self.n, self.r)

    @property
    def bin_size(self):
        return 1 + (self.n - 1) * self.r * self.psi


def bin_labels(n, r):
    """``[(None)] + [(k, i, j)]`` in id order: Id first, then a^k(i, j)."""
    psi = hirsch_psi(n, r)
    size = 1 + (n - 1) * r * psi
    if size > ATOM_BUDGET:
        raise BudgetExceeded(f"|Bin({n},{r})| = {size}", size, ATOM_BUDGET)
    out = [None]
    for i in range(n - 1):
        for j in range(r):
            for k in range(psi):
                out.append((k, i, j))
    return out


def label_name(lab):
    return "Id" if lab is None else f"a^{lab[0]}({lab[1]},{lab[2]})"


def forb_table(n, r):
    """``forb[b1, b2, b3]`` for the ordered triple (f(x,y), f(y,z), f(x,z))."""
    labs = bin_labels(n, r)
    N = len(labs)
    forb = np.zeros((N, N, N), dtype=bool)
    forb[0] = ~np.eye(N, dtype=bool)
    i_of = np.array([-1] + [l[1] for l in labs[1:]])
    j_of = np.array([-1] + [l[2] for l in labs[1:]])
    nz = np.arange(N) > 0
    a, b, c = np.ix_(np.arange(N), np.arange(N), np.arange(N))
    same = (i_of[a] == i_of[b]) & (j_of[a] == j_of[b]) & (i_of[c] == i_of[a]) & (j_of[c] <= j_of[a])
    forb |= same & nz[a] & nz[b] & nz[c]
    return forb


def triangle_ok(forb):
    """Symmetric closure: a triangle is fine iff no ordering of its labels is forbidden."""
    bad = np.zeros_like(forb)
    for p in permutations(range(3)):
        bad |= forb.transpose(p)
    return ~bad


@dataclass(eq=False)
class HirschAlgebra:
    params: HirschParams
    labels: list
    forb: np.ndarray
    ok3: np.ndarray
    F: np.ndarray  # (atoms, edges)
    codes: np.ndarray = field(repr=False)

    @property
    def m(self):
        return self.params.m

    @property
    def size(self):
        return self.F.shape[0]

    def matrix(self, a):
        m = self.m
        M = np.zeros((m, m), dtype=np.int64)
        for y in range(1, m):
            for x in range(y):
                M[x, y] = M[y, x] = self.F[a, edge_index(x, y)]
        return M

    def edges_of(self, M):
        m = self.m
        return np.array([M[x][y] for y in range(1, m) for x in range(y)], dtype=np.int64)

    def encode(self, rows):
        rows = np.atleast_2d(rows)
        base = len(self.labels)
        code = np.zeros(rows.shape[0], dtype=np.int64)
        for e in range(rows.shape[1]):
            code = code * base + rows[:, e]
        return code

    def index_of(self, rows):
        """Atom ids of edge-vector rows; -1 where a row is not an atom."""
        code = self.encode(rows)
        pos = np.searchsorted(self.codes, code)
        pos = np.minimum(pos, len(self.codes) - 1)
        return np.where(self.codes[pos] == code, pos, -1)

    def index(self, M):
        i = int(self.index_of(self.edges_of(M)[None])[0])
        if i < 0:
            raise StructuralError("matrix is not in F(m, n, r)")
        return i

    def contains(self, M):
        M = np.asarray(M)
        m = self.m
        if M.shape != (m, m) or (M != M.T).any() or (np.diag(M) != 0).any():
            return False
        return bool(self.index_of(self.edges_of(M)[None])[0] >= 0)

    # operations on atoms -------------------------------------------------

    def diag(self, x, y):
        if x == y:
            return np.ones(self.size, dtype=bool)
        return self.F[:, edge_index(x, y)] == 0

    def class_ids(self, x):
        """Class id per atom for the relation 'agree off x'."""
        cols = [edge_index(a, b) for a, b in combinations([v for v in range(self.m) if v != x], 2)]
        if not cols:
            return np.zeros(self.size, dtype=np.int64)
        _, inv = np.unique(self.F[:, cols], axis=0, return_inverse=True)
        return inv.reshape(-1).astype(np.int64)

    def cyl(self, x, X):
        cls = self.class_ids(x)
        return np.isin(cls, cls[X])

    def tau_map(self, tau):
        """Atom map f -> f tau for a function ``tau`` on m given as a sequence."""
        m = self.m
        cols = []
        for y in range(1, m):
            for x in range(y):
                tx, ty = tau[x], tau[y]
                cols.append(-1 if tx == ty else edge_index(tx, ty))
        rows = np.stack([self.F[:, c] if c >= 0 else np.zeros(self.size, dtype=np.int64) for c in cols], axis=1)
        idx = self.index_of(rows)
        if (idx < 0).any():
            raise VerificationError("f tau left F(m, n, r)", witness=int(np.nonzero(idx < 0)[0][0]))
        return idx

    def subst(self, tau, X):
        return X[self.tau_map(tau)]

    def carrier_size(self):
        return 2 ** self.size


def enumerate_F(m, ok3, budget=ATOM_BUDGET):
    rows = np.zeros((1, 0), dtype=np.int64)
    for m_old in range(1, m):
        p, v = extend_by_node(rows, m_old, ok3, budget=budget)
        rows = np.concatenate([rows[p], v], axis=1)
    return rows


def hirsch_algebra(p: HirschParams, forb=None, budget=ATOM_BUDGET) -> HirschAlgebra:
    """Enumerate F(m, n, r). ``forb`` may override the forbidden-triple table."""
    labels = bin_labels(p.n, p.r)
    forb = forb_table(p.n, p.r) if forb is None else forb
    ok3 = triangle_ok(forb)
    F = enumerate_F(p.m, ok3, budget)
    h = HirschAlgebra(p, labels, forb, ok3, F, codes=np.zeros(0, dtype=np.int64))
    h.codes = h.encode(F) if F.shape[1] else np.zeros(F.shape[0], dtype=np.int64)
    if F.shape[1] and (np.diff(h.codes) <= 0).any():
        raise VerificationError("F rows are not strictly sorted")
    return h


# --------------------------------------------------------------------------
# commutativity witness


@dataclass
class WitnessResult:
    h: np.ndarray | None
    case: str
    diagnostic: dict | None = None

    @property
    def ok(self):
        return self.h is not None


def _relocate(M, src, dst):
    """``M[src/dst]``: node ``src`` now behaves like ``dst``."""
    m = M.shape[0]
    rho = [dst if v == src else v for v in range(m)]
    return M[np.ix_(rho, rho)]


def commutativity_witness(H: HirschAlgebra, f, g, x, y) -> WitnessResult:
    """Find h with f ~x h ~y g given f ~xy g, by the three-case construction."""
    f = np.asarray(f)
    g = np.asarray(g)
    m = H.m
    rest = [z for z in range(m) if z not in (x, y)]
    for a, b in combinations(rest, 2):
        if f[a, b] != g[a, b]:
            return WitnessResult(None, "precondition", {"pair": (a, b)})
    if x == y or (f == g).all():
        return _checked(H, f.copy(), "equal", f, g, x, y)
    for z in rest:
        if f[y, z] == 0:
            return _checked(H, _relocate(g, y, z), "id-y", f, g, x, y)
    for z in rest:
        if g[z, x] == 0:
            return _checked(H, _relocate(f, x, z), "id-x", f, g, x, y)
    p = H.params
    labels = H.labels
    h = np.zeros_like(f)
    for a in range(m):
        for b in range(m):
            if x not in (a, b):
                h[a, b] = f[a, b]
            elif y not in (a, b):
                h[a, b] = g[a, b]
    used = set()
    for z in rest:
        lf, lg = labels[f[y, z]], labels[g[x, z]]
        if lf is not None and lg is not None and lf[1] == lg[1]:
            used.add(lf[1])
    free = [i for i in range(p.n - 1) if i not in used]
    if not free or p.r == 0:
        return WitnessResult(None, "no-colour", {"used": sorted(used)})
    i = free[0]
    lab = 1 + (i * p.r + 0) * p.psi + 0
    h[x, y] = h[y, x] = lab
    return _checked(H, h, "least-colour", f, g, x, y)


def _checked(H, h, case, f, g, x, y):
    if not H.contains(h):
        return WitnessResult(None, case, {"reason": "h not in F", "h": h.tolist()})
    m = H.m
    for a in range(m):
        for b in range(m):
            if x not in (a, b) and h[a, b] != f[a, b]:
                return WitnessResult(None, case, {"reason": "h not x-equivalent to f"})
            if y not in (a, b) and h[a, b] != g[a, b]:
                return WitnessResult(None, case, {"reason": "h not y-equivalent to g"})
    return WitnessResult(h, case)


# --------------------------------------------------------------------------
# neat reducts


@dataclass
class NeatReductReport:
    m: int
    m2: int
    method: str
    checks: dict  # name -> number of violations
    sizes: dict

    @property
    def ok(self):
        return all(v == 0 for v in self.checks.values())


def _restrict_cols(m_small):
    return [edge_index(x, y) for y in range(1, m_small) for x in range(y)]


def neat_reduct_explicit(small: HirschAlgebra, big: HirschAlgebra) -> NeatReductReport:
    """Check the restriction map on atoms with both algebras enumerated."""
    m, m2 = small.m, big.m
    cols = _restrict_cols(m)
    restr = small.index_of(big.F[:, cols])
    checks = {}
    checks["restriction-in-F"] = int((restr < 0).sum())
    counts = np.bincount(restr[restr >= 0], minlength=small.size)
    checks["nonempty-fibres"] = int((counts == 0).sum())
    # fibres of the small algebra must be atoms of the neat reduct: each fibre is
    # closed under c_z for z >= m and no c_z-class of the big algebra crosses fibres
    extra = list(range(m, m2))
    viol = 0
    for z in extra:
        cz = big.class_ids(z)
        pairs = np.unique(np.stack([cz, restr], axis=1), axis=0)
        viol += int(len(pairs) - len(np.unique(pairs[:, 0])))
    # a fibre must also be a single class of the combined relation; for m2 = m + 1
    # this is the class of 'agree off m'
    if m2 == m + 1:
        cm = big.class_ids(m)
        viol += int(len(np.unique(cm)) != small.size)
    checks["fibres-are-reduct-atoms"] = viol
    # diagonals
    dv = 0
    for x in range(m):
        for y in range(m):
            dv += int((big.diag(x, y) != small.diag(x, y)[restr]).sum())
    checks["diagonals"] = dv
    # cylindrifiers: f' in c_x(fibre f) iff restr(f') ~x f, for x < m
    cv = 0
    for x in range(m):
        cb = big.class_ids(x)
        cs = small.class_ids(x)
        pairs = np.unique(np.stack([cb, restr], axis=1), axis=0)
        got = np.bincount(pairs[:, 0], minlength=cb.max() + 1)
        # every big x-class must reach every member of the small x-class it projects to
        class_size = np.bincount(cs, minlength=cs.max() + 1)
        first = np.zeros(cb.max() + 1, dtype=np.int64)
        first[cb] = restr
        cv += int((got != class_size[cs[first]]).sum())
    checks["cylindrifiers"] = cv
    # substitutions for transpositions of m
    sv = 0
    for x, y in combinations(range(m), 2):
        tau_s = [y if v == x else x if v == y else v for v in range(m)]
        tau_b = tau_s + list(range(m, m2))
        sv += int((small.tau_map(tau_s)[restr] != restr[big.tau_map(tau_b)]).sum())
    checks["substitutions"] = sv
    return NeatReductReport(m, m2, "explicit", checks, {"small": small.size, "big": big.size})


def neat_reduct_factored(small: HirschAlgebra) -> NeatReductReport:
    """Check C(m) = Nr_m C(m+1) without enumerating F(m+1).

    Extensions of f by a new node w are labellings u of the edges (y, w). The
    restriction map preserves c_x iff, for f ~x g, every extension of g can be
    matched by an extension of f that agrees off x; equivalently the set of
    u|(m - x) that extend f is the same for all members of an x-class.
    """
    m = small.m
    checks = {"nonempty-fibres": 0, "cylindrifiers": 0}
    for x in range(m):
        sig = fibre_signatures(small.F, m, x, small.ok3)
        nonzero = sig.any(axis=1)
        if x == 0:
            checks["nonempty-fibres"] = int((~nonzero).sum())
        cls = small.class_ids(x)
        # signature must be constant on each class
        order = np.argsort(cls, kind="stable")
        cs = cls[order]
        ss = sig[order]
        same_cls = cs[1:] == cs[:-1]
        diff = (ss[1:] != ss[:-1]).any(axis=1)
        checks["cylindrifiers"] += int((same_cls & diff).sum())
    return NeatReductReport(m, m + 1, "factored", checks, {"small": small.size})


def hirsch_neat_reduct_iso(p: HirschParams, m2: int, explicit_budget=600_000) -> NeatReductReport:
    """Verify C(m, n, r) = Nr_m C(m2, n, r) under the restriction map.

    Uses the explicit atom-level check when F(m2) fits in ``explicit_budget``,
    otherwise chains factored one-step checks m -> m+1 -> ... -> m2 (each
    intermediate algebra must then be enumerable).
    """
    if m2 < p.m:
        raise ValueError("m2 must be at least m")
    small = hirsch_algebra(p)
    if m2 == p.m:
        return NeatReductReport(p.m, m2, "identity", {}, {"small": small.size})
    # candidates for F(m2) are bounded by |F(m)| * |Bin|^(new edges)
    new_edges = m2 * (m2 - 1) // 2 - p.m * (p.m - 1) // 2
    bound = small.size * len(small.labels) ** new_edges
    if bound <= explicit_budget:
        big = hirsch_algebra(HirschParams(m2, p.n, p.r), budget=explicit_budget)
        rep = neat_reduct_explicit(small, big)
    else:
        checks = {}
        cur = small
        for mm in range(p.m, m2):
            step = neat_reduct_factored(cur)
            for k, v in step.checks.items():
                checks[f"{mm}->{mm + 1}:{k}"] = v
            if mm + 1 < m2:
                cur = hirsch_algebra(HirschParams(mm + 1, p.n, p.r))
        rep = NeatReductReport(p.m, m2, "factored", checks, {"small": small.size})
    if not rep.ok:
        raise VerificationError("neat-reduct isomorphism check failed", witness=rep.checks)
    return rep
