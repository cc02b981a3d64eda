"""Numeric inner loops.

Every kernel exists twice: ``*_nb`` is a numba loop nest, ``*_np`` the
vectorised numpy equivalent. The public name dispatches on
:func:`algworkbench._accel.use_numba`. Both paths must return identical
arrays; ``tests/test_kernels.py`` holds them to that and
``benchmarks/bench_kernels.py`` times them against each other.

Edge vectors use the column-major upper-triangle order
``(0,1), (0,2), (1,2), (0,3), (1,3), (2,3), ...`` so adding a node appends
its edges at the end.
"""
import numpy as np

from ._accel import njit, use_numba
from .errors import BudgetExceeded

EXTEND_BUDGET = 20_000_000


def edge_index(x, y):
    if x > y:
        x, y = y, x
    return y * (y - 1) // 2 + x


# --------------------------------------------------------------------------
# cycle law


@njit(cache=True)
def _cycle_law_nb(cons, conv, limit):
    n = cons.shape[0]
    out = np.empty((limit, 3), dtype=np.int64)
    k = 0
    for a in range(n):
        ca = conv[a]
        for b in range(n):
            cb = conv[b]
            for c in range(n):
                v = cons[a, b, c]
                if v != cons[ca, c, b] or v != cons[c, cb, a]:
                    if k < limit:
                        out[k, 0] = a
                        out[k, 1] = b
                        out[k, 2] = c
                    k += 1
    return out[: min(k, limit)], k


def _cycle_law_np(cons, conv, limit):
    p1 = cons[conv].transpose(0, 2, 1)
    p2 = cons[:, conv, :].transpose(2, 1, 0)
    bad = (cons != p1) | (cons != p2)
    idx = np.argwhere(bad)
    return idx[:limit].astype(np.int64), int(idx.shape[0])


def cycle_law_violations(cons, conv, limit=64):
    """Triples ``(a,b,c)`` where ``cons[a,b,c]`` disagrees with one of its
    two Peircean rotations. Returns ``(witnesses[:limit], total_count)``."""
    cons = np.ascontiguousarray(cons, dtype=np.bool_)
    conv = np.ascontiguousarray(conv, dtype=np.int64)
    if use_numba():
        w, k = _cycle_law_nb(cons, conv, limit)
        return w, int(k)
    return _cycle_law_np(cons, conv, limit)


# --------------------------------------------------------------------------
# node extension: append one node to a family of edge-labelled complete graphs


@njit(cache=True)
def _extend_count_or_fill(parent, m_old, ok3, nvals, fill, out_parent, out_vals):
    # parent[p, e] = label of edge e on nodes 0..m_old-1
    # new node w gets labels v[0..m_old-1]; triangle (x, y, w) needs ok3[f(x,y), v[x], v[y]]
    count = 0
    v = np.zeros(m_old, dtype=np.int64)
    for p in range(parent.shape[0]):
        depth = 0
        v[0] = -1
        while depth >= 0:
            v[depth] += 1
            if v[depth] >= nvals:
                depth -= 1
                continue
            good = True
            vx = v[depth]
            for x in range(depth):
                e = depth * (depth - 1) // 2 + x
                if not ok3[parent[p, e], v[x], vx]:
                    good = False
                    break
            if not good:
                continue
            if depth == m_old - 1:
                if fill:
                    out_parent[count] = p
                    for i in range(m_old):
                        out_vals[count, i] = v[i]
                count += 1
            else:
                depth += 1
                v[depth] = -1
    return count


def _extend_nb(parent, m_old, ok3, budget):
    nvals = ok3.shape[0]
    dummy_p = np.zeros(0, dtype=np.int64)
    dummy_v = np.zeros((0, m_old), dtype=np.int64)
    n = _extend_count_or_fill(parent, m_old, ok3, nvals, False, dummy_p, dummy_v)
    if n > budget:
        raise BudgetExceeded(f"node extension yields {n} graphs", n, budget)
    out_p = np.empty(n, dtype=np.int64)
    out_v = np.empty((n, m_old), dtype=np.int64)
    _extend_count_or_fill(parent, m_old, ok3, nvals, True, out_p, out_v)
    return out_p, out_v


def _extend_np(parent, m_old, ok3, budget, chunk=256):
    outs = []
    total = 0
    for start in range(0, parent.shape[0], chunk):
        p, v = _extend_np_block(parent[start:start + chunk], m_old, ok3)
        total += p.shape[0]
        if total > budget:
            raise BudgetExceeded(f"node extension yields more than {budget} graphs", total, budget)
        outs.append((p + start, v))
    if not outs:
        return np.zeros(0, dtype=np.int64), np.zeros((0, m_old), dtype=np.int64)
    return np.concatenate([o[0] for o in outs]), np.concatenate([o[1] for o in outs])


def _extend_np_block(parent, m_old, ok3):
    nvals = ok3.shape[0]
    pidx = np.arange(parent.shape[0], dtype=np.int64)
    vals = np.zeros((parent.shape[0], 0), dtype=np.int64)
    for d in range(m_old):
        reps = np.repeat(np.arange(pidx.shape[0]), nvals)
        newv = np.tile(np.arange(nvals, dtype=np.int64), pidx.shape[0])
        pidx = pidx[reps]
        vals = vals[reps]
        keep = np.ones(pidx.shape[0], dtype=bool)
        for x in range(d):
            e = d * (d - 1) // 2 + x
            keep &= ok3[parent[pidx, e], vals[:, x], newv]
        pidx = pidx[keep]
        vals = np.concatenate([vals[keep], newv[keep, None]], axis=1)
    order = np.lexsort(tuple(vals[:, i] for i in range(m_old - 1, -1, -1)) + (pidx,))
    return pidx[order], vals[order]


def extend_by_node(parent, m_old, ok3, budget=EXTEND_BUDGET):
    """All one-node extensions of the graphs in ``parent``.

    Returns ``(parent_index, new_edge_labels)`` sorted by parent then labels.
    ``ok3[a, b, c]`` decides the triangle ``(f(x,y), v[x], v[y])``.
    """
    parent = np.ascontiguousarray(parent, dtype=np.int64)
    ok3 = np.ascontiguousarray(ok3, dtype=np.bool_)
    if m_old == 0:
        return np.zeros(parent.shape[0], dtype=np.int64), np.zeros((parent.shape[0], 0), dtype=np.int64)
    if use_numba():
        return _extend_nb(parent, m_old, ok3, budget)
    return _extend_np(parent, m_old, ok3, budget)


# --------------------------------------------------------------------------
# fibre signatures for the neat-reduct check
#
# For each graph f on m nodes and a distinguished node x, the signature is the
# set of partial labellings u (new node w to every node except x) that
#   * are triangle-consistent among themselves (triangles avoiding x), and
#   * admit some label v_x for (x, w) consistent with every triangle (x, y, w).
# Returned as packed bits over the u-space Bin^(m-1), mixed-radix indexed.


@njit(cache=True)
def _fibre_sig_nb(fvals, m, x, ok3, vmask, nbytes):
    nvals = ok3.shape[0]
    others = np.empty(m - 1, dtype=np.int64)
    j = 0
    for y in range(m):
        if y != x:
            others[j] = y
            j += 1
    k = m - 1
    usize = 1
    for _ in range(k):
        usize *= nvals
    out = np.zeros((fvals.shape[0], nbytes), dtype=np.uint8)
    u = np.zeros(k, dtype=np.int64)
    nwords = vmask.shape[2]
    acc = np.empty(nwords, dtype=np.uint64)
    for p in range(fvals.shape[0]):
        for idx in range(usize):
            r = idx
            for t in range(k - 1, -1, -1):
                u[t] = r % nvals
                r //= nvals
            good = True
            for s in range(k):
                for t in range(s):
                    ys = others[s]
                    yt = others[t]
                    a = ys
                    b = yt
                    if a > b:
                        a, b = b, a
                    e = b * (b - 1) // 2 + a
                    # triangle (yt, ys, w) with yt < ys in node order
                    if yt < ys:
                        if not ok3[fvals[p, e], u[t], u[s]]:
                            good = False
                    else:
                        if not ok3[fvals[p, e], u[s], u[t]]:
                            good = False
                    if not good:
                        break
                if not good:
                    break
            if not good:
                continue
            for wd in range(nwords):
                acc[wd] = ~np.uint64(0)
            for t in range(k):
                y = others[t]
                a = x
                b = y
                if a > b:
                    a, b = b, a
                e = b * (b - 1) // 2 + a
                fxy = fvals[p, e]
                # orientation: triangle (min, max, w)
                side = 0 if x < y else 1
                for wd in range(nwords):
                    acc[wd] &= vmask[side, fxy * nvals + u[t], wd]
            nz = False
            for wd in range(nwords):
                if acc[wd] != 0:
                    nz = True
            if nz:
                out[p, idx >> 3] |= np.uint8(1 << (7 - (idx & 7)))
    return out


def _vmask_table(ok3):
    # vmask[0, a*nv + u, :] : bits v with ok3[a, v, u]  (x < y: v sits on the smaller node)
    # vmask[1, a*nv + u, :] : bits v with ok3[a, u, v]
    nv = ok3.shape[0]
    nwords = (nv + 63) // 64
    out = np.zeros((2, nv * nv, nwords), dtype=np.uint64)
    for side in range(2):
        tab = ok3.transpose(0, 2, 1) if side == 0 else ok3
        # tab[a, u, v]
        for v in range(nv):
            bit = np.uint64(1) << np.uint64(v % 64)
            sel = tab[:, :, v].reshape(-1)
            out[side, sel, v // 64] |= bit
    return out


def _fibre_sig_np(fvals, m, x, ok3, vmask, chunk=1024):
    nv = ok3.shape[0]
    others = [y for y in range(m) if y != x]
    k = m - 1
    grids = np.indices((nv,) * k).reshape(k, -1).T  # u-space in mixed-radix order
    rows = []
    for start in range(0, fvals.shape[0], chunk):
        f = fvals[start:start + chunk]
        good = np.ones((f.shape[0], grids.shape[0]), dtype=bool)
        for s in range(k):
            for t in range(s):
                ys, yt = others[s], others[t]
                e = edge_index(ys, yt)
                lo, hi = (t, s) if yt < ys else (s, t)
                good &= ok3[f[:, e][:, None], grids[None, :, lo], grids[None, :, hi]]
        acc = None
        for t, y in enumerate(others):
            side = 0 if x < y else 1
            fe = f[:, edge_index(x, y)]
            words = vmask[side][fe[:, None] * nv + grids[None, :, t]]  # (rows, u, nwords)
            acc = words if acc is None else acc & words
        anyv = (acc != 0).any(axis=2) & good
        rows.append(np.packbits(anyv, axis=1))
    if not rows:
        return np.zeros((0, (grids.shape[0] + 7) // 8), dtype=np.uint8)
    return np.concatenate(rows, axis=0)


def fibre_signatures(fvals, m, x, ok3):
    """Packed-bit signature per row of ``fvals`` (see module notes)."""
    fvals = np.ascontiguousarray(fvals, dtype=np.int64)
    ok3 = np.ascontiguousarray(ok3, dtype=np.bool_)
    nv = ok3.shape[0]
    usize = nv ** (m - 1)
    nbytes = (usize + 7) // 8
    vmask = _vmask_table(ok3)
    if use_numba():
        return _fibre_sig_nb(fvals, m, x, ok3, vmask, nbytes)
    return _fibre_sig_np(fvals, m, x, ok3, vmask)


# --------------------------------------------------------------------------
# brute-force composition on a truncated blown-up structure
#
# Atoms are decoded through (idx, row, block) arrays; atom 0 is the identity.
# z is reachable from X;Y iff some x in X, y in Y has a consistent (x, y, z):
#   identity involved: the usual identity rule (all atoms self-converse);
#   otherwise safe[bz, bx, by] or (E[ix, iy, iz] and base[px, py, pz]).


@njit(cache=True)
def _blur_brute_nb(X, Y, Z, idx, row, blk, safe, E, base):
    out = np.zeros(Z.shape[0], dtype=np.bool_)
    for t in range(Z.shape[0]):
        z = Z[t]
        found = False
        for s in range(X.shape[0]):
            x = X[s]
            for u in range(Y.shape[0]):
                y = Y[u]
                if x == 0 or y == 0 or z == 0:
                    if (x == 0 and y == z) or (y == 0 and x == z) or (z == 0 and x == y):
                        found = True
                elif safe[blk[z], blk[x], blk[y]]:
                    found = True
                elif E[idx[x], idx[y], idx[z]] and base[row[x], row[y], row[z]]:
                    found = True
                if found:
                    break
            if found:
                break
        out[t] = found
    return out


def _blur_brute_np(X, Y, Z, idx, row, blk, safe, E, base, chunk=1 << 22):
    out = np.zeros(Z.shape[0], dtype=bool)
    step = max(1, chunk // max(1, X.shape[0] * Y.shape[0]))
    x = X[:, None, None]
    y = Y[None, :, None]
    for start in range(0, Z.shape[0], step):
        z = Z[None, None, start:start + step]
        ident = (x == 0) | (y == 0) | (z == 0)
        id_ok = ((x == 0) & (y == z)) | ((y == 0) & (x == z)) | ((z == 0) & (x == y))
        gen = safe[blk[z], blk[x], blk[y]] | (E[idx[x], idx[y], idx[z]] & base[row[x], row[y], row[z]])
        hit = np.where(ident, id_ok, gen)
        out[start:start + step] = hit.any(axis=(0, 1))
    return out


def blur_compose_brute(X, Y, Z, idx, row, blk, safe, E, base):
    """For each z in ``Z``: is there x in ``X``, y in ``Y`` with (x, y, z) consistent?"""
    args = [np.ascontiguousarray(a, dtype=np.int64) for a in (X, Y, Z, idx, row, blk)]
    tabs = [np.ascontiguousarray(a, dtype=np.bool_) for a in (safe, E, base)]
    if use_numba():
        return _blur_brute_nb(*args, *tabs)
    return _blur_brute_np(*args, *tabs)
