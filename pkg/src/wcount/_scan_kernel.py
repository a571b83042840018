"""JIT-compiled scan for the integer-mode power-sum pipeline.

Enumerates, per anchor column, every connected column subset of size at
most kmax (anchored growth with a forbidden set, each subset exactly once),
accumulates subset-count diagnostics, and flags the subsets that admit a
full-support solution with degree at most kmax ("active" subsets).  Only
integer arithmetic happens here; active subsets are re-solved in Python
where the weight arithmetic (complex or exact rational) lives.

The pure-Python scan in `powersums` produces identical output; this kernel
is selected for large instances only.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return deco


@njit(cache=True)
def _scan_integer_range(
    adj_ptr,
    adj_idx,
    colrows_ptr,
    colrows_idx,
    rowcols_ptr,
    rowcols_idx,
    rowcoefs,
    nu,
    kmax,
    anchor_lo,
    anchor_hi,
):
    n = adj_ptr.shape[0] - 1
    maxdeg = 0
    for v in range(n):
        d = adj_ptr[v + 1] - adj_ptr[v]
        if d > maxdeg:
            maxdeg = d
    maxc = 0
    for j in range(n):
        d = colrows_ptr[j + 1] - colrows_ptr[j]
        if d > maxc:
            maxc = d

    ext_cap = (kmax + 2) * maxdeg + 4
    ext_buf = np.empty((kmax + 1, ext_cap), np.int64)
    ext_len = np.zeros(kmax + 1, np.int64)
    ext_pos = np.zeros(kmax + 1, np.int64)
    bans_buf = np.empty((kmax + 1, ext_cap), np.int64)
    bans_len = np.zeros(kmax + 1, np.int64)
    S = np.empty(kmax + 2, np.int64)
    banned = np.zeros(n, np.uint8)

    member_counts = np.zeros((n, kmax + 1), np.int64)
    total_counts = np.zeros(kmax + 1, np.int64)

    out_cap = 1024
    out_flat = np.empty(out_cap, np.int64)
    out_flat_len = 0
    size_cap = 256
    out_sizes = np.empty(size_cap, np.int64)
    out_n = 0

    # scratch for the activity check
    tr_cap = kmax * maxc + 4
    tr_ids = np.empty(tr_cap, np.int64)
    tr_cnt = np.empty(tr_cap, np.int64)
    rs = np.empty(tr_cap, np.int64)
    pos_nrows = np.empty(kmax + 1, np.int64)
    pos_row = np.empty((kmax + 1, maxc + 1), np.int64)
    pos_coef = np.empty((kmax + 1, maxc + 1), np.int64)
    xi = np.empty(kmax + 1, np.int64)

    for v in range(anchor_lo, anchor_hi):
        total_counts[1] += 1
        member_counts[v, 1] += 1
        # a single integer column never has a full-support solution
        if kmax == 1:
            continue
        S[0] = v
        el = 0
        for t in range(adj_ptr[v], adj_ptr[v + 1]):
            u = adj_idx[t]
            if u > v:
                ext_buf[0, el] = u
                el += 1
        ext_len[0] = el
        ext_pos[0] = 0
        bans_len[0] = 0
        depth = 0
        while depth >= 0:
            if ext_pos[depth] < ext_len[depth]:
                u = ext_buf[depth, ext_pos[depth]]
                ext_pos[depth] += 1
                q = depth + 2
                S[depth + 1] = u
                total_counts[q] += 1
                for a in range(q):
                    member_counts[S[a], q] += 1

                # --- activity check on S[0..q-1] ---
                active = True
                tr_len = 0
                for a in range(q):
                    j = S[a]
                    for t in range(colrows_ptr[j], colrows_ptr[j + 1]):
                        r = colrows_idx[t]
                        found = -1
                        for b in range(tr_len):
                            if tr_ids[b] == r:
                                found = b
                                break
                        if found < 0:
                            tr_ids[tr_len] = r
                            tr_cnt[tr_len] = 1
                            tr_len += 1
                        else:
                            tr_cnt[found] += 1
                for b in range(tr_len):
                    if tr_cnt[b] == 1:
                        active = False
                        break
                if active and q > kmax:
                    active = False
                if active:
                    # coefficients of each subset column in the touched rows
                    for a in range(q):
                        j = S[a]
                        np_ = 0
                        for t in range(colrows_ptr[j], colrows_ptr[j + 1]):
                            r = colrows_idx[t]
                            loc = 0
                            for b in range(tr_len):
                                if tr_ids[b] == r:
                                    loc = b
                                    break
                            coef = 0
                            for t2 in range(rowcols_ptr[r], rowcols_ptr[r + 1]):
                                if rowcols_idx[t2] == j:
                                    coef = rowcoefs[t2]
                                    break
                            pos_row[a, np_] = loc
                            pos_coef[a, np_] = coef
                            np_ += 1
                        pos_nrows[a] = np_
                    # odometer over xi in [1..nu_j]^q with sum <= kmax
                    for b in range(tr_len):
                        rs[b] = 0
                    nz = 0
                    used = 0
                    p = 0
                    for a in range(q):
                        xi[a] = 0
                    found_sol = False
                    while True:
                        if xi[p] + 1 <= nu[S[p]] and used + 1 + (q - 1 - p) <= kmax:
                            xi[p] += 1
                            used += 1
                            for t in range(pos_nrows[p]):
                                b = pos_row[p, t]
                                if rs[b] != 0:
                                    nz -= 1
                                rs[b] += pos_coef[p, t]
                                if rs[b] != 0:
                                    nz += 1
                            if p == q - 1:
                                if nz == 0:
                                    found_sol = True
                                    break
                            else:
                                p += 1
                        else:
                            # reset xi[p], backtrack
                            if xi[p] > 0:
                                for t in range(pos_nrows[p]):
                                    b = pos_row[p, t]
                                    if rs[b] != 0:
                                        nz -= 1
                                    rs[b] -= pos_coef[p, t] * xi[p]
                                    if rs[b] != 0:
                                        nz += 1
                                used -= xi[p]
                                xi[p] = 0
                            p -= 1
                            if p < 0:
                                break
                    active = found_sol
                if active:
                    while out_flat_len + q > out_cap:
                        out_cap *= 2
                        tmp = np.empty(out_cap, np.int64)
                        tmp[:out_flat_len] = out_flat[:out_flat_len]
                        out_flat = tmp
                    for a in range(q):
                        out_flat[out_flat_len] = S[a]
                        out_flat_len += 1
                    if out_n >= size_cap:
                        size_cap *= 2
                        tmp2 = np.empty(size_cap, np.int64)
                        tmp2[:out_n] = out_sizes[:out_n]
                        out_sizes = tmp2
                    out_sizes[out_n] = q
                    out_n += 1

                # --- descend or ban ---
                if q <= kmax - 1:
                    nd = depth + 1
                    el = 0
                    for t in range(ext_pos[depth], ext_len[depth]):
                        ext_buf[nd, el] = ext_buf[depth, t]
                        el += 1
                    for t in range(adj_ptr[u], adj_ptr[u + 1]):
                        w_ = adj_idx[t]
                        if w_ > v and banned[w_] == 0:
                            ok = True
                            for a in range(q):
                                if S[a] == w_:
                                    ok = False
                                    break
                            if ok:
                                for a in range(el):
                                    if ext_buf[nd, a] == w_:
                                        ok = False
                                        break
                            if ok:
                                ext_buf[nd, el] = w_
                                el += 1
                    ext_len[nd] = el
                    ext_pos[nd] = 0
                    bans_len[nd] = 0
                    depth = nd
                else:
                    banned[u] = 1
                    bans_buf[depth, bans_len[depth]] = u
                    bans_len[depth] += 1
            else:
                for a in range(bans_len[depth]):
                    banned[bans_buf[depth, a]] = 0
                bans_len[depth] = 0
                depth -= 1
                if depth >= 0:
                    u = ext_buf[depth, ext_pos[depth] - 1]
                    banned[u] = 1
                    bans_buf[depth, bans_len[depth]] = u
                    bans_len[depth] += 1

    return out_flat[:out_flat_len].copy(), out_sizes[:out_n].copy(), member_counts, total_counts


def scan_integer(A, graph, nu, kmax, anchor_lo, anchor_hi):
    """Run the kernel over an anchor range; returns (actives, member, totals).

    `actives` is a list of column tuples in discovery order.
    """
    n = A.n
    adj_ptr = np.zeros(n + 1, np.int64)
    for v in range(n):
        adj_ptr[v + 1] = adj_ptr[v] + len(graph.adj[v])
    adj_idx = np.empty(int(adj_ptr[n]), np.int64)
    pos = 0
    for v in range(n):
        for u in graph.adj[v]:
            adj_idx[pos] = u
            pos += 1

    colrows_ptr = np.zeros(n + 1, np.int64)
    for j in range(n):
        colrows_ptr[j + 1] = colrows_ptr[j] + len(A.rows_of_col(j))
    colrows_idx = np.empty(int(colrows_ptr[n]), np.int64)
    pos = 0
    for j in range(n):
        for r in A.rows_of_col(j):
            colrows_idx[pos] = r
            pos += 1

    m = A.m
    rowcols_ptr = np.zeros(m + 1, np.int64)
    for i in range(m):
        rowcols_ptr[i + 1] = rowcols_ptr[i] + len(A.cols_of_row(i))
    rowcols_idx = np.empty(int(rowcols_ptr[m]), np.int64)
    rowcoefs = np.empty(int(rowcols_ptr[m]), np.int64)
    pos = 0
    for i in range(m):
        for j in A.cols_of_row(i):
            rowcols_idx[pos] = j
            rowcoefs[pos] = A.entry(i, j)
            pos += 1

    nu_arr = np.asarray(nu, dtype=np.int64)
    flat, sizes, member, totals = _scan_integer_range(
        adj_ptr,
        adj_idx,
        colrows_ptr,
        colrows_idx,
        rowcols_ptr,
        rowcols_idx,
        rowcoefs,
        nu_arr,
        kmax,
        anchor_lo,
        anchor_hi,
    )
    actives = []
    off = 0
    for q in sizes:
        actives.append(tuple(sorted(int(x) for x in flat[off : off + q])))
        off += q
    return actives, member, totals
