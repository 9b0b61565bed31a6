"""Mod-p kernels: dense elimination, sparse graded column reduction, composition.

Every hot kernel here exists in two builds from a single source function:
a numba ``@njit`` compilation and the plain-python original.  Selection
happens at import time: the compiled build is used when numba is importable
and the environment variable ``KHBRAID_PURE_PYTHON`` is unset/empty,
otherwise the python build runs.  Both builds stay reachable through
``KERNELS`` so the benchmark script can time them against each other.

All matrices are integer numpy arrays; coefficients are kept reduced mod p by
the callers.  The sparse reduction kernel implements the persistence-style
column echelon used by the homology layer: columns arrive in filtration order
(descending quantum degree), rows are pre-relabeled in the same order, and the
pivot rule is "low = largest row index".
"""

from __future__ import annotations

import os

import numpy as np

PURE_PYTHON = bool(os.environ.get("KHBRAID_PURE_PYTHON"))

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    njit = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not PURE_PYTHON

# name -> {"python": fn, "numba": fn or None}; the benchmark reads this
KERNELS: dict[str, dict] = {}


def _dual(fn):
    """Register a single-source kernel and return the selected build."""
    impls = {"python": fn, "numba": None}
    if NUMBA_AVAILABLE:
        impls["numba"] = njit(cache=True)(fn)
    KERNELS[fn.__name__] = impls
    return impls["numba"] if USE_NUMBA else fn


def inverse_table(p: int) -> np.ndarray:
    """inv[x] = x^-1 mod p for x in 1..p-1 (inv[0] unused)."""
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    return inv


# ---------------------------------------------------------------------------
# dense elimination


def _rref_dense(mat, p, inv):
    """In-place row reduction of an int64 matrix mod p; returns pivot count.

    Pivot columns are marked in the returned array: piv_cols[r] = column of
    the r-th pivot row, -1 past the rank.
    """
    nrows, ncols = mat.shape
    piv_cols = np.full(nrows, -1, dtype=np.int64)
    r = 0
    for c in range(ncols):
        pr = -1
        for i in range(r, nrows):
            if mat[i, c] % p != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(ncols):
                tmp = mat[r, j]
                mat[r, j] = mat[pr, j]
                mat[pr, j] = tmp
        scale = inv[mat[r, c] % p]
        for j in range(ncols):
            mat[r, j] = mat[r, j] * scale % p
        for i in range(nrows):
            if i != r:
                f = mat[i, c] % p
                if f:
                    for j in range(ncols):
                        mat[i, j] = (mat[i, j] - f * mat[r, j]) % p
        piv_cols[r] = c
        r += 1
        if r == nrows:
            break
    return piv_cols


rref_dense = _dual(_rref_dense)


def rank_dense(mat: np.ndarray, p: int) -> int:
    """Rank mod p of a 2d int array (not modified)."""
    if mat.size == 0:
        return 0
    work = np.array(mat, dtype=np.int64) % p
    piv = rref_dense(work, p, inverse_table(p))
    return int((piv >= 0).sum())


def solve_dense(mat: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of mat @ x = rhs mod p, or None if inconsistent."""
    nrows, ncols = mat.shape
    aug = np.zeros((nrows, ncols + 1), dtype=np.int64)
    aug[:, :ncols] = np.asarray(mat, dtype=np.int64) % p
    aug[:, ncols] = np.asarray(rhs, dtype=np.int64) % p
    piv = rref_dense(aug, p, inverse_table(p))
    x = np.zeros(ncols, dtype=np.int64)
    for r in range(nrows):
        c = piv[r]
        if c < 0:
            break
        if c == ncols:
            return None
        x[c] = aug[r, ncols]
    return x


def nullspace_dense(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right nullspace mod p, rows = basis vectors."""
    nrows, ncols = mat.shape
    if nrows == 0:
        return np.eye(ncols, dtype=np.int64)
    work = np.array(mat, dtype=np.int64) % p
    piv = rref_dense(work, p, inverse_table(p))
    pivots = [int(c) for c in piv if c >= 0]
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for r, c in enumerate(pivots):
            basis[bi, c] = (-work[r, fc]) % p
    return basis


# ---------------------------------------------------------------------------
# sparse persistence reduction (pairing only, no transforms)


def _reduce_lows(ncols, nrows, col_ptr, row_idx, vals, p, inv):
    """Column echelon with the low rule; returns low[j] (-1 for zero columns).

    Columns must be supplied in processing order with rows sorted ascending
    within each column.  Row indices must already be the filtration order.
    """
    low_out = np.full(ncols, -1, dtype=np.int64)
    owner = np.full(nrows, -1, dtype=np.int64)
    cap = max(64, len(row_idx) * 4)
    pool_rows = np.empty(cap, dtype=np.int64)
    pool_vals = np.empty(cap, dtype=np.int64)
    col_start = np.zeros(ncols, dtype=np.int64)
    col_len = np.zeros(ncols, dtype=np.int64)
    cur = 0
    work_r = np.empty(nrows, dtype=np.int64)
    work_v = np.empty(nrows, dtype=np.int64)
    merge_r = np.empty(nrows, dtype=np.int64)
    merge_v = np.empty(nrows, dtype=np.int64)
    for j in range(ncols):
        wl = 0
        for t in range(col_ptr[j], col_ptr[j + 1]):
            v = vals[t] % p
            if v:
                work_r[wl] = row_idx[t]
                work_v[wl] = v
                wl += 1
        while wl > 0:
            low = work_r[wl - 1]
            own = owner[low]
            if own < 0:
                owner[low] = j
                low_out[j] = low
                if cur + wl > cap:
                    new_cap = max(cap * 2, cur + wl)
                    npool_r = np.empty(new_cap, dtype=np.int64)
                    npool_v = np.empty(new_cap, dtype=np.int64)
                    npool_r[:cur] = pool_rows[:cur]
                    npool_v[:cur] = pool_vals[:cur]
                    pool_rows = npool_r
                    pool_vals = npool_v
                    cap = new_cap
                col_start[j] = cur
                col_len[j] = wl
                for t in range(wl):
                    pool_rows[cur + t] = work_r[t]
                    pool_vals[cur + t] = work_v[t]
                cur += wl
                break
            ps = col_start[own]
            pl = col_len[own]
            m = work_v[wl - 1] * inv[pool_vals[ps + pl - 1]] % p
            a = 0
            b = 0
            ml = 0
            while a < wl or b < pl:
                if b == pl or (a < wl and work_r[a] < pool_rows[ps + b]):
                    merge_r[ml] = work_r[a]
                    merge_v[ml] = work_v[a]
                    a += 1
                    ml += 1
                elif a == wl or pool_rows[ps + b] < work_r[a]:
                    v = (-m * pool_vals[ps + b]) % p
                    if v:
                        merge_r[ml] = pool_rows[ps + b]
                        merge_v[ml] = v
                        ml += 1
                    b += 1
                else:
                    v = (work_v[a] - m * pool_vals[ps + b]) % p
                    if v:
                        merge_r[ml] = work_r[a]
                        merge_v[ml] = v
                        ml += 1
                    a += 1
                    b += 1
            for t in range(ml):
                work_r[t] = merge_r[t]
                work_v[t] = merge_v[t]
            wl = ml
    return low_out


reduce_lows = _dual(_reduce_lows)


def _reduce_cols(ncols, nrows, col_ptr, row_idx, vals, p, inv):
    """Persistence column reduction keeping reduced columns and the transform.

    Same processing rules as _reduce_lows.  Returns
    (low, r_ptr, r_rows, r_vals, t_ptr, t_cols, t_vals): CSC storage of the
    reduced matrix R and of the upper-triangular transform T with R = D @ T,
    columns in processing order.  T columns always carry a unit at their own
    index; zero columns of R are kernel elements D @ t_col = 0.
    """
    low_out = np.full(ncols, -1, dtype=np.int64)
    owner = np.full(nrows, -1, dtype=np.int64)
    cap_r = max(64, len(row_idx) * 4)
    pr_rows = np.empty(cap_r, dtype=np.int64)
    pr_vals = np.empty(cap_r, dtype=np.int64)
    r_start = np.zeros(ncols, dtype=np.int64)
    r_len = np.zeros(ncols, dtype=np.int64)
    cur_r = 0
    cap_t = max(64, ncols * 4)
    pt_cols = np.empty(cap_t, dtype=np.int64)
    pt_vals = np.empty(cap_t, dtype=np.int64)
    t_start = np.zeros(ncols, dtype=np.int64)
    t_len = np.zeros(ncols, dtype=np.int64)
    cur_t = 0
    work_r = np.empty(nrows, dtype=np.int64)
    work_v = np.empty(nrows, dtype=np.int64)
    merge_r = np.empty(nrows, dtype=np.int64)
    merge_v = np.empty(nrows, dtype=np.int64)
    twork_c = np.empty(ncols, dtype=np.int64)
    twork_v = np.empty(ncols, dtype=np.int64)
    tmerge_c = np.empty(ncols, dtype=np.int64)
    tmerge_v = np.empty(ncols, dtype=np.int64)
    for j in range(ncols):
        wl = 0
        for t in range(col_ptr[j], col_ptr[j + 1]):
            v = vals[t] % p
            if v:
                work_r[wl] = row_idx[t]
                work_v[wl] = v
                wl += 1
        tl = 1
        twork_c[0] = j
        twork_v[0] = 1
        while wl > 0:
            low = work_r[wl - 1]
            own = owner[low]
            if own < 0:
                owner[low] = j
                low_out[j] = low
                break
            ps = r_start[own]
            pl = r_len[own]
            m = work_v[wl - 1] * inv[pr_vals[ps + pl - 1]] % p
            a = 0
            b = 0
            ml = 0
            while a < wl or b < pl:
                if b == pl or (a < wl and work_r[a] < pr_rows[ps + b]):
                    merge_r[ml] = work_r[a]
                    merge_v[ml] = work_v[a]
                    a += 1
                    ml += 1
                elif a == wl or pr_rows[ps + b] < work_r[a]:
                    v = (-m * pr_vals[ps + b]) % p
                    if v:
                        merge_r[ml] = pr_rows[ps + b]
                        merge_v[ml] = v
                        ml += 1
                    b += 1
                else:
                    v = (work_v[a] - m * pr_vals[ps + b]) % p
                    if v:
                        merge_r[ml] = work_r[a]
                        merge_v[ml] = v
                        ml += 1
                    a += 1
                    b += 1
            for t in range(ml):
                work_r[t] = merge_r[t]
                work_v[t] = merge_v[t]
            wl = ml
            ts = t_start[own]
            tol = t_len[own]
            a = 0
            b = 0
            ml = 0
            while a < tl or b < tol:
                if b == tol or (a < tl and twork_c[a] < pt_cols[ts + b]):
                    tmerge_c[ml] = twork_c[a]
                    tmerge_v[ml] = twork_v[a]
                    a += 1
                    ml += 1
                elif a == tl or pt_cols[ts + b] < twork_c[a]:
                    v = (-m * pt_vals[ts + b]) % p
                    if v:
                        tmerge_c[ml] = pt_cols[ts + b]
                        tmerge_v[ml] = v
                        ml += 1
                    b += 1
                else:
                    v = (twork_v[a] - m * pt_vals[ts + b]) % p
                    if v:
                        tmerge_c[ml] = twork_c[a]
                        tmerge_v[ml] = v
                        ml += 1
                    a += 1
                    b += 1
            for t in range(ml):
                twork_c[t] = tmerge_c[t]
                twork_v[t] = tmerge_v[t]
            tl = ml
        if cur_r + wl > cap_r:
            new_cap = max(cap_r * 2, cur_r + wl)
            npool_r = np.empty(new_cap, dtype=np.int64)
            npool_v = np.empty(new_cap, dtype=np.int64)
            npool_r[:cur_r] = pr_rows[:cur_r]
            npool_v[:cur_r] = pr_vals[:cur_r]
            pr_rows = npool_r
            pr_vals = npool_v
            cap_r = new_cap
        r_start[j] = cur_r
        r_len[j] = wl
        for t in range(wl):
            pr_rows[cur_r + t] = work_r[t]
            pr_vals[cur_r + t] = work_v[t]
        cur_r += wl
        if cur_t + tl > cap_t:
            new_cap = max(cap_t * 2, cur_t + tl)
            npool_c = np.empty(new_cap, dtype=np.int64)
            npool_v = np.empty(new_cap, dtype=np.int64)
            npool_c[:cur_t] = pt_cols[:cur_t]
            npool_v[:cur_t] = pt_vals[:cur_t]
            pt_cols = npool_c
            pt_vals = npool_v
            cap_t = new_cap
        t_start[j] = cur_t
        t_len[j] = tl
        for t in range(tl):
            pt_cols[cur_t + t] = twork_c[t]
            pt_vals[cur_t + t] = twork_v[t]
        cur_t += tl
    r_ptr = np.zeros(ncols + 1, dtype=np.int64)
    t_ptr = np.zeros(ncols + 1, dtype=np.int64)
    for j in range(ncols):
        r_ptr[j + 1] = r_ptr[j] + r_len[j]
        t_ptr[j + 1] = t_ptr[j] + t_len[j]
    return (
        low_out,
        r_ptr,
        pr_rows[:cur_r].copy(),
        pr_vals[:cur_r].copy(),
        t_ptr,
        pt_cols[:cur_t].copy(),
        pt_vals[:cur_t].copy(),
    )


reduce_cols = _dual(_reduce_cols)


# ---------------------------------------------------------------------------
# sparse composition check: A @ B == 0 mod p


def _compose_is_zero(a_ptr, a_col, a_val, b_ptr, b_col, b_val, ncols_b, p):
    """Whether the product of two CSR matrices vanishes mod p."""
    acc = np.zeros(ncols_b, dtype=np.int64)
    mark = np.zeros(ncols_b, dtype=np.uint8)
    touched = np.empty(ncols_b, dtype=np.int64)
    nrows_a = a_ptr.shape[0] - 1
    for i in range(nrows_a):
        nt = 0
        for t in range(a_ptr[i], a_ptr[i + 1]):
            k = a_col[t]
            av = a_val[t]
            for u in range(b_ptr[k], b_ptr[k + 1]):
                c = b_col[u]
                if not mark[c]:
                    mark[c] = 1
                    touched[nt] = c
                    nt += 1
                acc[c] = (acc[c] + av * b_val[u]) % p
        ok = True
        for t in range(nt):
            c = touched[t]
            if acc[c] % p != 0:
                ok = False
            acc[c] = 0
            mark[c] = 0
        if not ok:
            return False
    return True


compose_is_zero = _dual(_compose_is_zero)


# ---------------------------------------------------------------------------
# cube kernels: circle tracing and state-level differential generation
#
# These live here (rather than in cube.py) so all dual-build kernels share the
# registry.  See cube.py for the geometry conventions.


def _trace_circles_all(n, k, letters, circ, counts, reps):
    """Fill per-resolution circle data for all 2^k resolutions.

    circ:   int16[2^k, n*(k+1)]  circle id of each arc
    counts: int16[2^k]           number of circles
    reps:   int16[2^k, n+k+1]    first arc of each circle
    Arc (s, g) has index s*(k+1) + g; bit j of the resolution index picks the
    smoothing of letter j (0 at a positive letter = oriented smoothing).
    Circle ids are assigned in order of smallest member arc.
    """
    gaps = k + 1
    arcs = n * gaps
    parent = np.empty(arcs, dtype=np.int32)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            nxt = parent[a]
            parent[a] = root
            a = nxt
        return root

    def union(a, b):
        ra = find(a)
        rb = find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb

    for r in range(1 << k):
        for a in range(arcs):
            parent[a] = a
        for j in range(k):
            letter = letters[j]
            i = letter if letter > 0 else -letter
            bit = (r >> j) & 1
            oriented = (bit == 0) == (letter > 0)
            lo_b = (i - 1) * gaps + j
            hi_b = i * gaps + j
            if oriented:
                # vertical: both strands run through
                union(lo_b, lo_b + 1)
                union(hi_b, hi_b + 1)
            else:
                # cap-cup: join the two positions below and above
                union(lo_b, hi_b)
                union(lo_b + 1, hi_b + 1)
            for s in range(n):
                if s != i - 1 and s != i:
                    a_s = s * gaps + j
                    union(a_s, a_s + 1)
        for s in range(n):
            union(s * gaps + k, s * gaps)
        c = 0
        for a in range(arcs):
            root = find(a)
            if root == a:
                circ[r, a] = c
                reps[r, c] = a
                c += 1
            else:
                circ[r, a] = circ[r, root]
        counts[r] = c


trace_circles_all = _dual(_trace_circles_all)


def _build_edges(
    n,
    k,
    letters,
    p,
    circ,
    counts,
    reps,
    offsets,
    parity,
    mnum,
    mlab,
    mco,
    mdu,
    mdv,
    cnum,
    clab1,
    clab2,
    cco,
    cdu,
    cdv,
    out_src,
    out_dst,
    out_co,
    out_du,
    out_dv,
):
    """Emit all state-level differential entries; returns the entry count.

    The label-operation tables encode multiplication (m*) and
    comultiplication (c*) of the theory on basis labels 0 = x_plus,
    1 = x_minus; see cube.op_tables.
    """
    gaps = k + 1
    cur = 0
    cmap = np.empty(n + k + 1, dtype=np.int64)
    for r in range(1 << k):
        cr = counts[r]
        nstates = 1 << cr
        for j in range(k):
            if (r >> j) & 1:
                continue
            s = r | (1 << j)
            sgn = p - 1 if parity[r & ((1 << j) - 1)] else 1
            letter = letters[j]
            i = letter if letter > 0 else -letter
            lo_b = (i - 1) * gaps + j
            hi_b = i * gaps + j
            # bit 0 at a positive letter is the oriented (vertical) smoothing
            if letter > 0:
                ca = circ[r, lo_b]
                cb = circ[r, hi_b]
            else:
                ca = circ[r, lo_b]
                cb = circ[r, lo_b + 1]
            for c in range(cr):
                cmap[c] = circ[s, reps[r, c]]
            if ca != cb:
                # merge: both site circles land on ct
                ct = circ[s, lo_b]
                for mask in range(nstates):
                    la = (mask >> ca) & 1
                    lb = (mask >> cb) & 1
                    base = 0
                    for c in range(cr):
                        if c != ca and c != cb and ((mask >> c) & 1):
                            base |= 1 << cmap[c]
                    for t in range(mnum[la, lb]):
                        out_src[cur] = offsets[r] + mask
                        out_dst[cur] = offsets[s] + (base | (mlab[la, lb, t] << ct))
                        out_co[cur] = sgn * mco[la, lb, t] % p
                        out_du[cur] = mdu[la, lb, t]
                        out_dv[cur] = mdv[la, lb, t]
                        cur += 1
            else:
                # split: first comultiplication factor goes to the circle
                # through the lower-left arc
                c1 = circ[s, lo_b]
                if letter > 0:
                    c2 = circ[s, lo_b + 1]
                else:
                    c2 = circ[s, hi_b]
                for mask in range(nstates):
                    la = (mask >> ca) & 1
                    base = 0
                    for c in range(cr):
                        if c != ca and ((mask >> c) & 1):
                            base |= 1 << cmap[c]
                    for t in range(cnum[la]):
                        dst = base | (clab1[la, t] << c1) | (clab2[la, t] << c2)
                        out_src[cur] = offsets[r] + mask
                        out_dst[cur] = offsets[s] + dst
                        out_co[cur] = sgn * cco[la, t] % p
                        out_du[cur] = cdu[la, t]
                        out_dv[cur] = cdv[la, t]
                        cur += 1
    return cur


build_edges = _dual(_build_edges)
