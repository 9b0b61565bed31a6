"""Homology engines: field-coefficient dimensions and graded modules over F_p[U].

Representation
--------------

Within one homological degree, states are ordered by descending quantum
degree.  Every homogeneous object is stored as plain mod-p scalars against
that order, with U-exponents implied by degrees: a homogeneous vector of
quantum degree q has actual entry ``scalar * U^((q_state - q)/2)`` at each
state, and a matrix entry between graded bases carries the forced exponent
``(q_row - q_col)/2``.  All module arithmetic then reduces to field
arithmetic plus degree bookkeeping; additions that would mix exponents are
structurally impossible, which is the point of the encoding.

The cycle module of d^i is computed by a persistence-style column reduction
(descending quantum degree is the filtration order, pivot rule "low = largest
row index").  Eliminations only subtract earlier, higher-degree columns, so
the tracked transform stays inside F_p[U], and the transform columns of the
zero reduced columns form a free basis of ker d^i.  The image of d^{i-1}
keeps its nonzero reduced columns as an echelon basis.  Boundaries are
back-substituted into kernel coordinates and the resulting presentation
matrix goes through a graded Smith normal form whose pivot rule (minimal
forced exponent) keeps every row and column operation inside F_p[U] and
makes the diagonal orders ascend.

A faster path (barcode_u / all_barcodes) skips all transforms and reads the
summand multiset off the reduction pairing: a reduced column of d^{i-1} with
pivot row t and column degree q_v contributes a torsion summand of order
(q_t - q_v)/2 generated at quantum degree q_t (order-0 pairs are plain
cancellations), and kernel generator degrees not consumed by any pairing are
the free generator degrees.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .coeff import MONO_ZERO, Monomial, field_inv
from .cube import EnhancedChain, GradedComplex


class ConsistencyError(Exception):
    """An internal cross-check failed; indicates a bug, never bad input."""


class Summand(NamedTuple):
    """One cyclic summand: order None = free, else F_p[U]/(U^order)."""

    order: int | None
    q: int


class ClassCoordinates(NamedTuple):
    """Coordinates of a homology class, aligned with presentation summands."""

    values: tuple[Monomial, ...]
    q: int | None


class Barcode(NamedTuple):
    """Summand multiset of one homological degree (no generators)."""

    free: tuple[int, ...]
    torsion: tuple[tuple[int, int], ...]  # (top quantum degree, order >= 1)


# ---------------------------------------------------------------------------
# block plumbing


def _block_order(cx: GradedComplex, i: int):
    """States of hdeg i sorted by descending qdeg (ties by ascending sid)."""
    sids = cx.degree_states(i)
    if len(sids) == 0:
        return sids, np.zeros(0, dtype=np.int64)
    q = cx.qdeg_of(sids)
    order = np.lexsort((sids, -q))
    return sids[order], q[order]


def _pos_lookup(cx: GradedComplex, sids_sorted: np.ndarray) -> np.ndarray:
    pos = np.full(cx.total_states, -1, dtype=np.int64)
    pos[sids_sorted] = np.arange(len(sids_sorted), dtype=np.int64)
    return pos


def _csc_block(cx: GradedComplex, i: int, ncols: int, col_pos: np.ndarray, row_pos: np.ndarray):
    """CSC scalar matrix of d^i between position-relabeled blocks."""
    src, dst, co, _du, _dv = cx.edges_of_hdeg(i)
    cols = col_pos[src]
    rows = row_pos[dst]
    order = np.lexsort((rows, cols))
    cols, rows, co = cols[order], rows[order], co[order]
    ptr = np.zeros(ncols + 1, dtype=np.int64)
    np.add.at(ptr, cols + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, rows, co.astype(np.int64)


def _csc_to_dicts(ncols: int, ptr, idx, vals) -> list[dict[int, int]]:
    return [
        {int(idx[t]): int(vals[t]) for t in range(ptr[j], ptr[j + 1])} for j in range(ncols)
    ]


def _reduce_vec(z: dict[int, int], low_map: dict[int, int], cols, col_ok, p) -> dict[int, int]:
    """Reduce z against echelon columns (by low); returns the remainder.

    col_ok(m) guards legality: a column may only be used when its degree is
    at least the vector's degree, otherwise reduction stops at that low.
    """
    z = dict(z)
    while z:
        t = max(z)
        m = low_map.get(t)
        if m is None or not col_ok(m):
            break
        col = cols[m]
        s = z[t] * field_inv(col[t], p) % p
        for r, c in col.items():
            nv = (z.get(r, 0) - s * c) % p
            if nv:
                z[r] = nv
            else:
                z.pop(r, None)
    return z


# ---------------------------------------------------------------------------
# graded Smith normal form (sparse core + public dense wrapper)


def _snf_sparse(cols: dict[int, dict[int, int]], row_q, col_q, p):
    """Graded SNF by minimal-forced-exponent pivoting on sparse columns.

    cols maps column index -> {row index: nonzero scalar}.  Returns
    (pivots, L_rows, Linv_cols, R_cols, Rinv_rows) where pivots is a list of
    (row, col, order) in pivot order (orders ascending) and the transforms
    are sparse with lazily-identity missing lines.  After the implied scaling
    the pivot entries are unit monomials U^order and everything else in their
    rows/columns is zero: L @ M @ R is the permuted diagonal.
    """
    rows_index: dict[int, set[int]] = {}
    for v, col in cols.items():
        for r in col:
            rows_index.setdefault(r, set()).add(v)
    heap: list[tuple[int, int, int]] = []
    for v, col in cols.items():
        for r in col:
            heapq.heappush(heap, ((row_q[r] - col_q[v]) // 2, r, v))
    L_rows: dict[int, dict[int, int]] = {}
    Linv_cols: dict[int, dict[int, int]] = {}
    R_cols: dict[int, dict[int, int]] = {}
    Rinv_rows: dict[int, dict[int, int]] = {}

    def line(store, k):
        got = store.get(k)
        if got is None:
            got = {k: 1}
            store[k] = got
        return got

    def axpy(dst: dict[int, int], src: dict[int, int], f: int) -> None:
        for k, c in src.items():
            nv = (dst.get(k, 0) + f * c) % p
            if nv:
                dst[k] = nv
            else:
                dst.pop(k, None)

    pivots: list[tuple[int, int, int]] = []
    pivot_rows: set[int] = set()
    pivot_cols: set[int] = set()
    while heap:
        e, r, v = heapq.heappop(heap)
        if r in pivot_rows or v in pivot_cols:
            continue
        val = cols.get(v, {}).get(r)
        if not val:
            continue
        # normalize the pivot row so the pivot becomes the unit monomial U^e
        s = field_inv(val, p)
        for v2 in rows_index.get(r, ()):
            cols[v2][r] = cols[v2][r] * s % p
        lr = line(L_rows, r)
        for k in lr:
            lr[k] = lr[k] * s % p
        lic = line(Linv_cols, r)
        for k in lic:
            lic[k] = lic[k] * val % p
        row_entries = [(v2, cols[v2][r]) for v2 in rows_index.get(r, set())]
        # clear the pivot column with row operations
        for a, f in list(cols[v].items()):
            if a == r:
                continue
            for v2, c in row_entries:
                col2 = cols[v2]
                nv = (col2.get(a, 0) - f * c) % p
                if nv:
                    if a not in col2:
                        rows_index.setdefault(a, set()).add(v2)
                        heapq.heappush(heap, ((row_q[a] - col_q[v2]) // 2, a, v2))
                    col2[a] = nv
                else:
                    if a in col2:
                        del col2[a]
                        rows_index[a].discard(v2)
            axpy(line(L_rows, a), lr, -f)
            axpy(lic, line(Linv_cols, a), f)
        # the pivot column is now solitary; clear the pivot row with
        # column operations (each touches only the pivot entry)
        for v2, g in row_entries:
            if v2 == v:
                continue
            del cols[v2][r]
            rows_index[r].discard(v2)
            axpy(line(R_cols, v2), line(R_cols, v), -g)
            axpy(line(Rinv_rows, v), line(Rinv_rows, v2), g)
        pivots.append((r, v, e))
        pivot_rows.add(r)
        pivot_cols.add(v)
    return pivots, L_rows, Linv_cols, R_cols, Rinv_rows


@dataclass(frozen=True)
class SNFResult:
    """Graded SNF data: L @ M @ R has unit-monomial pivots and zeros elsewhere."""

    pivots: tuple[tuple[int, int, int], ...]  # (row, col, order), orders ascending
    row_q: tuple[int, ...]
    col_q: tuple[int, ...]
    L: np.ndarray
    Linv: np.ndarray
    R: np.ndarray
    Rinv: np.ndarray

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(t for _, _, t in self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def diagonal_matrix(self) -> np.ndarray:
        d = np.zeros((len(self.row_q), len(self.col_q)), dtype=np.int64)
        for r, v, _t in self.pivots:
            d[r, v] = 1
        return d


def _entry_scalar(entry, forced: int, p: int) -> int:
    """Normalize one matrix entry to a scalar, validating its exponent."""
    from .coeff import DegreeError

    if isinstance(entry, Monomial):
        c, e = entry.coeff % p, entry.upow
    elif isinstance(entry, tuple):
        c, e = entry[0] % p, entry[1]
    else:
        c, e = int(entry) % p, None
    if not c:
        return 0
    if forced < 0:
        raise DegreeError(f"nonzero entry at forced exponent {forced} < 0")
    if e is not None and e != forced:
        raise DegreeError(f"entry exponent {e} != forced exponent {forced}")
    return c


def snf_graded(entries, row_q, col_q, p: int) -> SNFResult:
    """Graded Smith normal form of a homogeneous monomial matrix over F_p[U].

    ``entries[i][j]`` may be a Monomial, a (coeff, upow) pair, or a plain
    scalar whose exponent is taken as forced; the forced exponent of slot
    (i, j) is (row_q[i] - col_q[j]) / 2 and anything inconsistent raises
    DegreeError.  Returns dense transforms with L @ M @ R equal to the
    permuted diagonal of unit monomials U^order.
    """
    from .coeff import DegreeError

    row_q = tuple(int(q) for q in row_q)
    col_q = tuple(int(q) for q in col_q)
    nrows, ncols = len(row_q), len(col_q)
    cols: dict[int, dict[int, int]] = {}
    if len(entries) != nrows:
        raise ValueError("row count does not match row_q")
    for i, row in enumerate(entries):
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        for j, entry in enumerate(row):
            diff = row_q[i] - col_q[j]
            if diff % 2:
                # odd degree difference: only a zero entry is consistent
                c = entry.coeff if isinstance(entry, Monomial) else (
                    entry[0] if isinstance(entry, tuple) else int(entry)
                )
                if c % p:
                    raise DegreeError(f"odd degree difference at ({i}, {j})")
                continue
            c = _entry_scalar(entry, diff // 2, p)
            if c:
                cols.setdefault(j, {})[i] = c
    pivots, L_rows, Linv_cols, R_cols, Rinv_rows = _snf_sparse(cols, row_q, col_q, p)
    L = np.eye(nrows, dtype=np.int64)
    Linv = np.eye(nrows, dtype=np.int64)
    for r, row in L_rows.items():
        L[r, :] = 0
        for k, c in row.items():
            L[r, k] = c
    for r, col in Linv_cols.items():
        Linv[:, r] = 0
        for k, c in col.items():
            Linv[k, r] = c
    R = np.eye(ncols, dtype=np.int64)
    Rinv = np.eye(ncols, dtype=np.int64)
    for v, col in R_cols.items():
        R[:, v] = 0
        for k, c in col.items():
            R[k, v] = c
    for v, row in Rinv_rows.items():
        Rinv[v, :] = 0
        for k, c in row.items():
            Rinv[v, k] = c
    return SNFResult(tuple(pivots), row_q, col_q, L, Linv, R, Rinv)


# ---------------------------------------------------------------------------
# homology over F_p[U] (BN complexes): full presentation engine


class HomologyPresentation:
    """Cyclic decomposition of H^i of a BN complex, with generators.

    ``summands[m]`` describes the m-th summand and ``generators[m]`` is a
    representative cycle of its generator.  coordinates() writes any cycle of
    this homological degree in these summands; u_divisibility() answers how
    U-divisible its class is.
    """

    def __init__(self, cx: GradedComplex, i: int):
        self.cx = cx
        self.i = i
        self.p = cx.p

    # filled by homology_u
    summands: tuple[Summand, ...] = ()
    generators: tuple[EnhancedChain, ...] = ()

    def _solve_in_kernel(self, z: dict[int, int], q_z: int) -> dict[int, int]:
        """Solve K @ y = z for a homogeneous vector z of quantum degree q_z."""
        p = self.p
        rem = dict(z)
        ytil: dict[int, int] = {}
        while rem:
            t = max(rem)
            m = self._ktil_low.get(t)
            if m is None:
                raise ConsistencyError("vector is not in the cycle module")
            if self._k_q[m] < q_z:
                raise ConsistencyError("cycle-module solve needs a negative U-power")
            col = self._ktil[m]
            s = rem[t] * field_inv(col[t], p) % p
            ytil[m] = (ytil.get(m, 0) + s) % p
            for r, c in col.items():
                nv = (rem.get(r, 0) - s * c) % p
                if nv:
                    rem[r] = nv
                else:
                    rem.pop(r, None)
        y: dict[int, int] = {}
        for m, s in ytil.items():
            for l, c in self._w[m].items():
                nv = (y.get(l, 0) + s * c) % p
                if nv:
                    y[l] = nv
                else:
                    y.pop(l, None)
        return y

    def _chain_to_vec(self, z: EnhancedChain) -> tuple[dict[int, int], int | None]:
        """State-coordinate scalars of a homogeneous chain at this hdeg."""
        if z.is_zero():
            return {}, None
        if z.hdeg() != self.i:
            raise ValueError(f"chain lives at hdeg {z.hdeg()}, presentation at {self.i}")
        q_z = z.qdeg()
        vec: dict[int, int] = {}
        for sid, (c, du, dv) in z:
            if dv:
                raise ValueError("V-power in a one-variable complex")
            pos = int(self._pos[sid])
            vec[pos] = c
            # homogeneity already pins du to (q_state - q_z)/2
        return vec, q_z

    def is_boundary(self, z: EnhancedChain) -> bool:
        """Exact membership of a homogeneous chain in im d^{i-1} over F_p[U]."""
        vec, q_z = self._chain_to_vec(z)
        if not vec:
            return True
        rem = _reduce_vec(
            vec, self._b_low, self._b_cols, lambda m: self._b_q[m] >= q_z, self.p
        )
        return not rem


def homology_u(cx: GradedComplex, i: int) -> HomologyPresentation:
    """Cyclic decomposition of H^i over F_p[U] for a BN complex."""
    if cx.theory.tag != "BN":
        raise ValueError("homology over F_p[U] is defined on BN complexes")
    p = cx.p
    pres = HomologyPresentation(cx, i)
    cols_i, q_i = _block_order(cx, i)
    cols_ip1, q_ip1 = _block_order(cx, i + 1)
    cols_im1, q_im1 = _block_order(cx, i - 1)
    pos_i = _pos_lookup(cx, cols_i)
    pres._pos = pos_i
    pres._cols_i = cols_i
    pres._q_i = q_i
    n_i = len(cols_i)
    inv = linalg.inverse_table(p)

    # cycle module of d^i, with transform
    if n_i and len(cols_ip1):
        pos_ip1 = _pos_lookup(cx, cols_ip1)
        ptr, rows, vals = _csc_block(cx, i, n_i, pos_i, pos_ip1)
        low_i, _rp, _rr, _rv, t_ptr, t_cols, t_vals = linalg.reduce_cols(
            n_i, len(cols_ip1), ptr, rows, vals, p, inv
        )
        kern_idx = [j for j in range(n_i) if low_i[j] < 0]
        tdicts = _csc_to_dicts(n_i, t_ptr, t_cols, t_vals)
        k_cols = [tdicts[j] for j in kern_idx]
        k_q = [int(q_i[j]) for j in kern_idx]
    else:
        k_cols = [{j: 1} for j in range(n_i)]
        k_q = [int(q) for q in q_i]

    # boundary module of d^{i-1}: echelon columns
    b_cols: list[dict[int, int]] = []
    b_q: list[int] = []
    if n_i and len(cols_im1):
        pos_im1 = _pos_lookup(cx, cols_im1)
        ptr, rows, vals = _csc_block(cx, i - 1, len(cols_im1), pos_im1, pos_i)
        low_b, r_ptr, r_rows, r_vals, _tp, _tc, _tv = linalg.reduce_cols(
            len(cols_im1), n_i, ptr, rows, vals, p, inv
        )
        rdicts = _csc_to_dicts(len(cols_im1), r_ptr, r_rows, r_vals)
        for v in range(len(cols_im1)):
            if low_b[v] >= 0:
                b_cols.append(rdicts[v])
                b_q.append(int(q_im1[v]))
    pres._b_cols = b_cols
    pres._b_q = b_q
    pres._b_low = {max(col): m for m, col in enumerate(b_cols)}

    # echelonize the kernel basis for solving
    nk = len(k_cols)
    if nk:
        nnz = sum(len(c) for c in k_cols)
        ptr = np.zeros(nk + 1, dtype=np.int64)
        rows = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.int64)
        t = 0
        for j, col in enumerate(k_cols):
            for r in sorted(col):
                rows[t] = r
                vals[t] = col[r]
                t += 1
            ptr[j + 1] = t
        low_k, r_ptr, r_rows, r_vals, t_ptr, t_cols, t_vals = linalg.reduce_cols(
            nk, n_i, ptr, rows, vals, p, inv
        )
        if (low_k < 0).any():
            raise ConsistencyError("kernel basis is linearly dependent")
        ktil = _csc_to_dicts(nk, r_ptr, r_rows, r_vals)
        w = _csc_to_dicts(nk, t_ptr, t_cols, t_vals)
    else:
        ktil, w = [], []
        low_k = np.zeros(0, dtype=np.int64)
    pres._k_cols = k_cols
    pres._k_q = k_q
    pres._ktil = ktil
    pres._ktil_low = {int(low_k[m]): m for m in range(nk)}
    pres._w = w

    # presentation matrix: boundaries in kernel coordinates
    pcols: dict[int, dict[int, int]] = {}
    for v, (bcol, qv) in enumerate(zip(b_cols, b_q)):
        y = pres._solve_in_kernel(bcol, qv)
        if y:
            pcols[v] = y
    pivots, L_rows, Linv_cols, _R_cols, _Rinv_rows = _snf_sparse(pcols, k_q, b_q, p)

    # assemble summands: torsion pivots (order >= 1) then free rows
    summands: list[Summand] = []
    gen_rows: list[int] = []
    pivot_rows = set()
    for r, _v, t in pivots:
        pivot_rows.add(r)
        if t >= 1:
            summands.append(Summand(t, k_q[r]))
            gen_rows.append(r)
    for r in range(nk):
        if r not in pivot_rows:
            summands.append(Summand(None, k_q[r]))
            gen_rows.append(r)
    generators = []
    for m, r in enumerate(gen_rows):
        q_gen = summands[m].q
        combo = Linv_cols.get(r, {r: 1})
        acc: dict[int, int] = {}
        for l, c in combo.items():
            for rr, cc in k_cols[l].items():
                acc[rr] = (acc.get(rr, 0) + c * cc) % p
        gen = EnhancedChain(cx)
        for rr, c in acc.items():
            if c:
                gen.add_term(int(cols_i[rr]), c, (int(q_i[rr]) - q_gen) // 2, 0)
        generators.append(gen)
    pres.summands = tuple(summands)
    pres.generators = tuple(generators)
    pres._gen_rows = gen_rows
    pres._orders = {r: t for r, _v, t in pivots}
    pres._l_rows = {r: L_rows.get(r, {r: 1}) for r in gen_rows}
    return pres


def coordinates(pres: HomologyPresentation, z: EnhancedChain) -> ClassCoordinates:
    """Coordinates of a cycle's class in the presentation's summands.

    Torsion coordinates are reduced mod U^order.  The reconstruction
    Sum(coord_m * gen_m) is verified to differ from z by a boundary.
    """
    if not z.is_cycle():
        raise ValueError("coordinates of a non-cycle requested")
    vec, q_z = pres._chain_to_vec(z)
    if not vec:
        return ClassCoordinates(tuple(MONO_ZERO for _ in pres.summands), None)
    p = pres.p
    y = pres._solve_in_kernel(vec, q_z)
    values: list[Monomial] = []
    recon = EnhancedChain(pres.cx)
    for m, (summand, r) in enumerate(zip(pres.summands, pres._gen_rows)):
        row = pres._l_rows[r]
        s = 0
        for l, c in row.items():
            yl = y.get(l)
            if yl:
                s = (s + c * yl) % p
        if not s:
            values.append(MONO_ZERO)
            continue
        e = (summand.q - q_z) // 2
        if e < 0:
            raise ConsistencyError("coordinate with negative U-power")
        if summand.order is not None and e >= summand.order:
            values.append(MONO_ZERO)
            continue
        values.append(Monomial(s, e))
        recon = recon.plus(pres.generators[m].scaled(s, e, 0))
    residual = z.minus(recon)
    if not pres.is_boundary(residual):
        raise ConsistencyError("residual of coordinate reconstruction is not a boundary")
    return ClassCoordinates(tuple(values), q_z)


def u_divisibility(pres: HomologyPresentation, coords: ClassCoordinates) -> int:
    """Largest k with U^k * x = class solvable; min exponent of the coordinates.

    Requires a non-torsion class: some free summand must carry a nonzero
    reduced coordinate, otherwise the answer would be unbounded or undefined.
    """
    free_support = any(
        s.order is None and mono.coeff for s, mono in zip(pres.summands, coords.values)
    )
    if not free_support:
        raise ValueError("class is torsion (or zero); U-divisibility undefined")
    return min(mono.upow for mono in coords.values if mono.coeff)


# ---------------------------------------------------------------------------
# barcode fast path (no transforms)


def _pairing(low_prev, q_prev_cols, q_rows, low_cur, q_cur_cols):
    """Assemble one degree's Barcode from two reductions' lows."""
    kern_q = [int(q_cur_cols[j]) for j in range(len(q_cur_cols)) if low_cur[j] < 0]
    free_count: dict[int, int] = {}
    for q in kern_q:
        free_count[q] = free_count.get(q, 0) + 1
    torsion: list[tuple[int, int]] = []
    for v in range(len(low_prev)):
        t = int(low_prev[v])
        if t < 0:
            continue
        q_top = int(q_rows[t])
        order = (q_top - int(q_prev_cols[v])) // 2
        free_count[q_top] = free_count.get(q_top, 0) - 1
        if order >= 1:
            torsion.append((q_top, order))
    free: list[int] = []
    for q, c in free_count.items():
        if c < 0:
            raise ConsistencyError("pairing consumed a missing kernel degree")
        free.extend([q] * c)
    return Barcode(tuple(sorted(free, reverse=True)), tuple(sorted(torsion)))


def all_barcodes(cx: GradedComplex) -> dict[int, Barcode]:
    """Barcodes of every homological degree of a BN complex (fast path)."""
    if cx.theory.tag != "BN":
        raise ValueError("barcodes over F_p[U] are defined on BN complexes")
    p = cx.p
    inv = linalg.inverse_table(p)
    hdegs = list(cx.hdeg_range)
    blocks = {i: _block_order(cx, i) for i in range(hdegs[0], hdegs[-1] + 2)}
    lows: dict[int, np.ndarray] = {}
    for i in hdegs:
        cols_i, _ = blocks[i]
        cols_ip1, _ = blocks.get(i + 1, (np.zeros(0, dtype=np.int64), None))
        if len(cols_i) and len(cols_ip1):
            ptr, rows, vals = _csc_block(
                cx, i, len(cols_i), _pos_lookup(cx, cols_i), _pos_lookup(cx, cols_ip1)
            )
            lows[i] = linalg.reduce_lows(len(cols_i), len(cols_ip1), ptr, rows, vals, p, inv)
        else:
            lows[i] = np.full(len(cols_i), -1, dtype=np.int64)
    out: dict[int, Barcode] = {}
    for i in hdegs:
        low_prev = lows.get(i - 1, np.zeros(0, dtype=np.int64))
        _, q_prev = blocks.get(i - 1, (None, np.zeros(0, dtype=np.int64)))
        _, q_rows = blocks[i]
        out[i] = _pairing(low_prev, q_prev, q_rows, lows[i], blocks[i][1])
    return out


def barcode_u(cx: GradedComplex, i: int) -> Barcode:
    """Summand multiset of H^i over F_p[U] without generators."""
    if cx.theory.tag != "BN":
        raise ValueError("barcodes over F_p[U] are defined on BN complexes")
    p = cx.p
    inv = linalg.inverse_table(p)
    cols_i, q_i = _block_order(cx, i)
    cols_ip1, _q_ip1 = _block_order(cx, i + 1)
    cols_im1, q_im1 = _block_order(cx, i - 1)
    if len(cols_i) and len(cols_ip1):
        ptr, rows, vals = _csc_block(
            cx, i, len(cols_i), _pos_lookup(cx, cols_i), _pos_lookup(cx, cols_ip1)
        )
        low_cur = linalg.reduce_lows(len(cols_i), len(cols_ip1), ptr, rows, vals, p, inv)
    else:
        low_cur = np.full(len(cols_i), -1, dtype=np.int64)
    if len(cols_im1) and len(cols_i):
        ptr, rows, vals = _csc_block(
            cx, i - 1, len(cols_im1), _pos_lookup(cx, cols_im1), _pos_lookup(cx, cols_i)
        )
        low_prev = linalg.reduce_lows(len(cols_im1), len(cols_i), ptr, rows, vals, p, inv)
    else:
        low_prev = np.full(len(cols_im1), -1, dtype=np.int64)
    return _pairing(low_prev, q_im1, q_i, low_cur, q_i)


def is_boundary_u(cx: GradedComplex, z: EnhancedChain) -> bool:
    """Membership of a homogeneous chain in im d over F_p[U] (BN complex)."""
    if cx.theory.tag != "BN":
        raise ValueError("F_p[U] boundary membership is defined on BN complexes")
    if z.is_zero():
        return True
    i = z.hdeg()
    q_z = z.qdeg()
    p = cx.p
    cols_i, q_i = _block_order(cx, i)
    cols_im1, q_im1 = _block_order(cx, i - 1)
    if not len(cols_im1):
        return False
    pos_i = _pos_lookup(cx, cols_i)
    ptr, rows, vals = _csc_block(cx, i - 1, len(cols_im1), _pos_lookup(cx, cols_im1), pos_i)
    low_b, r_ptr, r_rows, r_vals, _tp, _tc, _tv = linalg.reduce_cols(
        len(cols_im1), len(cols_i), ptr, rows, vals, p, linalg.inverse_table(p)
    )
    b_cols, b_q = [], []
    for v in range(len(cols_im1)):
        if low_b[v] >= 0:
            b_cols.append(
                {int(r_rows[t]): int(r_vals[t]) for t in range(r_ptr[v], r_ptr[v + 1])}
            )
            b_q.append(int(q_im1[v]))
    b_low = {max(col): m for m, col in enumerate(b_cols)}
    vec = {}
    for sid, (c, du, dv) in z:
        if dv:
            raise ValueError("V-power in a one-variable complex")
        vec[int(pos_i[sid])] = c
    rem = _reduce_vec(vec, b_low, b_cols, lambda m: b_q[m] >= q_z, p)
    return not rem


# ---------------------------------------------------------------------------
# homology over F_p (Kh complexes)


def _kh_gate(cx: GradedComplex) -> None:
    if cx.theory.tag != "Kh":
        raise ValueError("field-coefficient homology is defined on Kh complexes")


def _q_block_ranks(cx: GradedComplex, i: int) -> dict[int, int]:
    """Rank of each fixed-q block of d^i (Kh: the differential preserves q)."""
    src, dst, co, _du, _dv = cx.edges_of_hdeg(i)
    if len(src) == 0:
        return {}
    qs = cx.qdeg_of(src)
    out: dict[int, int] = {}
    p = cx.p
    inv = linalg.inverse_table(p)
    src_states = cx.degree_states(i)
    dst_states = cx.degree_states(i + 1)
    src_q = cx.qdeg_of(src_states)
    dst_q = cx.qdeg_of(dst_states)
    for q in sorted(set(int(x) for x in qs)):
        cols_sids = src_states[src_q == q]
        rows_sids = dst_states[dst_q == q]
        sel = qs == q
        col_pos = {int(s): t for t, s in enumerate(cols_sids)}
        row_pos = {int(s): t for t, s in enumerate(rows_sids)}
        entries = sorted(
            (col_pos[int(s)], row_pos[int(d)], int(c))
            for s, d, c in zip(src[sel], dst[sel], co[sel])
        )
        ptr = np.zeros(len(cols_sids) + 1, dtype=np.int64)
        rows = np.empty(len(entries), dtype=np.int64)
        vals = np.empty(len(entries), dtype=np.int64)
        for t, (cpos, rpos, c) in enumerate(entries):
            ptr[cpos + 1] += 1
            rows[t] = rpos
            vals[t] = c
        np.cumsum(ptr, out=ptr)
        lows = linalg.reduce_lows(len(cols_sids), len(rows_sids), ptr, rows, vals, cx.p, inv)
        out[q] = int((lows >= 0).sum())
    return out


def kh_table(cx: GradedComplex) -> dict[tuple[int, int], int]:
    """All nonzero dim H^{i,q} of a Kh complex."""
    _kh_gate(cx)
    ranks: dict[int, dict[int, int]] = {}
    for i in cx.hdeg_range:
        ranks[i] = _q_block_ranks(cx, i)
    out: dict[tuple[int, int], int] = {}
    for i in cx.hdeg_range:
        states = cx.degree_states(i)
        if not len(states):
            continue
        qs = cx.qdeg_of(states)
        for q in sorted(set(int(x) for x in qs)):
            dim = int((qs == q).sum())
            dim -= ranks.get(i, {}).get(q, 0)
            dim -= ranks.get(i - 1, {}).get(q, 0)
            if dim:
                out[(i, q)] = dim
    return out


def homology_f(cx: GradedComplex, i: int, q: int) -> int:
    """dim over F_p of H^{i,q} for a Kh complex."""
    _kh_gate(cx)
    states = cx.degree_states(i)
    if not len(states):
        return 0
    qs = cx.qdeg_of(states)
    dim = int((qs == q).sum())
    if not dim:
        return 0
    dim -= _q_block_ranks(cx, i).get(q, 0)
    dim -= _q_block_ranks(cx, i - 1).get(q, 0)
    return dim


def is_boundary_f(cx: GradedComplex, z: EnhancedChain) -> bool:
    """Membership of a chain in im d over F_p (Kh complex)."""
    _kh_gate(cx)
    if z.is_zero():
        return True
    i = z.hdeg()
    q_z = z.qdeg()
    p = cx.p
    src_states = cx.degree_states(i - 1)
    if not len(src_states):
        return False
    dst_states = cx.degree_states(i)
    src_q = cx.qdeg_of(src_states)
    dst_q = cx.qdeg_of(dst_states)
    cols_sids = src_states[src_q == q_z]
    rows_sids = dst_states[dst_q == q_z]
    if not len(cols_sids):
        return False
    row_pos = {int(s): t for t, s in enumerate(rows_sids)}
    src, dst, co, _du, _dv = cx.edges_of_hdeg(i - 1)
    sel = np.isin(src, cols_sids)
    col_pos = {int(s): t for t, s in enumerate(cols_sids)}
    entries = sorted(
        (col_pos[int(s)], row_pos[int(d)], int(c))
        for s, d, c in zip(src[sel], dst[sel], co[sel])
    )
    ptr = np.zeros(len(cols_sids) + 1, dtype=np.int64)
    rows = np.empty(len(entries), dtype=np.int64)
    vals = np.empty(len(entries), dtype=np.int64)
    for t, (cpos, rpos, c) in enumerate(entries):
        ptr[cpos + 1] += 1
        rows[t] = rpos
        vals[t] = c
    np.cumsum(ptr, out=ptr)
    low_b, r_ptr, r_rows, r_vals, _tp, _tc, _tv = linalg.reduce_cols(
        len(cols_sids), len(rows_sids), ptr, rows, vals, p, linalg.inverse_table(p)
    )
    b_cols = [
        {int(r_rows[t]): int(r_vals[t]) for t in range(r_ptr[v], r_ptr[v + 1])}
        for v in range(len(cols_sids))
        if low_b[v] >= 0
    ]
    b_low = {max(col): m for m, col in enumerate(b_cols)}
    vec = {row_pos[sid]: c for sid, (c, _du2, _dv2) in z}
    rem = _reduce_vec(vec, b_low, b_cols, lambda m: True, p)
    return not rem
