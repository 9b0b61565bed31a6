"""Homology engine checks: graded SNF, F_p[U] presentations, barcodes.

Independent oracles used here:

* cokernel dimensions: a graded matrix over F_p[U] is expanded into an F_p
  shift-block matrix, and the summand orders claimed by snf_graded must
  reproduce its corank for every truncation N (tensoring is right exact,
  so the cokernel commutes with reduction mod U^N);
* truncated_homology_profile recomputes H^i over F_p[U]/(U^8) from scratch
  with plain F_p row reduction on (state, upow) coordinates;
* divisibility_oracle answers the U-divisibility question by brute force
  over all small coefficient vectors, using only boundary membership.
"""

import itertools
import random
import types

import numpy as np
import pytest

from khbraid import homalg, linalg
from khbraid.braid import BraidWord
from khbraid.coeff import MONO_ONE, MONO_ZERO, DegreeError, Monomial
from khbraid.cube import EnhancedChain, build_complex
from khbraid.frobenius import theory

from oracles import rank_fp, truncated_homology_profile

BN3 = theory("BN", 3)
KH3 = theory("Kh", 3)

TREFOIL = (2, (1, 1, 1))
FIG8 = (3, (1, -2, 1, -2))
# H^-2 of this word carries free summands and a torsion summand at once.
MIXED = (3, (-2, -1, -1, 1, -1, -2, -2))

EMPTY_BAR = homalg.Barcode((), ())


def bn_complex(n, letters, p=3):
    return build_complex(BraidWord(n, letters), theory("BN", p))


def small_words(max_letters=6, rng=None, count=6):
    words = [TREFOIL, (2, (1, -1)), FIG8, (2, (-1, -1, -1)), (3, (1, 2, 1, 2))]
    rng = rng or random.Random(0x5EED)
    for _ in range(count):
        n = rng.randint(2, 3)
        k = rng.randint(1, max_letters)
        words.append(
            (n, tuple(rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(k)))
        )
    return words


# ---------------------------------------------------------------------------
# the reduce_cols kernel


def csc_of_dense(dense, nr, nc):
    ptr, rows, vals = [0], [], []
    for j in range(nc):
        for i in range(nr):
            if dense[i][j]:
                rows.append(i)
                vals.append(dense[i][j])
        ptr.append(len(rows))
    return (
        np.asarray(ptr, dtype=np.int64),
        np.asarray(rows, dtype=np.int64),
        np.asarray(vals, dtype=np.int64),
    )


def dense_of_csc(nrows, ncols, ptr, rows, vals):
    out = np.zeros((nrows, ncols), dtype=np.int64)
    for j in range(ncols):
        for k in range(int(ptr[j]), int(ptr[j + 1])):
            out[int(rows[k]), j] = int(vals[k])
    return out


@pytest.mark.parametrize("build", sorted(linalg.KERNELS["_reduce_cols"]))
def test_reduce_cols_kernel(build):
    fn = linalg.KERNELS["_reduce_cols"][build]
    lows_fn = linalg.KERNELS["_reduce_lows"][build]
    rng = random.Random(41)
    for _ in range(25):
        p = rng.choice([2, 3, 5])
        nr = rng.randint(0, 7)
        nc = rng.randint(0, 7)
        dense = [
            [rng.randrange(p) if rng.random() < 0.45 else 0 for _ in range(nc)]
            for _ in range(nr)
        ]
        ptr, rows, vals = csc_of_dense(dense, nr, nc)
        inv = linalg.inverse_table(p)
        low, r_ptr, r_rows, r_vals, t_ptr, t_cols, t_vals = fn(
            nc, nr, ptr, rows, vals, p, inv
        )
        d_mat = np.asarray(dense, dtype=np.int64).reshape(nr, nc)
        r_mat = dense_of_csc(nr, nc, r_ptr, r_rows, r_vals)
        t_mat = dense_of_csc(nc, nc, t_ptr, t_cols, t_vals)
        assert np.array_equal((d_mat @ t_mat) % p, r_mat % p)
        # T is unit upper triangular
        for j in range(nc):
            assert t_mat[j, j] == 1
            assert not np.any(t_mat[j + 1 :, j] % p)
        # lows are the maximal rows of the reduced columns, distinct when set
        nonzero_lows = []
        for j in range(nc):
            col_rows = r_rows[int(r_ptr[j]) : int(r_ptr[j + 1])]
            if len(col_rows) == 0:
                assert low[j] == -1
            else:
                assert low[j] == int(col_rows.max())
                nonzero_lows.append(int(low[j]))
        assert len(nonzero_lows) == len(set(nonzero_lows))
        assert np.array_equal(low, lows_fn(nc, nr, ptr, rows, vals, p, inv))


# ---------------------------------------------------------------------------
# graded Smith normal form


def entry_ce(ent):
    """(coeff, upow) of a matrix entry given as 0, int, tuple, or Monomial."""
    if isinstance(ent, Monomial):
        return ent.coeff, ent.upow
    if isinstance(ent, tuple):
        return ent
    return ent, 0


def expanded_matrix(entries, row_q, col_q, p, big_n):
    """F_p matrix of the same map on (row, upow) coordinates, U acting as shift."""
    nr, nc = len(row_q), len(col_q)
    mat = [[0] * (nc * big_n) for _ in range(nr * big_n)]
    for i, row in enumerate(entries):
        for j, ent in enumerate(row):
            c, e = entry_ce(ent)
            c %= p
            if not c:
                continue
            for k in range(big_n - e):
                mat[i * big_n + k + e][j * big_n + k] = c
    return mat


def check_snf(entries, row_q, col_q, p):
    res = homalg.snf_graded(entries, row_q, col_q, p)
    nr, nc = len(row_q), len(col_q)
    m_scalar = np.asarray(
        [[entry_ce(e)[0] % p for e in row] for row in entries], dtype=np.int64
    ).reshape(nr, nc)
    assert np.array_equal((res.L @ m_scalar @ res.R) % p, res.diagonal_matrix() % p)
    assert np.array_equal((res.L @ res.Linv) % p, np.eye(nr, dtype=np.int64))
    assert np.array_equal((res.R @ res.Rinv) % p, np.eye(nc, dtype=np.int64))
    # transforms are degree-legal: entry (a, b) carries U^((q_a - q_b)/2)
    for t_mat, qs in ((res.L, row_q), (res.Linv, row_q), (res.R, col_q), (res.Rinv, col_q)):
        for a, b in zip(*np.nonzero(t_mat % p)):
            diff = qs[a] - qs[b]
            assert diff >= 0 and diff % 2 == 0, (a, b, diff)
    assert all(t >= 0 for t in res.orders)
    assert all(a <= b for a, b in zip(res.orders, res.orders[1:]))
    # cokernel corank over F_p[U]/(U^N), computed independently on the
    # expanded shift-block matrix, for every truncation
    for big_n in (1, 2, 4, 6):
        expanded = expanded_matrix(entries, row_q, col_q, p, big_n)
        corank = nr * big_n - rank_fp(expanded, p)
        want = (nr - res.rank) * big_n + sum(min(t, big_n) for t in res.orders)
        assert corank == want, big_n
    return res


def test_snf_single_u_entry():
    res = check_snf([[(1, 1)]], [0], [-2], 3)
    assert res.orders == (1,)
    assert res.rank == 1


def test_snf_zero_matrix():
    res = check_snf([[0]], [0], [-2], 3)
    assert res.orders == ()
    assert res.rank == 0


def test_snf_triangular_pair():
    res = check_snf([[(1, 1), (1, 2)], [0, (1, 3)]], [0, 2], [-2, -4], 3)
    assert res.orders == (1, 3)


def test_snf_unit_pivot():
    res = check_snf([[Monomial(2, 0)]], [4], [4], 5)
    assert res.orders == (0,)


def test_snf_random_graded_matrices():
    rng = random.Random(97)
    for _ in range(30):
        p = rng.choice([2, 3, 5])
        nr = rng.randint(1, 5)
        nc = rng.randint(1, 5)
        parity = rng.randint(0, 1)
        row_q = [parity + 2 * rng.randint(0, 4) for _ in range(nr)]
        col_q = [parity + 2 * rng.randint(-2, 3) for _ in range(nc)]
        entries = []
        for qr in row_q:
            row = []
            for qc in col_q:
                e = (qr - qc) // 2
                if e < 0 or rng.random() < 0.35:
                    row.append(0)
                else:
                    row.append((rng.randrange(p), e))
            entries.append(row)
        check_snf(entries, row_q, col_q, p)


def test_snf_rejects_bad_degrees():
    with pytest.raises(DegreeError):
        homalg.snf_graded([[(1, 1)]], [1], [0], 3)  # odd degree difference
    with pytest.raises(DegreeError):
        homalg.snf_graded([[(1, 0)]], [0], [2], 3)  # forced exponent < 0
    with pytest.raises(DegreeError):
        homalg.snf_graded([[Monomial(1, 2)]], [0], [-2], 3)  # wrong exponent
    with pytest.raises(ValueError):
        homalg.snf_graded([[0], [0]], [0], [0], 3)  # row count mismatch
    # zero entries may sit at any bidegree
    assert homalg.snf_graded([[0]], [1], [0], 3).orders == ()
    assert homalg.snf_graded([[0]], [0], [2], 3).orders == ()


# ---------------------------------------------------------------------------
# presentations of H^i over F_p[U]


def assert_presentation_sane(cx, i, pres):
    assert len(pres.summands) == len(pres.generators)
    for s, g in zip(pres.summands, pres.generators):
        assert not g.is_zero()
        assert g.hdeg() == i
        assert g.qdeg() == s.q
        assert g.apply_d().is_zero()
        assert s.order is None or s.order >= 1


def test_homology_unknot():
    cx = build_complex(BraidWord(1, ()), BN3)
    pres = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres.summands) == [-1, 1]
    assert all(s.order is None for s in pres.summands)
    assert_presentation_sane(cx, 0, pres)


def test_homology_kink_pair():
    # unknot with a cancelling pair of kinks
    cx = bn_complex(3, (1, -2))
    pres = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres.summands) == [-1, 1]
    assert all(s.order is None for s in pres.summands)
    assert homalg.homology_u(cx, -1).summands == ()
    assert homalg.homology_u(cx, 1).summands == ()


def test_homology_r2_pair():
    # sigma_1 sigma_1^{-1} on two strands closes to the two-component unlink
    cx = bn_complex(2, (1, -1))
    pres = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres.summands) == [-2, 0, 0, 2]
    assert all(s.order is None for s in pres.summands)
    assert homalg.homology_u(cx, -1).summands == ()
    assert homalg.homology_u(cx, 1).summands == ()


def test_homology_trefoil():
    cx = bn_complex(*TREFOIL)
    pres0 = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres0.summands) == [1, 3]
    assert all(s.order is None for s in pres0.summands)
    assert homalg.homology_u(cx, 1).summands == ()
    assert homalg.homology_u(cx, 2).summands == ()
    pres3 = homalg.homology_u(cx, 3)
    assert pres3.summands == (homalg.Summand(2, 9),)
    for i in (0, 3):
        assert_presentation_sane(cx, i, homalg.homology_u(cx, i))


def test_homology_mirror_trefoil():
    cx = bn_complex(2, (-1, -1, -1))
    pres = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres.summands) == [-3, -1]
    assert all(s.order is None for s in pres.summands)


def test_homology_figure_eight():
    cx = bn_complex(*FIG8)
    expected = {
        -2: (),
        -1: (homalg.Summand(2, -1),),
        1: (),
        2: (homalg.Summand(2, 5),),
    }
    for i, want in expected.items():
        assert homalg.homology_u(cx, i).summands == want, i
    pres0 = homalg.homology_u(cx, 0)
    assert sorted(s.q for s in pres0.summands) == [-1, 1]
    assert all(s.order is None for s in pres0.summands)
    for i in (-1, 0, 2):
        assert_presentation_sane(cx, i, homalg.homology_u(cx, i))


def test_homology_out_of_range_degrees():
    cx = bn_complex(*TREFOIL)
    assert homalg.homology_u(cx, 4).summands == ()
    assert homalg.homology_u(cx, -1).summands == ()


def test_homology_u_requires_bn():
    cx = build_complex(BraidWord(*TREFOIL), KH3)
    with pytest.raises(ValueError):
        homalg.homology_u(cx, 0)
    with pytest.raises(ValueError):
        homalg.all_barcodes(cx)
    with pytest.raises(ValueError):
        homalg.is_boundary_u(cx, EnhancedChain(cx))


# ---------------------------------------------------------------------------
# coordinates


def test_coordinates_zero_chain():
    cx = bn_complex(*TREFOIL)
    pres = homalg.homology_u(cx, 0)
    coords = homalg.coordinates(pres, EnhancedChain(cx))
    assert coords.q is None
    assert coords.values == (MONO_ZERO,) * len(pres.summands)


def test_coordinates_of_generators_are_units():
    cases = [(1, (), 0), TREFOIL + (0,), TREFOIL + (3,), FIG8 + (0,), FIG8 + (-1,), MIXED + (-2,)]
    for n, letters, i in cases:
        pres = homalg.homology_u(bn_complex(n, letters), i)
        for m, g in enumerate(pres.generators):
            coords = homalg.coordinates(pres, g)
            assert coords.q == pres.summands[m].q
            want = tuple(
                MONO_ONE if m2 == m else MONO_ZERO for m2 in range(len(pres.summands))
            )
            assert coords.values == want, (n, letters, i, m)


def boundary_perturbations(cx, i, q, rng, count=3):
    """A few nonzero boundaries that are homogeneous of quantum degree q at hdeg i."""
    states = cx.degree_states(i - 1)
    qs = cx.qdeg_of(states)
    usable = [
        (int(s), int(qq))
        for s, qq in zip(states.tolist(), qs.tolist())
        if qq >= q and (qq - q) % 2 == 0
    ]
    out = []
    for _ in range(count * 3):
        if len(out) >= count:
            break
        y = EnhancedChain(cx)
        for s, qq in usable:
            c = rng.randrange(cx.p)
            if c:
                y.add_term(s, c, (qq - q) // 2)
        dy = y.apply_d()
        if not dy.is_zero():
            out.append(dy)
    return out


def test_coordinates_ignore_boundary_perturbations():
    rng = random.Random(13)
    cases = [TREFOIL + (3,), FIG8 + (0,), FIG8 + (2,), MIXED + (-2,)]
    for n, letters, i in cases:
        cx = bn_complex(n, letters)
        pres = homalg.homology_u(cx, i)
        for m, g in enumerate(pres.generators):
            base = homalg.coordinates(pres, g)
            for dy in boundary_perturbations(cx, i, pres.summands[m].q, rng):
                moved = homalg.coordinates(pres, g.plus(dy))
                assert moved == base, (n, letters, i, m)


def test_coordinates_reject_non_cycles():
    cx = bn_complex(*TREFOIL)
    pres = homalg.homology_u(cx, 0)
    for sid in cx.degree_states(0).tolist():
        z = EnhancedChain(cx)
        z.add_term(sid, 1)
        if not z.apply_d().is_zero():
            with pytest.raises(ValueError):
                homalg.coordinates(pres, z)
            break
    else:
        pytest.fail("every hdeg-0 state of the trefoil was a cycle")


def test_torsion_generator_killed_by_its_order():
    cx = bn_complex(*TREFOIL)
    pres = homalg.homology_u(cx, 3)
    (g,) = pres.generators
    assert not pres.is_boundary(g)
    assert not pres.is_boundary(g.scaled(1, du=1))
    assert pres.is_boundary(g.scaled(1, du=2))
    coords = homalg.coordinates(pres, g.scaled(1, du=2))
    assert coords.values == (MONO_ZERO,)
    assert not homalg.is_boundary_u(cx, g.scaled(1, du=1))
    assert homalg.is_boundary_u(cx, g.scaled(1, du=2))


# ---------------------------------------------------------------------------
# U-divisibility


def divisibility_oracle(pres, z, kmax=5):
    """Largest k with [z] = U^k * (some class), by exhaustive search.

    Candidates for the class are all F_p combinations of the generators in
    the right quantum degree; only boundary membership is consulted.
    """
    p = pres.p
    q_z = z.qdeg()
    best = None
    for k in range(kmax + 1):
        options = [
            (m, (s.q - q_z - 2 * k) // 2)
            for m, s in enumerate(pres.summands)
            if s.q - q_z - 2 * k >= 0 and (s.q - q_z) % 2 == 0
        ]
        found = False
        for cs in itertools.product(range(p), repeat=len(options)):
            if not any(cs):
                continue
            x = EnhancedChain(pres.cx)
            for (m, e), c in zip(options, cs):
                if c:
                    x = x.plus(pres.generators[m].scaled(c, du=e))
            if pres.is_boundary(z.minus(x.scaled(1, du=k))):
                found = True
                break
        if not found:
            break
        best = k
    return best


def test_u_divisibility_matches_exhaustive_search():
    cx = bn_complex(*TREFOIL)
    pres = homalg.homology_u(cx, 0)
    by_q = {s.q: g for s, g in zip(pres.summands, pres.generators)}
    g3, g1 = by_q[3], by_q[1]
    un = build_complex(BraidWord(1, ()), BN3)
    pun = homalg.homology_u(un, 0)
    cases = [
        (pres, g3.scaled(1, du=2), 2),
        (pres, g3.scaled(1, du=2).plus(g1.scaled(1, du=1)), 1),
        (pres, g3.scaled(2, du=1).plus(g1.scaled(1)), 0),
        (pun, pun.generators[0].scaled(1, du=3), 3),
        (pun, pun.generators[0], 0),
    ]
    for pres_k, z, want in cases:
        coords = homalg.coordinates(pres_k, z)
        assert homalg.u_divisibility(pres_k, coords) == want
        assert divisibility_oracle(pres_k, z) == want


def test_u_divisibility_sees_torsion_coordinates():
    cx = bn_complex(*MIXED)
    pres = homalg.homology_u(cx, -2)
    tors = [g for s, g in zip(pres.summands, pres.generators) if s.order is not None]
    free = {s.q: g for s, g in zip(pres.summands, pres.generators) if s.order is None}
    assert len(tors) == 1 and sorted(free) == [-8, -6]
    # the torsion coordinate caps divisibility below the free coordinate
    z = free[-6].scaled(1, du=1).plus(tors[0].scaled(1, du=1))
    assert homalg.u_divisibility(pres, homalg.coordinates(pres, z)) == 1
    assert divisibility_oracle(pres, z) == 1
    z2 = free[-8].plus(tors[0].scaled(1, du=1))
    assert homalg.u_divisibility(pres, homalg.coordinates(pres, z2)) == 0
    assert divisibility_oracle(pres, z2) == 0


def test_u_divisibility_errors_for_torsion_classes():
    cx = bn_complex(*TREFOIL)
    pres = homalg.homology_u(cx, 3)
    coords = homalg.coordinates(pres, pres.generators[0])
    with pytest.raises(ValueError):
        homalg.u_divisibility(pres, coords)


def test_u_divisibility_reads_reduced_coordinates():
    free = homalg.Summand(None, 0)
    tors = homalg.Summand(3, 0)
    both_free = types.SimpleNamespace(summands=(free, free))
    coords = homalg.ClassCoordinates((MONO_ONE, MONO_ZERO), 0)
    assert homalg.u_divisibility(both_free, coords) == 0
    coords = homalg.ClassCoordinates((Monomial(1, 2), Monomial(2, 3)), -4)
    assert homalg.u_divisibility(both_free, coords) == 2
    with_tors = types.SimpleNamespace(summands=(free, tors))
    coords = homalg.ClassCoordinates((Monomial(1, 2), Monomial(1, 1)), -4)
    assert homalg.u_divisibility(with_tors, coords) == 1
    coords = homalg.ClassCoordinates((MONO_ZERO, Monomial(1, 1)), -2)
    with pytest.raises(ValueError):
        homalg.u_divisibility(with_tors, coords)


# ---------------------------------------------------------------------------
# barcodes and the truncated-ring oracle


def test_barcodes_match_presentations():
    for n, letters in small_words():
        cx = bn_complex(n, letters)
        bars = homalg.all_barcodes(cx)
        for i in cx.hdeg_range:
            pres = homalg.homology_u(cx, i)
            bar = bars.get(i, EMPTY_BAR)
            assert sorted(s.q for s in pres.summands if s.order is None) == sorted(
                bar.free
            ), (n, letters, i)
            assert sorted(
                (s.q, s.order) for s in pres.summands if s.order is not None
            ) == sorted(bar.torsion), (n, letters, i)
            assert homalg.barcode_u(cx, i) == bar


def truncated_adapter(cx):
    """State counts and single-entry matrices of d on each homological degree."""
    his = list(cx.hdeg_range)
    n_states, pos = {}, {}
    for i in his:
        states = cx.degree_states(i).tolist()
        n_states[i] = len(states)
        pos[i] = {s: k for k, s in enumerate(states)}
    matrices = {}
    for i in his[:-1]:
        mat = [[(0, 0) for _ in range(n_states[i])] for _ in range(n_states[i + 1])]
        src, dst, co, du, dv = cx.edges_of_hdeg(i)
        assert not np.any(dv)
        for s, d, c, e in zip(src.tolist(), dst.tolist(), co.tolist(), du.tolist()):
            r, col = pos[i + 1][d], pos[i][s]
            assert mat[r][col] == (0, 0)
            mat[r][col] = (c % cx.p, e)
        matrices[i] = mat
    return n_states, matrices, his


@pytest.mark.parametrize("p", [2, 3])
def test_truncated_ring_oracle(p):
    big_n = 8
    words = [(1, ()), (2, (1, -1)), TREFOIL, (2, (-1, -1, -1)), FIG8,
             (2, (1, 1, 1, 1)), (3, (1, 2, 1, 2)), (3, (-1, 2, -1))]
    for n, letters in words:
        cx = bn_complex(n, letters, p)
        bars = homalg.all_barcodes(cx)
        n_states, matrices, his = truncated_adapter(cx)
        got = truncated_homology_profile(n_states, matrices, his, p, big_n)
        for i in his:
            bar = bars.get(i, EMPTY_BAR)
            above = bars.get(i + 1, EMPTY_BAR)
            want = sorted(
                [min(t, big_n) for _, t in bar.torsion]
                + [big_n] * len(bar.free)
                + [min(t, big_n) for _, t in above.torsion]
            )
            assert got[i] == want, (n, letters, i)


# ---------------------------------------------------------------------------
# boundary membership


def random_boundaries(cx, rng, count=6):
    out = []
    for i in cx.hdeg_range:
        states = cx.degree_states(i)
        if not len(states):
            continue
        qs = cx.qdeg_of(states)
        q_choices = sorted({int(x) for x in qs}) + [int(qs.min()) - 2]
        for q in q_choices:
            y = EnhancedChain(cx)
            for s, qq in zip(states.tolist(), qs.tolist()):
                if qq >= q and (qq - q) % 2 == 0 and rng.random() < 0.6:
                    y.add_term(s, rng.randrange(1, cx.p), (qq - q) // 2)
            dy = y.apply_d()
            if not dy.is_zero():
                out.append(dy)
            if len(out) >= count:
                return out
    return out


def test_is_boundary_u():
    cx = bn_complex(*TREFOIL)
    rng = random.Random(7)
    assert homalg.is_boundary_u(cx, EnhancedChain(cx))
    boundaries = random_boundaries(cx, rng)
    assert boundaries
    for dy in boundaries:
        assert homalg.is_boundary_u(cx, dy)
    pres = homalg.homology_u(cx, 0)
    for g in pres.generators:
        assert not homalg.is_boundary_u(cx, g)
        assert not homalg.is_boundary_u(cx, g.scaled(1, du=4))


def test_is_boundary_f():
    cx = build_complex(BraidWord(*TREFOIL), KH3)
    rng = random.Random(9)
    assert homalg.is_boundary_f(cx, EnhancedChain(cx))
    for i in (0, 1, 2):
        states = cx.degree_states(i)
        qs = cx.qdeg_of(states)
        for q in sorted({int(x) for x in qs}):
            y = EnhancedChain(cx)
            for s, qq in zip(states.tolist(), qs.tolist()):
                if qq == q and rng.random() < 0.7:
                    y.add_term(s, rng.randrange(1, 3))
            dy = y.apply_d()
            if not dy.is_zero():
                assert homalg.is_boundary_f(cx, dy)
    un = build_complex(BraidWord(1, ()), KH3)
    for sid in un.degree_states(0).tolist():
        z = EnhancedChain(un)
        z.add_term(sid, 1)
        assert not homalg.is_boundary_f(un, z)
    with pytest.raises(ValueError):
        homalg.is_boundary_f(bn_complex(*TREFOIL), EnhancedChain(bn_complex(*TREFOIL)))


# ---------------------------------------------------------------------------
# field-coefficient homology


def test_homology_f_examples():
    un = build_complex(BraidWord(1, ()), KH3)
    assert homalg.homology_f(un, 0, 1) == 1
    assert homalg.homology_f(un, 0, -1) == 1
    assert homalg.homology_f(un, 0, 3) == 0
    tre = build_complex(BraidWord(*TREFOIL), KH3)
    assert homalg.homology_f(tre, 0, 1) == 1
    assert homalg.homology_f(tre, 1, 1) == 0
    with pytest.raises(ValueError):
        homalg.homology_f(bn_complex(*TREFOIL), 0, 1)


def test_kh_table_trefoil():
    cx = build_complex(BraidWord(*TREFOIL), KH3)
    assert homalg.kh_table(cx) == {(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1}


def kh_from_bn_barcodes(bars):
    """dim H^{i,q} with field coefficients, from the F_p[U] barcodes."""
    table = {}
    for i in set(bars) | {i - 1 for i in bars}:
        bar = bars.get(i, EMPTY_BAR)
        above = bars.get(i + 1, EMPTY_BAR)
        for q in bar.free:
            table[i, q] = table.get((i, q), 0) + 1
        for q, _t in bar.torsion:
            table[i, q] = table.get((i, q), 0) + 1
        for q, t in above.torsion:
            table[i, q - 2 * t] = table.get((i, q - 2 * t), 0) + 1
    return {k: v for k, v in table.items() if v}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kh_table_matches_bn_barcodes(p):
    for n, letters in small_words(count=4, rng=random.Random(p)):
        kh = homalg.kh_table(build_complex(BraidWord(n, letters), theory("Kh", p)))
        bars = homalg.all_barcodes(bn_complex(n, letters, p))
        assert kh == kh_from_bn_barcodes(bars), (n, letters)
