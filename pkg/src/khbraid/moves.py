"""Chain-level maps for braid-word moves, and the invariance harness.

The maps here realize the word rewrites of :mod:`khbraid.braid` on the cube
complexes:

* ``rotation``      -- conjugation step (first letter moved to the end), an
  isomorphism acting by a per-resolution sign;
* ``phi1_plus``     -- positive stabilization ``C(B) -> C(B.s_n)`` and
  ``psi1_plus``, the destabilization map back;
* ``phi1_minus``    -- negative stabilization ``C(B) -> C(B.s_n^-1)``
  (not transverse; it enters only through a U-divisibility relation);
* ``psi2``/``phi2`` -- insertion/removal of a cancelling generator pair at
  the end of the word, in either order.

Every map stores its source and target complexes and acts on enhanced states
through explicit circle re-indexing built from representative arcs shared by
both resolutions, never by assuming circle ids line up positionally.  All
maps commute with the differentials on the nose and preserve both gradings.

``invariance_harness`` applies a seeded random sequence of rewrites, pushes
the distinguished cycle through the corresponding maps and checks exact
preservation; braid-relation rewrites (where no map is built) are checked at
the invariant level instead, and negative stabilizations through the
U-divisibility relation.  It emits a JSON-lines trace and a report object.
"""

from __future__ import annotations

import functools
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .braid import BraidWord, markov_rewrite
from .cube import EnhancedChain, GradedComplex, build_complex, op_tables, saddle
from .frobenius import Theory, theory, torus_element
from .homalg import is_boundary_u
from .invariants import beta_pair, invariant_report

Action = list[tuple[int, int, int, int]]  # (target sid, coeff, du, dv)


def _collect(terms: Action, p: int) -> Action:
    """Accumulate per-(state, monomial) coefficients mod p, dropping zeros."""
    acc: dict[tuple[int, int, int], int] = {}
    for sid, c, du, dv in terms:
        key = (sid, du, dv)
        acc[key] = (acc.get(key, 0) + c) % p
    return [(sid, c, du, dv) for (sid, du, dv), c in acc.items() if c]


@dataclass(frozen=True)
class ChainMap:
    """A degree-(0,0) chain map between two cube complexes.

    The action is given per basis state as a sparse list of target terms and
    memoized; ``commutes_with_d`` checks the defining identity exactly.
    """

    source: GradedComplex
    target: GradedComplex
    name: str
    word_record: dict
    _fn: Callable[[int], Action]
    _cache: dict[int, Action] = field(default_factory=dict, repr=False)

    def on_state(self, sid: int) -> Action:
        act = self._cache.get(sid)
        if act is None:
            act = self._fn(sid)
            self._cache[sid] = act
        return act

    def apply(self, chain: EnhancedChain) -> EnhancedChain:
        if chain.cx is not self.source:
            raise ValueError(f"{self.name}: chain does not live in the source complex")
        out = EnhancedChain(self.target)
        for sid, (c, du, dv) in chain:
            for sid2, c2, du2, dv2 in self.on_state(sid):
                out.add_term(sid2, c * c2, du + du2, dv + dv2)
        return out

    def commutes_with_d(self, sids=None) -> bool:
        """d_target(map(x)) == map(d_source(x)) on the given (default all) states."""
        todo = range(self.source.total_states) if sids is None else sids
        for sid in todo:
            unit = EnhancedChain(self.source, {int(sid): (1, 0, 0)})
            if self.apply(unit.apply_d()) != self.apply(unit).apply_d():
                return False
        return True


def compose(second: ChainMap, first: ChainMap) -> ChainMap:
    if first.target is not second.source:
        raise ValueError("maps do not compose: target/source mismatch")

    def fn(sid: int) -> Action:
        out: Action = []
        for m, c, du, dv in first.on_state(sid):
            for m2, c2, du2, dv2 in second.on_state(m):
                out.append((m2, c * c2, du + du2, dv + dv2))
        return _collect(out, second.target.p)

    return ChainMap(first.source, second.target, f"{second.name}.{first.name}", {}, fn)


def is_identity(m: ChainMap) -> bool:
    if m.source is not m.target:
        return False
    return all(m.on_state(sid) == [(sid, 1, 0, 0)] for sid in range(m.source.total_states))


# ---------------------------------------------------------------------------
# circle re-indexing helpers


def _res_mask(cx: GradedComplex, sid: int) -> tuple[int, int]:
    r = int(cx.res_of(np.array([sid]))[0])
    return r, int(sid - cx.offsets[r])


def _cross_transport(cx_s, r_s: int, cx_t, r_t: int, amap, arcs=None) -> list[int]:
    """Target circle id for each source circle id, matched through shared arcs.

    ``amap`` maps a source arc index to the target arc index of the same
    geometric arc; circles whose arcs are all outside ``arcs`` stay -1.
    """
    out = [-1] * int(cx_s.counts[r_s])
    row_s, row_t = cx_s.circ[r_s], cx_t.circ[r_t]
    arc_iter = range(cx_s.n * (cx_s.k + 1)) if arcs is None else arcs
    for a in arc_iter:
        c = int(row_s[a])
        if out[c] < 0:
            out[c] = int(row_t[amap(a)])
    return out


def _circle_transport(cx, r_from: int, r_to: int, skip=()) -> list[int]:
    """Same-complex transport between resolutions, ignoring the ``skip`` arcs."""
    out = [-1] * int(cx.counts[r_from])
    row_f, row_t = cx.circ[r_from], cx.circ[r_to]
    for a in range(cx.n * (cx.k + 1)):
        if a in skip:
            continue
        c = int(row_f[a])
        if out[c] < 0:
            out[c] = int(row_t[a])
    return out


def _move_mask(mask: int, cmap: list[int], skip: int = -1) -> int:
    out = 0
    for c, c2 in enumerate(cmap):
        if c == skip:
            continue
        if (mask >> c) & 1:
            if c2 < 0:
                raise AssertionError("label on a circle with no transport image")
            out |= 1 << c2
    return out


def _arc_embed(k_src: int, k_tgt: int):
    gs, gt = k_src + 1, k_tgt + 1

    def amap(a: int) -> int:
        s, g = divmod(a, gs)
        return s * gt + g

    return amap


def _unit_edge_coeff(cx, src_sid: int, bit: int, dst_sid: int) -> int:
    """Coefficient of the U^0V^0 differential entry src -> dst at ``bit``."""
    for dst, c, du, dv in saddle(cx, src_sid, bit):
        if dst == dst_sid and du == 0 and dv == 0:
            return c
    raise AssertionError("expected unit differential entry not found")


# ---------------------------------------------------------------------------
# stabilization maps


def phi1_plus(b: BraidWord, th: Theory, site: int | None = None) -> ChainMap:
    """Positive stabilization: x goes to x (x) t(1) - Delta(x) on the new curl.

    Both terms live in the summand where the appended letter keeps its
    orientation-preserving smoothing; there the target resolution is the
    source one together with the curl circle through the new strand.
    """
    n, k = b.strands, len(b)
    if site is None:
        site = n
    if site != n:
        raise ValueError(f"stabilization site must be the new strand index {n}, got {site}")
    b2, rec = markov_rewrite(b, "stabilize", sign=1)
    src, tgt = build_complex(b, th), build_complex(b2, th)
    tab = op_tables(th)
    amap = _arc_embed(k, k + 1)
    arc_gamma = (n - 1) * (k + 1)  # arc (n-1, 0), on the circle meeting the curl
    arc_ring = n * (k + 2)  # arc (n, 0), on the curl circle
    ring_terms = []
    for bit, poly in ((0, torus_element(th).plus), (1, torus_element(th).minus)):
        for (eu, ev), cc in poly.terms.items():
            ring_terms.append((bit, cc, eu, ev))

    def fn(sid: int) -> Action:
        r, mask = _res_mask(src, sid)
        cmap = _cross_transport(src, r, tgt, r, amap)
        base = int(tgt.offsets[r])
        gamma_t = cmap[int(src.circ[r][arc_gamma])]
        ring_t = int(tgt.circ[r][arc_ring])
        m2 = _move_mask(mask, cmap)
        out: Action = []
        for bit, cc, eu, ev in ring_terms:
            out.append((base + (m2 | bit << ring_t), cc, eu, ev))
        a = (m2 >> gamma_t) & 1
        m_rest = m2 & ~(1 << gamma_t)
        for t in range(int(tab.cnum[a])):
            m3 = m_rest | int(tab.clab1[a, t]) << gamma_t | int(tab.clab2[a, t]) << ring_t
            out.append((base + m3, -int(tab.cco[a, t]), int(tab.cdu[a, t]), int(tab.cdv[a, t])))
        return _collect(out, th.p)

    return ChainMap(src, tgt, "phi1_plus", rec, fn)


def psi1_plus(b: BraidWord, th: Theory, site: int | None = None) -> ChainMap:
    """Positive destabilization: the counit on the curl-circle label.

    Defined on the word that ends with its stabilizing letter; states where
    that letter has its other smoothing are sent to zero.
    """
    n, k = b.strands, len(b)
    if site is None:
        site = n - 1
    if site != n - 1:
        raise ValueError(f"destabilization site must be {n - 1}, got {site}")
    b0, rec = markov_rewrite(b, "destabilize")
    if b.letters[-1] != n - 1:
        raise ValueError("word does not end with a positive stabilization letter")
    src, tgt = build_complex(b, th), build_complex(b0, th)
    top = 1 << (k - 1)
    gs = k + 1
    arcs = [s * gs + g for s in range(n - 1) for g in range(k)]

    def amap(a: int) -> int:
        s, g = divmod(a, gs)
        return s * k + g

    arc_ring = (n - 1) * gs

    def fn(sid: int) -> Action:
        r, mask = _res_mask(src, sid)
        if r & top:
            return []
        ring_s = int(src.circ[r][arc_ring])
        if not (mask >> ring_s) & 1:  # counit kills the unit label
            return []
        cmap = _cross_transport(src, r, tgt, r, amap, arcs=arcs)
        m2 = _move_mask(mask, cmap, skip=ring_s)
        return [(int(tgt.offsets[r]) + m2, 1, 0, 0)]

    return ChainMap(src, tgt, "psi1_plus", rec, fn)


def phi1_minus(b: BraidWord, th: Theory, site: int | None = None) -> ChainMap:
    """Negative stabilization: x goes to x (x) 1 in the oriented-smoothing summand."""
    n, k = b.strands, len(b)
    if site is None:
        site = n
    if site != n:
        raise ValueError(f"stabilization site must be the new strand index {n}, got {site}")
    b2, rec = markov_rewrite(b, "stabilize", sign=-1)
    src, tgt = build_complex(b, th), build_complex(b2, th)
    amap = _arc_embed(k, k + 1)
    top = 1 << k

    def fn(sid: int) -> Action:
        r, mask = _res_mask(src, sid)
        r2 = r | top
        cmap = _cross_transport(src, r, tgt, r2, amap)
        m2 = _move_mask(mask, cmap)
        return [(int(tgt.offsets[r2]) + m2, 1, 0, 0)]

    return ChainMap(src, tgt, "phi1_minus", rec, fn)


# ---------------------------------------------------------------------------
# cancelling-pair maps


def _pair_layout(b2: BraidWord):
    """Bit/sector bookkeeping for a word ending in a cancelling pair."""
    n, K = b2.strands, len(b2)
    k = K - 2
    bA, bB = k, k + 1
    oA = 0 if b2.letters[bA] > 0 else 1
    oB = 1 - oA
    copy_bits = (oA << bA) | (oB << bB)
    extra_bits = ((1 - oA) << bA) | ((1 - oB) << bB)
    flip_bit = bA if oA == 0 else bB  # retained -> top, and low -> extra (split)
    merge_bit = bA if oA == 1 else bB  # extra -> top (merge), and low -> retained
    gen = abs(b2.letters[bB])
    gt = K + 1
    arc_pair = ((gen - 1) * gt + k + 1, gen * gt + k + 1)
    low_arcs = [s * gt + g for s in range(n) for g in range(k + 1)]

    def amap_down(a: int) -> int:
        s, g = divmod(a, gt)
        return s * (k + 1) + g

    return k, bA, bB, copy_bits, extra_bits, flip_bit, merge_bit, arc_pair, low_arcs, amap_down


def psi2(b: BraidWord, th: Theory, gen: int, order: str = "-+") -> ChainMap:
    """Cancelling-pair insertion at the end of the word.

    The retained copy of the source complex sits in the sector where both new
    letters keep their orientation-preserving smoothings; the correction term
    is the saddle into the top sector pulled back through the unit label on
    the small circle of the doubly-surgered sector.
    """
    n = b.strands
    if not 1 <= gen <= n - 1:
        raise ValueError(f"generator must be in 1..{n - 1}, got {gen}")
    if order not in ("-+", "+-"):
        raise ValueError(f"order must be '-+' or '+-', got {order!r}")
    b2, rec = markov_rewrite(b, "insert_pair", generator=gen, sign=-1 if order == "-+" else 1)
    src, tgt = build_complex(b, th), build_complex(b2, th)
    k = len(b)
    (_, _, _, copy_bits, extra_bits, flip_bit, merge_bit, arc_pair, _, _) = _pair_layout(b2)
    amap = _arc_embed(k, k + 2)
    top_bits = copy_bits | extra_bits

    def fn(sid: int) -> Action:
        r, mask = _res_mask(src, sid)
        r10 = r | copy_bits
        cmap = _cross_transport(src, r, tgt, r10, amap)
        y_sid = int(tgt.offsets[r10]) + _move_mask(mask, cmap)
        out: Action = [(y_sid, 1, 0, 0)]
        r11 = r | top_bits
        r_ext = r | extra_bits
        tr = _circle_transport(tgt, r11, r_ext, skip=arc_pair)
        base_ext = int(tgt.offsets[r_ext])
        base_top = int(tgt.offsets[r11])
        for z_sid, c_e, du_e, dv_e in saddle(tgt, y_sid, flip_bit):
            w_sid = base_ext + _move_mask(z_sid - base_top, tr)
            cw = _unit_edge_coeff(tgt, w_sid, merge_bit, z_sid)
            out.append((w_sid, -c_e * cw, du_e, dv_e))
        return _collect(out, th.p)

    return ChainMap(src, tgt, "psi2", rec, fn)


def phi2(b: BraidWord, th: Theory, site: int | None = None) -> ChainMap:
    """Cancelling-pair removal, the one-sided inverse of ``psi2``.

    States of the retained sector transport back; states of the
    doubly-surgered sector contribute through the counit of the small-circle
    label followed by the saddle of the low sector into the retained one;
    the two remaining sectors are annihilated.
    """
    n, K = b.strands, len(b)
    if K < 2 or b.letters[-2] != -b.letters[-1]:
        raise ValueError("word does not end with a cancelling pair")
    if site is not None and site != abs(b.letters[-1]):
        raise ValueError(f"site {site} does not match the terminal pair")
    b0, rec = markov_rewrite(b, "remove_pair", position=K - 2)
    src, tgt = build_complex(b, th), build_complex(b0, th)
    (k, bA, bB, copy_bits, extra_bits, flip_bit, merge_bit, arc_pair, low_arcs, amap_down) = (
        _pair_layout(b)
    )
    arc_ring = arc_pair[0]
    low_mask = (1 << k) - 1

    def fn(sid: int) -> Action:
        r_full, mask = _res_mask(src, sid)
        r = r_full & low_mask
        new_bits = r_full & ~low_mask
        if new_bits == copy_bits:
            cmap = _cross_transport(src, r_full, tgt, r, amap_down, arcs=low_arcs)
            return [(int(tgt.offsets[r]) + _move_mask(mask, cmap), 1, 0, 0)]
        if new_bits != extra_bits:
            return []
        ring = int(src.circ[r_full][arc_ring])
        if not (mask >> ring) & 1:  # counit kills the unit label
            return []
        tr = _circle_transport(src, r_full, r, skip=arc_pair)
        z_sid = int(src.offsets[r]) + _move_mask(mask, tr, skip=ring)
        sb = _unit_edge_coeff(src, z_sid, flip_bit, sid)
        r_copy = r | copy_bits
        cmap = _cross_transport(src, r_copy, tgt, r, amap_down, arcs=low_arcs)
        base_copy = int(src.offsets[r_copy])
        out: Action = []
        for w_sid, c_e, du_e, dv_e in saddle(src, z_sid, merge_bit):
            m2 = _move_mask(w_sid - base_copy, cmap)
            out.append((int(tgt.offsets[r]) + m2, -sb * c_e, du_e, dv_e))
        return _collect(out, th.p)

    return ChainMap(src, tgt, "phi2", rec, fn)


# ---------------------------------------------------------------------------
# rotation (conjugation step)


def rotation(b: BraidWord, th: Theory) -> ChainMap:
    """Move the first letter to the end: an isomorphism of cube complexes.

    Resolutions rotate with the letters and circles match arc-by-arc; the
    only content is the sign cocycle, fixed by breadth-first propagation from
    the orientation-preserving resolution, which is assigned +1.
    """
    n, k = b.strands, len(b)
    b2, rec = markov_rewrite(b, "rotate")
    src, tgt = build_complex(b, th), build_complex(b2, th)
    if k == 0:
        return ChainMap(src, tgt, "rotation", rec, lambda sid: [(sid, 1, 0, 0)])
    p = th.p

    def rot(r: int) -> int:
        return (r >> 1) | ((r & 1) << (k - 1))

    tau = np.zeros(1 << k, dtype=np.int64)
    r_or = 0
    for j, x in enumerate(b.letters):
        if x < 0:
            r_or |= 1 << j
    tau[r_or] = 1
    queue = deque([r_or])
    while queue:
        r = queue.popleft()
        for j in range(k):
            r2 = r ^ (1 << j)
            if tau[r2]:
                continue
            lo = r & ~(1 << j)
            s1 = -1 if bin(lo & ((1 << j) - 1)).count("1") & 1 else 1
            j2 = j - 1 if j >= 1 else k - 1
            s2 = -1 if bin(rot(lo) & ((1 << j2) - 1)).count("1") & 1 else 1
            tau[r2] = tau[r] * s1 * s2 % p
            queue.append(r2)
    gs = k + 1

    def amap(a: int) -> int:
        # gap g>=1 sits below the same letter shifted one slot down; gap 0
        # (below the moved letter) is the gap below it at its new terminal
        # slot, k-1.  Nothing needs to map onto the target's closure gap k.
        s, g = divmod(a, gs)
        return s * gs + (g - 1 if g >= 1 else k - 1)

    def fn(sid: int) -> Action:
        r, mask = _res_mask(src, sid)
        r2 = rot(r)
        cmap = _cross_transport(src, r, tgt, r2, amap)
        return [(int(tgt.offsets[r2]) + _move_mask(mask, cmap), int(tau[r]), 0, 0)]

    return ChainMap(src, tgt, "rotation", rec, fn)


# ---------------------------------------------------------------------------
# the invariance harness


@dataclass
class HarnessReport:
    start: BraidWord
    end: BraidWord
    seed: int
    moves_applied: int
    ok: bool
    trace: list[str]
    r1n_signs: list[int]
    relation_checks: int
    failure: dict | None = None


def _word_str(w: BraidWord) -> str:
    return f"{w.strands}:" + " ".join(str(x) for x in w.letters)


@functools.lru_cache(maxsize=512)
def _profile(strands: int, letters: tuple[int, ...], p: int) -> dict:
    rep = invariant_report(BraidWord(strands, letters), p=p)
    return {
        "sl": rep.sl,
        "c_set": tuple(sorted((rep.c, rep.c_bar))),
        "psi_vanishes": rep.psi_vanishes,
        "s": rep.s,
    }


def _relation_sites(letters: tuple[int, ...]) -> list[int]:
    out = []
    for j in range(len(letters) - 2):
        a, bb, c = letters[j : j + 3]
        if a == c and abs(abs(a) - abs(bb)) == 1 and (a > 0) == (bb > 0):
            out.append(j)
    return out


def _far_comm_sites(letters: tuple[int, ...]) -> list[int]:
    return [j for j in range(len(letters) - 1) if abs(abs(letters[j]) - abs(letters[j + 1])) >= 2]


def invariance_harness(
    b: BraidWord,
    seed: int = 0,
    n_moves: int = 20,
    allow_negative: bool = False,
    p: int = 3,
    max_letters: int = 9,
    max_strands: int = 4,
    relation_budget: int = 6,
) -> HarnessReport:
    """Drive a random seeded move sequence, checking every assertion exactly."""
    th = theory("bn", p)
    rng = random.Random(seed)
    word = b
    chain = beta_pair(word, th).beta
    profile = _profile(word.strands, word.letters, p)
    trace: list[str] = []
    r1n_signs: list[int] = []
    rel_checks = 0
    ok = True
    failure: dict | None = None
    applied = 0

    def emit(step: int, move: str, site, w: BraidWord, assertion: str, status: str, **extra):
        rec = {"step": step, "move": move, "site": site, "word": _word_str(w), "assertion": assertion, "status": status}
        rec.update(extra)
        trace.append(json.dumps(rec, separators=(",", ":")))

    for step in range(n_moves):
        n, letters = word.strands, word.letters
        k = len(letters)
        grow_ok = k < max_letters and n < max_strands
        cands: list[tuple[str, int]] = []
        if k >= 1:
            cands.append(("rotate", 3))
        if grow_ok:
            cands.append(("stab_pos", 2))
            if allow_negative:
                cands.append(("stab_neg", 1))
        if n >= 2 and k + 2 <= max_letters + 2:
            cands.append(("insert_pair", 2))
        if k >= 2 and letters[-2] == -letters[-1]:
            cands.append(("remove_pair", 4))
        if k >= 1 and n >= 2 and letters[-1] == n - 1 and all(abs(x) != n - 1 for x in letters[:-1]):
            cands.append(("destab_pos", 4))
        if rel_checks < relation_budget:
            if _relation_sites(letters):
                cands.append(("relation", 1))
            if _far_comm_sites(letters):
                cands.append(("far_comm", 1))
        bag = [name for name, weight in cands for _ in range(weight)]
        move = rng.choice(bag)
        site: object = None
        try:
            if move in ("relation", "far_comm"):
                sites = _relation_sites(letters) if move == "relation" else _far_comm_sites(letters)
                site = rng.choice(sites)
                new_word, _ = markov_rewrite(word, move if move == "relation" else "far_comm", position=site)
                new_prof = _profile(new_word.strands, new_word.letters, p)
                status = "pass" if new_prof == profile else "fail"
                emit(step, move, site, new_word, "invariants_preserved", status)
                if status == "fail":
                    ok = False
                    failure = {"step": step, "move": move, "site": site, "expected": profile, "got": new_prof}
                    break
                rel_checks += 1
                word, chain = new_word, beta_pair(new_word, th).beta
            elif move == "stab_neg":
                m = phi1_minus(word, th)
                new_word = m.target.word
                pushed = m.apply(chain)
                bnew = beta_pair(new_word, th).beta
                u_pushed = pushed.scaled(1, 1, 0)
                obs = next(
                    (s for s in (1, -1) if is_boundary_u(m.target, u_pushed.minus(bnew.scaled(s)))),
                    None,
                )
                status = "pass" if obs is not None else "fail"
                emit(step, move, n, new_word, "u_divisibility_relation", status, observed_sign=obs)
                if obs is None:
                    ok = False
                    failure = {"step": step, "move": move, "word": _word_str(new_word)}
                    break
                r1n_signs.append(obs)
                new_prof = _profile(new_word.strands, new_word.letters, p)
                mono = (
                    new_prof["sl"] == profile["sl"] - 2
                    and all(a >= b for a, b in zip(new_prof["c_set"], profile["c_set"]))
                    and new_prof["s"] == profile["s"]
                )
                emit(step, move, n, new_word, "negative_stabilization_profile", "pass" if mono else "fail")
                if not mono:
                    ok = False
                    failure = {"step": step, "move": move, "expected": profile, "got": new_prof}
                    break
                word, chain, profile = new_word, bnew, new_prof
            else:
                if move == "rotate":
                    m = rotation(word, th)
                elif move == "stab_pos":
                    m = phi1_plus(word, th)
                elif move == "destab_pos":
                    m = psi1_plus(word, th)
                elif move == "insert_pair":
                    gen = rng.randint(1, n - 1)
                    order = rng.choice(("-+", "+-"))
                    site = f"{gen}{order}"
                    m = psi2(word, th, gen, order)
                else:  # remove_pair
                    m = phi2(word, th)
                new_word = m.target.word
                pushed = m.apply(chain)
                expected = beta_pair(new_word, th).beta
                sl_same = new_word.self_linking() == word.self_linking()
                status = "pass" if (pushed == expected and sl_same) else "fail"
                emit(step, move, site, new_word, "beta_preserved", status)
                if status == "fail":
                    ok = False
                    failure = {"step": step, "move": move, "site": site, "word": _word_str(new_word)}
                    break
                word, chain = new_word, expected
            applied += 1
        except Exception as exc:  # any engine error is a counterexample, not a crash
            ok = False
            failure = {"step": step, "move": move, "site": site, "error": f"{type(exc).__name__}: {exc}"}
            emit(step, move, site, word, "no_engine_error", "fail", error=str(exc))
            break

    if ok and applied and chain != beta_pair(word, th).beta:
        ok = False
        failure = {"step": applied, "move": "final", "word": _word_str(word)}
        emit(applied, "final", None, word, "beta_preserved", "fail")
    return HarnessReport(
        start=b,
        end=word,
        seed=seed,
        moves_applied=applied,
        ok=ok,
        trace=trace,
        r1n_signs=r1n_signs,
        relation_checks=rel_checks,
        failure=failure,
    )
