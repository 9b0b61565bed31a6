"""Transverse invariants of braid closures.

The distinguished cycles live on the oriented resolution, whose circles are
the n closure circles.  The circle at strand position s is labeled with the
zero divisor of nesting parity s % 2 (x_o when even, x_bullet when odd), and
the barred cycle swaps the two roles.  Expanding every zero divisor in the
(x_plus, x_minus) basis turns the decorated resolution into an enhanced
chain of bidegree (0, sl), where sl = writhe - strands.

Over F_p[U] the U-divisibility of the class of beta (resp. beta_bar) is the
invariant c (resp. c_bar); the mod-U shadow of beta is the psi class, whose
vanishing is equivalent to c > 0 and is re-checked on every run; and the two
free generators of H^0 sit in quantum degrees s -+ 1, fixing the
s-invariant of a knot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .braid import BraidWord
from .coeff import Poly
from .cube import EnhancedChain, build_complex
from .frobenius import Theory, theory, zero_divisors
from .homalg import (
    ConsistencyError,
    coordinates,
    homology_u,
    is_boundary_f,
    kh_table,
    u_divisibility,
)

CONVENTIONS = {
    "word_order": "letter j acts at positions (|letter|-1, |letter|), read bottom to top",
    "oriented_bit": "bit 0 at a positive letter, bit 1 at a negative one",
    "labels": "label bit 1 is x_minus",
    "nesting": "closure circle at position s has parity s % 2; position 0 is innermost",
    "roots": "x_o = X - x1 and x_bullet = X - x2, with (x1, x2) = (0, U) over F_p[U]",
    "degrees": "qdeg(x_plus) = +1, deg U = -2; hdeg = resolution weight - n_neg",
    "edge_sign": "(-1)**(number of 1-bits below the flipped letter)",
    "sl": "writhe - strands",
}


@dataclass(frozen=True)
class BetaPair:
    """The two distinguished cycles; both are homogeneous of bidegree (0, sl)."""

    beta: EnhancedChain
    beta_bar: EnhancedChain


def oriented_resolution(word: BraidWord) -> tuple[int, ...]:
    """Resolution bits of the oriented smoothing of every letter."""
    return tuple(0 if x > 0 else 1 for x in word.letters)


def _mono_of(poly: Poly) -> tuple[int, int, int]:
    """(coeff, upow, vpow) of a one-term polynomial."""
    ((eu, ev), c), = poly.terms.items()
    return c, eu, ev


def beta_pair(word: BraidWord, th: Theory) -> BetaPair:
    """The beta and beta_bar cycles of a braid word in a splitting theory."""
    x_o, x_bullet = zero_divisors(th)
    cx = build_complex(word, th)
    n, k = cx.n, cx.k
    r = 0
    for j, bit in enumerate(oriented_resolution(word)):
        r |= bit << j
    count = int(cx.counts[r])
    if count != n:
        raise ConsistencyError("oriented resolution must have one circle per strand")
    circ = cx.circ[r]
    parity = [0] * count
    for s in range(n):
        parity[int(circ[s * (k + 1)])] = s % 2

    def assemble(swap: bool) -> EnhancedChain:
        pair = (x_bullet, x_o) if swap else (x_o, x_bullet)
        per_circle = []
        for c in range(count):
            zd = pair[parity[c]]
            opts = []
            if zd.plus:
                opts.append((0, zd.plus))
            if zd.minus:
                opts.append((1, zd.minus))
            per_circle.append(opts)
        chain = EnhancedChain(cx)
        for choice in itertools.product(*per_circle):
            mask = 0
            coeff = Poly.const(1, cx.p)
            for c, (bit, poly) in enumerate(choice):
                mask |= bit << c
                coeff = coeff * poly
            scalar, eu, ev = _mono_of(coeff)
            chain.add_term(int(cx.offsets[r]) + mask, scalar, eu, ev)
        return chain

    sl = word.self_linking()
    out = BetaPair(assemble(False), assemble(True))
    for cycle in (out.beta, out.beta_bar):
        if cycle.hdeg() != 0 or cycle.qdeg() != sl:
            raise ConsistencyError("beta cycle is not in bidegree (0, sl)")
        if not cycle.apply_d().is_zero():
            raise ConsistencyError("beta cycle is not closed")
    return out


def c_invariants(word: BraidWord, p: int = 3) -> tuple[int, int]:
    """(c, c_bar): the U-divisibility of [beta] and [beta_bar] in H^0 over F_p[U]."""
    bn = theory("BN", p)
    pres = homology_u(build_complex(word, bn), 0)
    pair = beta_pair(word, bn)
    c = u_divisibility(pres, coordinates(pres, pair.beta))
    c_bar = u_divisibility(pres, coordinates(pres, pair.beta_bar))
    return c, c_bar


def psi_class_vanishes(word: BraidWord, p: int = 3) -> bool:
    """Whether the mod-U class psi is a boundary at bidegree (0, sl).

    The answer must agree with c > 0; a mismatch is an engine bug and raises.
    """
    kh = theory("Kh", p)
    psi = beta_pair(word, kh).beta
    vanishes = is_boundary_f(build_complex(word, kh), psi)
    c, _ = c_invariants(word, p)
    if vanishes != (c > 0):
        raise ConsistencyError(
            f"psi boundary test ({vanishes}) disagrees with c = {c}"
        )
    return vanishes


def _free_degrees(pres) -> list[int]:
    return sorted(s.q for s in pres.summands if s.order is None)


def _knot_s(pres) -> int:
    free_q = _free_degrees(pres)
    if len(free_q) != 2:
        raise ConsistencyError(f"knot H^0 has free rank {len(free_q)}, expected 2")
    lo, hi = free_q
    if hi - lo != 2:
        raise ConsistencyError(f"free generator degrees {free_q} are not s -+ 1")
    return (lo + hi) // 2


def s_invariant(word: BraidWord, p: int = 3) -> int:
    """The s-invariant of a knot from the free part of H^0 over F_p[U]."""
    if word.components() != 1:
        raise ValueError(
            f"s-invariant needs a knot; this closure has {word.components()} components"
        )
    return _knot_s(homology_u(build_complex(word, theory("BN", p)), 0))


def c_simplicity_check(word: BraidWord, p: int = 3) -> dict[str, bool]:
    """Sufficient conditions under which c is pinned by s and sl alone.

    cond1:  H^{0,j} = 0 for j < s-1 with field coefficients;
    cond2:  H^{-1,j} = 0 for j < s-3;
    cond3:  every torsion order of H^0 over F_p[U] is even, and
            H^{-1,j} = 0 for j < s-5;
    pseudo_thin:  H^{0,*} is concentrated in exactly two quantum degrees.
    """
    if word.components() != 1:
        raise ValueError(
            f"c-simplicity is defined for knots; this closure has "
            f"{word.components()} components"
        )
    pres = homology_u(build_complex(word, theory("BN", p)), 0)
    s = _knot_s(pres)
    torsion_even = all(
        x.order % 2 == 0 for x in pres.summands if x.order is not None
    )
    table = kh_table(build_complex(word, theory("Kh", p)))
    q_at_0 = {q for (i, q) in table if i == 0}
    q_at_m1 = {q for (i, q) in table if i == -1}
    return {
        "cond1": all(q >= s - 1 for q in q_at_0),
        "cond2": all(q >= s - 3 for q in q_at_m1),
        "cond3": torsion_even and all(q >= s - 5 for q in q_at_m1),
        "pseudo_thin": len(q_at_0) == 2,
    }


@dataclass(frozen=True)
class InvariantReport:
    """Everything the pipeline knows about one braid word over one F_p."""

    word: BraidWord
    sl: int
    c: int
    c_bar: int
    psi_vanishes: bool
    s: int | None
    char: int
    char2_warning: bool


def invariant_report(word: BraidWord, p: int = 3) -> InvariantReport:
    """Full pipeline: c, c_bar, psi vanishing (cross-checked), and s for knots."""
    bn = theory("BN", p)
    pres = homology_u(build_complex(word, bn), 0)
    pair = beta_pair(word, bn)
    c = u_divisibility(pres, coordinates(pres, pair.beta))
    c_bar = u_divisibility(pres, coordinates(pres, pair.beta_bar))
    kh = theory("Kh", p)
    vanishes = is_boundary_f(build_complex(word, kh), beta_pair(word, kh).beta)
    if vanishes != (c > 0):
        raise ConsistencyError(
            f"psi boundary test ({vanishes}) disagrees with c = {c}"
        )
    s = _knot_s(pres) if word.components() == 1 else None
    return InvariantReport(
        word=word,
        sl=word.self_linking(),
        c=c,
        c_bar=c_bar,
        psi_vanishes=vanishes,
        s=s,
        char=p,
        char2_warning=(p == 2),
    )
