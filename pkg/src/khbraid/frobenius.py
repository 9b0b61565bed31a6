"""The rank-2 Frobenius algebra A = R[X]/(X^2 - U X + V) and its specializations.

Basis and grading conventions used throughout the package:

* ``x_plus`` is the unit 1 (quantum degree +1), ``x_minus`` is X (degree -1),
* the deformation parameters have deg U = -2 and deg V = -4,
* comultiplication and counit are

      comul(x_plus)  = x_plus (x) x_minus + x_minus (x) x_plus - U x_plus (x) x_plus
      comul(x_minus) = x_minus (x) x_minus - V x_plus (x) x_plus
      counit(a x_plus + b x_minus) = b

Named specializations of (U, V):

    ====  ==========  ======================================
    tag   (U, V)      character
    ====  ==========  ======================================
    BIG   formal      graded, two variables
    Kh    (0, 0)      graded
    BN    (U, 0)      graded, one variable; the engine's workhorse
    VT    (0, V)      graded, one variable
    OLee  (0, 1)      filtered only
    TLee  (1, 0)      filtered only
    ====  ==========  ======================================

When X^2 - U X + V splits with distinct roots x1, x2 the elements
``x_o = X - x1`` and ``x_bullet = X - x2`` generate the two minimal ideals;
they are the labels the transverse cycles are built from.  Root order is part
of the package convention: roots() returns (x1, x2) with BN -> (0, U),
Kh -> (0, 0), TLee -> (0, 1), OLee -> (i, -i) for the smallest square root i
of -1 mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .coeff import DegreeError, Poly

TAGS = ("BIG", "Kh", "BN", "VT", "OLee", "TLee")
GRADED_TAGS = frozenset({"BIG", "Kh", "BN", "VT"})
_CANON = {t.lower(): t for t in TAGS}


class UnsupportedTheoryError(ValueError):
    """Raised for unknown tags or theory/char combinations without the needed structure."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Theory:
    """A named specialization of the two-parameter family over F_p."""

    tag: str
    p: int = 3

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise UnsupportedTheoryError(f"unknown theory tag {self.tag!r}")
        if not _is_prime(self.p):
            raise UnsupportedTheoryError(f"characteristic {self.p} is not prime")

    @property
    def graded(self) -> bool:
        return self.tag in GRADED_TAGS

    @property
    def u_poly(self) -> Poly:
        if self.tag in ("BIG", "BN"):
            return Poly.var_u(self.p)
        if self.tag == "TLee":
            return Poly.const(1, self.p)
        return Poly(self.p)

    @property
    def v_poly(self) -> Poly:
        if self.tag in ("BIG", "VT"):
            return Poly.var_v(self.p)
        if self.tag == "OLee":
            return Poly.const(1, self.p)
        return Poly(self.p)

    def label(self) -> str:
        return f"{self.tag}/F{self.p}"


def theory(tag: str, char: int = 3) -> Theory:
    """Case-insensitive constructor: theory('bn', 3) == Theory('BN', 3)."""
    canon = _CANON.get(tag.lower())
    if canon is None:
        raise UnsupportedTheoryError(f"unknown theory tag {tag!r}")
    return Theory(canon, char)


class AlgebraElement(NamedTuple):
    """plus * x_plus + minus * x_minus with Poly coefficients."""

    plus: Poly
    minus: Poly

    def is_zero(self) -> bool:
        return self.plus.is_zero() and self.minus.is_zero()


def element(th: Theory, plus: int | Poly = 0, minus: int | Poly = 0) -> AlgebraElement:
    if isinstance(plus, int):
        plus = Poly.const(plus, th.p)
    if isinstance(minus, int):
        minus = Poly.const(minus, th.p)
    return AlgebraElement(plus, minus)


def x_plus(th: Theory) -> AlgebraElement:
    return element(th, 1, 0)


def x_minus(th: Theory) -> AlgebraElement:
    return element(th, 0, 1)


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.plus + y.plus, x.minus + y.minus)


def scale(x: AlgebraElement, c: Poly | int) -> AlgebraElement:
    if isinstance(c, int):
        return AlgebraElement(x.plus.scale(c), x.minus.scale(c))
    return AlgebraElement(c * x.plus, c * x.minus)


def mul(x: AlgebraElement, y: AlgebraElement, th: Theory) -> AlgebraElement:
    """Product in A, using X^2 = U X - V."""
    a1, b1 = x
    a2, b2 = y
    cross = b1 * b2
    return AlgebraElement(a1 * a2 - cross * th.v_poly, a1 * b2 + a2 * b1 + cross * th.u_poly)


def comul(x: AlgebraElement, th: Theory) -> list[tuple[AlgebraElement, AlgebraElement]]:
    """Comultiplication as a list of elementary tensors (left, right)."""
    a, b = x
    xp, xm = x_plus(th), x_minus(th)
    pairs = [
        (scale(xp, a), xm),
        (scale(xm, a), xp),
        (scale(xp, -(a * th.u_poly)), xp),
        (scale(xm, b), xm),
        (scale(xp, -(b * th.v_poly)), xp),
    ]
    return [(l, r) for l, r in pairs if not (l.is_zero() or r.is_zero())]


def counit(x: AlgebraElement, th: Theory) -> Poly:
    return x.minus


def degree(x: AlgebraElement) -> int | None:
    """Quantum degree of a homogeneous element; None for 0; raises if mixed."""
    degs = set()
    dp = x.plus.homogeneous_degree()
    if dp is not None:
        degs.add(dp + 1)
    dm = x.minus.homogeneous_degree()
    if dm is not None:
        degs.add(dm - 1)
    if not degs:
        return None
    if len(degs) > 1:
        raise DegreeError(f"inhomogeneous element, degrees {sorted(degs)}")
    return degs.pop()


class RootPair(NamedTuple):
    """Ordered roots (x1, x2) of X^2 - U X + V in the theory's ground ring."""

    x1: Poly
    x2: Poly


def roots(th: Theory) -> RootPair:
    """The package's canonical root order per theory; see module docstring."""
    p = th.p
    if th.tag == "BN":
        return RootPair(Poly(p), Poly.var_u(p))
    if th.tag == "Kh":
        return RootPair(Poly(p), Poly(p))
    if th.tag == "TLee":
        return RootPair(Poly(p), Poly.const(1, p))
    if th.tag == "OLee":
        i = next((a for a in range(1, p) if a * a % p == (p - 1) % p), None)
        if i is None and p != 2:
            raise UnsupportedTheoryError(f"OLee/F{p}: -1 is not a square mod {p}")
        if p == 2:
            i = 1
        return RootPair(Poly.const(i, p), Poly.const(-i, p))
    raise UnsupportedTheoryError(f"{th.tag} does not split over its ground ring")


def zero_divisors(th: Theory) -> tuple[AlgebraElement, AlgebraElement]:
    """(x_o, x_bullet) = (X - x1, X - x2)."""
    rp = roots(th)
    return element(th, -rp.x1, 1), element(th, -rp.x2, 1)


def e_sign(parity: int) -> int:
    """Conjugation sign: +1 for an x_o label (parity 0), -1 for x_bullet."""
    return 1 if parity % 2 == 0 else -1


def conjugate(x: AlgebraElement, e: int, th: Theory) -> AlgebraElement:
    """Bar involution on ideal labels: x |-> x - e (x2 - x1) 1.

    With e = e_sign of the label this swaps x_o <-> x_bullet.
    """
    rp = roots(th)
    shift = (rp.x2 - rp.x1).scale(e)
    return AlgebraElement(x.plus - shift, x.minus)


def torus_element(th: Theory) -> AlgebraElement:
    """t(1) = 2X - (x1 + x2) = 2X - U; equals x_o + x_bullet when roots exist."""
    return AlgebraElement(-th.u_poly, Poly.const(2, th.p))
