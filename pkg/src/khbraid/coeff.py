"""Exact mod-p coefficient arithmetic for the homology engine.

Three layers, smallest first:

* field elements are plain ints reduced into ``range(p)``; ``field_inv`` is
  the only operation needing more than ``%``,
* ``Monomial`` is a single term ``c * U**k``.  The homology engine works with
  these exclusively: over a graded complex every matrix entry has its U-power
  forced by the row/column quantum degrees, so adding monomials of unequal
  power is a bug in the caller rather than a representable value and raises
  ``DegreeError``,
* ``Poly`` is a sparse polynomial in the two formal deformation variables U
  (degree -2) and V (degree -4), used by the algebra layer before a theory
  is specialized down to one variable or to constants.
"""

from __future__ import annotations

from typing import NamedTuple


class DegreeError(ArithmeticError):
    """Raised when graded bookkeeping is violated (mixed-degree addition)."""


def field_inv(a: int, p: int) -> int:
    """Inverse of ``a`` in F_p.  Raises ZeroDivisionError on a == 0 mod p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 is not invertible mod {p}")
    return pow(a, -1, p)


class Monomial(NamedTuple):
    """A single term ``coeff * U**upow`` with coeff taken mod p by the ops below.

    The zero monomial is normalized to ``Monomial(0, 0)``.
    """

    coeff: int
    upow: int


MONO_ZERO = Monomial(0, 0)
MONO_ONE = Monomial(1, 0)


def mono_norm(m: Monomial, p: int) -> Monomial:
    c = m.coeff % p
    return Monomial(c, m.upow) if c else MONO_ZERO


def mono_mul(a: Monomial, b: Monomial, p: int) -> Monomial:
    c = a.coeff * b.coeff % p
    return Monomial(c, a.upow + b.upow) if c else MONO_ZERO


def mono_add(a: Monomial, b: Monomial, p: int) -> Monomial:
    """Add two monomials.  Unequal nonzero powers cannot be represented."""
    if a.coeff % p == 0:
        return mono_norm(b, p)
    if b.coeff % p == 0:
        return mono_norm(a, p)
    if a.upow != b.upow:
        raise DegreeError(f"cannot add U^{a.upow} and U^{b.upow} terms")
    return mono_norm(Monomial(a.coeff + b.coeff, a.upow), p)


def mono_divide(a: Monomial, b: Monomial, p: int) -> Monomial:
    """Exact division a / b.  Requires b nonzero and upow(a) >= upow(b)."""
    if b.coeff % p == 0:
        raise ZeroDivisionError("division by zero monomial")
    if a.coeff % p == 0:
        return MONO_ZERO
    if a.upow < b.upow:
        raise DegreeError(f"U^{a.upow} not divisible by U^{b.upow}")
    return Monomial(a.coeff * field_inv(b.coeff, p) % p, a.upow - b.upow)


class Poly:
    """Sparse polynomial in U, V over F_p.

    ``terms`` maps ``(upow, vpow)`` to a nonzero coefficient in ``range(1, p)``.
    U has quantum degree -2 and V degree -4.
    """

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: dict[tuple[int, int], int] | None = None):
        self.p = p
        self.terms: dict[tuple[int, int], int] = {}
        if terms:
            for key, c in terms.items():
                c %= p
                if c:
                    self.terms[key] = c

    @classmethod
    def const(cls, c: int, p: int) -> Poly:
        return cls(p, {(0, 0): c})

    @classmethod
    def var_u(cls, p: int) -> Poly:
        return cls(p, {(1, 0): 1})

    @classmethod
    def var_v(cls, p: int) -> Poly:
        return cls(p, {(0, 1): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.p, frozenset(self.terms.items())))

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for key, c in other.terms.items():
            c = (out.get(key, 0) + c) % self.p
            if c:
                out[key] = c
            else:
                out.pop(key, None)
        res = Poly(self.p)
        res.terms = out
        return res

    def __neg__(self) -> Poly:
        res = Poly(self.p)
        res.terms = {key: self.p - c for key, c in self.terms.items()}
        return res

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly | int) -> Poly:
        if isinstance(other, int):
            return self.scale(other)
        out: dict[tuple[int, int], int] = {}
        for (ua, va), ca in self.terms.items():
            for (ub, vb), cb in other.terms.items():
                key = (ua + ub, va + vb)
                c = (out.get(key, 0) + ca * cb) % self.p
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        res = Poly(self.p)
        res.terms = out
        return res

    __rmul__ = __mul__

    def scale(self, c: int) -> Poly:
        c %= self.p
        res = Poly(self.p)
        if c:
            res.terms = {key: ci * c % self.p for key, ci in self.terms.items()}
        return res

    def homogeneous_degree(self) -> int | None:
        """Quantum degree if every term has the same one; None for 0; else raises."""
        if not self.terms:
            return None
        degs = {-2 * u - 4 * v for (u, v) in self.terms}
        if len(degs) > 1:
            raise DegreeError(f"inhomogeneous polynomial, degrees {sorted(degs)}")
        return degs.pop()

    def specialize(self, u_val: int | None = None, v_val: int | None = None) -> Poly:
        """Substitute field constants for U and/or V; None keeps a variable formal."""
        out = Poly(self.p)
        for (eu, ev), c in self.terms.items():
            if u_val is not None:
                c = c * pow(u_val % self.p, eu, self.p) % self.p
                eu = 0
            if v_val is not None:
                c = c * pow(v_val % self.p, ev, self.p) % self.p
                ev = 0
            if c:
                key = (eu, ev)
                c2 = (out.terms.get(key, 0) + c) % self.p
                if c2:
                    out.terms[key] = c2
                else:
                    out.terms.pop(key, None)
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (eu, ev), c in sorted(self.terms.items()):
            s = str(c)
            if eu:
                s += f"*U^{eu}" if eu > 1 else "*U"
            if ev:
                s += f"*V^{ev}" if ev > 1 else "*V"
            bits.append(s)
        return " + ".join(bits)


def poly_specialize(poly: Poly, u_val: int | None = None, v_val: int | None = None) -> Poly:
    """Functional form of :meth:`Poly.specialize`."""
    return poly.specialize(u_val, v_val)
