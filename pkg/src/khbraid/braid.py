"""Braid words, their closures, Markov/transverse moves, and resolution circles.

Diagram model
-------------

A word on ``n`` strands with ``k`` letters is drawn bottom-to-top; letter j
(0-based) acts at time j on adjacent strand positions (|letter|-1, |letter|).
The closure diagram is cut into arcs indexed by (strand position s, gap g)
with s in 0..n-1 and g in 0..k; gap g is the horizontal level after the first
g letters, and (s, k) is glued to (s, 0) by the closure.

Resolutions
-----------

A resolution assigns a bit to every letter.  Bit 0 at a positive letter (and
bit 1 at a negative letter) is the oriented smoothing: both strands run
straight through.  The other bit value is the cap-cup smoothing joining the
two positions at that level.  Hence the oriented resolution of any word is the
all-0 bits at positive letters and all-1 at negative ones; its circles are the
n closure circles, and the circle at position s carries nesting parity s % 2
(position 0 is innermost).

Crossing order is word order everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


class BraidParseError(ValueError):
    """Malformed braid text; carries the 1-based line number when known."""

    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass(frozen=True)
class BraidWord:
    """A braid word: ``strands`` >= 1 and letters in +-(1..strands-1)."""

    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.strands < 1:
            raise ValueError(f"need at least one strand, got {self.strands}")
        object.__setattr__(self, "letters", tuple(self.letters))
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise ValueError(f"letter {x} out of range for {self.strands} strands")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def writhe(self) -> int:
        return sum(1 if x > 0 else -1 for x in self.letters)

    @property
    def n_pos(self) -> int:
        return sum(1 for x in self.letters if x > 0)

    @property
    def n_neg(self) -> int:
        return sum(1 for x in self.letters if x < 0)

    def self_linking(self) -> int:
        """sl of the closure as a transverse link: writhe - strands."""
        return self.writhe - self.strands

    def permutation(self) -> tuple[int, ...]:
        """Image of each strand position under the braid, bottom to top."""
        perm = list(range(self.strands))
        for x in self.letters:
            i = abs(x)
            perm[i - 1], perm[i] = perm[i], perm[i - 1]
        return tuple(perm)

    def components(self) -> int:
        """Number of link components of the closure."""
        perm = self.permutation()
        seen = [False] * self.strands
        count = 0
        for s in range(self.strands):
            if not seen[s]:
                count += 1
                t = s
                while not seen[t]:
                    seen[t] = True
                    t = perm[t]
        return count

    def is_knot(self) -> bool:
        return self.components() == 1

    def mirror(self) -> BraidWord:
        return BraidWord(self.strands, tuple(-x for x in self.letters))


class Resolution(NamedTuple):
    bits: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.bits)


def oriented_resolution(word: BraidWord) -> Resolution:
    return Resolution(tuple(0 if x > 0 else 1 for x in word.letters))


def smoothing_is_oriented(letter: int, bit: int) -> bool:
    return bit == (0 if letter > 0 else 1)


@dataclass
class CircleSet:
    """Circles of one resolution.

    ``circle_of_arc[s * (k+1) + g]`` is the circle id of arc (s, g); ids are
    0..count-1, ordered by smallest member arc.  ``strand_circles[s]`` is the
    circle through the closure line at position s.
    """

    count: int
    circle_of_arc: list[int]
    strand_circles: tuple[int, ...] = field(default=())


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def resolve(word: BraidWord, resolution: Resolution | tuple[int, ...]) -> CircleSet:
    """Trace the circles of one resolution of the closure diagram."""
    bits = resolution.bits if isinstance(resolution, Resolution) else tuple(resolution)
    n, k = word.strands, len(word)
    if len(bits) != k:
        raise ValueError(f"expected {k} bits, got {len(bits)}")
    gaps = k + 1
    uf = _UnionFind(n * gaps)

    def arc(s: int, g: int) -> int:
        return s * gaps + g

    for j, (letter, bit) in enumerate(zip(word.letters, bits)):
        i = abs(letter)
        lo, hi = i - 1, i
        if smoothing_is_oriented(letter, bit):
            uf.union(arc(lo, j), arc(lo, j + 1))
            uf.union(arc(hi, j), arc(hi, j + 1))
        else:
            uf.union(arc(lo, j), arc(hi, j))
            uf.union(arc(lo, j + 1), arc(hi, j + 1))
        for s in range(n):
            if s != lo and s != hi:
                uf.union(arc(s, j), arc(s, j + 1))
    for s in range(n):
        uf.union(arc(s, k), arc(s, 0))

    order: dict[int, int] = {}
    circle_of_arc = []
    for a in range(n * gaps):
        root = uf.find(a)
        if root not in order:
            order[root] = len(order)
        circle_of_arc.append(order[root])
    strand_circles = tuple(circle_of_arc[arc(s, 0)] for s in range(n))
    return CircleSet(len(order), circle_of_arc, strand_circles)


def nesting_parities(word: BraidWord) -> tuple[int, ...]:
    """Nesting parity of each circle of the oriented resolution, by circle id.

    In the oriented resolution the circles are the n closure circles and the
    one through position s is nested inside s others, so its parity is s % 2.
    """
    circles = resolve(word, oriented_resolution(word))
    if circles.count != word.strands:
        raise AssertionError("oriented resolution must have one circle per strand")
    parity = [0] * circles.count
    for s, cid in enumerate(circles.strand_circles):
        parity[cid] = s % 2
    return tuple(parity)


# ---------------------------------------------------------------------------
# Markov / transverse moves


MOVES = ("rotate", "insert_pair", "remove_pair", "stabilize", "destabilize", "relation", "far_comm")


def markov_rewrite(
    word: BraidWord,
    move: str,
    position: int | None = None,
    generator: int | None = None,
    sign: int = 1,
) -> tuple[BraidWord, dict]:
    """Apply one move; returns (new word, record).

    The record carries the move name, site data, and a ``transverse`` flag:
    negative (de)stabilization is the only non-transverse move here.
    Invalid applications raise ValueError.
    """
    n, letters = word.strands, list(word.letters)
    k = len(letters)
    rec: dict = {"move": move, "transverse": True}
    if move == "rotate":
        r = 1 if position is None else position % max(k, 1)
        new = letters[r:] + letters[:r]
        rec["position"] = r
        return BraidWord(n, tuple(new)), rec
    if move == "insert_pair":
        if generator is None or not (1 <= generator < n):
            raise ValueError(f"insert_pair needs a generator in 1..{n - 1}")
        pos = k if position is None else position
        if not 0 <= pos <= k:
            raise ValueError(f"insert position {pos} out of range")
        pair = [generator * sign, -generator * sign]
        new = letters[:pos] + pair + letters[pos:]
        rec.update(position=pos, generator=generator, sign=sign)
        return BraidWord(n, tuple(new)), rec
    if move == "remove_pair":
        if position is None or not 0 <= position < k - 1:
            raise ValueError("remove_pair needs a valid position")
        if letters[position] != -letters[position + 1]:
            raise ValueError(f"letters at {position} are not an inverse pair")
        new = letters[:position] + letters[position + 2 :]
        rec["position"] = position
        return BraidWord(n, tuple(new)), rec
    if move == "stabilize":
        if sign not in (1, -1):
            raise ValueError("sign must be +-1")
        rec.update(sign=sign, transverse=sign > 0)
        return BraidWord(n + 1, tuple(letters + [sign * n])), rec
    if move == "destabilize":
        if n < 2 or not letters or abs(letters[-1]) != n - 1:
            raise ValueError("word does not end with a (de)stabilization letter")
        if any(abs(x) == n - 1 for x in letters[:-1]):
            raise ValueError(f"generator {n - 1} occurs before the terminal letter")
        rec.update(sign=1 if letters[-1] > 0 else -1, transverse=letters[-1] > 0)
        return BraidWord(n - 1, tuple(letters[:-1])), rec
    if move == "relation":
        j = position
        if j is None or not 0 <= j <= k - 3:
            raise ValueError("relation needs a position with three letters available")
        a, b, c = letters[j : j + 3]
        if a != c or abs(abs(a) - abs(b)) != 1 or (a > 0) != (b > 0):
            raise ValueError(f"letters {(a, b, c)} do not match the braid relation")
        new = letters[:j] + [b, a, b] + letters[j + 3 :]
        rec["position"] = j
        return BraidWord(n, tuple(new)), rec
    if move == "far_comm":
        j = position
        if j is None or not 0 <= j <= k - 2:
            raise ValueError("far_comm needs a position with two letters available")
        a, b = letters[j : j + 2]
        if abs(abs(a) - abs(b)) < 2:
            raise ValueError(f"letters {(a, b)} do not commute")
        new = letters[:j] + [b, a] + letters[j + 2 :]
        rec["position"] = j
        return BraidWord(n, tuple(new)), rec
    raise ValueError(f"unknown move {move!r}")


# ---------------------------------------------------------------------------
# braid text format:  name : strands : letters...   with # comments


def parse_braid_line(text: str, line_no: int | None = None) -> tuple[str, BraidWord] | None:
    """One entry, or None for blank/comment lines."""
    body = text.split("#", 1)[0].strip()
    if not body:
        return None
    parts = [p.strip() for p in body.split(":")]
    if len(parts) != 3:
        raise BraidParseError(f"expected 'name : strands : letters', got {text.strip()!r}", line_no)
    name, strands_s, letters_s = parts
    if not name:
        raise BraidParseError("empty braid name", line_no)
    try:
        strands = int(strands_s)
    except ValueError:
        raise BraidParseError(f"strand count {strands_s!r} is not an integer", line_no) from None
    try:
        letters = tuple(int(tok) for tok in letters_s.split())
    except ValueError:
        raise BraidParseError(f"bad letter in {letters_s!r}", line_no) from None
    try:
        word = BraidWord(strands, letters)
    except ValueError as exc:
        raise BraidParseError(str(exc), line_no) from None
    return name, word


def parse_braid_text(text: str) -> list[tuple[str, BraidWord]]:
    out = []
    for i, line in enumerate(text.splitlines(), start=1):
        entry = parse_braid_line(line, i)
        if entry is not None:
            out.append(entry)
    return out
