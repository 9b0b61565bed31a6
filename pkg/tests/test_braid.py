"""Braid word, circle tracing, move, and parser tests."""

from __future__ import annotations

import random

import hypothesis
import hypothesis.strategies as st
import pytest

from khbraid.braid import (
    BraidParseError,
    BraidWord,
    Resolution,
    markov_rewrite,
    nesting_parities,
    oriented_resolution,
    parse_braid_line,
    parse_braid_text,
    resolve,
)


def test_word_validation():
    BraidWord(1, ())
    BraidWord(3, (1, -2, 1))
    with pytest.raises(ValueError):
        BraidWord(0, ())
    with pytest.raises(ValueError):
        BraidWord(2, (2,))
    with pytest.raises(ValueError):
        BraidWord(2, (0,))


def test_self_linking_examples():
    assert BraidWord(1, ()).self_linking() == -1
    assert BraidWord(2, (1, 1, 1)).self_linking() == 1
    assert BraidWord(2, (-1,)).self_linking() == -3
    assert BraidWord(3, (1, -2, 1, -2)).self_linking() == -3


def test_trefoil_circle_counts():
    word = BraidWord(2, (1, 1, 1))
    assert resolve(word, Resolution((0, 0, 0))).count == 2
    assert resolve(word, Resolution((1, 0, 0))).count == 1
    assert resolve(word, Resolution((1, 1, 0))).count == 2
    assert resolve(word, Resolution((1, 1, 1))).count == 3


def test_oriented_resolution_and_parities():
    word = BraidWord(3, (1, 2))
    r = oriented_resolution(word)
    assert r.bits == (0, 0)
    circles = resolve(word, r)
    assert circles.count == 3
    # positions 0,1,2 carry parities 0,1,0
    par = nesting_parities(word)
    assert tuple(par[c] for c in circles.strand_circles) == (0, 1, 0)

    mixed = BraidWord(3, (1, -2, 1, -2))
    assert oriented_resolution(mixed).bits == (0, 1, 0, 1)
    assert resolve(mixed, oriented_resolution(mixed)).count == 3


def test_empty_word_circles():
    word = BraidWord(4, ())
    circles = resolve(word, Resolution(()))
    assert circles.count == 4
    assert circles.strand_circles == (0, 1, 2, 3)


words = st.integers(2, 4).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.integers(1, n - 1).flatmap(lambda g: st.sampled_from([g, -g])),
            max_size=8,
        ),
    )
)


@hypothesis.given(words, st.randoms(use_true_random=False))
def test_flipping_one_bit_changes_circle_count_by_one(nw, rng):
    n, letters = nw
    word = BraidWord(n, tuple(letters))
    k = len(word)
    bits = [rng.randint(0, 1) for _ in range(k)]
    base = resolve(word, Resolution(tuple(bits))).count
    for j in range(k):
        flipped = list(bits)
        flipped[j] ^= 1
        other = resolve(word, Resolution(tuple(flipped))).count
        assert abs(other - base) == 1


@hypothesis.given(words)
def test_oriented_resolution_has_strand_many_circles(nw):
    n, letters = nw
    word = BraidWord(n, tuple(letters))
    circles = resolve(word, oriented_resolution(word))
    assert circles.count == n
    assert sorted(circles.strand_circles) == list(range(n))


def test_moves_preserve_or_shift_self_linking():
    rng = random.Random(7)
    word = BraidWord(3, (1, -2, 1, -2))
    sl = word.self_linking()
    for move, kwargs, delta in [
        ("rotate", {"position": 3}, 0),
        ("insert_pair", {"position": 1, "generator": 2}, 0),
        ("stabilize", {"sign": 1}, 0),
        ("stabilize", {"sign": -1}, -2),
    ]:
        new, rec = markov_rewrite(word, move, **kwargs)
        assert new.self_linking() == sl + delta
        assert rec["transverse"] == (delta == 0)
    del rng


def test_insert_then_remove_roundtrip():
    word = BraidWord(4, (1, 2, -3))
    bigger, _ = markov_rewrite(word, "insert_pair", position=2, generator=3, sign=-1)
    assert bigger.letters == (1, 2, -3, 3, -3)
    back, _ = markov_rewrite(bigger, "remove_pair", position=3)
    assert back == word
    with pytest.raises(ValueError):
        markov_rewrite(bigger, "remove_pair", position=1)


def test_rotate_full_cycle_is_identity():
    word = BraidWord(3, (1, 2, -1, 2))
    cur = word
    for _ in range(len(word)):
        cur, _ = markov_rewrite(cur, "rotate")
    assert cur == word


def test_stabilize_destabilize_roundtrip():
    word = BraidWord(2, (1, 1, 1))
    up, rec = markov_rewrite(word, "stabilize", sign=1)
    assert up == BraidWord(3, (1, 1, 1, 2)) and rec["transverse"]
    down, rec2 = markov_rewrite(up, "destabilize")
    assert down == word and rec2["transverse"]
    negup, rec3 = markov_rewrite(word, "stabilize", sign=-1)
    assert negup.letters[-1] == -2 and not rec3["transverse"]
    with pytest.raises(ValueError):
        markov_rewrite(word, "destabilize")  # trefoil word does not end with +-1 only
    with pytest.raises(ValueError):
        markov_rewrite(BraidWord(3, (2, 1, 2)), "destabilize")  # gen 2 occurs earlier


def test_relation_and_far_comm():
    word = BraidWord(3, (1, 2, 1))
    new, _ = markov_rewrite(word, "relation", position=0)
    assert new.letters == (2, 1, 2)
    neg = BraidWord(3, (-1, -2, -1))
    assert markov_rewrite(neg, "relation", position=0)[0].letters == (-2, -1, -2)
    with pytest.raises(ValueError):
        markov_rewrite(BraidWord(3, (1, -2, 1)), "relation", position=0)
    far = BraidWord(4, (1, 3))
    assert markov_rewrite(far, "far_comm", position=0)[0].letters == (3, 1)
    with pytest.raises(ValueError):
        markov_rewrite(BraidWord(3, (1, 2)), "far_comm", position=0)


def test_parse_braid_line():
    assert parse_braid_line("# comment") is None
    assert parse_braid_line("   ") is None
    name, word = parse_braid_line("trefoil : 2 : 1 1 1")
    assert name == "trefoil" and word == BraidWord(2, (1, 1, 1))
    name, word = parse_braid_line("unknot : 1 :   # empty word is fine")
    assert name == "unknot" and word == BraidWord(1, ())


def test_parse_braid_text_errors_carry_line_numbers():
    text = "good : 2 : 1 1\n\nbad line without colons\n"
    with pytest.raises(BraidParseError) as err:
        parse_braid_text(text)
    assert err.value.line == 3
    with pytest.raises(BraidParseError) as err:
        parse_braid_text("x : 2 : 5\n")
    assert err.value.line == 1
    with pytest.raises(BraidParseError) as err:
        parse_braid_text("x : two : 1\n")
    assert err.value.line == 1


def test_parse_braid_text_multiple():
    entries = parse_braid_text("a : 2 : 1\n# note\nb : 3 : 1 -2\n")
    assert [n for n, _ in entries] == ["a", "b"]
    assert entries[1][1] == BraidWord(3, (1, -2))
