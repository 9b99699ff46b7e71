from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from cantordyn.errors import AlphabetMismatch
from cantordyn.words import (
    ClopenSet,
    EPPoint,
    all_words,
    digits,
    lcp_distance,
    odometer_add,
    parse_word,
    periodic_adic,
    value,
    word_str,
)

W = parse_word


def members(c: ClopenSet, depth: int) -> set:
    """Depth-``depth`` words whose cylinder lies in c (brute force)."""
    return {w for w in product(range(c.k), repeat=depth) if any(w[: len(u)] == u for u in c.words)}


words2 = st.lists(st.integers(0, 1), max_size=5).map(tuple)
clopens2 = st.lists(words2, max_size=6).map(lambda ws: ClopenSet(2, ws))


def test_value_is_least_significant_first():
    assert value((1, 0), 2) == 1
    assert value((0, 1), 2) == 2
    assert digits(6, 3, 2) == (0, 1, 1)
    assert [word_str(w) for w in all_words(2, 2)] == ["00", "10", "01", "11"]


@given(st.integers(1, 4), st.integers(2, 4), st.data())
def test_digits_value_roundtrip(n, k, data):
    v = data.draw(st.integers(0, k ** n - 1))
    assert value(digits(v, n, k), k) == v


def test_parse_empty_word():
    assert parse_word("") == parse_word("ε") == ()


# canonical form


def test_canonical_merges_children():
    assert ClopenSet(2, [W("00"), W("01"), W("1")]).is_whole()


def test_canonical_absorbs_extensions():
    assert ClopenSet(2, [W("0"), W("01")]).words == {W("0")}


def test_canonical_keeps_canonical():
    c = ClopenSet(2, [W("01"), W("11")])
    assert c.words == {W("01"), W("11")}
    assert members(c, 2) == {W("01"), W("11")}


@given(st.lists(words2, max_size=8))
def test_canonical_is_set_semantics(ws):
    c = ClopenSet(2, ws)
    assert members(c, 5) == members(ClopenSet(2, []).union(ClopenSet(2, ws)), 5)
    # canonical words form an antichain without complete sibling groups
    for u in c.words:
        assert not any(u != v and v[: len(u)] == u for v in c.words)
    assert ClopenSet(2, c.words).words == c.words


# boolean algebra


def test_boolean_examples():
    assert ClopenSet(2, [W("0")]).complement().words == {W("1")}
    assert ClopenSet(2, [W("0")]).intersect(ClopenSet(2, [W("1")])).is_empty()
    quarters = [ClopenSet(2, [W(w)]) for w in ("00", "10", "01", "11")]
    acc = ClopenSet.empty(2)
    for q in quarters:
        acc = acc | q
    assert acc.is_whole()


@given(clopens2, clopens2)
def test_boolean_ops_match_membership(a, b):
    ma, mb = members(a, 5), members(b, 5)
    assert members(a | b, 5) == ma | mb
    assert members(a & b, 5) == ma & mb
    assert members(a - b, 5) == ma - mb
    assert members(a.complement(), 5) == set(product(range(2), repeat=5)) - ma
    assert a.issubset(b) == (ma <= mb)
    assert a.isdisjoint(b) == (not ma & mb)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        ClopenSet(2, [()]) | ClopenSet(3, [()])


def test_bad_symbol_rejected():
    with pytest.raises(ValueError):
        ClopenSet(2, [(2,)])


# points


def test_contains_examples():
    ones = EPPoint((), (1,))
    assert all(ClopenSet(2, [(1,) * n]).contains(ones) for n in range(1, 8))
    assert not ClopenSet(2, [W("0")]).contains(ones)
    assert ClopenSet(2, [W("011")]).contains(EPPoint((0,), (1, 1)))


def test_point_canonical_form():
    assert EPPoint((0,), (1, 1)) == EPPoint((0, 1, 1), (1,))
    assert EPPoint((1, 0, 1), (0, 1)) == EPPoint((1,), (0, 1))
    assert EPPoint((), (0, 0)).per == (0,)


@given(words2, st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple))
def test_point_digits_survive_canonicalisation(pre, per):
    x = EPPoint(pre, per)
    raw = pre + per * 12
    assert x.prefix(len(raw)) == raw


def test_distance_examples():
    zero, one = EPPoint((), (0,)), EPPoint((), (1,))
    assert lcp_distance(zero, zero) == 0
    assert lcp_distance(zero, one) == 1
    assert lcp_distance(EPPoint((0,), (1,)), zero) == Fraction(1, 2)


@given(words2, st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple), words2,
       st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple), words2,
       st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple))
def test_ultrametric(p1, q1, p2, q2, p3, q3):
    x, y, z = EPPoint(p1, q1), EPPoint(p2, q2), EPPoint(p3, q3)
    assert lcp_distance(x, z) <= max(lcp_distance(x, y), lcp_distance(y, z))
    assert lcp_distance(x, y) == lcp_distance(y, x)


# odometer arithmetic against the k-adic rational oracle


@given(words2, st.lists(st.integers(0, 2), min_size=1, max_size=3).map(tuple), st.integers(-40, 40),
       st.sampled_from([2, 3]))
def test_odometer_add_matches_adic(pre, per, t, k):
    pre = tuple(s % k for s in pre)
    per = tuple(s % k for s in per)
    x = EPPoint(pre, per)
    assert odometer_add(x, t, k).as_adic(k) == x.as_adic(k) + t


def test_odometer_carry_examples():
    assert odometer_add(EPPoint((), (1,)), 1, 2) == EPPoint((), (0,))
    assert odometer_add(EPPoint((0,), (1,)), 1, 2) == EPPoint((), (1,))
    assert odometer_add(EPPoint((), (0,)), -1, 3) == EPPoint((), (2,))


@given(st.integers(-50, 50), st.integers(1, 4), st.sampled_from([2, 3]))
def test_periodic_adic(num, length, k):
    assert periodic_adic(num, length, k).as_adic(k) == Fraction(num, 1 - k ** length)
