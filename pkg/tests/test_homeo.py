import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cantordyn.approx import fold_back
from cantordyn.errors import CantorDynError, NotInFullGroup
from cantordyn.homeo import (
    AdicMap,
    FullGroupElement,
    apply,
    compose,
    disagreement,
    equivalent,
    full_group_certify,
    identity,
    image_clopen,
    invert,
    is_topologically_free_to_depth,
    odometer,
    periodicity,
    power,
    prefix_permutation,
    preimage_clopen,
    sup_distance,
    tau_distance,
)
from cantordyn.measures import Dirac
from cantordyn.words import ClopenSet, EPPoint, digits, odometer_add, parse_word

from helpers import DIRAC_ONES, HALF, random_adic_map, random_element, sample_points

W = parse_word
T = odometer(2)
SWAP = prefix_permutation(2, {(0,): (1,), (1,): (0,)})
ZERO, ONES = EPPoint((), (0,)), EPPoint((), (1,))


def table(s: AdicMap) -> set:
    return set(s.pairs)


# construction and evaluation


def test_odometer_examples():
    assert T(ZERO) == EPPoint((1,), (0,))
    assert T(ONES) == ZERO
    assert T(EPPoint((0,), (1,))) == ONES
    assert table(T) == {((0,), (1,), 0), ((1,), (0,), 1)}


def test_odometer_cycles_depth2_cylinders():
    c = ClopenSet(2, [W("00")])
    seen = []
    for _ in range(4):
        seen.append(sorted(c.words)[0])
        c = image_clopen(T, c)
    assert seen == [W("00"), W("10"), W("01"), W("11")]
    assert c.words == {W("00")}


def test_apply_examples():
    assert apply(identity(2), EPPoint((1, 0), (1,))) == EPPoint((1, 0), (1,))
    assert apply(SWAP, ZERO) == EPPoint((1,), (0,))


def test_rejects_incomplete_codes():
    with pytest.raises(ValueError):
        AdicMap(2, [((0,), (0,), 0)])
    with pytest.raises(ValueError):
        AdicMap(2, [((0,), (0,), 0), ((1,), (0,), 0)])


def test_group_examples():
    assert compose(T, invert(T)).is_identity()
    assert compose(SWAP, SWAP).is_identity()
    two = power(T, 2)
    level2_form = AdicMap(2, [(W("00"), W("01"), 0), (W("10"), W("11"), 0),
                            (W("01"), W("00"), 1), (W("11"), W("10"), 1)])
    assert equivalent(two, level2_form)
    for x in sample_points(depth=4):
        assert two(x) == level2_form(x) == odometer_add(x, 2, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(-9, 9))
def test_power_matches_adic_oracle(seed, m):
    rng = random.Random(seed)
    x = EPPoint(tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 5))),
                tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3))))
    assert power(T, m)(x).as_adic(2) == x.as_adic(2) + m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_compose_matches_pointwise(seed):
    rng = random.Random(seed)
    a, b = random_adic_map(rng), random_adic_map(rng)
    ab = compose(a, b)
    for x in sample_points(depth=5):
        assert ab(x) == a(b(x))
        assert invert(a)(a(x)) == x


def test_image_preimage():
    c = ClopenSet(2, [W("011")])
    assert preimage_clopen(T, image_clopen(T, c)).words == c.words
    assert image_clopen(T, ClopenSet.whole(2)).is_whole()


# disagreement and distances


def test_disagreement_examples():
    d = disagreement(T, T)
    assert d.core.is_empty() and not d.exceptions
    d = disagreement(SWAP, T)
    assert d.core.words == {W("1")} and not d.exceptions
    for n in range(1, 6):
        d = disagreement(fold_back(n).map, T)
        assert d.core.words == {(1,) * n}


def test_tau_examples():
    assert tau_distance([HALF], SWAP, T) == [Fraction(1, 2)]
    assert tau_distance([HALF], T, T) == [0]
    for n in range(1, 6):
        assert tau_distance([DIRAC_ONES], fold_back(n).map, T) == [1]


def test_disagreement_with_agreement_points():
    # pairs whose output lengths differ from the input lengths fix isolated
    # tails only; these come back as exceptions removed from the core
    b = AdicMap(2, [(W("00"), W("11"), 1), (W("010"), W("0"), 0), (W("011"), W("100"), 0), (W("1"), W("101"), -1)])
    d = disagreement(identity(2), b)
    assert d.core.is_whole()
    fixed = {p for tag, p in d.exceptions if tag == "remove"}
    assert fixed == {EPPoint((), (0, 1)), EPPoint((1, 0, 1), (1, 0))}
    for x in fixed:
        assert b(x) == x
    assert tau_distance([Dirac(EPPoint((), (0, 1))), HALF], identity(2), b) == [0, 1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_disagreement_matches_pointwise(seed):
    rng = random.Random(seed)
    a, b = random_adic_map(rng, max_twist=1), random_adic_map(rng, max_twist=1)
    d = disagreement(a, b)
    removed = {p for tag, p in d.exceptions if tag == "remove"}
    added = {p for tag, p in d.exceptions if tag == "add"}
    pts = sample_points(depth=6) + list(removed) + list(added)
    for x in pts:
        inside = (x in d.core and x not in removed) or x in added
        assert inside == (a(x) != b(x)), x


def test_sup_examples():
    assert sup_distance(T, identity(2)) == 1
    assert sup_distance(power(T, 2), identity(2)) == Fraction(1, 2)
    assert sup_distance(SWAP, SWAP) == 0


# the topological full group


def test_certify_examples():
    s = full_group_certify(SWAP)
    assert s.c((0,)) == 1 and s.c((1,)) == -1
    assert set(full_group_certify(T).powers) == {1}
    for n in range(1, 5):
        assert set(full_group_certify(T).at_level(n)) == {1}
    shortening = AdicMap(2, [(W("00"), W("0"), 0), (W("01"), W("10"), 0), (W("1"), W("11"), 0)])
    with pytest.raises(NotInFullGroup):
        full_group_certify(shortening)


def test_periodicity_examples():
    part, order = periodicity(full_group_certify(SWAP))
    assert order == 2 and part.periodic_parts[2].is_whole()
    part, order = periodicity(full_group_certify(power(T, 1)))
    assert order is None and part.aperiodic_part.is_whole()
    s = FullGroupElement.from_powers(2, 2, [1, -1, 1, -1])
    part, order = periodicity(s)
    assert order == 2 and part.periodic_parts[2].is_whole()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_periodic_elements_have_identity_power(seed):
    s = random_element(random.Random(seed), max_level=3, periodic=True)
    _, order = periodicity(s)
    assert order is not None
    assert power(s.map, order).is_identity()
    assert s.power(order).is_identity()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_certified_disagreement_is_power_comparison(seed):
    rng = random.Random(seed)
    a, b = random_element(rng, max_level=3), random_element(rng, max_level=3)
    n = max(a.level, b.level)
    pa, pb = a.at_level(n), b.at_level(n)
    expected = ClopenSet(2, [digits(v, n, 2) for v in range(2 ** n) if pa[v] != pb[v]])
    d = disagreement(a.map, b.map)
    assert d.core.words == expected.words and not d.exceptions


def test_power_table_power_matches_maps():
    rng = random.Random(5)
    for _ in range(30):
        s = random_element(rng, max_level=3)
        m = rng.randint(-6, 6)
        assert equivalent(s.power(m).map, power(s.map, m))


def test_topological_freeness():
    assert is_topologically_free_to_depth(T, 6, 6)
    assert not is_topologically_free_to_depth(identity(2), 4, 1)
    assert not is_topologically_free_to_depth(SWAP, 4, 2)
    assert is_topologically_free_to_depth(SWAP, 4, 1)


def test_alphabet_mismatch_in_compose():
    with pytest.raises(CantorDynError):
        compose(T, odometer(3))
