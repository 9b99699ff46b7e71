"""The ten acceptance criteria, one test each.

Each test prints a single PASS/FAIL line (also collected into the terminal
summary) and then asserts.  Everything is checked with exact rationals.
"""
import itertools
import random
import time
from fractions import Fraction

from cantordyn.approx import (
    PrunedTree,
    boundary_zone,
    conjugate_into_neighborhood,
    dirac_obstruction_check,
    gamma_Y_approximation,
    kr_extension,
    kr_matching,
    periodic_approximation,
    topologically_free_perturbation,
)
from cantordyn.errors import AtomicMeasure
from cantordyn.homeo import (
    AdicMap,
    compose,
    disagreement,
    equivalent,
    full_group_certify,
    identity,
    invert,
    is_topologically_free_to_depth,
    odometer,
    power,
    prefix_permutation,
    sup_distance,
    tau_distance,
)
from cantordyn.towers import basic_set, canonical_sequence, exhaustion_level, gamma_member, kr_conditions
from cantordyn.words import ClopenSet, EPPoint, all_words, digits

from conftest import ACCEPTANCE_LINES
from helpers import DIRAC_ONES, HALF, MARKOV, THIRD, cycle_permutation, random_adic_map, random_element

F = Fraction
T = odometer(2)
SWAP = prefix_permutation(2, {(0,): (1,), (1,): (0,)})
DEPTH8 = [EPPoint(w, (0,)) for w in all_words(2, 8)]


def report(number: int, title: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_c01_periodic_approximation_is_dense():
    rng = random.Random(2024)
    measure_sets = [[HALF], [THIRD, MARKOV], [HALF, DIRAC_ONES]]
    epsilons = [F(1, 2), F(1, 8), F(1, 32)]
    start = time.perf_counter()
    ok, runs = True, 0
    for _ in range(100):
        s = random_element(rng, max_level=4)
        for ms in measure_sets:
            for eps in epsilons:
                r = periodic_approximation(s, ms, eps)
                p = r.element
                ok &= r.order is not None and p.power(r.order).is_identity()
                cert = full_group_certify(p.map)
                ok &= cert.level <= p.level and cert.at_level(p.level) == p.powers
                ok &= all(d < eps for d in tau_distance(ms, p.map, s.map))
                runs += 1
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    report(1, "periodic approximation within eps", ok, f"{runs} runs in {elapsed:.1f}s")


def test_c02_fold_back_distance_law():
    ok, chosen = True, []
    for m in range(1, 11):
        eps = F(1, 2 ** m)
        r = gamma_Y_approximation(full_group_certify(T), [HALF], eps)
        n = r.level
        d = disagreement(r.element.map, T)
        mass = d.mass(HALF)
        ok &= mass == F(1, 2 ** n) and mass < eps
        ok &= d.core.issubset(boundary_zone(1, n))
        chosen.append(n)
    report(2, "fold-back mass 2^-n < 2^-m", ok, f"n = {chosen}")


def test_c03_canonical_kr_sequence():
    ok = True
    for k, top in ((2, 10), (3, 6)):
        for n in range(1, top + 1):
            ok &= all(kr_conditions(n, k).values())
            p = canonical_sequence(n, k)
            ok &= p.heights() == [k ** n]
            if n > 1:
                ok &= p.base().issubset(canonical_sequence(n - 1, k).base())
                ok &= p.heights()[0] > canonical_sequence(n - 1, k).heights()[0]
            # 0^∞ lies in every base and nothing else survives to depth n
            ok &= p.base().contains(EPPoint((), (0,)))
            ok &= p.base().words == {(0,) * n}
        ok &= basic_set(k).contained_in_all(top)
    report(3, "canonical K-R sequence satisfies (i)-(v)", ok)


def test_c04_gamma_structure():
    rng = random.Random(4)
    ok, levels = True, []
    for _ in range(100):
        s = random_element(rng, max_level=4)
        n = exhaustion_level(s)
        levels.append(n)
        ok &= all(not gamma_member(s, canonical_sequence(m)) for m in range(1, n))
        ok &= all(gamma_member(s, canonical_sequence(m)) for m in range(n, n + 4))
    report(4, "exhaustion and monotonicity of Γ(P_n)", ok, f"max level {max(levels)}")


def test_c05_gamma_y_obstruction():
    ok = all(dirac_obstruction_check(n).passed for n in range(1, 7))
    try:
        gamma_Y_approximation(full_group_certify(T), [DIRAC_ONES], F(1, 8))
        ok = False
    except AtomicMeasure:
        pass
    report(5, "Dirac obstruction for Γ_Y", ok)


def _depth3_periodic(rng):
    return random_element(rng, max_level=3, periodic=True)


def test_c06_rokhlin_property():
    words = list(all_words(2, 2))
    targets = [prefix_permutation(2, dict(zip(words, perm))) for perm in itertools.permutations(words)]
    rng = random.Random(6)
    while len(targets) < 34:
        s = _depth3_periodic(rng)
        if s.level == 3:
            targets.append(s.map)
    ok = True
    eps = F(1, 8)
    for tg in targets:
        res = conjugate_into_neighborhood(tg, [HALF, THIRD], eps)
        ok &= all(d < eps for d in res.distances)
        ok &= list(res.distances) == tau_distance([HALF, THIRD], res.conjugate, tg)
        r_inv = invert(res.r)
        ok &= all(res.conjugate(x) == res.r(res.s_univ(r_inv(x))) for x in DEPTH8)
    report(6, "conjugation into every neighbourhood", ok, f"{len(targets)} targets")


def test_c07_knaster_reichbach():
    ok = True
    for d in range(3, 9):
        a = PrunedTree.around_point(EPPoint((), (0,)), d)
        m = kr_matching(a, a)
        ok &= m.verify()
        ok &= all(m.f_gaps[i] > m.dist_a[i] for i in m.f)
        ok &= all(m.g_gaps[j] > m.dist_b[j] for j in m.g)
        h = kr_extension(a, a, None, m)
        rebuilt = AdicMap(2, h.pairs)  # re-validates both prefix codes
        ok &= rebuilt == h
        ok &= all(h.image_word(w) == (w, 0) for w in a.hull.refine(d))
    report(7, "extension of a map between closed nowhere dense sets", ok)


def test_c08_topologically_free_density():
    ok = True
    four = cycle_permutation(2, 2, [0, 1, 2, 3])
    for r in (SWAP, four):
        for eps in (F(1, 4), F(1, 16)):
            res = topologically_free_perturbation(r, [HALF], eps, depth=8, max_period=8)
            expected = ClopenSet.empty(2)
            for a, _ in res.trees:
                expected = expected | (a.domain - a.hull)
            d = disagreement(res.perturbed, r)
            ok &= d.core.words == expected.words and not d.exceptions
            ok &= d.mass(HALF) < eps
            ok &= is_topologically_free_to_depth(res.perturbed, 8, 8)
    report(8, "topologically free perturbation", ok)


def test_c09_group_oracles():
    rng = random.Random(9)
    ok = True
    for _ in range(1000):
        a, b, c = (random_adic_map(rng) for _ in range(3))
        left, right = compose(compose(a, b), c), compose(a, compose(b, c))
        ok &= equivalent(left, right)
        ok &= compose(a, invert(a)).is_identity() and compose(invert(a), a).is_identity()
        for x in DEPTH8:
            y = a(b(c(x)))
            ok &= left(x) == y and right(x) == y
        if not ok:
            break
    for _ in range(200):
        s, t = random_element(rng, max_level=3), random_element(rng, max_level=3)
        n = max(s.level, t.level)
        ps, pt = s.at_level(n), t.at_level(n)
        expected = ClopenSet(2, [digits(v, n, 2) for v in range(2 ** n) if ps[v] != pt[v]])
        d = disagreement(s.map, t.map)
        ok &= d.core.words == expected.words and not d.exceptions
    report(9, "associativity, inverses and pointwise composition", ok)


def test_c10_sup_metric():
    ok = True
    for m in range(1, 65):
        v = (m & -m).bit_length() - 1
        ok &= sup_distance(power(T, m), identity(2)) == F(1, 2 ** v)
    report(10, "D(T^m, id) = 2^-v2(m)", ok)
