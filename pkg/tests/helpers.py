"""Random generators and point oracles shared by the test modules."""
import random
from fractions import Fraction

from cantordyn.homeo import AdicMap, FullGroupElement, prefix_permutation
from cantordyn.measures import Bernoulli, Dirac, Markov
from cantordyn.words import EPPoint, all_words, digits

HALF = Bernoulli([Fraction(1, 2), Fraction(1, 2)])
THIRD = Bernoulli([Fraction(1, 3), Fraction(2, 3)])
MARKOV = Markov([Fraction(1, 2)] * 2, [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 4), Fraction(3, 4)]])
DIRAC_ONES = Dirac(EPPoint((), (1,)))


def random_element(rng: random.Random, k=2, max_level=4, periodic=False) -> FullGroupElement:
    n = rng.randint(1, max_level)
    h = k ** n
    perm = list(range(h))
    rng.shuffle(perm)
    powers = []
    for v in range(h):
        wrap = 0 if periodic else rng.choice((-1, 0, 0, 1))
        powers.append(perm[v] - v + wrap * h)
    return FullGroupElement.from_powers(k, n, powers)


def random_code(rng: random.Random, k: int, splits: int, max_depth: int) -> list:
    leaves = [()]
    for _ in range(splits):
        options = [w for w in leaves if len(w) < max_depth]
        w = rng.choice(options)
        leaves.remove(w)
        leaves.extend(w + (a,) for a in range(k))
    return leaves


def random_adic_map(rng: random.Random, k=2, max_depth=3, max_twist=2) -> AdicMap:
    splits = rng.randint(0, 4)
    us = random_code(rng, k, splits, max_depth)
    vs = random_code(rng, k, splits, max_depth)
    rng.shuffle(vs)
    return AdicMap(k, [(u, v, rng.randint(-max_twist, max_twist)) for u, v in zip(us, vs)])


def cycle_permutation(k: int, depth: int, cycle) -> AdicMap:
    """Prefix permutation cycling the depth-``depth`` cylinders with the given values."""
    table = {w: w for w in all_words(k, depth)}
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        table[digits(a, depth, k)] = digits(b, depth, k)
    return prefix_permutation(k, table)


def sample_points(k=2, depth=8) -> list:
    """Every w·0^∞ and w·(k-1)^∞ with |w| = depth."""
    out = []
    for w in all_words(k, depth):
        out.append(EPPoint(w, (0,)))
        out.append(EPPoint(w, (k - 1,)))
    return out
