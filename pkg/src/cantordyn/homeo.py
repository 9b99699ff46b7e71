"""Homeomorphisms given by finite prefix-code tables.

An :class:`AdicMap` is a list of triples ``(u, v, t)``: a point ``u·y`` is sent
to ``v·T^t(y)`` where ``T`` is the odometer acting on the tail.  The ``u`` words
and the ``v`` words each form a complete prefix code.  This class contains the
odometer itself, every element of its topological full group with a finite
table, all prefix permutations and all cylinder-to-cylinder code bijections,
and it is closed under composition and inversion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import AlphabetMismatch, CantorDynError, NotInFullGroup
from .measures import Measure
from .words import (
    ClopenSet,
    EPPoint,
    Word,
    _extensions_index,
    all_words,
    digits,
    is_prefix,
    lcp,
    odometer_add,
    periodic_adic,
    value,
    word_str,
)

Pair = tuple  # (u, v, t)


def restrict_pair(pair: Pair, w: Word, k: int) -> Pair:
    """The pair describing the same map on the smaller cylinder [w] ⊆ [u]."""
    u, v, t = pair
    e = w[len(u):]
    if not e:
        return pair
    carry, low = divmod(value(e, k) + t, k ** len(e))
    return (tuple(w), v + digits(low, len(e), k), carry)


def _kraft_complete(words: Sequence[Word], k: int) -> bool:
    return sum(Fraction(1, k ** len(w)) for w in words) == 1


def _is_antichain(words: Sequence[Word]) -> bool:
    ws = set(words)
    if len(ws) != len(words):
        return False
    return not any(w[:i] in ws for w in ws for i in range(len(w)))


def merge_pairs(pairs: Iterable[Pair], k: int) -> list:
    """Merge sibling groups (p·a -> q·a, t) for all a into (p -> q, k·t)."""
    by_len: dict = {}
    for p in pairs:
        by_len.setdefault(len(p[0]), []).append(p)
    out = []
    for n in range(max(by_len, default=0), -1, -1):
        groups: dict = {}
        for u, v, t in by_len.get(n, ()):
            if u and v and u[-1] == v[-1]:
                groups.setdefault((u[:-1], v[:-1], t), []).append((u, v, t))
            else:
                out.append((u, v, t))
        for (pu, pv, t), kids in groups.items():
            if len(kids) == k:
                by_len.setdefault(n - 1, []).append((pu, pv, k * t))
            else:
                out.extend(kids)
    return sorted(out, key=lambda p: (word_str(p[0]), len(p[0])))


class _PrefixLookup:
    """Find the pair of a prefix code comparable with a given word."""

    def __init__(self, pairs):
        self.by_u = {p[0]: p for p in pairs}
        self.maxlen = max((len(u) for u in self.by_u), default=0)
        self.below = None

    def covering(self, w: Word):
        """Pair whose u is a prefix of w, or None."""
        for i in range(min(len(w), self.maxlen) + 1):
            p = self.by_u.get(w[:i])
            if p is not None:
                return p
        return None

    def extending(self, w: Word) -> list:
        if self.below is None:
            self.below = _extensions_index(self.by_u)
        return self.below.get(w, [])


def compose_pairs(outer: Sequence[Pair], inner: Sequence[Pair], k: int) -> list:
    """Pairs of outer∘inner restricted to the domain of ``inner``.

    ``outer`` only needs to be defined on the image of ``inner``.
    """
    look = _PrefixLookup(outer)
    out = []
    stack = list(inner)
    while stack:
        u, v, t = stack.pop()
        p = look.covering(v)
        if p is not None:
            u1, v1, t1 = p
            w = v[len(u1):]
            carry, low = divmod(value(w, k) + t1, k ** len(w))
            out.append((u, v1 + digits(low, len(w), k), t + carry))
            continue
        if not look.extending(v):
            raise CantorDynError(f"outer map undefined on cylinder [{word_str(v)}]")
        # split [u] so that the output words grow by one symbol
        for a in range(k):
            carry, b = divmod(a + t, k)
            stack.append((u + (a,), v + (b,), carry))
    return out


def invert_pairs(pairs: Iterable[Pair]) -> list:
    return [(v, u, -t) for u, v, t in pairs]


def restrict_pairs(pairs: Sequence[Pair], region: ClopenSet, k: int) -> list:
    """The fragment of a table living on ``region``."""
    look = _PrefixLookup(pairs)
    out = []
    for w in region.words:
        p = look.covering(w)
        if p is not None:
            out.append(restrict_pair(p, w, k))
        else:
            out.extend(look.by_u[u] for u in look.extending(w))
    return out


def apply_pairs(pairs_lookup: _PrefixLookup, x: EPPoint, k: int) -> EPPoint:
    p = pairs_lookup.covering(x.prefix(pairs_lookup.maxlen))
    if p is None:
        raise CantorDynError(f"map undefined at {x}")
    u, v, t = p
    return odometer_add(x.shift(len(u)), t, k).prepend(v)


@dataclass(frozen=True)
class AdicMap:
    k: int
    pairs: tuple
    _lookup: _PrefixLookup = field(default=None, compare=False, repr=False, hash=False)

    def __init__(self, k: int, pairs: Iterable[Pair], *, check: bool = True):
        pairs = [(tuple(u), tuple(v), int(t)) for u, v, t in pairs]
        if check:
            for u, v, _ in pairs:
                if any(not 0 <= s < k for s in u + v):
                    raise ValueError(f"pair ({word_str(u)}, {word_str(v)}) leaves the alphabet")
            us = [p[0] for p in pairs]
            vs = [p[1] for p in pairs]
            if not (_is_antichain(us) and _kraft_complete(us, k)):
                raise ValueError("input words are not a complete prefix code")
            if not (_is_antichain(vs) and _kraft_complete(vs, k)):
                raise ValueError("output words are not a complete prefix code")
        merged = tuple(merge_pairs(pairs, k))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "pairs", merged)
        object.__setattr__(self, "_lookup", _PrefixLookup(merged))

    def __repr__(self):
        body = ", ".join(f"({word_str(u) or 'ε'}→{word_str(v) or 'ε'},{t})" for u, v, t in self.pairs)
        return f"AdicMap(k={self.k}, [{body}])"

    def __call__(self, x: EPPoint) -> EPPoint:
        return apply_pairs(self._lookup, x, self.k)

    def depth(self) -> int:
        return max(max(len(u), len(v)) for u, v, _ in self.pairs)

    def is_identity(self) -> bool:
        return self.pairs == (((), (), 0),)

    def image_word(self, w: Word) -> tuple:
        """(v, t) with S(w·y) = v·T^t(y); requires [w] inside one input cylinder."""
        p = self._lookup.covering(w)
        if p is None:
            raise CantorDynError(f"[{word_str(w)}] straddles several input cylinders")
        _, v, t = restrict_pair(p, w, self.k)
        return v, t


def identity(k: int) -> AdicMap:
    return AdicMap(k, [((), (), 0)])


def odometer(k: int) -> AdicMap:
    """The k-adic odometer: add one to coordinate 0 and carry."""
    if k < 2:
        raise ValueError("k must be at least 2")
    pairs = [((d,), (d + 1,), 0) for d in range(k - 1)]
    pairs.append(((k - 1,), (0,), 1))
    return AdicMap(k, pairs)


def prefix_permutation(k: int, table: dict) -> AdicMap:
    """Map [w] onto [table[w]] by replacing the prefix; all words one length."""
    return AdicMap(k, [(tuple(u), tuple(v), 0) for u, v in table.items()])


def _same_k(a: AdicMap, b: AdicMap):
    if a.k != b.k:
        raise AlphabetMismatch(f"alphabets differ: {a.k} vs {b.k}")


def apply(s: AdicMap, x: EPPoint) -> EPPoint:
    return s(x)


def compose(s1: AdicMap, s2: AdicMap) -> AdicMap:
    """s1 ∘ s2 (apply s2 first)."""
    _same_k(s1, s2)
    return AdicMap(s1.k, compose_pairs(s1.pairs, s2.pairs, s1.k), check=False)


def invert(s: AdicMap) -> AdicMap:
    return AdicMap(s.k, invert_pairs(s.pairs), check=False)


def power(s: AdicMap, m: int) -> AdicMap:
    if m < 0:
        s, m = invert(s), -m
    result = identity(s.k)
    base = s
    while m:
        if m & 1:
            result = compose(base, result)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def image_clopen(s: AdicMap, c: ClopenSet) -> ClopenSet:
    if s.k != c.k:
        raise AlphabetMismatch("map and set on different alphabets")
    return ClopenSet(s.k, [v for _, v, _ in restrict_pairs(s.pairs, c, s.k)])


def preimage_clopen(s: AdicMap, c: ClopenSet) -> ClopenSet:
    return image_clopen(invert(s), c)


# --------------------------------------------------------------------------
# disagreement sets and distances


def aligned(s1: AdicMap, s2: AdicMap):
    """Yield (u, (v1, t1), (v2, t2)) over a common refinement of the input codes."""
    _same_k(s1, s2)
    k = s1.k
    look2 = s2._lookup
    for p1 in s1.pairs:
        u1 = p1[0]
        p2 = look2.covering(u1)
        if p2 is not None:
            _, v2, t2 = restrict_pair(p2, u1, k)
            yield u1, p1[1:], (v2, t2)
        else:
            for u2 in look2.extending(u1):
                _, v1, t1 = restrict_pair(p1, u2, k)
                yield u2, (v1, t1), look2.by_u[u2][1:]


@dataclass(frozen=True)
class DisagreementSet:
    """E(S1, S2) = core, minus the points tagged "remove", plus those tagged "add"."""

    core: ClopenSet
    exceptions: tuple = ()  # ((tag, EPPoint), ...)

    def is_empty(self) -> bool:
        return self.core.is_empty() and not any(tag == "add" for tag, _ in self.exceptions)

    def mass(self, mu: Measure) -> Fraction:
        out = mu.eval(self.core)
        for tag, x in self.exceptions:
            if tag == "remove":
                out -= mu.point_mass(x)
            else:
                out += mu.point_mass(x)
        return out


def _agreement_point(v: Word, t: int, e: Word, t2: int, k: int) -> EPPoint:
    """The unique tail y with v·T^t(y) = v·e·T^t2(y)."""
    # with z = T^t2(y): z + (t - t2) = e·z, i.e. z = (value(e) - m) / (1 - k^|e|)
    m = t - t2
    z = periodic_adic(value(e, k) - m, len(e), k)
    return odometer_add(z, -t2, k)


def disagreement(s1: AdicMap, s2: AdicMap) -> DisagreementSet:
    k = s1.k
    core = []
    exceptions = []
    for u, (v1, t1), (v2, t2) in aligned(s1, s2):
        if len(v1) == len(v2):
            if v1 != v2 or t1 != t2:
                core.append(u)
            continue
        short, long_ = (v1, v2) if len(v1) < len(v2) else (v2, v1)
        core.append(u)
        if is_prefix(short, long_):
            if len(v1) < len(v2):
                y = _agreement_point(v1, t1, v2[len(v1):], t2, k)
            else:
                y = _agreement_point(v2, t2, v1[len(v2):], t1, k)
            exceptions.append(("remove", y.prepend(u)))
    exceptions.sort(key=lambda e: (word_str(e[1].pre), word_str(e[1].per)))
    return DisagreementSet(ClopenSet(k, core), tuple(exceptions))


def equivalent(s1: AdicMap, s2: AdicMap) -> bool:
    """Semantic equality of two tables."""
    return disagreement(s1, s2).core.is_empty()


def tau_distance(measures: Sequence[Measure], s1: AdicMap, s2: AdicMap) -> list:
    """Exact values mu_i(E(S1, S2))."""
    e = disagreement(s1, s2)
    return [e.mass(mu) for mu in measures]


def in_neighborhood(center: AdicMap, measures: Sequence[Measure], eps, s: AdicMap) -> bool:
    eps = Fraction(eps)
    return all(d < eps for d in tau_distance(measures, s, center))


def _k_valuation(m: int, k: int) -> int:
    a = 0
    while m % k == 0:
        m //= k
        a += 1
    return a


def sup_distance(s1: AdicMap, s2: AdicMap) -> Fraction:
    """sup_x d(S1 x, S2 x) for d(x, y) = 2^-lcp(x, y)."""
    k = s1.k
    best = None
    for _, (v1, t1), (v2, t2) in aligned(s1, s2):
        n = min(len(v1), len(v2))
        p = lcp(v1, v2)
        if p < n:
            m = p
        elif len(v1) != len(v2):
            m = n
        elif t1 != t2:
            m = len(v1) + _k_valuation(t1 - t2, k)
        else:
            continue
        if best is None or m < best:
            best = m
    return Fraction(0) if best is None else Fraction(1, 2 ** best)


# --------------------------------------------------------------------------
# the topological full group


@dataclass(frozen=True)
class FullGroupElement:
    """A map S with S = T^c(w) on every depth-``level`` cylinder [w].

    ``powers`` is a tuple indexed by value(w).
    """

    map: AdicMap
    level: int
    powers: tuple

    @property
    def k(self) -> int:
        return self.map.k

    def c(self, w: Word) -> int:
        return self.powers[value(w[: self.level], self.k)]

    def power_table(self) -> dict:
        return {word_str(w): self.powers[i] for i, w in enumerate(all_words(self.k, self.level))}

    def max_power(self) -> int:
        return max(abs(c) for c in self.powers)

    def at_level(self, n: int) -> tuple:
        """Power table expanded (n >= level) to depth n, indexed by value."""
        if n < self.level:
            raise ValueError("can only refine to a deeper level")
        q = self.k ** self.level
        return tuple(self.powers[i % q] for i in range(self.k ** n))

    def minimal_level(self) -> int:
        """Least n such that the cocycle is constant on depth-n cylinders."""
        k = self.k
        for n in range(self.level + 1):
            q = k ** n
            if all(self.powers[i] == self.powers[i % q] for i in range(len(self.powers))):
                return n
        return self.level

    def cylinder_permutation(self, n: int | None = None) -> list:
        n = self.level if n is None else n
        q = self.k ** n
        return [(i + c) % q for i, c in enumerate(self.at_level(n))]

    @cached_property
    def _inverse(self) -> "FullGroupElement":
        return full_group_certify(invert(self.map))

    def inverse(self) -> "FullGroupElement":
        return self._inverse

    @classmethod
    def from_powers(cls, k: int, level: int, powers: Sequence[int]) -> "FullGroupElement":
        q = k ** level
        powers = tuple(int(c) for c in powers)
        if len(powers) != q:
            raise ValueError(f"need {q} powers, got {len(powers)}")
        if sorted((i + c) % q for i, c in enumerate(powers)) != list(range(q)):
            raise NotInFullGroup("power table does not induce a cylinder permutation")
        pairs = []
        for i, c in enumerate(powers):
            carry, low = divmod(i + c, q)
            pairs.append((digits(i, level, k), digits(low, level, k), carry))
        # the cylinder permutation check above already makes both sides complete codes
        return cls(AdicMap(k, pairs, check=False), level, powers)

    def power(self, m: int) -> "FullGroupElement":
        """S^m computed on the power table at this element's level."""
        q = self.k ** self.level
        perm = self.cylinder_permutation()
        base = list(self.powers)
        if m < 0:
            inv = [0] * q
            for i, j in enumerate(perm):
                inv[j] = i
            base = [-base[inv[j]] for j in range(q)]
            perm, m = inv, -m
        acc, acc_perm = [0] * q, list(range(q))
        while m:
            if m & 1:
                # acc <- base ∘ acc
                acc = [acc[i] + base[acc_perm[i]] for i in range(q)]
                acc_perm = [perm[acc_perm[i]] for i in range(q)]
            m >>= 1
            if m:
                base = [base[i] + base[perm[i]] for i in range(q)]
                perm = [perm[perm[i]] for i in range(q)]
        return FullGroupElement.from_powers(self.k, self.level, acc)

    def is_identity(self) -> bool:
        return not any(self.powers)


def pair_power(pair: Pair, k: int) -> int:
    """The unique c with T^c(u·y) = v·T^t(y), assuming |u| = |v|."""
    u, v, t = pair
    return value(v, k) + t * k ** len(u) - value(u, k)


def full_group_certify(s: AdicMap) -> FullGroupElement:
    k = s.k
    for p in s.pairs:
        if len(p[0]) != len(p[1]):
            raise NotInFullGroup(
                f"pair ({word_str(p[0])}→{word_str(p[1])},{p[2]}) changes the prefix length", p
            )
    level = max(1, max(len(p[0]) for p in s.pairs))
    powers = []
    for w in all_words(k, level):
        p = s._lookup.covering(w)
        powers.append(pair_power(p, k))
    q = k ** level
    if sorted((i + c) % q for i, c in enumerate(powers)) != list(range(q)):
        raise NotInFullGroup("cylinder map is not a permutation")
    return FullGroupElement(s, level, tuple(powers))


@dataclass(frozen=True)
class CanonicalPartition:
    periodic_parts: dict  # period -> ClopenSet
    aperiodic_part: ClopenSet

    def parts(self) -> list:
        return [self.periodic_parts[n] for n in sorted(self.periodic_parts)] + [self.aperiodic_part]


def cylinder_cycles(s: FullGroupElement, n: int | None = None) -> list:
    """Cycles of the depth-n cylinder permutation with their total displacement.

    Returns a list of (values, displacement) with values starting at the
    smallest member of the cycle.
    """
    n = s.level if n is None else n
    perm = s.cylinder_permutation(n)
    powers = s.at_level(n)
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc, i, total = [], start, 0
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            total += powers[i]
            i = perm[i]
        out.append((tuple(cyc), total))
    return out


def periodicity(s: FullGroupElement):
    """Canonical partition of S and its order (None if S has aperiodic points)."""
    k, n = s.k, s.level
    periodic: dict = {}
    aperiodic = []
    for cyc, total in cylinder_cycles(s):
        words = [digits(i, n, k) for i in cyc]
        if total == 0:
            periodic.setdefault(len(cyc), []).extend(words)
        else:
            aperiodic.extend(words)
    parts = {p: ClopenSet(k, ws) for p, ws in sorted(periodic.items())}
    partition = CanonicalPartition(parts, ClopenSet(k, aperiodic))
    order = None
    if not aperiodic:
        order = lcm(*parts) if parts else 1
    return partition, order


def pointwise_fixed_region(s: AdicMap) -> ClopenSet:
    return ClopenSet(s.k, [u for u, v, t in s.pairs if u == v and t == 0])


def is_topologically_free_to_depth(s: AdicMap, depth: int, max_period: int) -> bool:
    """No depth-``depth`` cylinder is pointwise fixed by S^q for 1 <= q <= max_period."""
    if depth < 1 or max_period < 1:
        raise ValueError("depth and max_period must be positive")
    sq = identity(s.k)
    for _ in range(max_period):
        sq = compose(s, sq)
        fixed = pointwise_fixed_region(sq)
        if any(len(w) <= depth for w in fixed.words):
            return False
    return True
