"""Words, cylinders, clopen sets and eventually periodic points.

The Cantor space is modelled as X = {0, ..., k-1}^N.  A word is a tuple of
symbols; coordinate 0 comes first and is the least significant digit for
odometer arithmetic, so ``value((1, 0)) == 1`` and ``value((0, 1)) == 2``.

A clopen set is a finite union of cylinders [w] and is stored as a reduced
antichain of words, which is unique for the set it denotes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Iterable, Iterator

from .errors import AlphabetMismatch

Word = tuple


def parse_word(text: str) -> Word:
    if text in ("", "e", "ε"):
        return ()
    return tuple(int(ch) for ch in text)


def word_str(w: Word) -> str:
    return "".join(str(s) for s in w)


def value(w: Word, k: int) -> int:
    """Integer with base-k digits ``w``, least significant first."""
    v = 0
    for s in reversed(w):
        v = v * k + s
    return v


def digits(n: int, length: int, k: int) -> Word:
    """Inverse of :func:`value` on ``0 <= n < k**length``."""
    out = []
    for _ in range(length):
        n, r = divmod(n, k)
        out.append(r)
    return tuple(out)


def all_words(k: int, length: int) -> Iterator[Word]:
    """Depth-``length`` words in value order."""
    for n in range(k ** length):
        yield digits(n, length, k)


def lcp(a: Word, b: Word) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def is_prefix(a: Word, b: Word) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def comparable(a: Word, b: Word) -> bool:
    return is_prefix(a, b) or is_prefix(b, a)


def _word_key(w: Word):
    return (word_str(w), len(w))


def _extensions_index(words) -> dict:
    """Map each proper prefix p to the words strictly extending p."""
    index: dict = {}
    for w in words:
        for i in range(len(w)):
            index.setdefault(w[:i], []).append(w)
    return index


# --------------------------------------------------------------------------
# clopen sets


def canonical_words(words: Iterable[Word], k: int) -> frozenset:
    """Reduced antichain denoting the same union of cylinders as ``words``."""
    ws = set(tuple(w) for w in words)
    # drop words that have a proper prefix in the set
    anti = set()
    for w in sorted(ws, key=len):
        if not any(w[:i] in anti for i in range(len(w))):
            anti.add(w)
    # merge complete sibling groups bottom-up
    changed = True
    while changed:
        changed = False
        by_parent: dict = {}
        for w in anti:
            if w:
                by_parent.setdefault(w[:-1], []).append(w)
        for parent, kids in by_parent.items():
            if len(kids) == k:
                for c in kids:
                    anti.discard(c)
                anti.add(parent)
                changed = True
    return frozenset(anti)


@dataclass(frozen=True)
class ClopenSet:
    k: int
    words: frozenset

    def __init__(self, k: int, words: Iterable[Word] = ()):
        if k < 2:
            raise ValueError("alphabet needs k >= 2")
        ws = [tuple(w) for w in words]
        for w in ws:
            if any(not (0 <= s < k) for s in w):
                raise ValueError(f"word {w} is not over a {k}-letter alphabet")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "words", canonical_words(ws, k))

    @classmethod
    def whole(cls, k: int) -> "ClopenSet":
        return cls(k, [()])

    @classmethod
    def empty(cls, k: int) -> "ClopenSet":
        return cls(k, [])

    @classmethod
    def cylinder(cls, w: Word, k: int) -> "ClopenSet":
        return cls(k, [w])

    def sorted_words(self) -> list:
        return sorted(self.words, key=_word_key)

    def __iter__(self):
        return iter(self.sorted_words())

    def __len__(self):
        return len(self.words)

    def __repr__(self):
        inner = ", ".join(word_str(w) or "ε" for w in self.sorted_words())
        return f"ClopenSet(k={self.k}, {{{inner}}})"

    def is_empty(self) -> bool:
        return not self.words

    def is_whole(self) -> bool:
        return self.words == frozenset([()])

    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def _check(self, other: "ClopenSet"):
        if self.k != other.k:
            raise AlphabetMismatch(f"alphabets differ: {self.k} vs {other.k}")

    def covers_word(self, w: Word) -> bool:
        """True iff [w] is contained in the set."""
        return any(w[:i] in self.words for i in range(len(w) + 1)) or (
            self._splits(w) and all(self.covers_word(w + (a,)) for a in range(self.k))
        )

    def _splits(self, w: Word) -> bool:
        n = len(w)
        return any(len(u) > n and u[:n] == w for u in self.words)

    def meets_word(self, w: Word) -> bool:
        """True iff [w] intersects the set."""
        n = len(w)
        return any(u[: min(n, len(u))] == w[: min(n, len(u))] for u in self.words)

    def union(self, other: "ClopenSet") -> "ClopenSet":
        self._check(other)
        return ClopenSet(self.k, self.words | other.words)

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        self._check(other)
        if len(self.words) > len(other.words):
            self, other = other, self
        below = _extensions_index(other.words)
        out = []
        for a in self.words:
            if any(a[:i] in other.words for i in range(len(a) + 1)):
                out.append(a)
            else:
                out.extend(below.get(a, ()))
        return ClopenSet(self.k, out)

    def complement(self) -> "ClopenSet":
        k = self.k
        words = self.words
        prefixes = {w[:i] for w in words for i in range(len(w))}
        out = []

        def walk(w):
            if w in words:
                return
            if w not in prefixes:
                out.append(w)
                return
            for a in range(k):
                walk(w + (a,))

        walk(())
        return ClopenSet(k, out)

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        return self.intersect(other.complement())

    def issubset(self, other: "ClopenSet") -> bool:
        self._check(other)
        return all(other.covers_word(w) for w in self.words)

    def isdisjoint(self, other: "ClopenSet") -> bool:
        return self.intersect(other).is_empty()

    def equals(self, other: "ClopenSet") -> bool:
        self._check(other)
        return self.words == other.words

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def refine(self, depth: int) -> list:
        """All depth-``depth`` words whose cylinder lies in the set (value order).

        Words of the set deeper than ``depth`` are returned unrefined.
        """
        out = []
        for w in self.words:
            if len(w) >= depth:
                out.append(w)
            else:
                for tail in product(range(self.k), repeat=depth - len(w)):
                    out.append(w + tail)
        return sorted(out, key=lambda w: (len(w), value(w, self.k)))

    def contains(self, x: "EPPoint") -> bool:
        return any(x.prefix(len(w)) == w for w in self.words)

    __contains__ = contains


# --------------------------------------------------------------------------
# eventually periodic points


def _primitive(per: Word) -> Word:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per[:d] * (n // d) == per:
            return per[:d]
    return per


@dataclass(frozen=True)
class EPPoint:
    """The point pre·per·per·per··· in canonical form."""

    pre: Word
    per: Word

    def __init__(self, pre: Iterable[int] = (), per: Iterable[int] = (0,)):
        pre = tuple(pre)
        per = _primitive(tuple(per))
        if not per:
            raise ValueError("period word must be nonempty")
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    def __repr__(self):
        return f"EPPoint({word_str(self.pre)}({word_str(self.per)}))"

    def digit(self, i: int) -> int:
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def prefix(self, n: int) -> Word:
        if n <= len(self.pre):
            return self.pre[:n]
        return self.pre + tuple(self.digit(i) for i in range(len(self.pre), n))

    def shift(self, n: int) -> "EPPoint":
        """The tail obtained by dropping the first ``n`` digits."""
        if n <= len(self.pre):
            return EPPoint(self.pre[n:], self.per)
        r = (n - len(self.pre)) % len(self.per)
        return EPPoint((), self.per[r:] + self.per[:r])

    def prepend(self, w: Word) -> "EPPoint":
        return EPPoint(tuple(w) + self.pre, self.per)

    def as_adic(self, k: int) -> Fraction:
        """The k-adic integer this point denotes, as a rational number."""
        head = value(self.pre, k)
        q = k ** len(self.per)
        return head + Fraction(k ** len(self.pre) * value(self.per, k), 1 - q)


def _carry_up(per: Word, k: int) -> EPPoint:
    """per^∞ + 1 in the k-adic integers."""
    for i, s in enumerate(per):
        if s < k - 1:
            return EPPoint((0,) * i + (s + 1,) + per[i + 1:], per)
    return EPPoint((), (0,))


def _borrow_down(per: Word, k: int) -> EPPoint:
    """per^∞ - 1 in the k-adic integers."""
    for i, s in enumerate(per):
        if s > 0:
            return EPPoint((k - 1,) * i + (s - 1,) + per[i + 1:], per)
    return EPPoint((), (k - 1,))


def odometer_add(x: EPPoint, t: int, k: int) -> EPPoint:
    """T^t x, where T is the k-adic odometer (add one with carry)."""
    if t == 0:
        return x
    m = 1
    while k ** m <= abs(t):
        m += 1
    length = len(x.pre) + m
    carry, low = divmod(value(x.prefix(length), k) + t, k ** length)
    tail = x.shift(length)  # purely periodic
    if carry == 1:
        tail = _carry_up(tail.per, k)
    elif carry == -1:
        tail = _borrow_down(tail.per, k)
    return tail.prepend(digits(low, length, k))


def periodic_adic(num: int, period_len: int, k: int) -> EPPoint:
    """The k-adic expansion of num / (1 - k**period_len)."""
    q = k ** period_len - 1
    a0 = num % q
    shift = -((num - a0) // q)
    # num/(1-k^L) = shift + a0/(1-k^L), and a0/(1-k^L) = digits(a0)^∞
    base = EPPoint((), digits(a0, period_len, k))
    return odometer_add(base, shift, k)


def lcp_points(x: EPPoint, y: EPPoint) -> int | None:
    """Length of the longest common prefix, None when x == y."""
    if x == y:
        return None
    lx, ly = len(x.per), len(y.per)
    bound = max(len(x.pre), len(y.pre)) + lx * ly // gcd(lx, ly)
    for i in range(bound + 1):
        if x.digit(i) != y.digit(i):
            return i
    raise AssertionError("distinct canonical points agree beyond their joint period")


def lcp_distance(x: EPPoint, y: EPPoint) -> Fraction:
    m = lcp_points(x, y)
    return Fraction(0) if m is None else Fraction(1, 2 ** m)
