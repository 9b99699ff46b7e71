"""Exact rational probability measures on the Cantor space.

Every measure is evaluated on clopen sets only, cylinder by cylinder, so all
values are exact :class:`fractions.Fraction` instances.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .words import ClopenSet, EPPoint, Word


def _fractions(xs) -> tuple:
    return tuple(Fraction(x) for x in xs)


class Measure:
    k: int

    def cylinder(self, w: Word) -> Fraction:
        raise NotImplementedError

    def point_mass(self, x: EPPoint) -> Fraction:
        raise NotImplementedError

    def is_continuous(self) -> bool:
        raise NotImplementedError

    def eval(self, c: ClopenSet) -> Fraction:
        if c.k != self.k:
            raise ValueError(f"measure on {self.k} letters, set on {c.k}")
        return sum((self.cylinder(w) for w in c.words), Fraction(0))

    def atoms(self) -> list:
        """Known atoms (used to steer constructions away from them)."""
        return []


@dataclass(frozen=True)
class Bernoulli(Measure):
    p: tuple

    def __init__(self, p: Sequence):
        p = _fractions(p)
        if len(p) < 2 or any(x < 0 for x in p) or sum(p) != 1:
            raise ValueError(f"invalid Bernoulli weights {p}")
        object.__setattr__(self, "p", p)

    @property
    def k(self):
        return len(self.p)

    def cylinder(self, w):
        out = Fraction(1)
        for s in w:
            out *= self.p[s]
        return out

    def point_mass(self, x):
        if any(self.p[s] != 1 for s in x.per):
            return Fraction(0)
        return self.cylinder(x.pre)

    def is_continuous(self):
        # atoms exist only when a single symbol carries all the mass
        return all(x < 1 for x in self.p)

    def atoms(self):
        return [EPPoint((), (s,)) for s, x in enumerate(self.p) if x == 1]


@dataclass(frozen=True)
class Markov(Measure):
    initial: tuple
    transition: tuple

    def __init__(self, initial: Sequence, transition: Sequence[Sequence]):
        initial = _fractions(initial)
        transition = tuple(_fractions(row) for row in transition)
        k = len(initial)
        if k < 2 or sum(initial) != 1 or any(x < 0 for x in initial):
            raise ValueError("initial distribution must be a probability vector")
        if len(transition) != k:
            raise ValueError("transition matrix must be k x k")
        for row in transition:
            if len(row) != k or sum(row) != 1 or any(x < 0 for x in row):
                raise ValueError("transition rows must be probability vectors")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "transition", transition)

    @property
    def k(self):
        return len(self.initial)

    def cylinder(self, w):
        if not w:
            return Fraction(1)
        out = self.initial[w[0]]
        for a, b in zip(w, w[1:]):
            if not out:
                break
            out *= self.transition[a][b]
        return out

    def point_mass(self, x):
        per = x.per
        cycle = Fraction(1)
        for a, b in zip(per, per[1:] + per[:1]):
            cycle *= self.transition[a][b]
        if cycle != 1:
            return Fraction(0)
        return self.cylinder(x.pre + per)

    def _reachable(self) -> set:
        seen = {s for s, x in enumerate(self.initial) if x > 0}
        stack = list(seen)
        while stack:
            a = stack.pop()
            for b, x in enumerate(self.transition[a]):
                if x > 0 and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return seen

    def _deterministic_cycles(self) -> list:
        forced = {a: row.index(1) for a, row in enumerate(self.transition) if 1 in row}
        cycles = []
        for start in sorted(self._reachable()):
            path, a = [], start
            while a in forced and a not in path:
                path.append(a)
                a = forced[a]
            if a in path:
                cyc = tuple(path[path.index(a):])
                rot = min(cyc[i:] + cyc[:i] for i in range(len(cyc)))
                if rot not in cycles:
                    cycles.append(rot)
        return cycles

    def is_continuous(self):
        return not self._deterministic_cycles()

    def atoms(self):
        return [EPPoint((), c) for c in self._deterministic_cycles()]


@dataclass(frozen=True)
class Dirac(Measure):
    atom: EPPoint
    k: int = 2

    def cylinder(self, w):
        return Fraction(int(self.atom.prefix(len(w)) == tuple(w)))

    def eval(self, c):
        if c.k != self.k:
            raise ValueError(f"measure on {self.k} letters, set on {c.k}")
        return Fraction(int(c.contains(self.atom)))

    def point_mass(self, x):
        return Fraction(int(x == self.atom))

    def is_continuous(self):
        return False

    def atoms(self):
        return [self.atom]


@dataclass(frozen=True)
class Mixture(Measure):
    weights: tuple
    parts: tuple

    def __init__(self, weights: Sequence, parts: Sequence[Measure]):
        weights = _fractions(weights)
        parts = tuple(parts)
        if len(weights) != len(parts) or not parts:
            raise ValueError("one weight per part required")
        if sum(weights) != 1 or any(w <= 0 for w in weights):
            raise ValueError("mixture weights must be positive and sum to 1")
        if len({m.k for m in parts}) != 1:
            raise ValueError("mixture parts live on different alphabets")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "parts", parts)

    @property
    def k(self):
        return self.parts[0].k

    def cylinder(self, w):
        return sum((a * m.cylinder(w) for a, m in zip(self.weights, self.parts)), Fraction(0))

    def eval(self, c):
        return sum((a * m.eval(c) for a, m in zip(self.weights, self.parts)), Fraction(0))

    def point_mass(self, x):
        return sum((a * m.point_mass(x) for a, m in zip(self.weights, self.parts)), Fraction(0))

    def is_continuous(self):
        return all(m.is_continuous() for m in self.parts)

    def atoms(self):
        out = []
        for m in self.parts:
            out.extend(a for a in m.atoms() if a not in out)
        return out


def is_continuous(mu: Measure) -> bool:
    return mu.is_continuous()
