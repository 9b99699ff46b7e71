"""Kakutani-Rokhlin towers for the odometer and the Γ(P) structure of [[T]].

The basic set is Y = {0^∞}.  The canonical partitions P_n are the first-return
partitions over [0^n]: a single tower of height k^n whose j-th level is the
cylinder of the depth-n word with value j.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import RefinementImpossible
from .homeo import (
    AdicMap,
    FullGroupElement,
    image_clopen,
    odometer,
    pair_power,
    power,
)
from .words import ClopenSet, EPPoint, all_words, digits, value, word_str

IN, TOP, BOT = "In", "Top", "Bot"


@dataclass(frozen=True)
class Tower:
    base: ClopenSet
    height: int
    levels: tuple = field(repr=False)

    @classmethod
    def over(cls, base: ClopenSet, height: int) -> "Tower":
        t = odometer(base.k)
        levels = [base]
        for _ in range(height - 1):
            levels.append(image_clopen(t, levels[-1]))
        return cls(base, height, tuple(levels))

    @property
    def top(self) -> ClopenSet:
        return self.levels[-1]


@dataclass(frozen=True)
class KRPartition:
    k: int
    towers: tuple

    def __post_init__(self):
        object.__setattr__(self, "towers", tuple(self.towers))

    def atoms(self):
        """Yield ((j, i), level) over all atoms D_{j,i}."""
        for i, tw in enumerate(self.towers):
            for j, lev in enumerate(tw.levels):
                yield (j, i), lev

    def atom(self, j: int, i: int) -> ClopenSet:
        return self.towers[i].levels[j]

    def base(self) -> ClopenSet:
        out = ClopenSet.empty(self.k)
        for tw in self.towers:
            out = out | tw.base
        return out

    def tops(self) -> ClopenSet:
        out = ClopenSet.empty(self.k)
        for tw in self.towers:
            out = out | tw.top
        return out

    def min_height(self) -> int:
        return min(tw.height for tw in self.towers)

    def heights(self) -> list:
        return [tw.height for tw in self.towers]

    def word_index(self) -> dict | None:
        """word -> (j, i) when every atom is a single cylinder, else None."""
        out = {}
        for addr, lev in self.atoms():
            if len(lev.words) != 1:
                return None
            (w,) = lev.words
            out[w] = addr
        return out

    def locate(self, c: ClopenSet):
        """Address of the atom containing c, or None if c straddles atoms."""
        for addr, lev in self.atoms():
            if c.issubset(lev):
                return addr
        return None

    def validate(self) -> dict:
        """Check the K-R axioms exactly; returns a name -> bool report."""
        t = odometer(self.k)
        covered = ClopenSet.empty(self.k)
        disjoint = True
        total = 0
        for _, lev in self.atoms():
            if not covered.isdisjoint(lev):
                disjoint = False
            covered = covered | lev
            total += 1
        shifts = all(
            image_clopen(t, tw.levels[j]).equals(tw.levels[j + 1])
            for tw in self.towers
            for j in range(tw.height - 1)
        )
        tops = image_clopen(power(t, -1), self.base()).equals(self.tops())
        return {
            "disjoint": disjoint,
            "covers": covered.is_whole(),
            "T_shifts_levels": shifts,
            "preimage_of_base_is_tops": tops,
        }


def kr_partition(base: ClopenSet) -> KRPartition:
    """First-return K-R partition of the odometer over a clopen base.

    The base is refined to its maximal word depth m; each depth-m base
    cylinder starts its own tower, which climbs the cylinder rotation
    value -> value + 1 (mod k^m) until it re-enters the base.
    """
    if base.is_empty():
        raise ValueError("base must be nonempty")
    k = base.k
    m = base.depth()
    q = k ** m
    in_base = sorted(value(w, k) for w in base.refine(m))
    members = set(in_base)
    towers = []
    for b in in_base:
        levels = [b]
        while (levels[-1] + 1) % q not in members:
            levels.append((levels[-1] + 1) % q)
        cyl = tuple(ClopenSet.cylinder(digits(v, m, k), k) for v in levels)
        towers.append(Tower(cyl[0], len(cyl), cyl))
    return KRPartition(k, tuple(towers))


@lru_cache(maxsize=64)
def canonical_sequence(n: int, k: int = 2) -> KRPartition:
    """P_n: the tower over [0^n]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return kr_partition(ClopenSet.cylinder((0,) * n, k))


# --------------------------------------------------------------------------
# the basic set


@dataclass(frozen=True)
class BasicSet:
    k: int = 2

    @property
    def point(self) -> EPPoint:
        return EPPoint((), (0,))

    def neighborhood(self, m: int) -> ClopenSet:
        return ClopenSet.cylinder((0,) * m, self.k)

    def return_time(self, m: int) -> int:
        """Least n > 0 with T^n[0^m] ∩ [0^m] ≠ ∅, by iterating T on cylinders."""
        t = odometer(self.k)
        u = self.neighborhood(m)
        cur = image_clopen(t, u)
        n = 1
        while cur.isdisjoint(u):
            cur = image_clopen(t, cur)
            n += 1
        return n

    def wandering_to_depth(self, m: int) -> bool:
        """T^n[0^m] ∩ [0^m] = ∅ for 0 < n < k^m, and T^(k^m)[0^m] = [0^m]."""
        t = odometer(self.k)
        u = self.neighborhood(m)
        cur = u
        for _ in range(1, self.k ** m):
            cur = image_clopen(t, cur)
            if not cur.isdisjoint(u):
                return False
        return image_clopen(t, cur).equals(u)

    def neighborhood_meets_orbits(self, m: int) -> bool:
        """The T-iterates of [0^m] cover X, so [0^m] meets every orbit."""
        t = odometer(self.k)
        cur = self.neighborhood(m)
        seen = cur
        for _ in range(self.k ** m - 1):
            cur = image_clopen(t, cur)
            seen = seen | cur
        return seen.is_whole()

    def contained_in_all(self, m: int) -> bool:
        return all(self.neighborhood(i).contains(self.point) for i in range(m + 1))


def basic_set(k: int = 2) -> BasicSet:
    return BasicSet(k)


def kr_conditions(n: int, k: int = 2) -> dict:
    """Check conditions (i)-(v) for P_n against P_{n+1} and P_1..P_n."""
    p, nxt = canonical_sequence(n, k), canonical_sequence(n + 1, k)
    idx = p.word_index()
    refines = idx is not None and all(
        any(w[:i] in idx for i in range(len(w) + 1))
        for _, lev in nxt.atoms()
        for w in lev.words
    )
    heights = nxt.min_height() > p.min_height()
    nested = nxt.base().issubset(p.base())
    # (iv) atoms of P_1..P_n cut out every depth-n cylinder
    seq = [canonical_sequence(m, k).word_index() for m in range(1, n + 1)]
    separates = True
    for w in all_words(k, n):
        cut = ClopenSet.whole(k)
        for m, index in enumerate(seq, start=1):
            atom_word = w[:m]
            if atom_word not in index:
                separates = False
            cut = cut & ClopenSet.cylinder(atom_word, k)
        if not cut.equals(ClopenSet.cylinder(w, k)):
            separates = False
    # (v) the bases shrink onto Y = {0^∞}
    inter = ClopenSet.whole(k)
    for m in range(1, n + 1):
        inter = inter & canonical_sequence(m, k).base()
    y = basic_set(k).point
    survivors = [w for w in all_words(k, n) if inter.meets_word(w)]
    shrinks = survivors == [(0,) * n] and inter.contains(y)
    return {
        "i_refines": refines,
        "ii_heights_increase": heights,
        "iii_bases_nested": nested,
        "iv_generates": separates,
        "v_bases_shrink_to_Y": shrinks,
    }


# --------------------------------------------------------------------------
# α / α′ atoms


@dataclass(frozen=True)
class AlphaStructure:
    alpha: tuple  # atoms J as sorted tuples of tower indices
    alpha_prime: tuple
    linking: dict  # J -> J'

    def atom_of(self, i: int) -> tuple:
        return next(j for j in self.alpha if i in j)

    def prime_atom_of(self, i: int) -> tuple:
        return next(j for j in self.alpha_prime if i in j)


def _top_image_bases(p: KRPartition, indices, t: AdicMap) -> tuple:
    img = ClopenSet.empty(p.k)
    for i in indices:
        img = img | image_clopen(t, p.towers[i].top)
    hit = tuple(i for i, tw in enumerate(p.towers) if not tw.base.isdisjoint(img))
    return img, hit


def top_image_is_union_of_bases(p: KRPartition, indices) -> bool:
    t = odometer(p.k)
    img, hit = _top_image_bases(p, indices, t)
    union = ClopenSet.empty(p.k)
    for i in hit:
        union = union | p.towers[i].base
    return union.equals(img)


def alpha_structure(p: KRPartition) -> AlphaStructure:
    t = odometer(p.k)
    tinv = power(t, -1)
    top_img = [image_clopen(t, tw.top) for tw in p.towers]
    base_pre = [image_clopen(tinv, tw.base) for tw in p.towers]
    remaining = set(range(len(p.towers)))
    alpha, alpha_prime, linking = [], [], {}
    while remaining:
        j = {min(remaining)}
        while True:
            jp = {b for b, tw in enumerate(p.towers) for i in j if not tw.base.isdisjoint(top_img[i])}
            j2 = {i for i in range(len(p.towers)) for b in jp if not p.towers[i].top.isdisjoint(base_pre[b])}
            if j2 == j:
                break
            j = j2
        key, val = tuple(sorted(j)), tuple(sorted(jp))
        alpha.append(key)
        alpha_prime.append(val)
        linking[key] = val
        remaining -= j
    return AlphaStructure(tuple(alpha), tuple(sorted(alpha_prime)), linking)


# --------------------------------------------------------------------------
# F-classification and Γ(P)


def _cocycle_values(s: FullGroupElement, c: ClopenSet) -> set:
    look = s.map._lookup
    out = set()
    for w in c.words:
        p = look.covering(w)
        if p is not None:
            out.add(pair_power(p, s.k))
        else:
            out.update(pair_power(look.by_u[u], s.k) for u in look.extending(w))
    return out


class _Cocycle:
    """Fast c-lookup on atoms, with a generic clopen fallback."""

    def __init__(self, s: FullGroupElement):
        self.s = s

    def values(self, atom: ClopenSet) -> set:
        s = self.s
        if len(atom.words) == 1:
            (w,) = atom.words
            if len(w) >= s.level:
                return {s.powers[value(w[: s.level], s.k)]}
        return _cocycle_values(s, atom)


def refinement_report(s: FullGroupElement, p: KRPartition) -> dict:
    """Does P refine E = {E_l}, S(E) = {S E_l}, with all powers inside (-h, h)?"""
    fwd, back = _Cocycle(s), _Cocycle(s.inverse())
    refines_e = all(len(fwd.values(lev)) == 1 for _, lev in p.atoms())
    refines_se = all(len(back.values(lev)) == 1 for _, lev in p.atoms())
    bounded = s.max_power() < p.min_height()
    return {"refines_E": refines_e, "refines_SE": refines_se, "powers_bounded": bounded}


def required_level(s: FullGroupElement) -> int:
    """Least n such that the canonical P_n satisfies the refinement preconditions."""
    inv = s.inverse()
    n = max(1, s.minimal_level(), inv.minimal_level())
    while s.k ** n <= s.max_power():
        n += 1
    return n


@dataclass(frozen=True)
class FClassification:
    partition: KRPartition
    table: dict  # (j, i) -> (class, l)
    refined: bool = False  # True if the input partition was replaced
    level: int | None = None  # canonical level used when refined

    def classes(self) -> set:
        return {c for c, _ in self.table.values()}

    def all_in(self) -> bool:
        return self.classes() <= {IN}


def _classify(s: FullGroupElement, p: KRPartition) -> dict:
    coc = _Cocycle(s)
    table = {}
    for (j, i), lev in p.atoms():
        (l,) = coc.values(lev)
        h = p.towers[i].height
        cls = IN if 0 <= l + j <= h - 1 else (TOP if l + j >= h else BOT)
        table[(j, i)] = (cls, l)
    return table


def f_classify(s: FullGroupElement, p: KRPartition | None = None) -> FClassification:
    """Assign each atom its power l and class In / Top / Bot.

    When ``p`` does not satisfy the refinement preconditions it is replaced by
    the least canonical P_n that does, and the result says so.
    """
    if p is not None and all(refinement_report(s, p).values()):
        return FClassification(p, _classify(s, p))
    n = required_level(s)
    pn = canonical_sequence(n, s.k)
    return FClassification(pn, _classify(s, pn), refined=p is not None, level=n)


def gamma_member(s: FullGroupElement, p: KRPartition) -> bool:
    """Membership of S in Γ(P).

    The preconditions (P refines E and S(E), powers in (-h, h)) are part of
    the membership test: an S violating them is not in Γ(P).
    """
    if not all(refinement_report(s, p).values()):
        return False
    table = _classify(s, p)
    alpha = alpha_structure(p)
    coc = _Cocycle(s)
    for (j, i), (cls, l) in table.items():
        if cls == TOP:
            atom = alpha.atom_of(i)
            h_j = min(p.towers[x].height for x in atom)
            r = h_j - p.towers[i].height + j
            for x in atom:
                lev = p.atom(p.towers[x].height - h_j + r, x)
                if coc.values(lev) != {l}:
                    return False
        elif cls == BOT:
            for x in alpha.prime_atom_of(i):
                if coc.values(p.atom(j, x)) != {l}:
                    return False
    return True


def exhaustion_level(s: FullGroupElement, limit: int = 64) -> int:
    """Least n >= 1 with S ∈ Γ(P_n)."""
    for n in range(1, limit + 1):
        if gamma_member(s, canonical_sequence(n, s.k)):
            return n
    raise RefinementImpossible(f"no level up to {limit} works")


def gamma_Y_member(s: FullGroupElement) -> bool:
    n = exhaustion_level(s)
    return f_classify(s, canonical_sequence(n, s.k)).all_in()


# --------------------------------------------------------------------------
# export


def to_dot(p: KRPartition, alpha: AlphaStructure | None = None) -> str:
    alpha = alpha_structure(p) if alpha is None else alpha
    lines = ["digraph kr {", "  rankdir=BT;", "  node [shape=box];"]

    def name(j, i):
        return f"D_{j}_{i}"

    def label(lev):
        return ",".join(word_str(w) or "ε" for w in lev.sorted_words())

    for i, tw in enumerate(p.towers):
        lines.append(f"  subgraph cluster_{i} {{ label=\"tower {i}\";")
        for j, lev in enumerate(tw.levels):
            lines.append(f"    {name(j, i)} [label=\"{label(lev)}\"];")
        lines.append("  }")
        for j in range(tw.height - 1):
            lines.append(f"  {name(j, i)} -> {name(j + 1, i)};")
    for src, dst in alpha.linking.items():
        for i in src:
            for x in dst:
                top = p.towers[i].height - 1
                lines.append(f"  {name(top, i)} -> {name(0, x)} [style=dashed, color=blue];")
    lines.append("}")
    return "\n".join(lines) + "\n"
