"""Constructive approximation in the uniform topology.

* :func:`periodic_approximation` and :func:`gamma_Y_approximation` fold the
  orbits of a full-group element back at the edges of a single odometer tower.
* :func:`conjugate_into_neighborhood` conjugates a fixed periodic map close to
  a periodic target.
* :func:`kr_matching` / :func:`kr_extension` extend a map between closed
  nowhere dense sets (at a finite resolution) to the whole space.
* :func:`topologically_free_perturbation` uses the extension machinery to
  break the periodicity of a periodic map off a small set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

from . import config
from .errors import (
    AtomicMeasure,
    BudgetUnreachable,
    CantorDynError,
    ConstraintUnsatisfiable,
    EmptyComplement,
    NoStrictMatch,
    NotPeriodic,
)
from .homeo import (
    AdicMap,
    DisagreementSet,
    FullGroupElement,
    compose,
    compose_pairs,
    cylinder_cycles,
    disagreement,
    full_group_certify,
    identity,
    image_clopen,
    invert,
    is_topologically_free_to_depth,
    odometer,
    periodicity,
    power,
    restrict_pairs,
)
from .measures import Measure
from .words import (
    ClopenSet,
    EPPoint,
    Word,
    digits,
    lcp,
    lcp_points,
    odometer_add,
    value,
    word_str,
)


def _as_fraction(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise CantorDynError("epsilon must be positive")
    return eps


def _cylinder_mass(mu: Measure, values: Sequence[int], n: int, k: int) -> Fraction:
    return sum((mu.cylinder(digits(v, n, k)) for v in values), Fraction(0))


# --------------------------------------------------------------------------
# fold-back at the edges of a tower


def fold(k: int, n: int, powers: Sequence[int], base: int = 0, keep=frozenset()):
    """Fold the cylinder dynamics at level n into the tower over [digits(base)].

    Level j of the tower is the cylinder with value base + j (mod k^n).  Moves
    that stay inside the tower are kept; a chain of such moves ending at a
    move over the top or through the bottom is closed up by sending its last
    cylinder back to its first.  Values in ``keep`` are left untouched.

    Returns the new power list and the sorted values that changed.
    """
    h = k ** n
    level = [(v - base) % h for v in range(h)]
    succ = {}
    for v in range(h):
        if v in keep:
            continue
        j = level[v]
        if 0 <= j + powers[v] <= h - 1:
            succ[v] = (v + powers[v]) % h
    has_pred = set(succ.values())
    new = list(powers)
    changed = []
    for v in range(h):
        if v in keep or v in has_pred:
            continue
        # v starts a maximal chain of inside moves (cycles have no start)
        end = v
        while end in succ:
            end = succ[end]
        new[end] = level[v] - level[end]
        changed.append(end)
    return new, sorted(changed)


def fold_back(n: int, k: int = 2) -> FullGroupElement:
    """S_fold(n): the odometer with its top level [(k-1)^n] sent back to the base."""
    powers, _ = fold(k, n, [1] * k ** n)
    return FullGroupElement.from_powers(k, n, powers)


@dataclass(frozen=True)
class Approximation:
    element: FullGroupElement
    level: int
    base: Word
    distances: tuple
    changed: ClopenSet  # E(result, input)
    order: int | None = None


def _atom_bases(measures: Sequence[Measure], n: int, k: int) -> list:
    """Base values placing each known atom in the middle of the tower."""
    h = k ** n
    out = []
    for mu in measures:
        for a in mu.atoms():
            out.append((value(a.prefix(n), k) - h // 2) % h)
    return out


def _candidate_bases(measures, n, k, cap=32):
    seen, out = set(), []
    atoms = _atom_bases(measures, n, k)
    pool = [0] + atoms + (list(range(1, min(k ** n, cap))) if atoms else [])
    for b in pool:
        if b not in seen:
            seen.add(b)
            out.append(b)
    return out


def periodic_approximation(s: FullGroupElement, measures: Sequence[Measure], eps) -> Approximation:
    """A periodic P ∈ [[T]] with mu(E(P, S)) < eps for every supplied measure.

    Periodic points of S are left alone; on the aperiodic part the orbits are
    folded at the edges of a tower of height k^n, with n and the tower base
    chosen so that every measure of the changed region is below eps.
    """
    eps = _as_fraction(eps)
    k = s.k
    for n in range(max(1, s.level), config.max_depth() + 1):
        powers = s.at_level(n)
        keep = frozenset(v for cyc, total in cylinder_cycles(s, n) if total == 0 for v in cyc)
        for b in _candidate_bases(measures, n, k):
            new, changed = fold(k, n, powers, b, keep)
            dist = tuple(_cylinder_mass(mu, changed, n, k) for mu in measures)
            if all(d < eps for d in dist):
                p = FullGroupElement.from_powers(k, n, new)
                _, order = periodicity(p)
                if order is None:
                    raise AssertionError("fold left aperiodic points behind")
                e = ClopenSet(k, [digits(v, n, k) for v in changed])
                return Approximation(p, n, digits(b, n, k), dist, e, order)
    raise BudgetUnreachable(f"no tower up to depth {config.max_depth()} meets eps={eps}")


def gamma_Y_approximation(r: FullGroupElement, measures: Sequence[Measure], eps) -> Approximation:
    """An element of Γ_Y within eps of R for continuous measures.

    Raises :class:`AtomicMeasure` when a measure has atoms: Γ_Y is not dense
    for those neighbourhoods.
    """
    eps = _as_fraction(eps)
    for mu in measures:
        if not mu.is_continuous():
            raise AtomicMeasure(f"{mu!r} is not continuous")
    k = r.k
    k0 = r.max_power()
    n = max(1, r.level)
    while k0 >= 2 * k ** n:
        n += 1
    for n in range(n, config.max_depth() + 1):
        new, changed = fold(k, n, r.at_level(n))
        dist = tuple(_cylinder_mass(mu, changed, n, k) for mu in measures)
        if all(d < eps for d in dist):
            s = FullGroupElement.from_powers(k, n, new)
            e = ClopenSet(k, [digits(v, n, k) for v in changed])
            return Approximation(s, n, (0,) * n, dist, e, periodicity(s)[1])
    raise BudgetUnreachable(f"no level up to {config.max_depth()} meets eps={eps}")


def boundary_zone(k0: int, n: int, k: int = 2) -> ClopenSet:
    """∪_{|i| <= k0} T^i [0^n]."""
    h = k ** n
    return ClopenSet(k, [digits(i % h, n, k) for i in range(-k0, k0 + 1)])


# --------------------------------------------------------------------------
# the Dirac obstruction


@dataclass(frozen=True)
class ObstructionCertificate:
    n: int
    k: int
    z: EPPoint
    tz: EPPoint
    top_level: Word
    base_level: Word
    witnesses: tuple  # (l, S z, cylinder around S z, cylinder around T z)
    enumerated: dict  # level m -> number of all-In elements checked
    passed: bool


def dirac_obstruction_check(n: int, k: int = 2, enumerate_up_to: int = 2) -> ObstructionCertificate:
    """Certify that no all-In element on P_n agrees with T at z = (k-1)^∞.

    z sits in the top level of P_n, so an all-In element acts there as T^l with
    -(h-1) <= l <= 0.  For each such l a pair of disjoint cylinders separates
    T^l z from T z.  Independently, every all-In element at levels up to
    ``enumerate_up_to`` is built and evaluated at z.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    h = k ** n
    z = EPPoint((), (k - 1,))
    t = odometer(k)
    tz = t(z)
    top, bottom = (k - 1,) * n, (0,) * n
    ok = z.prefix(n) == top and tz.prefix(n) == bottom
    witnesses = []
    for l in range(-(h - 1), 1):
        sz = odometer_add(z, l, k)
        m = lcp_points(sz, tz)
        if m is None:
            ok = False
            continue
        a, b = ClopenSet.cylinder(sz.prefix(m + 1), k), ClopenSet.cylinder(tz.prefix(m + 1), k)
        ok = ok and a.isdisjoint(b) and a.contains(sz) and b.contains(tz)
        witnesses.append((l, sz, sz.prefix(m + 1), tz.prefix(m + 1)))
    enumerated = {}
    for m in range(1, enumerate_up_to + 1):
        hm = k ** m
        count = 0
        for perm in permutations(range(hm)):
            s = FullGroupElement.from_powers(k, m, [perm[j] - j for j in range(hm)])
            count += 1
            if s.map(z) == tz:
                ok = False
        enumerated[m] = count
    return ObstructionCertificate(n, k, z, tz, top, bottom, tuple(witnesses), enumerated, ok)


# --------------------------------------------------------------------------
# code bijections and the Rokhlin-property conjugation


def _order_key(w: Word):
    return word_str(w)


def clopen_code_bijection(a: ClopenSet, b: ClopenSet) -> list:
    """Pairs (u, v, 0) mapping the cylinders of ``a`` onto those of ``b``.

    The whole space is first split into its k top-level cylinders.  The side
    with fewer cylinders then has its shallowest cylinder split until the
    counts agree; cylinders are paired in lexicographic order.
    """
    if a.is_empty() or b.is_empty():
        raise EmptyComplement("both sets must be nonempty")
    k = a.k
    la, lb = sorted(a.refine(1), key=_order_key), sorted(b.refine(1), key=_order_key)
    if (len(la) - len(lb)) % (k - 1):
        raise CantorDynError(
            f"{len(la)} and {len(lb)} cylinders cannot be equalised by {k}-way splits"
        )
    while len(la) != len(lb):
        small = la if len(la) < len(lb) else lb
        i = min(range(len(small)), key=lambda x: (len(small[x]), _order_key(small[x])))
        w = small.pop(i)
        small.extend(w + (s,) for s in range(k))
        small.sort(key=_order_key)
    return [(u, v, 0) for u, v in zip(la, lb)]


@dataclass(frozen=True)
class ConjugationResult:
    s_univ: AdicMap
    r: AdicMap
    conjugate: AdicMap
    z: ClopenSet
    distances: tuple
    disagreement: DisagreementSet


def universal_periodic_map(k: int, periods: Sequence[int]):
    """A prefix permutation with one pure-period region per requested period.

    Region i lives under the prefix (k-1)^i 0 and cycles the first n_i
    cylinders of depth ceil(log_k n_i) below it.  Everything else is fixed.
    Returns (map, bases, leftover): bases[i] is the word of region i's base
    and leftover is the fixed set outside the cycled cylinders.
    """
    pairs, bases, cycled = [], [], []
    for i, n in enumerate(periods):
        pre = (k - 1,) * i + (0,)
        e = 0
        while k ** e < n:
            e += 1
        for j in range(k ** e):
            src = pre + digits(j, e, k)
            dst = pre + digits((j + 1) % n, e, k) if j < n else src
            pairs.append((src, dst, 0))
            if j < n:
                cycled.append(src)
        bases.append(pre + digits(0, e, k))
    tail = (k - 1,) * len(periods)
    pairs.append((tail, tail, 0))
    return AdicMap(k, pairs), bases, ClopenSet(k, cycled).complement()


def _periodic_classes(target: FullGroupElement) -> dict:
    """period -> (words of a base Y^0, ...) from the zero-sum cylinder cycles."""
    k, n = target.k, target.level
    classes: dict = {}
    for cyc, total in cylinder_cycles(target):
        if total != 0:
            raise NotPeriodic("target has aperiodic points")
        classes.setdefault(len(cyc), []).append(digits(cyc[0], n, k))
    return classes


def _invariant_small_set(target: FullGroupElement, classes: dict, measures, eps) -> ClopenSet:
    k, lev = target.k, target.level
    for depth in range(lev + 1, config.max_depth() + 1):
        for period in sorted(classes):
            for b in classes[period]:
                for s in range(k):
                    c = ClopenSet.cylinder(b + (s,) * (depth - lev), k)
                    z, cur = c, c
                    for _ in range(period - 1):
                        cur = image_clopen(target.map, cur)
                        z = z | cur
                    if all(mu.eval(z) < eps for mu in measures):
                        return z
    raise BudgetUnreachable("no invariant set small enough below the depth cap")


def conjugate_into_neighborhood(target, measures: Sequence[Measure], eps) -> ConjugationResult:
    """Find R with R S_univ R^-1 within eps of a periodic target.

    ``target`` is a periodic :class:`FullGroupElement` or an :class:`AdicMap`
    that certifies as one (prefix permutations do).
    """
    eps = _as_fraction(eps)
    if isinstance(target, AdicMap):
        target = full_group_certify(target)
    k = target.k
    classes = _periodic_classes(target)
    periods = sorted(classes)
    s_univ, bases, leftover = universal_periodic_map(k, periods)
    z = _invariant_small_set(target, classes, measures, eps)
    pairs = []
    for period, x0 in zip(periods, bases):
        y0 = ClopenSet(k, classes[period]) - z
        if y0.is_empty():
            raise EmptyComplement(f"Y^0 \\ Z is empty for period {period}")
        r_i = clopen_code_bijection(ClopenSet.cylinder(x0, k), y0)
        for j in range(period):
            # S_univ^-j sends the j-th level back onto the base x0
            xj = x0
            for _ in range(j):
                xj = s_univ.image_word(xj)[0]
            back = [(xj, x0, 0)]
            pairs.extend(compose_pairs(power(target.map, j).pairs, compose_pairs(r_i, back, k), k))
    pairs.extend(clopen_code_bijection(leftover, z))
    r = AdicMap(k, pairs)
    conj = compose(r, compose(s_univ, invert(r)))
    dis = disagreement(conj, target.map)
    dist = tuple(dis.mass(mu) for mu in measures)
    return ConjugationResult(s_univ, r, conj, z, dist, dis)


# --------------------------------------------------------------------------
# closed nowhere dense sets at finite resolution


class _HullIndex:
    def __init__(self, hull: ClopenSet):
        self.words = hull.words
        self.prefixes = {w[:i] for w in hull.words for i in range(len(w))}

    def covered(self, w: Word) -> bool:
        return any(w[:i] in self.words for i in range(len(w) + 1))

    def meets(self, w: Word) -> bool:
        return w in self.prefixes or self.covered(w)


@dataclass(frozen=True)
class PrunedTree:
    """A closed set seen at resolution ``depth`` through its clopen hull.

    The kept words are the words of length <= depth whose cylinder meets the
    hull; the removed pieces are the maximal cylinders of domain \\ hull.
    """

    depth: int
    hull: ClopenSet
    domain: ClopenSet

    @classmethod
    def from_leaves(cls, k: int, depth: int, leaves, domain: ClopenSet | None = None):
        leaves = [tuple(w) for w in leaves]
        if any(len(w) != depth for w in leaves):
            raise ValueError("leaves must all have length depth")
        domain = ClopenSet.whole(k) if domain is None else domain
        hull = ClopenSet(k, leaves)
        if not hull.issubset(domain):
            raise ValueError("leaves leave the domain")
        return cls(depth, hull, domain)

    @classmethod
    def around_point(cls, x: EPPoint, depth: int, k: int = 2) -> "PrunedTree":
        return cls.from_leaves(k, depth, [x.prefix(depth)])

    @property
    def k(self) -> int:
        return self.hull.k

    def pieces(self) -> list:
        gaps = self.domain - self.hull
        return sorted(gaps.words, key=lambda w: (len(w), _order_key(w)))

    def kept_words(self, up_to: int | None = None) -> list:
        up_to = self.depth if up_to is None else up_to
        idx = _HullIndex(self.hull)
        out, frontier = [], [()]
        while frontier:
            w = frontier.pop()
            if not idx.meets(w):
                continue
            out.append(w)
            if len(w) < up_to:
                frontier.extend(w + (a,) for a in range(self.k))
        return sorted(out, key=lambda w: (len(w), _order_key(w)))

    def nowhere_dense_to(self, d: int) -> bool:
        """Every kept word of length <= d lies above some removed piece."""
        pieces = self.pieces()
        for w in self.kept_words(min(d, self.depth)):
            if not any(len(u) > len(w) and u[: len(w)] == w for u in pieces):
                return False
        return True

    def anchor(self, u: Word) -> Word:
        """A kept depth-``depth`` word with maximal common prefix with [u]."""
        idx = _HullIndex(self.hull)
        ell = max(i for i in range(len(u)) if idx.meets(u[:i]))
        w = u[:ell]
        while len(w) < self.depth and not idx.covered(w):
            w = next(w + (a,) for a in range(self.k) if w + (a,) != u[: len(w) + 1] and idx.meets(w + (a,)))
        return w + (0,) * (self.depth - len(w))


def _word_map(h, k: int, inverse: bool = False) -> Callable[[Word], Word]:
    if h is None:
        return lambda w: w
    if isinstance(h, AdicMap):
        m = invert(h) if inverse else h
        return lambda w: m.image_word(w)[0]
    table = {tuple(a): tuple(b) for a, b in h.items()}
    if inverse:
        table = {b: a for a, b in table.items()}
    return lambda w: table[w]


@dataclass(frozen=True)
class MatchingCertificate:
    """Pieces of X \\ A and Y \\ B paired by strictly distance-decreasing injections.

    ``f`` is defined on I' and ``g`` on J''; together they pair every piece.
    Distances are stored as exponents m meaning 2^-m.
    """

    pieces_a: tuple
    pieces_b: tuple
    anchors_a: tuple
    anchors_b: tuple
    f: dict  # i -> j on I'
    g: dict  # j -> i on J''
    dist_a: tuple  # lcp(U_i, a_i)
    dist_b: tuple  # lcp(V_j, b_j)
    f_gaps: dict = field(default_factory=dict)  # i -> lcp(V_f(i), h(a_i))
    g_gaps: dict = field(default_factory=dict)  # j -> lcp(U_g(j), h^-1(b_j))

    @property
    def i_prime(self):
        return sorted(self.f)

    @property
    def i_second(self):
        return sorted(self.g.values())

    @property
    def j_prime(self):
        return sorted(self.f.values())

    @property
    def j_second(self):
        return sorted(self.g)

    def verify(self) -> bool:
        nu, nv = len(self.pieces_a), len(self.pieces_b)
        strict_f = all(
            Fraction(1, 2 ** self.f_gaps[i]) < Fraction(1, 2 ** self.dist_a[i]) for i in self.f
        )
        strict_g = all(
            Fraction(1, 2 ** self.g_gaps[j]) < Fraction(1, 2 ** self.dist_b[j]) for j in self.g
        )
        split_i = sorted(self.i_prime + self.i_second) == list(range(nu))
        split_j = sorted(self.j_prime + self.j_second) == list(range(nv))
        return strict_f and strict_g and split_i and split_j


def kr_matching(a: PrunedTree, b: PrunedTree, h=None) -> MatchingCertificate:
    """Pair the removed pieces of A and B with strict distance decrease.

    ``h`` is the map on kept cylinders: None (identity), an AdicMap, or a
    dict between kept depth-d words.  Pieces are processed shallowest first
    and each prefers the shallowest strictly closer partner; augmenting paths
    repair greedy dead ends.
    """
    k = a.k
    if a.hull.is_empty() and b.hull.is_empty():
        return MatchingCertificate((), (), (), (), {}, {}, (), ())
    us, vs = a.pieces(), b.pieces()
    if len(us) != len(vs):
        raise NoStrictMatch(f"{len(us)} pieces against {len(vs)}")
    fwd, back = _word_map(h, k), _word_map(h, k, inverse=True)
    anchors_a = [a.anchor(u) for u in us]
    anchors_b = [b.anchor(v) for v in vs]
    dist_a = [lcp(u, x) for u, x in zip(us, anchors_a)]
    dist_b = [lcp(v, y) for v, y in zip(vs, anchors_b)]
    ha = [fwd(x) for x in anchors_a]
    hb = [back(y) for y in anchors_b]
    # edges i -> j labelled "f" or "g" with the achieved lcp
    adj = []
    for i, u in enumerate(us):
        opts = []
        for j, v in enumerate(vs):
            gf = lcp(v, ha[i])
            gg = lcp(u, hb[j])
            if gf > dist_a[i]:
                opts.append((0, len(v), _order_key(v), j, "f", gf))
            elif gg > dist_b[j]:
                opts.append((1, len(v), _order_key(v), j, "g", gg))
        opts.sort()
        adj.append(opts)
    match_v: dict = {}  # j -> (i, label, gap)

    def augment(i, seen):
        for _, _, _, j, label, gap in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_v or augment(match_v[j][0], seen):
                match_v[j] = (i, label, gap)
                return True
        return False

    for i in range(len(us)):
        if not augment(i, set()):
            raise NoStrictMatch(f"piece [{word_str(us[i])}] has no strictly closer partner")
    f, g, f_gaps, g_gaps = {}, {}, {}, {}
    for j, (i, label, gap) in match_v.items():
        if label == "f":
            f[i], f_gaps[i] = j, gap
        else:
            g[j], g_gaps[j] = i, gap
    return MatchingCertificate(
        tuple(us), tuple(vs), tuple(anchors_a), tuple(anchors_b),
        dict(sorted(f.items())), dict(sorted(g.items())),
        tuple(dist_a), tuple(dist_b), dict(sorted(f_gaps.items())), dict(sorted(g_gaps.items())),
    )


def _kept_pairs(a: PrunedTree, b: PrunedTree, h) -> list:
    k = a.k
    if h is None:
        pairs = [(w, w, 0) for w in a.hull.words]
    elif isinstance(h, AdicMap):
        pairs = restrict_pairs(h.pairs, a.hull, k)
    else:
        pairs = [(tuple(x), tuple(y), 0) for x, y in h.items()]
    if not ClopenSet(k, [v for _, v, _ in pairs]).equals(b.hull):
        raise CantorDynError("h does not map the hull of A onto the hull of B")
    return pairs


def extension_pairs(a: PrunedTree, b: PrunedTree, h, matching: MatchingCertificate, twist: int = 0) -> list:
    pairs = _kept_pairs(a, b, h) if not a.hull.is_empty() else []
    for i, j in matching.f.items():
        pairs.append((matching.pieces_a[i], matching.pieces_b[j], twist))
    for j, i in matching.g.items():
        pairs.append((matching.pieces_a[i], matching.pieces_b[j], twist))
    return pairs


def kr_extension(a: PrunedTree, b: PrunedTree, h, matching: MatchingCertificate) -> AdicMap:
    """The homeomorphism h* of the whole space extending h across the pieces."""
    k = a.k
    if not (a.domain.is_whole() and b.domain.is_whole()):
        raise CantorDynError("kr_extension builds total maps; use extension_pairs for fragments")
    if a.hull.is_empty() and b.hull.is_empty():
        return identity(k)
    return AdicMap(k, extension_pairs(a, b, h, matching))


# --------------------------------------------------------------------------
# topologically free perturbation


@dataclass(frozen=True)
class PerturbationResult:
    perturbed: AdicMap
    removed: ClopenSet  # R^{p-1}F \ hull(P), summed over period classes
    trees: tuple  # (A, B) per period class
    matchings: tuple
    distances: tuple
    disagreement: DisagreementSet
    free_to_depth: bool


def _comb(node: Word, e: int, k: int) -> list:
    return [node + (0,) * (e + i) + (a,) for i in range(2) for a in range(1, k)]


def topologically_free_perturbation(
    r, measures: Sequence[Measure], eps, depth: int = 8, max_period: int = 8
) -> PerturbationResult:
    """T* equal to R except on a small clopen set, with no periodic cylinder.

    For every period class X_p = F ∪ RF ∪ ... ∪ R^{p-1}F of R, a comb of two
    small cylinders is cut out below every depth-``depth`` cylinder of
    R^{p-1}F.  The rest is the hull of the closed set P.  The pieces are then
    paired by :func:`kr_matching` and mapped onto the pieces of F \\ R(P) with
    a tail twist of one, which makes their orbits aperiodic and different from
    R everywhere.
    """
    eps = _as_fraction(eps)
    if isinstance(r, FullGroupElement):
        r = r.map
    rg = full_group_certify(r)
    k = r.k
    _, order = periodicity(rg)
    if order is None:
        raise NotPeriodic("R must be periodic")
    if depth < rg.level:
        raise ValueError(f"depth must be at least the table level {rg.level}")
    perm = rg.cylinder_permutation()
    pred = {v: u for u, v in enumerate(perm)}
    classes: dict = {}
    for cyc, _ in cylinder_cycles(rg):
        classes.setdefault(len(cyc), []).append(pred[cyc[0]])
    tops = {p: ClopenSet(k, [digits(v, rg.level, k) for v in vs]) for p, vs in sorted(classes.items())}
    top_all = ClopenSet(k, [w for c in tops.values() for w in c.words])
    nodes = top_all.refine(depth)

    chosen = None
    for e in range(0, config.max_depth() + 1):
        removed = ClopenSet(k, [u for node in nodes for u in _comb(node, e, k)])
        if all(mu.eval(removed) < eps for mu in measures):
            chosen = e
            break
    if chosen is None:
        raise ConstraintUnsatisfiable("no comb depth meets the measure budget")
    e = chosen
    tree_depth = depth + e + 2

    pairs = restrict_pairs(r.pairs, top_all.complement(), k) if not top_all.is_whole() else []
    trees, matchings = [], []
    removed_all = ClopenSet.empty(k)
    for p, top in tops.items():
        cut = ClopenSet(k, [u for node in top.refine(depth) for u in _comb(node, e, k)])
        a = PrunedTree(tree_depth, top - cut, top)
        b = PrunedTree(tree_depth, image_clopen(r, a.hull), image_clopen(r, top))
        try:
            m = kr_matching(a, b, r)
        except NoStrictMatch as exc:
            raise ConstraintUnsatisfiable(str(exc)) from exc
        pairs.extend(extension_pairs(a, b, r, m, twist=1))
        trees.append((a, b))
        matchings.append(m)
        removed_all = removed_all | cut
    t_star = AdicMap(k, pairs)
    dis = disagreement(t_star, r)
    dist = tuple(dis.mass(mu) for mu in measures)
    free = is_topologically_free_to_depth(t_star, depth, max_period)
    if not (dis.core.equals(removed_all) and not dis.exceptions and all(d < eps for d in dist) and free):
        raise ConstraintUnsatisfiable("perturbation failed its exact checks")
    return PerturbationResult(t_star, removed_all, tuple(trees), tuple(matchings), dist, dis, free)
