"""JSON encoding of domain values.

Rationals are written as "p/q" strings (integers as "n"), words as digit
strings with "" for the empty word.  Every ``*_to_json`` has a matching
``*_from_json`` and the pair round-trips exactly.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .errors import CantorDynError
from .homeo import AdicMap, FullGroupElement, full_group_certify, identity, odometer, prefix_permutation
from .measures import Bernoulli, Dirac, Markov, Measure, Mixture
from .towers import AlphaStructure, FClassification, KRPartition
from .words import ClopenSet, EPPoint, digits, parse_word, word_str


def rat(x) -> str:
    return str(Fraction(x))


def unrat(s) -> Fraction:
    if isinstance(s, float):
        raise CantorDynError("floats are not accepted; write rationals as 'p/q'")
    return Fraction(s)


def word_from_json(s: str):
    if not isinstance(s, str):
        raise CantorDynError(f"word must be a string, got {s!r}")
    return parse_word(s)


# --------------------------------------------------------------------------
# sets and points


def clopen_to_json(c: ClopenSet) -> dict:
    return {"k": c.k, "words": sorted(word_str(w) for w in c.words)}


def clopen_from_json(d: dict) -> ClopenSet:
    return ClopenSet(int(d["k"]), [word_from_json(w) for w in d["words"]])


def point_to_json(x: EPPoint) -> dict:
    return {"pre": word_str(x.pre), "per": word_str(x.per)}


def point_from_json(d: dict) -> EPPoint:
    return EPPoint(word_from_json(d["pre"]), word_from_json(d["per"]))


# --------------------------------------------------------------------------
# maps


def map_to_json(s: AdicMap) -> dict:
    pairs = sorted(s.pairs, key=lambda p: (word_str(p[0]), len(p[0])))
    return {"k": s.k, "pairs": [{"u": word_str(u), "v": word_str(v), "t": t} for u, v, t in pairs]}


def map_from_json(d: dict) -> AdicMap:
    pairs = [(word_from_json(p["u"]), word_from_json(p["v"]), int(p["t"])) for p in d["pairs"]]
    return AdicMap(int(d["k"]), pairs)


def element_to_json(s: FullGroupElement) -> dict:
    return {"k": s.k, "level": s.level, "c": s.power_table()}


def element_from_json(d: dict) -> FullGroupElement:
    k, level = int(d.get("k", 2)), int(d["level"])
    table = {word_from_json(w): int(c) for w, c in d["c"].items()}
    words = [digits(i, level, k) for i in range(k ** level)]
    if set(table) != set(words):
        raise CantorDynError(f"power table must list every word of length {level}")
    return FullGroupElement.from_powers(k, level, [table[w] for w in words])


NAMED = ("T", "odometer", "identity", "swap")


def load_map(doc) -> AdicMap:
    """An AdicMap from a pair table, a power table or a name.

    Names: "T"/"odometer", "identity", "swap" (binary, the prefix swap 0<->1),
    optionally as {"name": ..., "k": ...}.
    """
    if isinstance(doc, str):
        doc = {"name": doc}
    if "name" in doc:
        name, k = doc["name"], int(doc.get("k", 2))
        if name in ("T", "odometer"):
            return odometer(k)
        if name == "identity":
            return identity(k)
        if name == "swap":
            return prefix_permutation(k, {(a,): ((a + 1) % k,) for a in range(k)})
        raise CantorDynError(f"unknown map name {name!r}")
    if "pairs" in doc:
        return map_from_json(doc)
    if "c" in doc:
        return element_from_json(doc).map
    raise CantorDynError("expected 'pairs', 'c' or 'name'")


def load_element(doc) -> FullGroupElement:
    return full_group_certify(load_map(doc))


# --------------------------------------------------------------------------
# measures


def measure_to_json(mu: Measure) -> dict:
    if isinstance(mu, Bernoulli):
        return {"type": "bernoulli", "p": [rat(x) for x in mu.p]}
    if isinstance(mu, Markov):
        return {
            "type": "markov",
            "initial": [rat(x) for x in mu.initial],
            "transition": [[rat(x) for x in row] for row in mu.transition],
        }
    if isinstance(mu, Dirac):
        return {"type": "dirac", "k": mu.k, "atom": point_to_json(mu.atom)}
    if isinstance(mu, Mixture):
        return {
            "type": "mixture",
            "weights": [rat(w) for w in mu.weights],
            "parts": [measure_to_json(m) for m in mu.parts],
        }
    raise TypeError(f"cannot serialise {type(mu).__name__}")


def measure_from_json(d: dict) -> Measure:
    kind = d.get("type")
    if kind == "bernoulli":
        return Bernoulli([unrat(x) for x in d["p"]])
    if kind == "markov":
        return Markov([unrat(x) for x in d["initial"]], [[unrat(x) for x in r] for r in d["transition"]])
    if kind == "dirac":
        return Dirac(point_from_json(d["atom"]), int(d.get("k", 2)))
    if kind == "mixture":
        return Mixture([unrat(w) for w in d["weights"]], [measure_from_json(m) for m in d["parts"]])
    raise CantorDynError(f"unknown measure type {kind!r}")


def parse_measure(text: str, k: int = 2) -> Measure:
    """Short CLI form or inline JSON.

    bernoulli:1/2,1/2   dirac:1 (the point 1^∞)   dirac:01:1 (pre 01, period 1)
    """
    text = text.strip()
    if text.startswith("{"):
        return measure_from_json(json.loads(text))
    kind, _, rest = text.partition(":")
    if kind == "bernoulli":
        return Bernoulli([unrat(x) for x in rest.split(",")])
    if kind == "dirac":
        parts = rest.split(":")
        pre, per = (parts[0], parts[1]) if len(parts) == 2 else ("", parts[0])
        return Dirac(EPPoint(parse_word(pre), parse_word(per)), k)
    raise CantorDynError(f"cannot parse measure {text!r}")


# --------------------------------------------------------------------------
# towers


def partition_to_json(p: KRPartition) -> dict:
    return {
        "k": p.k,
        "towers": [
            {"base": sorted(word_str(w) for w in tw.base.words), "height": tw.height}
            for tw in p.towers
        ],
    }


def partition_from_json(d: dict) -> KRPartition:
    from .towers import Tower

    k = int(d["k"])
    towers = [Tower.over(ClopenSet(k, [word_from_json(w) for w in t["base"]]), int(t["height"])) for t in d["towers"]]
    return KRPartition(k, towers)


def alpha_to_json(a: AlphaStructure) -> dict:
    return {
        "alpha": [list(j) for j in a.alpha],
        "alpha_prime": [list(j) for j in a.alpha_prime],
        "linking": [[list(j), list(jp)] for j, jp in sorted(a.linking.items())],
    }


def classification_to_json(f: FClassification) -> dict:
    return {
        "atoms": [
            {"level": j, "tower": i, "class": cls, "l": l}
            for (j, i), (cls, l) in sorted(f.table.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ],
        "refined": f.refined,
        "canonical_level": f.level,
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
