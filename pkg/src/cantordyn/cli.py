"""Batch command-line front end.

Exit codes: 0 success (and, where an epsilon is given, every distance below
it), 1 unreadable or malformed input, 2 a contract violation such as an
uncertifiable element or an atomic measure in gammaY mode, 3 a computed
distance that is not below the requested epsilon.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

from . import approx, homeo, serialize as ser, towers
from .errors import CantorDynError
from .words import ClopenSet, parse_word


class InputError(Exception):
    pass


@contextmanager
def parsing(what: str):
    try:
        yield
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{what}: {exc}") from exc


def _read_json(path: str):
    with parsing(f"reading {path}"):
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        text = text.strip()
        if text and text[0] not in "{[\"":
            return text  # a bare map name such as T or swap
        return json.loads(text)


def _load_map(path: str) -> homeo.AdicMap:
    doc = _read_json(path)
    with parsing(f"decoding map in {path}"):
        return ser.load_map(doc)


def _measures(args) -> list:
    with parsing("decoding --measure"):
        ms = [ser.parse_measure(m, args.k) for m in (args.measure or [])]
    if not ms:
        raise InputError("at least one --measure is required")
    return ms


def _eps(args):
    with parsing("decoding --eps"):
        return ser.unrat(args.eps)


def _words(text: str) -> list:
    with parsing("decoding word list"):
        return [parse_word(w.strip()) for w in text.split(",") if w.strip() != ""] if text else []


# --------------------------------------------------------------------------
# commands; each returns (document, exit code)


def cmd_approximate(args):
    s = _load_map(args.input)
    ms, eps = _measures(args), _eps(args)
    el = homeo.full_group_certify(s)
    if args.mode == "gammaY":
        res = approx.gamma_Y_approximation(el, ms, eps)
    else:
        res = approx.periodic_approximation(el, ms, eps)
    doc = {
        "mode": args.mode,
        "eps": ser.rat(eps),
        "element": ser.element_to_json(res.element),
        "map": ser.map_to_json(res.element.map),
        "level": res.level,
        "base": "".join(map(str, res.base)),
        "order": res.order,
        "changed": ser.clopen_to_json(res.changed),
        "distances": [ser.rat(d) for d in res.distances],
    }
    if args.mode == "gammaY":
        doc["gammaY"] = towers.gamma_Y_member(res.element)
    return doc, 0 if all(d < eps for d in res.distances) else 3


def cmd_distance(args):
    a, b = _load_map(args.a), _load_map(args.b)
    ms = _measures(args) if args.measure else []
    dis = homeo.disagreement(a, b)
    tau = homeo.tau_distance(ms, a, b)
    doc = {
        "tau": [ser.rat(d) for d in tau],
        "sup": ser.rat(homeo.sup_distance(a, b)),
        "disagreement": ser.clopen_to_json(dis.core),
        "exceptions": [
            {"point": ser.point_to_json(x), "tag": tag} for tag, x in sorted(dis.exceptions, key=repr)
        ],
    }
    code = 0
    if args.eps is not None:
        eps = _eps(args)
        code = 0 if all(d < eps for d in tau) else 3
    return doc, code


def cmd_tower(args):
    if args.canonical is not None:
        p = towers.canonical_sequence(args.canonical, args.k)
    else:
        words = _words(args.base)
        if args.base is not None and args.base.strip() in ("ε", "e"):
            words = [()]
        with parsing("decoding --base"):
            base = ClopenSet(args.k, words)
        if base.is_empty():
            raise InputError("empty base")
        p = towers.kr_partition(base)
    alpha = towers.alpha_structure(p)
    doc = {
        "partition": ser.partition_to_json(p),
        "heights": p.heights(),
        "alpha": ser.alpha_to_json(alpha),
        "validate": {k: "pass" if v else "fail" for k, v in p.validate().items()},
    }
    if args.canonical is not None:
        doc["conditions"] = {
            k: "pass" if v else "fail" for k, v in towers.kr_conditions(args.canonical, args.k).items()
        }
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(towers.to_dot(p, alpha))
    return doc, 0


def cmd_gamma(args):
    s = _load_map(args.input)
    el = homeo.full_group_certify(s)
    level = towers.exhaustion_level(el) if args.exhaust or args.level is None else args.level
    p = towers.canonical_sequence(level, el.k)
    doc = {
        "level": level,
        "classification": ser.classification_to_json(towers.f_classify(el, p)),
        "member": towers.gamma_member(el, p),
        "gammaY": towers.gamma_Y_member(el),
        "exhaustion_level": towers.exhaustion_level(el),
    }
    return doc, 0


def cmd_conjugate(args):
    target = _load_map(args.input)
    ms, eps = _measures(args), _eps(args)
    res = approx.conjugate_into_neighborhood(target, ms, eps)
    doc = {
        "eps": ser.rat(eps),
        "s_univ": ser.map_to_json(res.s_univ),
        "r": ser.map_to_json(res.r),
        "conjugate": ser.map_to_json(res.conjugate),
        "z": ser.clopen_to_json(res.z),
        "distances": [ser.rat(d) for d in res.distances],
    }
    return doc, 0 if all(d < eps for d in res.distances) else 3


def cmd_perturb(args):
    r = _load_map(args.input)
    ms, eps = _measures(args), _eps(args)
    res = approx.topologically_free_perturbation(r, ms, eps, args.depth, args.max_period)
    doc = {
        "eps": ser.rat(eps),
        "perturbed": ser.map_to_json(res.perturbed),
        "removed": ser.clopen_to_json(res.removed),
        "distances": [ser.rat(d) for d in res.distances],
        "free_to_depth": res.free_to_depth,
        "depth": args.depth,
        "max_period": args.max_period,
    }
    return doc, 0 if all(d < eps for d in res.distances) else 3


def cmd_extend(args):
    with parsing("decoding leaves"):
        a = approx.PrunedTree.from_leaves(args.k, args.depth, _words(args.a))
        b = approx.PrunedTree.from_leaves(args.k, args.depth, _words(args.b))
    h = _load_map(args.h) if args.h else None
    m = approx.kr_matching(a, b, h)
    ext = approx.kr_extension(a, b, h, m)
    w = lambda u: "".join(map(str, u))  # noqa: E731
    doc = {
        "pieces_a": [w(u) for u in m.pieces_a],
        "pieces_b": [w(v) for v in m.pieces_b],
        "anchors_a": [w(u) for u in m.anchors_a],
        "anchors_b": [w(v) for v in m.anchors_b],
        "f": {str(i): j for i, j in m.f.items()},
        "g": {str(j): i for j, i in m.g.items()},
        "valid": m.verify(),
        "extension": ser.map_to_json(ext),
    }
    return doc, 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cantordyn", description="Exact Cantor dynamics workbench")
    ap.add_argument("--timing", action="store_true", help="add wall-clock seconds to the output")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, measures=True, eps=True):
        p.add_argument("--k", type=int, default=2, help="alphabet size")
        if measures:
            p.add_argument("--measure", action="append", help="bernoulli:1/2,1/2 | dirac:1 | JSON")
        if eps == "optional":
            p.add_argument("--eps", default=None, help="rational p/q")
        elif eps:
            p.add_argument("--eps", required=True, help="rational p/q")

    p = sub.add_parser("approximate", help="periodic or Γ_Y approximation")
    p.add_argument("input", help="map JSON file, or - for stdin")
    p.add_argument("--mode", choices=["rokhlin", "gammaY"], default="rokhlin")
    common(p)
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("distance", help="uniform and sup distances between two maps")
    p.add_argument("a")
    p.add_argument("b")
    common(p, eps="optional")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("tower", help="Kakutani-Rokhlin partitions")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--base", help="comma-separated base words (ε for the whole space)")
    g.add_argument("--canonical", type=int, help="level n of the canonical sequence")
    p.add_argument("--dot", help="write a Graphviz file")
    common(p, measures=False, eps=False)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("gamma", help="F-classification and Γ membership")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--level", type=int)
    g.add_argument("--exhaust", action="store_true")
    common(p, measures=False, eps=False)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("conjugate", help="conjugate a fixed periodic map near a target")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("perturb", help="topologically free perturbation of a periodic map")
    p.add_argument("input")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--max-period", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("extend", help="extend a map between finite-resolution closed sets")
    p.add_argument("--a", required=True, help="kept depth-d words of A")
    p.add_argument("--b", required=True, help="kept depth-d words of B")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--h", help="map file for h (identity if omitted)")
    common(p, measures=False, eps=False)
    p.set_defaults(func=cmd_extend)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        doc, code = args.func(args)
    except InputError as exc:
        print(ser.dumps({"error": "InputError", "message": str(exc)}))
        return 1
    except CantorDynError as exc:
        print(ser.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    if args.timing:
        doc["seconds"] = round(time.perf_counter() - started, 6)
    print(ser.dumps(doc))
    return code
