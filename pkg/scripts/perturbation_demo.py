"""Perturb a periodic prefix permutation into a topologically free map.

    python scripts/perturbation_demo.py --cycle 0,1,2,3 --depth 2 --eps 1/16
"""
import argparse
from fractions import Fraction

from cantordyn.approx import topologically_free_perturbation
from cantordyn.homeo import prefix_permutation
from cantordyn.measures import Bernoulli
from cantordyn.words import all_words, digits, word_str


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cycle", default="0,1", help="values of the depth-d cylinders to cycle")
    ap.add_argument("--depth", type=int, default=1, help="depth of the permutation")
    ap.add_argument("--eps", default="1/16")
    ap.add_argument("--check-depth", type=int, default=8)
    ap.add_argument("--max-period", type=int, default=8)
    args = ap.parse_args()
    cycle = [int(v) for v in args.cycle.split(",")]
    table = {w: w for w in all_words(2, args.depth)}
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        table[digits(a, args.depth, 2)] = digits(b, args.depth, 2)
    r = prefix_permutation(2, table)
    mu = Bernoulli([Fraction(1, 2)] * 2)
    res = topologically_free_perturbation(r, [mu], Fraction(args.eps), args.check_depth, args.max_period)
    print("R pairs:", len(r.pairs), " T* pairs:", len(res.perturbed.pairs))
    print("removed cylinders:", len(res.removed), " mu(E) =", res.distances[0])
    print("free to depth", args.check_depth, "with periods <=", args.max_period, ":", res.free_to_depth)
    shallow = sorted(res.removed.words, key=len)[:6]
    print("shallowest removed:", ", ".join(word_str(w) for w in shallow))


if __name__ == "__main__":
    main()
