"""Print a K-R partition over a clopen base, its α-linking and a DOT file.

    python scripts/tower_report.py --base 00,010,011 --dot towers.dot
"""
import argparse

from cantordyn.towers import alpha_structure, kr_partition, to_dot
from cantordyn.words import ClopenSet, parse_word, word_str


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--base", default="00,10,11")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--dot")
    args = ap.parse_args()
    base = ClopenSet(args.k, [parse_word(w) for w in args.base.split(",")])
    p = kr_partition(base)
    for i, tw in enumerate(p.towers):
        levels = " -> ".join("+".join(word_str(w) for w in lev.sorted_words()) for lev in tw.levels)
        print(f"tower {i}: height {tw.height}: {levels}")
    a = alpha_structure(p)
    print("alpha atoms:", a.alpha)
    print("linking:", a.linking)
    print("checks:", p.validate())
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(to_dot(p, a))


if __name__ == "__main__":
    main()
