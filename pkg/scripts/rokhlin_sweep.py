"""Random sweep of the periodic approximation: chosen tower level and order.

    python scripts/rokhlin_sweep.py --samples 200 --seed 1
"""
import argparse
import random
import statistics
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from helpers import DIRAC_ONES, HALF, MARKOV, THIRD, random_element  # noqa: E402

from cantordyn.approx import periodic_approximation  # noqa: E402

SETS = {"half": [HALF], "third+markov": [THIRD, MARKOV], "half+dirac": [HALF, DIRAC_ONES]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--max-level", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    elements = [random_element(rng, max_level=args.max_level) for _ in range(args.samples)]
    for name, ms in SETS.items():
        for eps in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32)):
            start = time.perf_counter()
            levels, worst = Counter(), Fraction(0)
            for s in elements:
                r = periodic_approximation(s, ms, eps)
                levels[r.level] += 1
                worst = max(worst, max(r.distances))
            dt = time.perf_counter() - start
            mean = statistics.mean(lv for lv, c in levels.items() for _ in range(c))
            print(f"{name:>13} eps={str(eps):>5} mean level {mean:5.2f}  worst distance {str(worst):>8}  {dt:5.2f}s")


if __name__ == "__main__":
    main()
