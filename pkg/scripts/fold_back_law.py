"""Tabulate the Γ_Y fold-back of the odometer against the target epsilon.

    python scripts/fold_back_law.py --max-m 12
"""
import argparse
from fractions import Fraction

from cantordyn.approx import boundary_zone, gamma_Y_approximation
from cantordyn.homeo import disagreement, full_group_certify, odometer
from cantordyn.measures import Bernoulli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-m", type=int, default=10)
    ap.add_argument("--p", default="1/2", help="weight of symbol 0")
    args = ap.parse_args()
    p0 = Fraction(args.p)
    mu = Bernoulli([p0, 1 - p0])
    t = full_group_certify(odometer(2))
    print(f"{'m':>3} {'eps':>8} {'n':>3} {'mu(E)':>14} in-zone")
    for m in range(1, args.max_m + 1):
        eps = Fraction(1, 2 ** m)
        r = gamma_Y_approximation(t, [mu], eps)
        d = disagreement(r.element.map, t.map)
        print(f"{m:>3} {str(eps):>8} {r.level:>3} {str(d.mass(mu)):>14} {d.core.issubset(boundary_zone(1, r.level))}")


if __name__ == "__main__":
    main()
