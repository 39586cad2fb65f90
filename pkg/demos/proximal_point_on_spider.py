"""Proximal point iteration on a three-legged spider.

Minimizes ``f = d(., a)^2 / 2 + d(., b)`` with ``a`` on leg 2 and ``b`` on
leg 3, starting far out on leg 1. Each step applies the resolvent ``J_lam``;
the iterates slide down leg 1, cross the hub and settle at the minimizer.
Each step must decrease ``f`` and move no further than the previous one
(the resolvent is nonexpansive).
"""

import argparse

from hadprox import Distance, DistanceSquared, MetricSpider, ProxParams, distance, prox


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lam", type=float, default=0.5, help="step size")
    p.add_argument("--steps", type=int, default=12)
    args = p.parse_args()

    S = MetricSpider(3)
    f = DistanceSquared(S.point(2, 2.0)) + Distance(S.point(3, 1.0))
    x = S.point(1, 4.0)
    print(f"{'k':>3} {'leg':>4} {'r':>10} {'f':>12} {'step':>10}")
    print(f"{0:3d} {x.coords[0]:4d} {x.coords[1]:10.6f} {f(x):12.8f}")
    for k in range(1, args.steps + 1):
        y = prox(f, x, ProxParams(args.lam)).minimizer
        print(f"{k:3d} {y.coords[0]:4d} {y.coords[1]:10.6f} {f(y):12.8f} {distance(x, y):10.6f}")
        x = y


if __name__ == "__main__":
    main()
