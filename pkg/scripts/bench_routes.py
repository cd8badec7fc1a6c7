"""Time the inversion routes against each other.

    python scripts/bench_routes.py [--orders 8,16,32,48] [--repeats 3]

Prints CSV (method,order,nanoseconds), keeping the best of ``--repeats`` runs.
Routes are checked for agreement on every run.
"""

import argparse
import csv
import sys
from fractions import Fraction as F

from dvfinv.matrix import bench_methods
from dvfinv.multivariate import PolySystem


def best_of(problem, orders, repeats):
    best = {}
    for _ in range(repeats):
        for method, order, ns in bench_methods(problem, orders):
            key = (method, order)
            best[key] = min(ns, best.get(key, ns))
    return [(m, o, ns) for (m, o), ns in best.items()]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--orders", default="8,16,32")
    parser.add_argument("--system-orders", default="2,4,6")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    writer = csv.writer(sys.stdout)
    writer.writerow(["problem", "method", "order", "nanoseconds"])
    orders = [int(o) for o in args.orders.split(",")]
    for row in best_of([0, -3, 0, 4], orders, args.repeats):
        writer.writerow(["t3", *row])
    system = PolySystem.from_terms([{(1, 0): 1, (0, 2): F(1, 2)}, {(0, 1): 1, (1, 1): -1}])
    sys_orders = [int(o) for o in args.system_orders.split(",")]
    for row in best_of(system, sys_orders, args.repeats):
        writer.writerow(["two-variable", *row])


if __name__ == "__main__":
    main()
