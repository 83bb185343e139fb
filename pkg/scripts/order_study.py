"""Global error vs step size for both schemes on every built-in problem.

    python scripts/order_study.py --t-end 1 --out results/order
"""

import argparse
from pathlib import Path

from tsembed import io
from tsembed.lagrangian import POTENTIALS, get_potential
from tsembed.solvers import convergence_order

H_LIST = [0.1, 0.05, 0.025, 0.0125, 0.00625]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--x0", type=float, default=1.0)
    ap.add_argument("--v0", type=float, default=0.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    print(f"{'problem':10s} {'scheme':13s} {'slope':>8s}  errors")
    for name in POTENTIALS:
        for scheme in ("differential", "variational"):
            rep = convergence_order(scheme, get_potential(name), (0.0, args.t_end),
                                    args.x0, args.v0, H_LIST)
            slope = "degen." if rep.degenerate else f"{rep.slope:8.3f}"
            print(f"{name:10s} {scheme:13s} {slope:>8s}  " + " ".join(f"{e:.2e}" for e in rep.errors))
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                io.write_json(out / f"{name}_{scheme}.json", rep.to_dict())
                io.write_columns(out / f"{name}_{scheme}.csv", ["h", "error"], [rep.steps, rep.errors])


if __name__ == "__main__":
    main()
