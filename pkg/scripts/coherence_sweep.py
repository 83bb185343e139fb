"""Coherence norms over many random nonuniform scales.

For each seed and problem, a variational trajectory is checked against the
action gradient, the integral residual, and the differential residual.

    python scripts/coherence_sweep.py --seeds 20 --n 50
"""

import argparse

import numpy as np

from tsembed.embeddings import action_gradient, residual_differential, residual_integral
from tsembed.lagrangian import get_lagrangian
from tsembed.solvers import solve_variational
from tsembed.timescale import make_random


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--mu-min", type=float, default=0.01)
    ap.add_argument("--mu-max", type=float, default=0.05)
    args = ap.parse_args()

    print(f"{'problem':10s} {'max grad':>10s} {'max integral':>13s} {'min differential':>17s}")
    for name in ("harmonic", "quartic", "pendulum"):
        lag = get_lagrangian(name)
        grads, ints, diffs = [], [], []
        for seed in range(args.seeds):
            ts = make_random(args.n, args.mu_min, args.mu_max, seed)
            x = solve_variational(ts, lag, 1.0, 1.0 + 0.5 * ts.graininess[0]).x
            grads.append(np.max(np.abs(action_gradient(ts, lag, x).values)))
            ints.append(residual_integral(ts, lag, x).inf_norm)
            diffs.append(residual_differential(ts, lag, x).inf_norm)
        print(f"{name:10s} {max(grads):10.2e} {max(ints):13.2e} {min(diffs):17.2e}")


if __name__ == "__main__":
    main()
