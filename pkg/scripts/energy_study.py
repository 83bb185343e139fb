"""Long-time energy drift of the differential and variational schemes.

    python scripts/energy_study.py --problem harmonic --h 0.01 --t-end 100
"""

import argparse

import numpy as np

from tsembed.lagrangian import get_lagrangian, get_potential
from tsembed.solvers import energy_series, reference_solution, solve_differential_scheme, solve_variational
from tsembed.timescale import make_uniform


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--problem", default="harmonic")
    ap.add_argument("--h", type=float, default=0.01)
    ap.add_argument("--t-end", type=float, default=100.0)
    ap.add_argument("--x0", type=float, default=1.0)
    ap.add_argument("--v0", type=float, default=0.0)
    args = ap.parse_args()

    p, lag = get_potential(args.problem), get_lagrangian(args.problem)
    ts = make_uniform(0.0, args.t_end, int(round(args.t_end / args.h)))
    x1 = float(reference_solution(p, args.x0, args.v0, ts.points[:2]).values[1])
    series = {
        "differential": energy_series(solve_differential_scheme(ts, p, args.x0, x1), lag),
        "variational": energy_series(solve_variational(ts, lag, args.x0, x1), lag),
    }
    windows = np.linspace(0, args.t_end, 6)[1:]
    print("t_end      " + "  ".join(f"{w:>10.1f}" for w in windows))
    for scheme, es in series.items():
        print(f"{scheme:10s} " + "  ".join(f"{es.window_drift(w):10.3e}" for w in windows))
    ratio = series["differential"].drift / series["variational"].drift
    print(f"ratio of final drifts: {ratio:.1f}")


if __name__ == "__main__":
    main()
