"""Experiment command line: simulate, order, coherence, energy, compare.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 result outside
the acceptance band.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .embeddings import (
    action_gradient,
    residual_differential,
    residual_integral,
    residual_variational_backward,
)
from .lagrangian import get_lagrangian, get_potential
from .solvers import (
    NewtonOptions,
    SolverError,
    Trajectory,
    convergence_order,
    energy_series,
    reference_solution,
    solve_differential_scheme,
    solve_variational,
)
from .timescale import DomainError, GridFunction, TimeScale, make_qscale, make_random, make_uniform

log = logging.getLogger("tsembed")

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_BAND = 0, 1, 2, 3

COMMANDS = ("simulate", "order", "coherence", "energy", "compare")
SCHEMES = ("differential", "variational")

DEFAULT_SCALES = {
    "simulate": "uniform:0,1,100",
    "order": "uniform:0,1,10",
    "coherence": "random:50,0.01,0.05,7",
    "energy": "uniform:0,100,10000",
    "compare": "uniform:0,10,100",
}
ORDER_BANDS = {"differential": (0.85, 1.15), "variational": (1.85, 2.15)}


@dataclass
class ExperimentConfig:
    command: str
    problem: str = "harmonic"
    scale: str | None = None
    scheme: str = "variational"
    x0: float = 1.0
    x1: float | None = None
    v0: float = 0.0
    h_list: list[float] = field(default_factory=lambda: [0.1, 0.05, 0.025, 0.0125])
    tol: float = 1e-12
    coherence_tol: float = 1e-9
    band: tuple[float, float] | None = None
    perturb: float = 0.0
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.scale is None:
            self.scale = DEFAULT_SCALES[self.command]
        get_potential(self.problem)
        if not self.tol > 0 or not self.coherence_tol > 0:
            raise DomainError("tolerances must be positive")

    @property
    def newton(self) -> NewtonOptions:
        return NewtonOptions(tol=self.tol)


def parse_scale(spec: str) -> TimeScale:
    """``uniform:a,b,N | qscale:q,kmin,kmax | random:n,mumin,mumax,seed | file:PATH``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "file":
            return io.load_timescale(rest)
        args = [s.strip() for s in rest.split(",")]
        if kind == "uniform" and len(args) == 3:
            return make_uniform(float(args[0]), float(args[1]), _int(args[2]))
        if kind == "qscale" and len(args) == 3:
            return make_qscale(float(args[0]), _int(args[1]), _int(args[2]))
        if kind == "random" and len(args) == 4:
            return make_random(_int(args[0]), float(args[1]), float(args[2]), _int(args[3]))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad scale spec {spec!r}: {exc}") from None
    raise DomainError(f"bad scale spec {spec!r}")


def _int(s: str) -> int:
    f = float(s)
    if f != int(f):
        raise DomainError(f"expected an integer, got {s}")
    return int(f)


# -- helpers ------------------------------------------------------------------

def _seed_x1(cfg: ExperimentConfig, ts: TimeScale) -> float:
    if cfg.x1 is not None:
        return cfg.x1
    ref = reference_solution(get_potential(cfg.problem), cfg.x0, cfg.v0, ts.points[:2])
    return float(ref.values[1])


def _run(cfg: ExperimentConfig, ts: TimeScale, scheme: str, x1: float) -> Trajectory:
    if scheme == "differential":
        return solve_differential_scheme(ts, get_potential(cfg.problem), cfg.x0, x1)
    return solve_variational(ts, get_lagrangian(cfg.problem), cfg.x0, x1, cfg.newton)


def _require_uniform(ts: TimeScale, what: str) -> None:
    if not ts.is_uniform():
        raise DomainError(f"{what} uses the differential scheme, which requires a uniform scale")


def _residuals(ts, lag, x):
    return {
        "differential": residual_differential(ts, lag, x),
        "variational_backward": residual_variational_backward(ts, lag, x),
        "integral": residual_integral(ts, lag, x),
    }


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_trajectory(path: Path, tr: Trajectory, lag) -> None:
    n = tr.ts.N
    e = energy_series(tr, lag).e
    v = tr.v_forward
    io.write_columns(
        path,
        ["index", "t", "x", "v_forward", "E"],
        [list(range(n + 1)), tr.ts.points, tr.x.values, list(v) + [None], list(e) + [None]],
    )


# -- commands -----------------------------------------------------------------

def cmd_simulate(cfg: ExperimentConfig) -> int:
    ts = parse_scale(cfg.scale)
    if cfg.scheme == "differential":
        _require_uniform(ts, "simulate")
    lag = get_lagrangian(cfg.problem)
    tr = _run(cfg, ts, cfg.scheme, _seed_x1(cfg, ts))
    out = _outdir(cfg)
    _write_trajectory(out / "trajectory.csv", tr, lag)
    res = _residuals(ts, lag, tr.x)
    for kind, r in res.items():
        io.gridfunction_to_csv(out / f"residual_{kind}.csv", ts, r.values)
    grad = action_gradient(ts, lag, tr.x).values
    summary = {
        "command": "simulate",
        "problem": cfg.problem,
        "scheme": cfg.scheme,
        "N": ts.N,
        "seed_data": list(tr.seed_data),
        "residuals": {k: r.summary(ts) for k, r in res.items()},
        "action_gradient_inf_norm": float(np.max(np.abs(grad))),
        "energy_drift": energy_series(tr, lag).drift,
    }
    io.write_json(out / "summary.json", summary)
    print(json.dumps(io.jsonable(summary["residuals"]["integral"]), sort_keys=True))
    return EXIT_OK


def cmd_order(cfg: ExperimentConfig) -> int:
    ts = parse_scale(cfg.scale)
    rep = convergence_order(cfg.scheme, get_potential(cfg.problem), (ts.a, ts.b),
                            cfg.x0, cfg.v0, cfg.h_list, cfg.newton)
    out = _outdir(cfg)
    band = cfg.band or ORDER_BANDS[cfg.scheme]
    data = rep.to_dict()
    data["band"] = list(band)
    if rep.degenerate:
        log.warning("errors are at rounding level; slope fit is degenerate")
        data["in_band"] = None
        code = EXIT_OK
    else:
        data["in_band"] = bool(band[0] <= rep.slope <= band[1])
        code = EXIT_OK if data["in_band"] else EXIT_BAND
    io.write_json(out / f"order_{cfg.scheme}.json", data)
    io.write_columns(out / f"order_{cfg.scheme}.csv", ["h", "error"], [rep.steps, rep.errors])
    print(f"{cfg.scheme} {cfg.problem}: slope={data['slope']} band={band} degenerate={rep.degenerate}")
    return code


def cmd_coherence(cfg: ExperimentConfig) -> int:
    ts = parse_scale(cfg.scale)
    lag = get_lagrangian(cfg.problem)
    tr = solve_variational(ts, lag, cfg.x0, _seed_x1(cfg, ts), cfg.newton)
    x = tr.x.values.copy()
    if cfg.perturb:
        rng = np.random.default_rng(cfg.seed)
        x[1:-1] += cfg.perturb * rng.choice([-1.0, 1.0], size=ts.N - 1)
    xf = GridFunction(x)
    grad = float(np.max(np.abs(action_gradient(ts, lag, xf).values)))
    res = _residuals(ts, lag, xf)
    integral = res["integral"].inf_norm
    thr = cfg.coherence_tol
    report = {
        "command": "coherence",
        "problem": cfg.problem,
        "N": ts.N,
        "perturb": cfg.perturb,
        "threshold": thr,
        "action_gradient_inf_norm": grad,
        "integral_inf_norm": integral,
        "differential_inf_norm": res["differential"].inf_norm,
        "variational_backward_inf_norm": res["variational_backward"].inf_norm,
        "coherent": grad <= thr and integral <= thr,
        "biconditional_holds": (grad <= thr) == (integral <= thr),
    }
    out = _outdir(cfg)
    io.write_json(out / "coherence.json", report)
    for kind, r in res.items():
        io.gridfunction_to_csv(out / f"residual_{kind}.csv", ts, r.values)
    print(f"gradient={grad:.3e} integral={integral:.3e} differential={report['differential_inf_norm']:.3e}")
    return EXIT_OK if report["coherent"] else EXIT_BAND


def cmd_energy(cfg: ExperimentConfig) -> int:
    ts = parse_scale(cfg.scale)
    _require_uniform(ts, "energy")
    lag = get_lagrangian(cfg.problem)
    x1 = _seed_x1(cfg, ts)
    out = _outdir(cfg)
    drifts = {}
    for scheme in SCHEMES:
        es = energy_series(_run(cfg, ts, scheme, x1), lag)
        drifts[scheme] = es
        io.write_columns(out / f"energy_{scheme}.csv", ["t", "E"], [es.t, es.e])
    dd, dv = drifts["differential"].drift, drifts["variational"].drift
    report = {
        "command": "energy",
        "problem": cfg.problem,
        "drift_differential": dd,
        "drift_variational": dv,
        "ratio": dd / dv if dv > 0 else None,
        "sign_changes_variational": drifts["variational"].sign_changes(),
    }
    io.write_json(out / "energy.json", report)
    print(f"drift differential={dd:.3e} variational={dv:.3e} ratio={report['ratio']}")
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig) -> int:
    ts = parse_scale(cfg.scale)
    _require_uniform(ts, "compare")
    x1 = _seed_x1(cfg, ts)
    xd = _run(cfg, ts, "differential", x1).x.values
    xv = _run(cfg, ts, "variational", x1).x.values
    ref = reference_solution(get_potential(cfg.problem), cfg.x0, cfg.v0, ts.points).values
    ed, ev = np.abs(xd - ref), np.abs(xv - ref)
    out = _outdir(cfg)
    io.write_columns(
        out / "compare.csv",
        ["t", "x_differential", "x_variational", "x_reference", "err_differential", "err_variational"],
        [ts.points, xd, xv, ref, ed, ev],
    )
    print(f"max error differential={ed.max():.3e} variational={ev.max():.3e}")
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "order": cmd_order,
    "coherence": cmd_coherence,
    "energy": cmd_energy,
    "compare": cmd_compare,
}


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _floats(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tsembed", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    # defaults are None so config-file values survive unless a flag is given
    p.add_argument("--problem")
    p.add_argument("--scale", help="uniform:a,b,N | qscale:q,kmin,kmax | random:n,mumin,mumax,seed | file:PATH")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--x0", type=float)
    p.add_argument("--x1", type=float)
    p.add_argument("--v0", type=float, help="initial velocity; seeds x1 from the reference when --x1 is absent")
    p.add_argument("--h-list", dest="h_list", type=_floats)
    p.add_argument("--tol", type=float, help="Newton tolerance")
    p.add_argument("--coherence-tol", dest="coherence_tol", type=float)
    p.add_argument("--band", type=_floats, help="acceptance band lo,hi for the order slope")
    p.add_argument("--perturb", type=float, help="coherence: perturb interior points by this amount")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {args.config}: {exc}") from None
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(values) - known
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    for name in known - {"command"}:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    values["command"] = args.command
    if values.get("band") is not None:
        band = tuple(values["band"])
        if len(band) != 2 or band[0] > band[1]:
            raise DomainError("band must be lo,hi with lo <= hi")
        values["band"] = band
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args)
    except (DomainError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return HANDLERS[cfg.command](cfg)
    except DomainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
