"""Trajectory generators for the embedded schemes, a continuous reference, and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .lagrangian import Lagrangian, Potential, call, d23_or_fd, d33_or_fd, mechanical
from .timescale import DomainError, GridFunction, TimeScale, delta_derivative, make_uniform

_EPS = np.finfo(float).eps
MIN_STEP_SPAN = 4.0


class SolverError(RuntimeError):
    """A stepping scheme or the reference integrator failed."""

    def __init__(self, message: str, step: int | None = None, residual: float | None = None):
        super().__init__(message)
        self.step = step
        self.residual = residual


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 50


@dataclass(frozen=True)
class Trajectory:
    ts: TimeScale
    x: GridFunction
    scheme: str
    problem: str
    seed_data: tuple[float, float]

    def __post_init__(self):
        self.x.check(self.ts, "full")
        if self.scheme == "differential" and not self.ts.is_uniform():
            raise DomainError("the differential scheme is only defined on uniform scales")

    @property
    def v_forward(self) -> np.ndarray:
        return delta_derivative(self.ts, self.x).values

    def reversed(self) -> "Trajectory":
        """The same samples traversed backwards on the mirrored scale."""
        pts = self.ts.a + self.ts.b - self.ts.points[::-1]
        return Trajectory(TimeScale(pts), GridFunction(self.x.values[::-1]), self.scheme,
                          self.problem, (float(self.x.values[-1]), float(self.x.values[-2])))


@dataclass
class ConvergenceReport:
    scheme: str
    problem: str
    steps: list[float]
    errors: list[float]
    slope: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "problem": self.problem,
            "steps": list(self.steps),
            "errors": list(self.errors),
            "slope": None if self.degenerate else self.slope,
            "degenerate": self.degenerate,
        }


@dataclass
class EnergySeries:
    t: np.ndarray
    e: np.ndarray
    drift: float = field(init=False)

    def __post_init__(self):
        if len(self.t) != len(self.e):
            raise DomainError("energy series lengths differ")
        self.drift = float(np.max(np.abs(self.e - self.e[0])))

    @property
    def deviation(self) -> np.ndarray:
        return self.e - self.e[0]

    def sign_changes(self) -> int:
        d = self.deviation[1:]
        s = np.sign(d[d != 0])
        return int(np.count_nonzero(s[1:] != s[:-1]))

    def window_drift(self, t_end: float) -> float:
        """Drift restricted to ``t <= t_end``."""
        sel = self.t <= t_end
        return float(np.max(np.abs(self.e[sel] - self.e[0])))


# -- schemes ------------------------------------------------------------------

def solve_differential_scheme(ts: TimeScale, p: Potential, x0: float, x1: float) -> Trajectory:
    """Forward recurrence ``x_{k+2} = 2 x_{k+1} - x_k - h² U'(x_k)``."""
    if not ts.is_uniform():
        raise DomainError("the differential scheme requires a uniform scale")
    h = ts.step
    h2 = h * h
    x = np.empty(ts.N + 1)
    x[0], x[1] = x0, x1
    for k in range(ts.N - 1):
        x[k + 2] = 2.0 * x[k + 1] - x[k] - h2 * float(p.du(x[k]))
    return Trajectory(ts, GridFunction(x), "differential", p.name, (float(x0), float(x1)))


def solve_variational(
    ts: TimeScale,
    l: Lagrangian,
    x0: float,
    x1: float,
    newton: NewtonOptions = NewtonOptions(),
) -> Trajectory:
    """Step the integral-form Euler-Lagrange equation forward.

    At each k = 1..N-1 solve, for x_{k+1},

        ∂₃L(t_k, x_k, v_k) - mu_k ∂₂L(t_k, x_k, v_k) = ∂₃L(t_{k-1}, x_{k-1}, v_{k-1})

    with ``v_k = (x_{k+1} - x_k) / mu_k``, by scalar Newton iteration.
    """
    mu = ts.graininess
    t = ts.points
    x = np.empty(ts.N + 1)
    x[0], x[1] = x0, x1
    v_prev = (x1 - x0) / mu[0]
    p_prev = float(call(l.d3, t[0], x0, v_prev))
    for k in range(1, ts.N):
        tk, xk, h = t[k], x[k], mu[k]
        scale = max(1.0, abs(p_prev))
        y = xk + h * v_prev
        converged = False
        res = np.inf
        for _ in range(newton.max_iter):
            v = (y - xk) / h
            res = float(call(l.d3, tk, xk, v) - h * call(l.d2, tk, xk, v)) - p_prev
            if abs(res) <= newton.tol * scale:
                converged = True
                break
            dres = float(d33_or_fd(l, tk, xk, v) - h * d23_or_fd(l, tk, xk, v)) / h
            if not np.isfinite(dres) or abs(dres) <= _EPS * scale / h:
                raise SolverError(f"vanishing Newton derivative at step {k}", step=k, residual=res)
            y -= res / dres
        if not converged:
            raise SolverError(
                f"Newton did not converge at step {k} after {newton.max_iter} iterations "
                f"(residual {res:.3e})",
                step=k,
                residual=res,
            )
        x[k + 1] = y
        v_prev = (y - xk) / h
        p_prev = float(call(l.d3, tk, xk, v_prev))
    return Trajectory(ts, GridFunction(x), "variational", l.name, (float(x0), float(x1)))


# -- reference --------------------------------------------------------------

def _force(system: Lagrangian | Potential):
    if isinstance(system, Potential):
        return system.du
    if system.potential is None:
        raise DomainError("the reference oracle needs a mechanical Lagrangian")
    return system.potential.du


def reference_state(
    system: Lagrangian | Potential,
    x0: float,
    v0: float,
    t_grid: Sequence[float],
    rtol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Position and velocity of ``x'' = -U'(x)`` sampled at ``t_grid``."""
    if not rtol > 0:
        raise DomainError("rtol must be positive")
    du = _force(system)
    tg = np.asarray(t_grid, dtype=float)

    def rhs(_t, y):
        return [y[1], -float(du(y[0]))]

    # two orders tighter than rtol so the global error stays below rtol per unit time
    tol = max(rtol * 1e-2, 1e-14)
    sol = solve_ivp(rhs, (tg[0], tg[-1]), [x0, v0], method="DOP853", t_eval=tg,
                    rtol=tol, atol=tol)
    if not sol.success:
        raise SolverError(f"reference integration failed: {sol.message}")
    return sol.y[0], sol.y[1]


def reference_solution(
    system: Lagrangian | Potential,
    x0: float,
    v0: float,
    t_grid: Sequence[float],
    rtol: float = 1e-10,
) -> GridFunction:
    """High-accuracy solution of the continuous problem, ``x(t_0) = x0``, ``x'(t_0) = v0``."""
    return GridFunction(reference_state(system, x0, v0, t_grid, rtol)[0])


# -- diagnostics ------------------------------------------------------------

def _log_slope(steps, errors) -> float:
    return float(np.polyfit(np.log(steps), np.log(errors), 1)[0])


def convergence_order(
    scheme: str,
    p: Potential,
    interval: tuple[float, float],
    x0: float,
    v0: float,
    h_list: Sequence[float],
    newton: NewtonOptions = NewtonOptions(),
) -> ConvergenceReport:
    """Max-norm global error against the reference for each step size, and its log-log slope."""
    if scheme not in ("differential", "variational"):
        raise DomainError(f"unknown scheme {scheme!r}")
    a, b = interval
    steps = [float(h) for h in h_list]
    if len(steps) < 3:
        raise DomainError("need at least 3 step sizes")
    if any(h2 >= h1 for h1, h2 in zip(steps, steps[1:])):
        raise DomainError("step sizes must be strictly decreasing")
    if steps[0] / steps[-1] < MIN_STEP_SPAN:
        raise DomainError(f"step sizes must span at least a factor of {MIN_STEP_SPAN:g}")

    lag = mechanical(p)
    errors = []
    for h in steps:
        n = int(round((b - a) / h))
        if n < 2 or abs(n * h - (b - a)) > 1e-9 * (b - a):
            raise DomainError(f"step {h} does not divide [{a}, {b}]")
        ts = make_uniform(a, b, n)
        ref = reference_solution(p, x0, v0, ts.points).values
        if scheme == "differential":
            tr = solve_differential_scheme(ts, p, x0, ref[1])
        else:
            tr = solve_variational(ts, lag, x0, ref[1], newton)
        errors.append(float(np.max(np.abs(tr.x.values - ref))))

    floor = 100 * _EPS * max(1.0, float(np.max(np.abs(ref))))
    if max(errors) <= floor * len(ref):
        return ConvergenceReport(scheme, p.name, steps, errors, float("nan"), degenerate=True)
    return ConvergenceReport(scheme, p.name, steps, errors, _log_slope(steps, errors))


def energy_series(tr: Trajectory, l: Lagrangian) -> EnergySeries:
    """Discrete Legendre energy ``v ∂₃L - L`` with the forward delta derivative, on kappa."""
    t = tr.ts.points[:-1]
    x = tr.x.values[:-1]
    v = tr.v_forward
    e = v * call(l.d3, t, x, v) - call(l.eval, t, x, v)
    return EnergySeries(t.copy(), e)
