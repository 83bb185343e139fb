"""Embedded Euler-Lagrange residuals and the embedded action functional.

Three embeddings of the Euler-Lagrange equation are evaluated along a grid
trajectory ``x`` (with ``v = Δx`` and ``p_k = ∂₃L(t_k, x_k, v_k)``,
``g_k = ∂₂L(t_k, x_k, v_k)``):

* differential, on kappa2:  ``(p_{k+1} - p_k) / mu_k - g_k``
* variational (backward), on kappa_kappa:  ``(p_k - p_{k-1}) / mu_k - g_k``
* integral, on kappa:  ``p_k - ∫_a^{σ(t_k)} g Δτ - c``

Residuals are always "left side minus right side".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lagrangian import Lagrangian, apply_along, call
from .timescale import (
    DomainError,
    GridFunction,
    TimeScale,
    cumulative_to_sigma,
    delta_derivative,
    delta_integral,
)

KIND_DOMAINS = {
    "differential": "kappa2",
    "variational_backward": "kappa_kappa",
    "integral": "kappa",
}


@dataclass(frozen=True)
class Residual:
    values: GridFunction
    kind: str
    c_estimate: float | None = None

    def __post_init__(self):
        if KIND_DOMAINS.get(self.kind) != self.values.domain_kind:
            raise DomainError(f"residual kind {self.kind!r} cannot live on {self.values.domain_kind}")

    @property
    def inf_norm(self) -> float:
        vals = self.values.values
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    def l2_norm_weighted(self, ts: TimeScale) -> float:
        r = ts.index_range(self.values.domain_kind)
        w = ts.graininess[r.start:r.stop]
        return float(np.sqrt(np.sum(w * self.values.values**2)))

    def summary(self, ts: TimeScale) -> dict:
        return {
            "kind": self.kind,
            "c_estimate": self.c_estimate,
            "inf_norm": self.inf_norm,
            "l2_norm_weighted": self.l2_norm_weighted(ts),
        }


def _momenta_forces(ts: TimeScale, l: Lagrangian, x: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    x.check(ts, "full")
    p = apply_along(l, ts, x, "d3").values
    g = apply_along(l, ts, x, "d2").values
    return p, g


def residual_differential(ts: TimeScale, l: Lagrangian, x: GridFunction) -> Residual:
    p, g = _momenta_forces(ts, l, x)
    mu = ts.graininess[:-2]
    r = (p[1:] - p[:-1]) / mu - g[:-1]
    return Residual(GridFunction(r, "kappa2"), "differential")


def residual_variational_backward(ts: TimeScale, l: Lagrangian, x: GridFunction) -> Residual:
    p, g = _momenta_forces(ts, l, x)
    mu = ts.graininess[1:-1]
    r = (p[1:] - p[:-1]) / mu - g[1:]
    return Residual(GridFunction(r, "kappa_kappa"), "variational_backward")


def integral_raw(ts: TimeScale, l: Lagrangian, x: GridFunction) -> np.ndarray:
    """``p_k - ∫_a^{σ(t_k)} ∂₂L Δτ`` for k = 0..N-1, before removing the constant."""
    x.check(ts, "full")
    p = apply_along(l, ts, x, "d3").values
    g = apply_along(l, ts, x, "d2")
    return p - cumulative_to_sigma(ts, g)


def residual_integral(ts: TimeScale, l: Lagrangian, x: GridFunction, c_mode: str = "first") -> Residual:
    raw = integral_raw(ts, l, x)
    if c_mode == "first":
        c = float(raw[0])
    elif c_mode == "mean":
        c = float(np.mean(raw))
    else:
        raise DomainError(f"c_mode must be 'first' or 'mean', got {c_mode!r}")
    return Residual(GridFunction(raw - c, "kappa"), "integral", c_estimate=c)


def action(ts: TimeScale, l: Lagrangian, x: GridFunction) -> float:
    """``Σ_{k<N} mu_k L(t_k, x_k, (Δx)_k)``."""
    return delta_integral(ts, apply_along(l, ts, x, "eval"), 0, ts.N)


def action_usual(ts: TimeScale, l: Lagrangian, x: GridFunction) -> float:
    """The σ-composed functional ``Σ_{k<N} mu_k L(t_k, x_{k+1}, (Δx)_k)``, for comparison."""
    v = delta_derivative(ts, x).values
    vals = call(l.eval, ts.points[:-1], x.values[1:], v)
    return delta_integral(ts, GridFunction(vals, "kappa"), 0, ts.N)


def action_gradient(ts: TimeScale, l: Lagrangian, x: GridFunction) -> GridFunction:
    """Gradient of :func:`action` in the interior values x_1..x_{N-1}, endpoints fixed."""
    p, g = _momenta_forces(ts, l, x)
    mu = ts.graininess[1:-1]
    grad = mu * g[1:] + p[:-1] - p[1:]
    return GridFunction(grad, "kappa_kappa")
