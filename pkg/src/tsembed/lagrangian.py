"""Lagrangians L(t, x, v), their partial derivatives, and built-in mechanical systems.

All function fields are expected to broadcast over numpy arrays; scalar-only
callables still work through a vectorizing fallback in :func:`call`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .timescale import DomainError, GridFunction, TimeScale, delta_derivative

Fn3 = Callable[[float, float, float], float]

_EPS = np.finfo(float).eps
# central differences: truncation O(h^2) vs rounding O(eps/h) balance at h ~ eps^(1/3)
FD_REL_STEP = _EPS ** (1.0 / 3.0)


@dataclass(frozen=True)
class Potential:
    u: Callable[[float], float]
    du: Callable[[float], float]
    name: str = "custom"


@dataclass(frozen=True)
class Lagrangian:
    eval: Fn3
    d2: Fn3
    d3: Fn3
    d33: Fn3 | None = None
    d23: Fn3 | None = None
    name: str = "custom"
    potential: Potential | None = field(default=None, compare=False)


def call(fn: Callable, *args) -> np.ndarray:
    """Evaluate ``fn`` elementwise over broadcast array arguments."""
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    try:
        out = np.asarray(fn(*arrs), dtype=float)
        return np.broadcast_to(out, arrs[0].shape)
    except (TypeError, ValueError):
        return np.vectorize(fn, otypes=[float])(*arrs)


def mechanical(p: Potential) -> Lagrangian:
    """``L = v**2 / 2 - U(x)``."""

    def lag(t, x, v):
        return 0.5 * v * v - p.u(x)

    def d2(t, x, v):
        return -p.du(x)

    def d3(t, x, v):
        return v + 0.0 * x

    def d33(t, x, v):
        return np.ones(np.broadcast(t, x, v).shape)

    def d23(t, x, v):
        return np.zeros(np.broadcast(t, x, v).shape)

    return Lagrangian(lag, d2, d3, d33, d23, name=p.name, potential=p)


POTENTIALS = {
    "free": Potential(lambda x: 0.0 * x, lambda x: 0.0 * x, "free"),
    "harmonic": Potential(lambda x: 0.5 * x * x, lambda x: x + 0.0, "harmonic"),
    "quartic": Potential(lambda x: 0.25 * x**4, lambda x: x**3, "quartic"),
    "pendulum": Potential(lambda x: 1.0 - np.cos(x), np.sin, "pendulum"),
}


def get_potential(name: str) -> Potential:
    try:
        return POTENTIALS[name]
    except KeyError:
        raise DomainError(f"unknown problem {name!r}; choose from {sorted(POTENTIALS)}") from None


def get_lagrangian(name: str) -> Lagrangian:
    return mechanical(get_potential(name))


# -- finite-difference partials ----------------------------------------------

def _fd(fn: Callable, args: list[np.ndarray], slot: int) -> np.ndarray:
    arg = np.asarray(args[slot], dtype=float)
    h = FD_REL_STEP * (1.0 + np.abs(arg))
    hi = list(args)
    lo = list(args)
    hi[slot] = arg + h
    lo[slot] = arg - h
    # (arg + h) - (arg - h) is the step actually taken after rounding
    return (call(fn, *hi) - call(fn, *lo)) / (hi[slot] - lo[slot])


def fd_partial(fn: Callable, t, x, v, slot: int) -> np.ndarray:
    """Central difference of ``fn(t, x, v)`` in argument ``slot`` (0=t, 1=x, 2=v)."""
    return _fd(fn, [t, x, v], slot)


def d33_or_fd(l: Lagrangian, t, x, v) -> np.ndarray:
    if l.d33 is not None:
        return call(l.d33, t, x, v)
    return fd_partial(l.d3, t, x, v, 2)


def d23_or_fd(l: Lagrangian, t, x, v) -> np.ndarray:
    if l.d23 is not None:
        return call(l.d23, t, x, v)
    return fd_partial(l.d2, t, x, v, 2)


@dataclass
class PartialsReport:
    tol: float
    max_deviation: dict[str, float]
    n_samples: int

    @property
    def failures(self) -> list[str]:
        return [k for k, dev in self.max_deviation.items() if not dev <= self.tol]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_partials(l: Lagrangian, samples: Iterable[tuple[float, float, float]], tol: float) -> PartialsReport:
    """Compare supplied partials against central differences at each sample."""
    pts = np.asarray(list(samples), dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise DomainError("check_partials needs at least one sample")
    if not tol > 0:
        raise DomainError("tol must be positive")
    t, x, v = pts.T
    checks = {
        "d2": (l.d2, l.eval, 1),
        "d3": (l.d3, l.eval, 2),
        "d33": (l.d33, l.d3, 2),
        "d23": (l.d23, l.d2, 2),
    }
    dev = {}
    for name, (supplied, base, slot) in checks.items():
        if supplied is None:
            continue
        diff = call(supplied, t, x, v) - fd_partial(base, t, x, v, slot)
        dev[name] = float(np.max(np.abs(diff)))
    return PartialsReport(tol=tol, max_deviation=dev, n_samples=pts.shape[0])


_SELECTORS = ("eval", "d2", "d3", "d33", "d23")


def apply_along(l: Lagrangian, ts: TimeScale, x: GridFunction, which: str) -> GridFunction:
    """``g_k = which(t_k, x_k, (Δx)_k)`` for k = 0..N-1."""
    if which not in _SELECTORS:
        raise DomainError(f"unknown selector {which!r}")
    x.check(ts, "full")
    v = delta_derivative(ts, x).values
    t = ts.points[:-1]
    xk = x.values[:-1]
    if which == "d33":
        vals = d33_or_fd(l, t, xk, v)
    elif which == "d23":
        vals = d23_or_fd(l, t, xk, v)
    else:
        vals = call(getattr(l, which), t, xk, v)
    return GridFunction(vals, "kappa")
