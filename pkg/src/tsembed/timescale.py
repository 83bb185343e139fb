"""Bounded discrete time scales and the delta calculus on them.

A time scale is stored as a finite, strictly increasing array of points
``t_0 = a < t_1 < ... < t_N = b``.  Every point except ``b`` is right-scattered,
so the delta derivative is a forward difference quotient over the graininess
and the delta integral is a left-endpoint graininess-weighted sum.  Both are
exact on such scales, not approximations.

Indices are the canonical handles throughout; real time values are derived.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when arguments violate a precondition (bad grid, bad index, ...)."""


# (trimmed on the left, trimmed on the right)
DOMAIN_KINDS = {
    "full": (0, 0),
    "kappa": (0, 1),
    "kappa2": (0, 2),
    "kappa_kappa": (1, 1),
}

UNIFORM_RTOL = 1e-9


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeScale:
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1:
            raise DomainError("time scale points must be one-dimensional")
        if pts.size < 3:
            raise DomainError(f"a time scale needs at least 3 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("time scale points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("time scale points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        mu = np.empty_like(pts)
        mu[:-1] = pts[1:] - pts[:-1]
        mu[-1] = 0.0
        mu.setflags(write=False)
        object.__setattr__(self, "_mu", mu)

    @property
    def N(self) -> int:
        return self.points.size - 1

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    @property
    def graininess(self) -> np.ndarray:
        """mu(t_k) for k = 0..N (the last entry is 0)."""
        return self._mu

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeScale) and np.array_equal(self.points, other.points)

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    def is_uniform(self, rtol: float = UNIFORM_RTOL) -> bool:
        mu = self._mu[:-1]
        return bool(np.all(np.abs(mu - mu[0]) <= rtol * mu[0]))

    @property
    def step(self) -> float:
        """Nominal step ``(b - a) / N`` of a uniform scale."""
        if not self.is_uniform():
            raise DomainError("scale is not uniform")
        return (self.b - self.a) / self.N

    def index_range(self, domain_kind: str) -> range:
        left, right = DOMAIN_KINDS[domain_kind]
        return range(left, self.N + 1 - right)

    def check_index(self, k: int, last: int | None = None) -> int:
        last = self.N if last is None else last
        if not 0 <= k <= last:
            raise DomainError(f"index {k} outside 0..{last}")
        return int(k)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values aligned with the points of a time scale.

    ``domain_kind`` records which trimmed index set the values cover:
    ``full`` (0..N), ``kappa`` (0..N-1), ``kappa2`` (0..N-2) or
    ``kappa_kappa`` (1..N-1).
    """

    values: np.ndarray
    domain_kind: str = "full"

    def __post_init__(self):
        if self.domain_kind not in DOMAIN_KINDS:
            raise DomainError(f"unknown domain kind {self.domain_kind!r}")
        vals = _frozen(self.values)
        if vals.ndim != 1:
            raise DomainError("grid function values must be one-dimensional")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    @property
    def offset(self) -> int:
        return DOMAIN_KINDS[self.domain_kind][0]

    def check(self, ts: TimeScale, domain_kind: str | None = None) -> "GridFunction":
        if domain_kind is not None and self.domain_kind != domain_kind:
            raise DomainError(f"expected a grid function on {domain_kind}, got {self.domain_kind}")
        expected = len(ts.index_range(self.domain_kind))
        if self.values.size != expected:
            raise DomainError(
                f"{self.values.size} values do not match {self.domain_kind} "
                f"of a scale with N={ts.N} (expected {expected})"
            )
        return self

    def at(self, k: int) -> float:
        """Value at scale index ``k`` (not array position)."""
        i = k - self.offset
        if not 0 <= i < self.values.size:
            raise DomainError(f"index {k} not in the {self.domain_kind} domain")
        return float(self.values[i])

    def times(self, ts: TimeScale) -> np.ndarray:
        self.check(ts)
        r = ts.index_range(self.domain_kind)
        return ts.points[r.start:r.stop]

    @classmethod
    def sample(cls, ts: TimeScale, f: Callable, domain_kind: str = "full") -> "GridFunction":
        r = ts.index_range(domain_kind)
        t = ts.points[r.start:r.stop]
        return cls(np.broadcast_to(np.asarray(f(t), dtype=float), t.shape), domain_kind)


# -- constructors ----------------------------------------------------------

def make_uniform(a: float, b: float, N: int) -> TimeScale:
    """The scale ``[a, b] ∩ (a + hZ)`` with ``h = (b - a) / N``."""
    if not b > a:
        raise DomainError(f"need b > a, got a={a}, b={b}")
    if int(N) != N or N < 2:
        raise DomainError(f"need an integer N >= 2, got {N}")
    return TimeScale(np.linspace(a, b, int(N) + 1))


def make_qscale(q: float, k_min: int, k_max: int) -> TimeScale:
    """Quantum scale ``{q**j : k_min <= j <= k_max}``."""
    if not q > 1:
        raise DomainError(f"need q > 1, got {q}")
    if k_min < 0:
        raise DomainError(f"need k_min >= 0, got {k_min}")
    if k_max < k_min + 2:
        raise DomainError("a q-scale needs at least 3 points")
    return TimeScale(float(q) ** np.arange(k_min, k_max + 1, dtype=float))


def make_arbitrary(points: Sequence[float]) -> TimeScale:
    return TimeScale(points)


def make_random(n: int, mu_min: float, mu_max: float, seed: int, a: float = 0.0) -> TimeScale:
    """``n`` points whose gaps are drawn uniformly from ``[mu_min, mu_max]``.

    Fully determined by ``seed``.
    """
    if n < 3:
        raise DomainError(f"need at least 3 points, got {n}")
    if not 0 < mu_min <= mu_max:
        raise DomainError(f"need 0 < mu_min <= mu_max, got {mu_min}, {mu_max}")
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(mu_min, mu_max, size=n - 1)
    return TimeScale(a + np.concatenate(([0.0], np.cumsum(gaps))))


# -- jump operators and graininess ----------------------------------------

def sigma(ts: TimeScale, k: int) -> tuple[int, float]:
    """Forward jump: next index and point; fixed at the maximum."""
    k = ts.check_index(k)
    j = min(k + 1, ts.N)
    return j, float(ts.points[j])


def rho(ts: TimeScale, k: int) -> tuple[int, float]:
    """Backward jump: previous index and point; fixed at the minimum."""
    k = ts.check_index(k)
    j = max(k - 1, 0)
    return j, float(ts.points[j])


def mu(ts: TimeScale, k: int) -> float:
    return float(ts.graininess[ts.check_index(k)])


# -- delta calculus ---------------------------------------------------------

def delta_derivative(ts: TimeScale, f: GridFunction) -> GridFunction:
    """Forward difference quotient ``(f_{k+1} - f_k) / mu(t_k)`` on kappa."""
    f.check(ts, "full")
    v = f.values
    return GridFunction((v[1:] - v[:-1]) / ts.graininess[:-1], "kappa")


def _values_on(ts: TimeScale, f: GridFunction | np.ndarray, c: int, d: int) -> np.ndarray:
    """Values of ``f`` at scale indices c..d-1."""
    if not isinstance(f, GridFunction):
        f = GridFunction(f)
    f.check(ts)
    lo, hi = c - f.offset, d - f.offset
    if c < d and (lo < 0 or hi > f.values.size):
        raise DomainError(f"indices {c}..{d - 1} not covered by {f.domain_kind}")
    return f.values[lo:hi]


def delta_integral(ts: TimeScale, f: GridFunction, c: int, d: int) -> float:
    """``∫_{t_c}^{t_d} f Δt = Σ_{k=c}^{d-1} mu(t_k) f_k``."""
    if not 0 <= c <= d <= ts.N:
        raise DomainError(f"need 0 <= c <= d <= N, got c={c}, d={d}, N={ts.N}")
    if c == d:
        return 0.0
    vals = _values_on(ts, f, c, d)
    return float(np.sum(ts.graininess[c:d] * vals))


def integrate_to_sigma(ts: TimeScale, f: GridFunction, k: int) -> float:
    """``∫_a^{σ(t_k)} f Δt`` for ``k`` in 0..N-1."""
    k = ts.check_index(k, ts.N - 1)
    return delta_integral(ts, f, 0, k) + float(ts.graininess[k] * _values_on(ts, f, k, k + 1)[0])


def cumulative_to_sigma(ts: TimeScale, f: GridFunction) -> np.ndarray:
    """All of ``integrate_to_sigma(ts, f, k)`` for k = 0..N-1 as one array."""
    vals = _values_on(ts, f, 0, ts.N)
    return np.cumsum(ts.graininess[:-1] * vals)
