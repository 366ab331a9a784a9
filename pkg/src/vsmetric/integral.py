"""Integral-type contraction for two maps p, k.

Every metric value ``s`` enters the contraction through ``F(s)``, the
integral of a nonnegative gauge function over ``[0, s]``.  F is the
composite trapezoid rule with ``n_q`` panels.  Only scalar-valued metrics
are supported: integrating up to a lattice-valued limit is undefined.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .contraction import ContractionCoefficients, InequalityReport, _require_feasible, compare, mapped, sample_pairs
from .errors import DomainError, ParameterError, UnsupportedLatticeError
from .lattice import MAX_ABS, TAU_EQ, Gauge
from .smetric import Carrier, VectorSMetric, apply_map
from .solver import (
    CONVERGED,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    ConvergenceTrace,
    MapSystem,
    UniquenessReport,
    _check_budget,
    _check_start,
    _Tracker,
    compare_limits,
)

DEFAULT_NQ = 10_000


def trapezoid(rule: Callable[[np.ndarray], np.ndarray], t, n_q: int = DEFAULT_NQ, chunk: int = 128) -> np.ndarray:
    """Composite trapezoid value of ``int_0^t rule`` for each entry of ``t``.

    Evaluates ``rule`` at all ``n_q + 1`` nodes; cost is ``len(t) * n_q``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u = np.linspace(0.0, 1.0, n_q + 1)
    w = np.ones(n_q + 1)
    w[0] = w[-1] = 0.5
    out = np.empty_like(t)
    for i in range(0, t.size, chunk):
        tc = t[i:i + chunk]
        out[i:i + chunk] = (rule(np.multiply.outer(tc, u)) @ w) * tc / n_q
    return out


# Closed forms of the n-panel trapezoid sum h * sum_j w_j rule(j h), h = t/n.
# They equal `trapezoid` up to rounding and cost O(1) per point.

def _panels_one(t, n):
    return t.copy()


def _panels_linear(t, n):
    # the rule is linear, so the trapezoid sum is the exact integral
    return t * t


def _panels_exp_decay(t, n):
    h = t / n
    half = 0.5 * h
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(half > 0, half / np.tanh(half), 1.0)
    return -np.expm1(-t) * factor


@dataclass(frozen=True)
class IntegralGauge:
    """Nonnegative integrand from the closed catalog plus quadrature resolution."""

    name: str
    rule: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    n_q: int = DEFAULT_NQ
    panel_sum: Callable[[np.ndarray, int], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.n_q) != self.n_q or self.n_q < 1:
            raise ParameterError(f"n_q must be a positive integer, got {self.n_q!r}")

    def with_resolution(self, n_q: int) -> IntegralGauge:
        return replace(self, n_q=n_q)

    def validate(self, samples: int = 1001, upper: float = 10.0) -> bool:
        """Nonnegativity on a grid and ``F(eps) > 0`` for eps = 1e-3 .. 1."""
        vals = self.rule(np.linspace(0.0, upper, samples))
        eps = np.array([1e-3, 1e-2, 1e-1, 1.0])
        return bool(np.all(vals >= 0) and np.all(integrate_gauge(self, eps) > 0))


GAUGE_CATALOG = {
    "one": IntegralGauge("one", np.ones_like, panel_sum=_panels_one),
    "linear": IntegralGauge("linear", lambda x: 2.0 * x, panel_sum=_panels_linear),
    "exp_decay": IntegralGauge("exp_decay", lambda x: np.exp(-x), panel_sum=_panels_exp_decay),
}


def gauge_from_name(name: str, n_q: int = DEFAULT_NQ) -> IntegralGauge:
    try:
        return GAUGE_CATALOG[name].with_resolution(n_q)
    except KeyError:
        raise ParameterError(f"unknown gauge {name!r}; known: {', '.join(GAUGE_CATALOG)}") from None


def integrate_gauge(g: IntegralGauge, t):
    """``F(t)``: trapezoid integral of the gauge over ``[0, t]``.

    Accepts a scalar (returns float) or an array.  ``t`` must be >= 0.
    """
    scalar = np.ndim(t) == 0
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"integration limit must be finite and >= 0, got {t!r}")
    if g.panel_sum is not None:
        out = g.panel_sum(arr, g.n_q)
    else:
        out = trapezoid(g.rule, arr, g.n_q)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class IntegralRate:
    theta: float

    @classmethod
    def of(cls, c: ContractionCoefficients) -> IntegralRate:
        _require_feasible(c)
        return cls((c.h1 + c.h2 + c.h5) / (1.0 - (c.h3 + 2.0 * c.h5)))


def integral_rate(c: ContractionCoefficients) -> float:
    return IntegralRate.of(c).theta


def _require_scalar(S: VectorSMetric) -> None:
    if S.target.kind != "scalar":
        raise UnsupportedLatticeError(f"integral contraction needs a scalar metric, {S.name} is {S.target}-valued")


def check_integral_inequality(
    S: VectorSMetric,
    p: Callable,
    k: Callable,
    c: ContractionCoefficients,
    g: IntegralGauge,
    sample_budget: int = 10_000,
    seed: int = 0,
    tau: float = TAU_EQ,
) -> InequalityReport:
    """Sampled check of the contraction inequality with every term passed through F."""
    _require_scalar(S)
    _require_feasible(c)
    rng = np.random.default_rng(seed)
    pairs = sample_pairs(S.carrier, sample_budget, rng)
    x, y = pairs[:, 0], pairs[:, 1]
    px, py = mapped(p, x, S.carrier, "p"), mapped(p, y, S.carrier, "p")
    kx, ky = mapped(k, x, S.carrier, "k"), mapped(k, y, S.carrier, "k")

    def F(*args):
        return integrate_gauge(g, S.batch(*args)[:, 0])[:, None]

    lhs = F(px, px, py)
    terms = ((kx, kx, ky), (px, px, kx), (py, py, ky), (px, px, ky), (py, py, kx))
    rhs = np.zeros_like(lhs)
    for h, args in zip(c.as_tuple(), terms):
        if h:
            rhs += h * F(*args)
    return compare(lhs, rhs, pairs, seed, tau)


def continuity_probe(f: Callable, carrier: Carrier, n_pairs: int = 100, seed: int = 0,
                     delta: float = 1e-9, jump: float = 1e-6) -> bool:
    """Spot check that ``|f(x) - f(x')|`` shrinks with ``|x - x'|``.

    Catches gross jumps only; continuity is not finitely decidable.
    """
    if carrier.points is not None:
        return True
    rng = np.random.default_rng(seed)
    x = carrier.sample(rng, n_pairs)
    xp = np.clip(x + delta * rng.choice([-1.0, 1.0], n_pairs), carrier.lo, carrier.hi)
    return bool(np.all(np.abs(apply_map(f, x) - apply_map(f, xp)) <= jump))


def iterate_integral(
    S: VectorSMetric,
    p: Callable,
    k: Callable,
    c: ContractionCoefficients,
    g: IntegralGauge,
    x0: float,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    tau: float = TAU_EQ,
    gauge: Gauge = MAX_ABS,
    k_preimage: Callable | None = None,
) -> ConvergenceTrace:
    """Two-map iteration with residuals measured in F-space.

    ``residuals[b] = F(S(g_b, g_b, g_{b+1}))`` and ``bounds`` use the rate
    ``theta``.  The run stops once the plain metric residual drops below
    ``tol``, so the limit is located to ``tol`` whatever the gauge.
    """
    _require_scalar(S)
    theta = integral_rate(c)
    _check_budget(max_iter, tol)
    m = MapSystem.two_map(p, k, S.carrier, k_preimage, tau=tau)
    m.verify_range_containment()
    x = _check_start(x0, S.carrier)

    xi, gamma = [x], [float(k(x))]
    raw = []
    track = _Tracker(theta, tol, tau)
    for _ in range(int(max_iter)):
        x = m.preimage(float(p(xi[-1])))
        xi.append(x)
        gamma.append(float(k(x)))
        s = S(gamma[-2], gamma[-2], gamma[-1])
        raw.append(gauge(s))
        if track.record(integrate_gauge(g, float(s)), stop_value=raw[-1]):
            break
    limit = gamma[-1] if track.verdict == CONVERGED else None
    return ConvergenceTrace(xi, gamma, track.residuals, track.bounds, track.verdict, theta, tol, limit, raw)


def uniqueness_integral(
    S: VectorSMetric,
    p: Callable,
    k: Callable,
    c: ContractionCoefficients,
    g: IntegralGauge,
    starts: Sequence[float],
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    gauge: Gauge = MAX_ABS,
    k_preimage: Callable | None = None,
) -> UniquenessReport:
    if len(starts) == 0:
        raise ParameterError("uniqueness probe needs at least one start")
    traces = [iterate_integral(S, p, k, c, g, x0, max_iter, tol, gauge=gauge, k_preimage=k_preimage)
              for x0 in starts]
    return compare_limits(S, starts, traces, gauge, tol)
