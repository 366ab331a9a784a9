"""Alternating iteration for a common fixed point of three self-maps.

Given p, q, k with ``p(X) | q(X) <= k(X)``, start at ``x0`` and pick

    x_{2b+1} with k(x_{2b+1}) = p(x_{2b}),
    x_{2b+2} with k(x_{2b+2}) = q(x_{2b+1}),

recording ``g_b = k(x_b)``.  Under the contraction condition the residuals
``r_b = gauge(S(g_b, g_b, g_{b+1}))`` are dominated by ``alpha**b * r_0`` and
``g_b`` converges to the unique point of coincidence of {p, k} and {q, k}.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .contraction import ContractionCoefficients, rate
from .errors import DomainError, ParameterError, RangeContainmentError
from .lattice import MAX_ABS, TAU_EQ, Gauge
from .smetric import Carrier, VectorSMetric, apply_map

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000
#: Consecutive over-rate steps before a run is declared a rate violation.
RATE_VIOLATION_STREAK = 5

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
RATE_VIOLATION = "rate_violation"

TRACE_COLUMNS = ("iteration", "xi", "gamma", "residual", "bound", "verdict")


# -- preimages ------------------------------------------------------------


def bisect_root(fn: Callable[[float], float], a: float, b: float, xtol: float = TAU_EQ, ftol: float = 0.0,
                max_iter: int = 200) -> float:
    """Root of ``fn`` on ``[a, b]`` given a sign change (or a zero endpoint)."""
    fa, fb = fn(a), fn(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise ValueError(f"no sign change on [{a}, {b}]")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = fn(m)
        if abs(fm) <= ftol:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
        if b - a <= xtol:
            break
    return 0.5 * (a + b)


def monotone_preimage(k: Callable, carrier: Carrier, tau: float = TAU_EQ, probe: int = 257) -> Callable[[float], float]:
    """Preimage oracle for a strictly monotone continuous ``k`` on an interval."""
    if carrier.points is not None:
        raise ParameterError("bisection preimage needs an interval carrier")
    xs = np.linspace(carrier.lo, carrier.hi, probe)
    ks = apply_map(k, xs)
    d = np.diff(ks)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ParameterError("k is not strictly monotone on the carrier; supply k_preimage explicitly")
    lo_val, hi_val = sorted((float(ks[0]), float(ks[-1])))

    def preimage(y: float) -> float:
        y = float(y)
        if not (lo_val - tau <= y <= hi_val + tau):
            raise RangeContainmentError(f"value {y!r} is outside k(X) = [{lo_val:g}, {hi_val:g}]", y)
        y_c = min(max(y, lo_val), hi_val)
        return bisect_root(lambda t: float(k(t)) - y_c, carrier.lo, carrier.hi, xtol=tau, ftol=0.5 * tau)

    return preimage


def finite_preimage(k: Callable, carrier: Carrier, tau: float = TAU_EQ) -> Callable[[float], float]:
    """Preimage oracle for a finite carrier by lookup."""
    pts = np.asarray(carrier.points)
    images = apply_map(k, pts)

    def preimage(y: float) -> float:
        i = int(np.argmin(np.abs(images - y)))
        if abs(images[i] - y) > tau:
            raise RangeContainmentError(f"value {y!r} has no preimage under k in {carrier}", y)
        return float(pts[i])

    return preimage


@dataclass(frozen=True)
class MapSystem:
    """Self-maps p, q, k on a carrier plus a preimage oracle for k.

    Without an explicit ``k_preimage`` one is synthesised: by bisection on
    interval carriers (``k`` must be strictly monotone), by lookup on
    finite ones.
    """

    p: Callable
    q: Callable
    k: Callable
    carrier: Carrier
    k_preimage: Callable | None = None
    tau: float = TAU_EQ
    name: str = "maps"

    def __post_init__(self):
        if self.k_preimage is None:
            if self.carrier.points is None:
                oracle = monotone_preimage(self.k, self.carrier, self.tau)
            else:
                oracle = finite_preimage(self.k, self.carrier, self.tau)
            object.__setattr__(self, "k_preimage", oracle)

    @classmethod
    def two_map(cls, p: Callable, k: Callable, carrier: Carrier, k_preimage: Callable | None = None,
                **kwargs) -> MapSystem:
        return cls(p, p, k, carrier, k_preimage, **kwargs)

    def preimage(self, y: float) -> float:
        """A point ``x`` in the carrier with ``k(x) = y`` (within tau)."""
        try:
            x = float(self.k_preimage(y))
        except RangeContainmentError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise RangeContainmentError(f"k-preimage of {y!r} failed: {exc}", y) from exc
        if not bool(self.carrier.contains(x, self.tau)):
            raise RangeContainmentError(f"k-preimage {x!r} of {y!r} lies outside {self.carrier}", y)
        if abs(float(self.k(x)) - y) > self.tau * max(1.0, abs(y)):
            raise RangeContainmentError(f"value {y!r} has no k-preimage within {self.tau:g}", y)
        return x

    def verify_range_containment(self, sample_budget: int = 128, seed: int = 0) -> None:
        """Raise unless sampled p- and q-values all have k-preimages."""
        rng = np.random.default_rng(seed)
        if self.carrier.points is not None:
            xs = np.asarray(self.carrier.points)
        else:
            xs = np.concatenate([self.carrier.grid(sample_budget // 2 + 1),
                                 self.carrier.sample(rng, sample_budget // 2)])
        for label, f in (("p", self.p), ("q", self.q)):
            ys = apply_map(f, xs)
            bad = ~self.carrier.contains(ys, self.tau)
            if np.any(bad):
                i = int(np.flatnonzero(bad)[0])
                raise DomainError(f"map {label} sends {xs[i]!r} to {ys[i]!r}, outside {self.carrier}")
            for y in ys:
                self.preimage(float(y))


# -- traces ---------------------------------------------------------------


@dataclass
class ConvergenceTrace:
    """Iterates, residuals and the geometric bound of one solver run.

    ``residuals[b]`` measures the step from ``gamma[b]`` to ``gamma[b+1]``;
    ``bounds[b] = rate**b * residuals[0]`` is the dominating sequence that
    witnesses Cauchy behaviour.
    """

    xi: list[float]
    gamma: list[float]
    residuals: list[float]
    bounds: list[float]
    verdict: str
    rate: float
    tol: float
    limit: float | None = None
    metric_residuals: list[float] | None = None

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED

    @property
    def n_iter(self) -> int:
        return len(self.residuals)

    @property
    def ratios(self) -> np.ndarray:
        r = np.asarray(self.residuals)
        keep = r[:-1] > 0
        return r[1:][keep] / r[:-1][keep]

    def dominated(self, tau: float = TAU_EQ) -> bool:
        return all(r <= d + tau for r, d in zip(self.residuals, self.bounds))

    def rows(self):
        last = len(self.residuals) - 1
        for b, (r, d) in enumerate(zip(self.residuals, self.bounds)):
            yield (b, self.xi[b], self.gamma[b], r, d, self.verdict if b == last else "running")

    def to_csv(self, target=None) -> str:
        """Write the trace as CSV (17 significant digits); returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for b, x, g, r, d, v in self.rows():
            w.writerow([b, format(x, ".17g"), format(g, ".17g"), format(r, ".17g"), format(d, ".17g"), v])
        text = buf.getvalue()
        if target is not None:
            if isinstance(target, (str, os.PathLike)):
                with open(target, "w", newline="") as fh:
                    fh.write(text)
            else:
                target.write(text)
        return text


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class _Tracker:
    """Residual bookkeeping shared by every solver loop."""

    def __init__(self, alpha: float, tol: float, tau: float):
        self.alpha, self.tol, self.tau = alpha, tol, tau
        self.residuals: list[float] = []
        self.bounds: list[float] = []
        self.streak = 0
        self.verdict = BUDGET_EXHAUSTED

    def record(self, residual: float, stop_value: float | None = None) -> bool:
        b = len(self.residuals)
        if b and residual > self.alpha * self.residuals[-1] + self.tau:
            self.streak += 1
        else:
            self.streak = 0
        self.residuals.append(residual)
        self.bounds.append(self.alpha**b * self.residuals[0])
        if (residual if stop_value is None else stop_value) < self.tol:
            self.verdict = CONVERGED
            return True
        if self.streak >= RATE_VIOLATION_STREAK:
            self.verdict = RATE_VIOLATION
            return True
        return False


def _check_start(x0: float, carrier: Carrier) -> float:
    x0 = float(x0)
    if not bool(carrier.contains(x0, 0.0)):
        raise DomainError(f"start {x0!r} is outside carrier {carrier}")
    return x0


def _check_budget(max_iter: int, tol: float) -> None:
    if int(max_iter) != max_iter or max_iter < 1:
        raise ParameterError(f"max_iter must be a positive integer, got {max_iter!r}")
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol!r}")


def iterate(
    S: VectorSMetric,
    m: MapSystem,
    c: ContractionCoefficients,
    x0: float,
    gauge: Gauge = MAX_ABS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    tau: float = TAU_EQ,
    verify: bool = True,
) -> ConvergenceTrace:
    """Run the alternating p/q iteration through k-preimages from ``x0``."""
    alpha = rate(c)
    _check_budget(max_iter, tol)
    if verify:
        m.verify_range_containment()
    x = _check_start(x0, S.carrier)

    xi, gamma = [x], [float(m.k(x))]
    track = _Tracker(alpha, tol, tau)
    for b in range(int(max_iter)):
        step = m.p if b % 2 == 0 else m.q
        x = m.preimage(float(step(xi[-1])))
        xi.append(x)
        gamma.append(float(m.k(x)))
        if track.record(gauge(S(gamma[-2], gamma[-2], gamma[-1]))):
            break
    limit = gamma[-1] if track.verdict == CONVERGED else None
    return ConvergenceTrace(xi, gamma, track.residuals, track.bounds, track.verdict, alpha, tol, limit)


def iterate_two_map(
    S: VectorSMetric,
    p: Callable,
    k: Callable,
    c: ContractionCoefficients,
    x0: float,
    gauge: Gauge = MAX_ABS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    tau: float = TAU_EQ,
    k_preimage: Callable | None = None,
) -> ConvergenceTrace:
    """Dedicated two-map iteration ``k(x_{b+1}) = p(x_b)``."""
    alpha = rate(c)
    _check_budget(max_iter, tol)
    m = MapSystem.two_map(p, k, S.carrier, k_preimage, tau=tau)
    m.verify_range_containment()
    x = _check_start(x0, S.carrier)

    xi, gamma = [x], [float(k(x))]
    track = _Tracker(alpha, tol, tau)
    for _ in range(int(max_iter)):
        x = m.preimage(float(p(x)))
        xi.append(x)
        gamma.append(float(k(x)))
        if track.record(gauge(S(gamma[-2], gamma[-2], gamma[-1]))):
            break
    limit = gamma[-1] if track.verdict == CONVERGED else None
    return ConvergenceTrace(xi, gamma, track.residuals, track.bounds, track.verdict, alpha, tol, limit)


# -- coincidence, compatibility, uniqueness -------------------------------


@dataclass
class CoincidenceReport:
    omega: float
    point: float
    p_gap: float
    q_gap: float
    tol: float

    @property
    def confirmed(self) -> bool:
        return self.p_gap < self.tol and self.q_gap < self.tol


def point_of_coincidence(
    S: VectorSMetric,
    m: MapSystem,
    trace: ConvergenceTrace,
    tol: float = DEFAULT_TOL,
    gauge: Gauge = MAX_ABS,
) -> CoincidenceReport:
    """Check that the limit of a converged run is a point of coincidence.

    Finds ``omega`` with ``k(omega) = limit`` and measures how far
    ``p(omega)`` and ``q(omega)`` are from the limit.
    """
    if not trace.converged or trace.limit is None:
        raise ParameterError(f"trace did not converge (verdict {trace.verdict})")
    point = trace.limit
    omega = m.preimage(point)
    pw, qw = float(m.p(omega)), float(m.q(omega))
    return CoincidenceReport(omega, point, gauge(S(pw, pw, point)), gauge(S(qw, qw, point)), tol)


@dataclass
class WeakCompatibilityReport:
    """Commutation test at the sampled coincidence points of a pair of maps."""

    compatible: bool
    n_coincidences: int
    coincidences: tuple[float, ...]
    witness: tuple[float, float, float] | None = None

    def __bool__(self):
        return self.compatible


def weakly_compatible(
    f: Callable,
    g: Callable,
    carrier: Carrier,
    sample_budget: int = 1000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    tau: float = TAU_EQ,
) -> WeakCompatibilityReport:
    """Sampled check that ``f(g(a)) = g(f(a))`` wherever ``f(a) = g(a)``.

    Interval carriers are scanned on a dense grid plus random points;
    sign changes of ``f - g`` between neighbours are refined by bisection.
    Witness on failure is ``(a, f(g(a)), g(f(a)))``.
    """
    rng = np.random.default_rng(seed)
    if carrier.points is not None:
        alphas = np.asarray(carrier.points)
    else:
        alphas = np.unique(np.concatenate([carrier.grid(sample_budget), carrier.sample(rng, sample_budget)]))
    d = apply_map(f, alphas) - apply_map(g, alphas)
    found = [alphas[np.abs(d) < tol]]

    if carrier.points is None:
        flips = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
        diff = lambda t: float(f(t)) - float(g(t))
        roots = []
        for i in flips:
            r = bisect_root(diff, float(alphas[i]), float(alphas[i + 1]), xtol=tau)
            if abs(diff(r)) < tol:
                roots.append(r)
        found.append(np.asarray(roots, dtype=float))
    coincident = np.unique(np.concatenate(found))

    if coincident.size == 0:
        return WeakCompatibilityReport(True, 0, ())
    fg = apply_map(f, apply_map(g, coincident))
    gf = apply_map(g, apply_map(f, coincident))
    gap = np.abs(fg - gf)
    sample = tuple(float(a) for a in coincident[:16])
    if np.all(gap < tol):
        return WeakCompatibilityReport(True, int(coincident.size), sample)
    i = int(np.argmax(gap))
    return WeakCompatibilityReport(False, int(coincident.size), sample,
                                   (float(coincident[i]), float(fg[i]), float(gf[i])))


def weak_compatibility_check(
    m: MapSystem,
    pair: str = "p",
    sample_budget: int = 1000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> WeakCompatibilityReport:
    """Weak compatibility of ``(p, k)`` (``pair="p"``) or ``(q, k)`` (``pair="q"``)."""
    if pair not in ("p", "q"):
        raise ParameterError(f"pair must be 'p' or 'q', got {pair!r}")
    f = m.p if pair == "p" else m.q
    return weakly_compatible(f, m.k, m.carrier, sample_budget, seed, tol, m.tau)


@dataclass
class UniquenessReport:
    verdict: str  # "unique" | "not_unique" | "inconclusive"
    limits: list[float | None]
    limit: float | None = None
    divergent_pair: tuple[float, float] | None = None
    traces: list[ConvergenceTrace] = field(default_factory=list, repr=False)

    @property
    def unique(self) -> bool | None:
        return {"unique": True, "not_unique": False}.get(self.verdict)


def compare_limits(S: VectorSMetric, starts, traces, gauge: Gauge, tol: float) -> UniquenessReport:
    limits = [t.limit for t in traces]
    if not all(t.converged for t in traces):
        return UniquenessReport("inconclusive", limits, traces=traces)
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            if gauge(S(limits[i], limits[i], limits[j])) >= tol:
                return UniquenessReport("not_unique", limits, None, (float(starts[i]), float(starts[j])), traces)
    return UniquenessReport("unique", limits, limits[0], traces=traces)


def uniqueness_probe(
    S: VectorSMetric,
    m: MapSystem,
    c: ContractionCoefficients,
    starts: Sequence[float],
    gauge: Gauge = MAX_ABS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> UniquenessReport:
    """Run from several starts and check that all limits agree.

    A disagreement is reported with the pair of starts that produced it;
    a run that fails to converge makes the probe inconclusive.
    """
    if len(starts) == 0:
        raise ParameterError("uniqueness probe needs at least one start")
    rate(c)
    m.verify_range_containment()
    traces = [iterate(S, m, c, x0, gauge, max_iter, tol, verify=False) for x0 in starts]
    return compare_limits(S, starts, traces, gauge, tol)
