"""Vector S-metrics: ternary distances valued in a linear lattice.

A vector S-metric on a carrier set X is a map ``S: X*X*X -> V`` into a
linear lattice V with

(a) ``S(x, y, z) >= 0``,
(b) ``S(x, y, z) = 0`` exactly when ``x = y = z``,
(c) ``S(x, y, z) <= S(x, x, a) + S(y, y, a) + S(z, z, a)``.

Rules are vectorised: they receive three equal-length float arrays and
return an array of shape ``(m, dim)`` (or ``(m,)`` for scalar targets).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .lattice import MAX_ABS, TAU_EQ, Gauge, LatticeElement, LatticeSpace

#: Carriers with at most this many points are checked exhaustively.
EXHAUSTIVE_LIMIT = 32
#: Upper bound on bisection steps spent shrinking a counterexample.
MAX_SHRINK_STEPS = 64


@dataclass(frozen=True)
class Carrier:
    """A closed interval ``[lo, hi]`` or a finite set of reals."""

    lo: float = 0.0
    hi: float = 1.0
    points: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.points is not None:
            if len(self.points) == 0:
                raise ParameterError("finite carrier must be nonempty")
            pts = tuple(sorted({float(p) for p in self.points}))
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "lo", pts[0])
            object.__setattr__(self, "hi", pts[-1])
        elif not float(self.lo) < float(self.hi):
            raise ParameterError(f"interval carrier needs lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def interval(cls, lo: float, hi: float) -> Carrier:
        return cls(float(lo), float(hi))

    @classmethod
    def finite(cls, points: Sequence[float]) -> Carrier:
        return cls(points=tuple(points))

    @property
    def kind(self) -> str:
        return "finite" if self.points is not None else "interval"

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def exhaustive(self) -> bool:
        return self.points is not None and len(self.points) <= EXHAUSTIVE_LIMIT

    def contains(self, x, tol: float = TAU_EQ):
        """Elementwise membership test (with slack ``tol``)."""
        x = np.asarray(x, dtype=float)
        if self.points is None:
            return (x >= self.lo - tol) & (x <= self.hi + tol)
        pts = np.asarray(self.points)
        return np.any(np.abs(x[..., None] - pts) <= tol, axis=-1)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.points is None:
            return rng.uniform(self.lo, self.hi, size)
        return rng.choice(np.asarray(self.points), size)

    def grid(self, m: int) -> np.ndarray:
        if self.points is not None:
            return np.asarray(self.points)
        return np.linspace(self.lo, self.hi, m)

    def __str__(self):
        if self.points is None:
            return f"[{self.lo:g}, {self.hi:g}]"
        return "{" + ", ".join(f"{p:g}" for p in self.points) + "}"


def apply_map(f: Callable, xs) -> np.ndarray:
    """Apply a scalar self-map to an array, vectorising when ``f`` allows it."""
    xs = np.asarray(xs, dtype=float)
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
        if out.ndim == 0:
            return np.full(xs.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x)) for x in xs.ravel()]).reshape(xs.shape)


@dataclass(frozen=True)
class VectorSMetric:
    """A lattice-valued ternary distance on a carrier."""

    carrier: Carrier
    target: LatticeSpace
    rule: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    name: str = "S"

    def batch(self, x, y, z, check: bool = True) -> np.ndarray:
        """Evaluate on arrays of points; returns shape ``(m, dim)``."""
        x, y, z = np.broadcast_arrays(*(np.atleast_1d(np.asarray(a, dtype=float)) for a in (x, y, z)))
        if check:
            for a in (x, y, z):
                bad = ~self.carrier.contains(a)
                if np.any(bad):
                    raise DomainError(f"point {a[bad][0]!r} is outside carrier {self.carrier}")
        out = np.asarray(self.rule(x, y, z), dtype=float)
        return out.reshape(x.shape[0], self.target.dim)

    def __call__(self, x: float, y: float, z: float) -> LatticeElement:
        return LatticeElement(self.target, self.batch(x, y, z)[0])


def evaluate(S: VectorSMetric, x: float, y: float, z: float) -> LatticeElement:
    return S(x, y, z)


# -- constructions --------------------------------------------------------


def _sum_abs_rule(x, y, z):
    return np.abs(x - y) + np.abs(y - z) + np.abs(z - x)


def sum_abs(carrier: Carrier | None = None) -> VectorSMetric:
    """``S(x, y, z) = |x - y| + |y - z| + |z - x|`` with scalar values."""
    return VectorSMetric(carrier or Carrier.interval(0.0, 1.0), LatticeSpace.scalar(), _sum_abs_rule, "sum_abs")


def scaled_sum_abs(target: LatticeSpace, weights=None, carrier: Carrier | None = None) -> VectorSMetric:
    """``sum_abs`` lifted into a vector or grid lattice by positive weights.

    ``S(x, y, z)_i = w_i * (|x - y| + |y - z| + |z - x|)``.  For grid
    targets ``weights`` may be a function sampled on the grid.
    """
    if weights is None:
        w = np.ones(target.dim)
    elif callable(weights):
        w = np.asarray(weights(target.grid_points), dtype=float)
    else:
        w = np.asarray(weights, dtype=float)
    if w.shape != (target.dim,) or np.any(w <= 0):
        raise ParameterError("weights must be positive, one per lattice coordinate")

    def rule(x, y, z):
        return _sum_abs_rule(x, y, z)[:, None] * w[None, :]

    return VectorSMetric(carrier or Carrier.interval(0.0, 1.0), target, rule, f"sum_abs[{target}]")


def stacked(*metrics: VectorSMetric) -> VectorSMetric:
    """Pair scalar metrics on a common carrier into one R^d-valued metric."""
    if not metrics:
        raise ParameterError("need at least one metric")
    carrier = metrics[0].carrier
    if any(m.carrier != carrier for m in metrics):
        raise ParameterError("stacked metrics must share a carrier")
    target = LatticeSpace.vector(sum(m.target.dim for m in metrics))

    def rule(x, y, z):
        return np.concatenate([m.batch(x, y, z, check=False) for m in metrics], axis=1)

    return VectorSMetric(carrier, target, rule, "stack(" + ", ".join(m.name for m in metrics) + ")")


def max_construction(base: VectorSMetric) -> VectorSMetric:
    """Join of the three pairwise base values ``S(x,x,y)``, ``S(y,y,z)``, ``S(z,z,x)``."""

    def rule(x, y, z):
        a = base.batch(x, x, y, check=False)
        b = base.batch(y, y, z, check=False)
        c = base.batch(z, z, x, check=False)
        return np.maximum(np.maximum(a, b), c)

    return VectorSMetric(base.carrier, base.target, rule, f"max_of({base.name})")


# -- axiom verification ---------------------------------------------------


@dataclass
class AxiomReport:
    """Outcome of :func:`verify_axioms`.

    ``passed`` maps each axiom label to its verdict; ``counterexamples``
    holds a (shrunk) failing tuple for every failed axiom.
    """

    metric: str
    n_samples: int
    seed: int
    passed: dict[str, bool]
    counterexamples: dict[str, tuple[float, ...]]

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def __str__(self):
        marks = " ".join(f"({k}) {'pass' if v else 'FAIL'}" for k, v in self.passed.items())
        lines = [f"{self.metric}: {marks}  [{self.n_samples} samples, seed {self.seed}]"]
        for k, w in self.counterexamples.items():
            lines.append(f"  ({k}) counterexample: {tuple(float(v) for v in w)}")
        return "\n".join(lines)


_TIE_PATTERNS = (
    (0, 1, 2, 3),  # all distinct (for triples only the first three matter)
    (0, 0, 2, 3),
    (0, 1, 1, 3),
    (0, 1, 0, 3),
    (0, 0, 0, 3),
    (0, 1, 2, 0),
    (0, 0, 2, 2),
)
_TIE_WEIGHTS = np.array([0.4, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])


def _sample_tuples(carrier: Carrier, width: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Rows of ``width`` carrier points, mixing in repeated coordinates.

    Axiom (b) lives on the diagonal where some arguments coincide, which a
    plain uniform draw never hits.
    """
    if carrier.exhaustive:
        return np.array(list(itertools.product(carrier.points, repeat=width)), dtype=float)
    raw = carrier.sample(rng, (n, 4))
    which = rng.choice(len(_TIE_PATTERNS), size=n, p=_TIE_WEIGHTS)
    idx = np.asarray(_TIE_PATTERNS)[which][:, :width]
    return np.take_along_axis(raw, idx, axis=1)


def _all_equal(rows: np.ndarray) -> np.ndarray:
    return np.all(rows == rows[:, :1], axis=1)


def _shrink(fails: Callable[[tuple], bool], point: tuple, carrier: Carrier) -> tuple:
    """Move each group of equal coordinates toward the carrier midpoint.

    Per group, the midpoint itself is tried first and then a bisection on
    the interpolation parameter finds a failing position close to it.
    Candidates that merge two distinct groups are rejected so the
    equality pattern of the original counterexample is preserved.
    """
    if carrier.points is not None:
        return point
    mid = carrier.midpoint
    point = tuple(float(v) for v in point)
    steps = 0

    def valid(cand):
        groups = {v for v in point}
        return len({v for v in cand}) == len(groups) and fails(cand)

    for value in sorted(set(point), key=point.index):
        if steps >= MAX_SHRINK_STEPS:
            break

        def moved(lam):
            new = mid + lam * (value - mid)
            return tuple(new if v == value else v for v in point)

        steps += 1
        if valid(moved(0.0)):
            point = moved(0.0)
            continue
        lo, hi = 0.0, 1.0
        while hi - lo > 2.0**-8 and steps < MAX_SHRINK_STEPS:
            lam = 0.5 * (lo + hi)
            steps += 1
            if valid(moved(lam)):
                hi = lam
            else:
                lo = lam
        point = moved(hi)
    return point


def verify_axioms(
    S: VectorSMetric,
    sample_budget: int = 10_000,
    seed: int = 0,
    tau: float = TAU_EQ,
    gauge: Gauge = MAX_ABS,
) -> AxiomReport:
    """Sample-based check of the three vector S-metric axioms.

    Deterministic for a given ``seed``.  Finite carriers with at most
    ``EXHAUSTIVE_LIMIT`` points are enumerated instead of sampled.
    """
    if sample_budget < 1:
        raise ParameterError("sample_budget must be >= 1")
    rng = np.random.default_rng(seed)
    triples = _sample_tuples(S.carrier, 3, sample_budget, rng)
    quads = _sample_tuples(S.carrier, 4, sample_budget, rng)

    def values(rows):
        return S.batch(rows[:, 0], rows[:, 1], rows[:, 2])

    def fails_a(t):
        return bool(np.any(values(np.array([t[:3]])) < -tau))

    def fails_b(t):
        v = gauge.batch(values(np.array([t[:3]])))[0]
        equal = t[0] == t[1] == t[2]
        return (v > tau) if equal else (v <= tau)

    def fails_c(t):
        x, y, z, a = t
        lhs = values(np.array([[x, y, z]]))
        rhs = values(np.array([[x, x, a], [y, y, a], [z, z, a]])).sum(axis=0)
        return bool(np.any(lhs > rhs + tau))

    v = values(triples)
    g = gauge.batch(v)
    eq = _all_equal(triples)
    bad = {
        "a": np.flatnonzero(np.any(v < -tau, axis=1)),
        "b": np.flatnonzero((eq & (g > tau)) | (~eq & (g <= tau))),
    }
    x, y, z, a = quads.T
    lhs = S.batch(x, y, z)
    rhs = S.batch(x, x, a) + S.batch(y, y, a) + S.batch(z, z, a)
    bad["c"] = np.flatnonzero(np.any(lhs > rhs + tau, axis=1))

    checks = {"a": fails_a, "b": fails_b, "c": fails_c}
    sources = {"a": triples, "b": triples, "c": quads}
    passed, witnesses = {}, {}
    for label in ("a", "b", "c"):
        passed[label] = bad[label].size == 0
        if not passed[label]:
            first = tuple(sources[label][bad[label][0]])
            witnesses[label] = _shrink(checks[label], first, S.carrier)
    return AxiomReport(S.name, len(triples), seed, passed, witnesses)


def symmetry_check(S: VectorSMetric, sample_budget: int = 10_000, seed: int = 0, tau: float = TAU_EQ) -> bool:
    """True iff ``S(x, x, y) == S(y, y, x)`` within ``tau`` on every sampled pair."""
    rng = np.random.default_rng(seed)
    if S.carrier.exhaustive:
        pairs = np.array(list(itertools.product(S.carrier.points, repeat=2)))
    else:
        pairs = S.carrier.sample(rng, (sample_budget, 2))
    x, y = pairs.T
    return bool(np.all(np.abs(S.batch(x, x, y) - S.batch(y, y, x)) <= tau))


METRIC_CATALOG = {"sum_abs": sum_abs}


def metric_from_name(name: str, carrier: Carrier | None = None, target: LatticeSpace | None = None) -> VectorSMetric:
    """Resolve ``"sum_abs"`` or ``"max_of(<name>)"``.

    A non-scalar ``target`` lifts ``sum_abs`` with unit weights.
    """
    name = name.strip()
    if name.startswith("max_of(") and name.endswith(")"):
        return max_construction(metric_from_name(name[len("max_of("):-1], carrier, target))
    if name not in METRIC_CATALOG:
        raise ParameterError(f"unknown metric {name!r}; known: sum_abs, max_of(<metric>)")
    if target is not None and target.kind != "scalar":
        return scaled_sum_abs(target, carrier=carrier)
    return METRIC_CATALOG[name](carrier)
