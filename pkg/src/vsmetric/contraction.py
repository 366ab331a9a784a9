"""Five-coefficient contraction condition for three self-maps p, q, k.

The condition compares ``S(p x, p x, q y)`` with a nonnegative combination
of five metric terms::

    h1 S(kx, kx, ky) + h2 S(px, px, kx) + h3 S(qy, qy, ky)
        + h4 S(px, px, ky) + h5 S(qy, qy, kx)

and is admissible when ``2 h1 + 2 h2 + 2 h3 + 4 h4 + 4 h5 < 1``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .lattice import TAU_EQ
from .smetric import VectorSMetric, apply_map

WEIGHTS = (2.0, 2.0, 2.0, 4.0, 4.0)


@dataclass(frozen=True)
class ContractionCoefficients:
    h1: float = 0.0
    h2: float = 0.0
    h3: float = 0.0
    h4: float = 0.0
    h5: float = 0.0

    def __post_init__(self):
        for name in ("h1", "h2", "h3", "h4", "h5"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ParameterError(f"coefficient {name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, values: Sequence[float]) -> ContractionCoefficients:
        values = tuple(values)
        if len(values) != 5:
            raise ParameterError(f"expected five coefficients, got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.h1, self.h2, self.h3, self.h4, self.h5)

    @property
    def weighted_sum(self) -> float:
        return math.fsum(w * h for w, h in zip(WEIGHTS, self.as_tuple()))

    @property
    def feasible(self) -> bool:
        return self.weighted_sum < 1.0


def feasibility(c: ContractionCoefficients) -> bool:
    return c.feasible


def _require_feasible(c: ContractionCoefficients) -> None:
    if not c.feasible:
        raise ParameterError(
            f"infeasible coefficients {c.as_tuple()}: weighted sum {c.weighted_sum!r} >= 1"
        )


def rate_pair(c: ContractionCoefficients) -> tuple[float, float]:
    """Per-step rates for the p-step and the q-step of the alternating iteration."""
    _require_feasible(c)
    a1 = (c.h1 + c.h2 + c.h5) / (1.0 - c.h3 - 2.0 * c.h5)
    a2 = (c.h1 + c.h3 + c.h4) / (1.0 - c.h2 - 2.0 * c.h4)
    return a1, a2


def rate(c: ContractionCoefficients) -> float:
    """Geometric factor bounding successive residuals: ``max`` of both step rates."""
    return max(rate_pair(c))


@dataclass
class InequalityReport:
    """Outcome of a sampled contraction-inequality check.

    On failure ``witness`` is the ``(x, y)`` pair with the largest
    violation and ``lhs`` / ``rhs`` hold the lattice values there.
    """

    passed: bool
    n_samples: int
    seed: int
    max_violation: float
    witness: tuple[float, float] | None = None
    lhs: tuple[float, ...] | None = None
    rhs: tuple[float, ...] | None = None

    def __bool__(self):
        return self.passed


def sample_pairs(carrier, n: int, rng: np.random.Generator) -> np.ndarray:
    """``(n, 2)`` pairs of carrier points; one in eight lies on the diagonal."""
    if carrier.exhaustive:
        return np.array(list(itertools.product(carrier.points, repeat=2)), dtype=float)
    pairs = carrier.sample(rng, (n, 2))
    pairs[::8, 1] = pairs[::8, 0]
    return pairs


def mapped(f: Callable, xs: np.ndarray, carrier, label: str) -> np.ndarray:
    """Apply ``f`` and insist the result stays in the carrier."""
    out = apply_map(f, xs)
    bad = ~carrier.contains(out)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DomainError(f"map {label} sends {xs[i]!r} to {out[i]!r}, outside carrier {carrier}")
    return out


def compare(lhs: np.ndarray, rhs: np.ndarray, pairs: np.ndarray, seed: int, tau: float) -> InequalityReport:
    excess = np.max(lhs - rhs, axis=1)
    worst = int(np.argmax(excess))
    passed = bool(excess[worst] <= tau)
    report = InequalityReport(passed, len(pairs), seed, float(max(excess[worst], 0.0)))
    if not passed:
        report.witness = (float(pairs[worst, 0]), float(pairs[worst, 1]))
        report.lhs = tuple(lhs[worst].tolist())
        report.rhs = tuple(rhs[worst].tolist())
    return report


def check_inequality(
    S: VectorSMetric,
    p: Callable,
    q: Callable,
    k: Callable,
    c: ContractionCoefficients,
    sample_budget: int = 10_000,
    seed: int = 0,
    tau: float = TAU_EQ,
) -> InequalityReport:
    """Sample ``(x, y)`` pairs and test the contraction inequality.

    The comparison is coordinatewise with slack ``tau``.  Pass ``q = p``
    for the two-map form.
    """
    _require_feasible(c)
    rng = np.random.default_rng(seed)
    pairs = sample_pairs(S.carrier, sample_budget, rng)
    x, y = pairs[:, 0], pairs[:, 1]
    px, qy = mapped(p, x, S.carrier, "p"), mapped(q, y, S.carrier, "q")
    kx, ky = mapped(k, x, S.carrier, "k"), mapped(k, y, S.carrier, "k")

    lhs = S.batch(px, px, qy)
    terms = ((kx, kx, ky), (px, px, kx), (qy, qy, ky), (px, px, ky), (qy, qy, kx))
    rhs = np.zeros_like(lhs)
    for h, args in zip(c.as_tuple(), terms):
        if h:
            rhs += h * S.batch(*args)
    return compare(lhs, rhs, pairs, seed, tau)
