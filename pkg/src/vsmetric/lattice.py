"""Finite-dimensional linear lattices (Riesz spaces).

Three concrete spaces are provided, all ordered componentwise:

* ``scalar``  -- the real line,
* ``vector``  -- R^d,
* ``grid``    -- R^g holding samples of a function on a uniform grid of [0, 1].

Elements are immutable; every operation returns a new element.  Pairs that
are not comparable are an ordinary outcome: ``leq(x, y)`` and ``leq(y, x)``
may both be false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DimensionError, DomainError, ParameterError

#: Default tolerance for comparing results of floating point arithmetic.
TAU_EQ = 1e-12

KINDS = ("scalar", "vector", "grid")


@dataclass(frozen=True)
class LatticeSpace:
    """Shape and order descriptor of a concrete linear lattice."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown lattice kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ParameterError(f"lattice dimension must be a positive integer, got {self.dim!r}")
        if self.kind == "scalar" and self.dim != 1:
            raise ParameterError("scalar lattice has dimension 1")

    @classmethod
    def scalar(cls) -> LatticeSpace:
        return cls("scalar", 1)

    @classmethod
    def vector(cls, d: int) -> LatticeSpace:
        return cls("vector", d)

    @classmethod
    def grid(cls, g: int) -> LatticeSpace:
        return cls("grid", g)

    @property
    def grid_points(self) -> np.ndarray:
        """Sample locations in [0, 1]; only meaningful for grid spaces."""
        if self.kind != "grid":
            raise DimensionError(f"{self.kind} lattice has no sample grid")
        return np.linspace(0.0, 1.0, self.dim)

    def element(self, coords) -> LatticeElement:
        return LatticeElement(self, coords)

    def zero(self) -> LatticeElement:
        return LatticeElement(self, np.zeros(self.dim))

    def ones(self) -> LatticeElement:
        return LatticeElement(self, np.ones(self.dim))

    def from_function(self, f: Callable[[np.ndarray], np.ndarray]) -> LatticeElement:
        """Sample ``f`` on the grid of a grid space."""
        return LatticeElement(self, f(self.grid_points))

    def __str__(self):
        return "R" if self.kind == "scalar" else f"{self.kind}({self.dim})"


class LatticeElement:
    """An element of a :class:`LatticeSpace`.

    Supports ``+``, ``-``, scalar ``*``, ``|`` (join), ``&`` (meet) and the
    partial order through ``<=`` / ``>=``.  ``==`` is exact coordinate
    equality; use :func:`close` when comparing results of float arithmetic.
    """

    __slots__ = ("space", "coords")

    def __init__(self, space: LatticeSpace, coords):
        arr = np.array(coords, dtype=float).reshape(-1)
        if arr.shape != (space.dim,):
            raise DimensionError(
                f"{space} expects {space.dim} coordinates, got {arr.size}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coords", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LatticeElement is immutable")

    def __repr__(self):
        vals = ", ".join(f"{c:g}" for c in self.coords)
        return f"LatticeElement({self.space}, [{vals}])"

    def __len__(self):
        return self.space.dim

    def __iter__(self):
        return iter(self.coords.tolist())

    def __float__(self):
        if self.space.dim != 1:
            raise DimensionError("only one-dimensional elements convert to float")
        return float(self.coords[0])

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash((self.space, self.coords.tobytes()))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1.0, other))

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, omega):
        if isinstance(omega, LatticeElement):
            return NotImplemented
        return scale(omega, self)

    __rmul__ = __mul__

    def __or__(self, other):
        return join(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __le__(self, other):
        return leq(self, other)

    def __ge__(self, other):
        return leq(other, self)

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return is_nonnegative(self, tol)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coords) <= tol))


def _same_space(x: LatticeElement, y: LatticeElement) -> None:
    if x.space != y.space:
        raise DimensionError(f"elements of {x.space} and {y.space} cannot be combined")


def leq(x: LatticeElement, y: LatticeElement, tol: float = 0.0) -> bool:
    """``x <= y`` in the componentwise order, with optional per-coordinate slack."""
    _same_space(x, y)
    return bool(np.all(x.coords <= y.coords + tol))


def close(x: LatticeElement, y: LatticeElement, tol: float = TAU_EQ) -> bool:
    _same_space(x, y)
    return bool(np.all(np.abs(x.coords - y.coords) <= tol))


def join(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    _same_space(x, y)
    return LatticeElement(x.space, np.maximum(x.coords, y.coords))


def meet(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    _same_space(x, y)
    return LatticeElement(x.space, np.minimum(x.coords, y.coords))


def join_all(elements: Iterable[LatticeElement]) -> LatticeElement:
    it = iter(elements)
    acc = next(it)
    for e in it:
        acc = join(acc, e)
    return acc


def add(x: LatticeElement, y: LatticeElement) -> LatticeElement:
    _same_space(x, y)
    return LatticeElement(x.space, x.coords + y.coords)


def scale(omega: float, x: LatticeElement) -> LatticeElement:
    omega = float(omega)
    if not math.isfinite(omega):
        raise ParameterError(f"scalar must be finite, got {omega}")
    return LatticeElement(x.space, omega * x.coords)


def zero(space: LatticeSpace) -> LatticeElement:
    return space.zero()


def is_nonnegative(x: LatticeElement, tol: float = 0.0) -> bool:
    """Membership in the positive cone V+."""
    return bool(np.all(x.coords >= -tol))


# -- gauges ---------------------------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """Scalar functional used as a finite test for order-smallness.

    ``rule`` maps an array whose last axis holds lattice coordinates to a
    nonnegative real per row.  A gauge must be monotone on the positive
    cone, vanish at zero, and vanish only at zero.
    """

    name: str
    rule: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> float:
        coords = x.coords if isinstance(x, LatticeElement) else np.asarray(x, dtype=float)
        return float(self.rule(coords))

    def batch(self, coords: np.ndarray) -> np.ndarray:
        """Gauge of every row of a ``(m, dim)`` array."""
        return np.asarray(self.rule(np.asarray(coords, dtype=float)), dtype=float)


def _max_abs(a):
    return np.max(np.abs(a), axis=-1)


def _l1(a):
    return np.sum(np.abs(a), axis=-1)


MAX_ABS = Gauge("max_abs", _max_abs)
L1 = Gauge("l1", _l1)


# -- Archimedean probe ----------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    """Result of :func:`archimedean_probe`.

    The probed sequence is ``x / n`` for ``n = 1 .. n_terms``; it is kept
    implicitly and materialised on demand by :attr:`terms`.
    """

    x: LatticeElement
    n_terms: int
    decreasing: bool
    gauges_nonincreasing: bool
    final_gauge: float
    early_exit: bool

    def term(self, n: int) -> LatticeElement:
        if not 1 <= n <= self.n_terms:
            raise IndexError(n)
        return scale(1.0 / n, self.x)

    @property
    def terms(self) -> np.ndarray:
        n = np.arange(1, self.n_terms + 1, dtype=float)
        return self.x.coords[None, :] / n[:, None]


def archimedean_probe(
    x: LatticeElement,
    n_max: int = 10**6,
    gauge: Gauge = MAX_ABS,
    tau: float = TAU_EQ,
    block: int = 65536,
) -> ProbeReport:
    """Check that ``x/n`` decreases in order and shrinks in gauge.

    The sequence is scanned in blocks so the probe never holds more than
    ``block`` terms in memory, and stops early once the gauge falls below
    ``tau``.
    """
    if not is_nonnegative(x):
        raise DomainError(f"archimedean probe needs x >= 0, got {x!r}")
    if int(n_max) != n_max or n_max < 1:
        raise ParameterError(f"n_max must be a positive integer, got {n_max!r}")
    n_max = int(n_max)

    decreasing = True
    nonincreasing = True
    prev_coords = None
    prev_gauge = math.inf
    last_gauge = gauge(x)
    n_terms = 0
    early = False
    start = 1
    while start <= n_max:
        stop = min(start + block, n_max + 1)
        n = np.arange(start, stop, dtype=float)
        terms = x.coords[None, :] / n[:, None]
        g = gauge.batch(terms)

        below = np.flatnonzero(g < tau)
        if below.size:
            cut = below[0] + 1
            terms, g = terms[:cut], g[:cut]
            early = True

        if prev_coords is not None:
            decreasing &= bool(np.all(terms[0] <= prev_coords))
            nonincreasing &= bool(g[0] <= prev_gauge)
        decreasing &= bool(np.all(terms[1:] <= terms[:-1]))
        nonincreasing &= bool(np.all(g[1:] <= g[:-1]))

        prev_coords, prev_gauge = terms[-1], g[-1]
        last_gauge = float(g[-1])
        n_terms += len(terms)
        if early:
            break
        start = stop

    return ProbeReport(x, n_terms, decreasing, nonincreasing, last_gauge, early)


def subcontraction_implies_zero(x: LatticeElement, gamma: float, tol: float = 0.0) -> bool:
    """Check on one instance that ``x <= gamma * x`` with ``0 <= gamma < 1`` forces ``x = 0``.

    Returns True when the implication holds (including vacuously).
    """
    gamma = float(gamma)
    if not (0.0 <= gamma < 1.0):
        raise ParameterError(f"gamma must lie in [0, 1), got {gamma}")
    if not is_nonnegative(x):
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if not leq(x, scale(gamma, x), tol):
        return True
    return x.is_zero(tol)
