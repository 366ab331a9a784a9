"""Named maps and map-system presets addressable from scenario files."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError
from .smetric import Carrier


def parse_number(text) -> Fraction:
    """Decimal or ``a/b`` literal as an exact fraction."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"not a number: {text!r}") from None


@dataclass(frozen=True)
class AffineMap:
    """``x -> a*x + b`` with exact rational coefficients.

    Multiplication by ``a`` is done as ``x * num / den`` so that e.g.
    ``1/12`` evaluates as a true division by 12.
    """

    a: Fraction
    b: Fraction = Fraction(0)

    def __call__(self, x):
        return x * self.a.numerator / self.a.denominator + float(self.b)

    def inverse(self, y):
        if self.a == 0:
            raise ParameterError("constant map has no inverse")
        return (y - float(self.b)) * self.a.denominator / self.a.numerator

    def image(self, carrier: Carrier) -> tuple[float, float]:
        ends = sorted((self(carrier.lo), self(carrier.hi)))
        return ends[0], ends[1]

    def __str__(self):
        return f"affine({self.a}, {self.b})"


IDENTITY = AffineMap(Fraction(1))
ONE_MINUS = AffineMap(Fraction(-1), Fraction(1))

MAP_CATALOG = {
    "identity": IDENTITY,
    "one_minus": ONE_MINUS,
}

#: name -> (p, q, k)
SYSTEM_PRESETS = {
    "example_4_2": (AffineMap(Fraction(1, 12)), AffineMap(Fraction(1, 12)), AffineMap(Fraction(1, 3))),
    "three_map_demo": (AffineMap(Fraction(1, 10)), AffineMap(Fraction(1, 8)), AffineMap(Fraction(1, 2))),
    "identity": (IDENTITY, IDENTITY, IDENTITY),
}


def map_from_spec(spec: str) -> AffineMap:
    """Resolve ``"identity"``, ``"one_minus"`` or ``"affine(a, b)"``."""
    spec = spec.strip()
    if spec in MAP_CATALOG:
        return MAP_CATALOG[spec]
    if spec.startswith("affine(") and spec.endswith(")"):
        parts = [s for s in spec[len("affine("):-1].split(",")]
        if len(parts) != 2:
            raise ParameterError(f"affine map needs two coefficients: {spec!r}")
        return AffineMap(parse_number(parts[0]), parse_number(parts[1]))
    raise ParameterError(f"unresolvable map {spec!r}; known: {', '.join(MAP_CATALOG)}, affine(a, b)")
