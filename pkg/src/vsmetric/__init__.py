"""Vector S-metric spaces over linear lattices and common-fixed-point iteration."""

from .contraction import ContractionCoefficients, check_inequality, feasibility, rate, rate_pair
from .errors import (
    DimensionError,
    DomainError,
    ParameterError,
    RangeContainmentError,
    UnsupportedLatticeError,
    VSMetricError,
)
from .integral import (
    IntegralGauge,
    IntegralRate,
    check_integral_inequality,
    gauge_from_name,
    integral_rate,
    integrate_gauge,
    iterate_integral,
    uniqueness_integral,
)
from .lattice import (
    MAX_ABS,
    TAU_EQ,
    Gauge,
    LatticeElement,
    LatticeSpace,
    archimedean_probe,
    join,
    leq,
    meet,
    subcontraction_implies_zero,
)
from .smetric import (
    Carrier,
    VectorSMetric,
    max_construction,
    scaled_sum_abs,
    stacked,
    sum_abs,
    symmetry_check,
    verify_axioms,
)
from .solver import (
    ConvergenceTrace,
    MapSystem,
    iterate,
    iterate_two_map,
    point_of_coincidence,
    uniqueness_probe,
    weak_compatibility_check,
    weakly_compatible,
)

__version__ = "0.1.0"
