"""
Ordered vectors and vector-valued S-metrics
===========================================

Componentwise order on R^d, the Archimedean probe, and the axiom checker
run against a good metric and a broken one.
"""

import numpy as np

from vsmetric import lattice as L
from vsmetric.smetric import Carrier, LatticeSpace, VectorSMetric, max_construction, scaled_sum_abs, sum_abs
from vsmetric.smetric import symmetry_check, verify_axioms

R2 = L.LatticeSpace.vector(2)
x = R2.element([1.0, -2.0])
y = R2.element([0.5, 3.0])

# join and meet are coordinatewise
print("x | y =", (x | y).coords, " x & y =", (x & y).coords)
print("x <= x | y:", x <= (x | y), " x <= y:", x <= y, " y <= x:", y <= x)

# (1/n) x shrinks to 0 in the order; the gauge exits early once below tau
probe = L.archimedean_probe(R2.element([3.0, 1.0]))
print("probe stopped after", probe.n_terms, "terms, final gauge", probe.final_gauge)

# the sampled function lattice: sin on a 5-point grid
G = L.LatticeSpace.grid(5)
print("sin on grid:", np.round(G.from_function(np.sin).coords, 3))

unit = Carrier.interval(0.0, 1.0)
S = sum_abs(unit)
print("S(1, 0, 0) =", float(S(1.0, 0.0, 0.0)))

# R^2-valued metric and its max construction
S2 = scaled_sum_abs(R2, [1.0, 2.0], unit)
M = max_construction(S2)
print("R^2 metric at (1, 0, 0):", S2(1.0, 0.0, 0.0).coords, " max_of:", M(1.0, 0.0, 0.0).coords)

for metric in (S, S2, M):
    report = verify_axioms(metric, sample_budget=2000, seed=0)
    print(f"{metric.name:>28}: axioms {report.passed}  symmetric {symmetry_check(metric, 2000)}")

# squaring the sum breaks the tetrahedral inequality; the checker shrinks a witness
broken = VectorSMetric(unit, LatticeSpace.scalar(),
                       lambda x, y, z: (np.abs(x - y) + np.abs(y - z) + np.abs(z - x)) ** 2, "squared")
report = verify_axioms(broken, sample_budget=2000, seed=0)
print("squared sum:", report.passed, "witness", np.round(report.counterexamples["c"], 4))
