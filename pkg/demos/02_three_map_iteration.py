"""
Alternating iteration for three maps
====================================

p(x) = x/10, q(x) = x/8, k(x) = x/2 on [0, 1].  The iterates satisfy
k(x_{b+1}) = p(x_b) on even steps and q(x_b) on odd steps.
"""

import numpy as np

from vsmetric.contraction import ContractionCoefficients, check_inequality, rate, rate_pair
from vsmetric.smetric import Carrier, sum_abs
from vsmetric.solver import MapSystem, iterate, point_of_coincidence, uniqueness_probe, weak_compatibility_check

unit = Carrier.interval(0.0, 1.0)
S = sum_abs(unit)
m = MapSystem(lambda x: x / 10, lambda x: x / 8, lambda x: x / 2, unit)  # preimage by bisection

# a pure h1 bound cannot hold: p and q differ on the diagonal where the k term is 0
bad = ContractionCoefficients(0.3)
print("h = (0.3, 0, 0, 0, 0):", check_inequality(S, m.p, m.q, m.k, bad))

c = ContractionCoefficients(0.3, 0, 0.1, 0, 0)
print("h = (0.3, 0, 0.1, 0, 0): weighted sum", c.weighted_sum, "passes:",
      check_inequality(S, m.p, m.q, m.k, c).passed)
print("step rates", rate_pair(c), "-> alpha", rate(c))

trace = iterate(S, m, c, 1.0)
print(trace.verdict, "after", trace.n_iter, "steps, limit", trace.limit)
print("residual ratios:", np.round(trace.ratios[:6], 4))
print("dominated by alpha^b r0:", trace.dominated())

pc = point_of_coincidence(S, m, trace)
print("point of coincidence confirmed:", pc.confirmed, "omega", pc.omega)
print("weakly compatible (p,k), (q,k):", bool(weak_compatibility_check(m, "p")), bool(weak_compatibility_check(m, "q")))
print("unique from 5 starts:", uniqueness_probe(S, m, c, np.linspace(0, 1, 5)).unique)

print(trace.to_csv().splitlines()[:3])
