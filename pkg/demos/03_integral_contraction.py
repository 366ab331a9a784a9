"""
Integral-type contraction
=========================

p(x) = x/12, k(x) = x/3 with every metric value passed through
F(t) = int_0^t g, for each gauge g in the catalog.
"""

import numpy as np

from vsmetric.contraction import ContractionCoefficients
from vsmetric.integral import GAUGE_CATALOG, check_integral_inequality, integral_rate, integrate_gauge
from vsmetric.integral import iterate_integral, uniqueness_integral
from vsmetric.smetric import Carrier, sum_abs

unit = Carrier.interval(0.0, 1.0)
S = sum_abs(unit)
p = lambda x: x / 12
k = lambda x: x / 3
c = ContractionCoefficients(1 / 3)
print("theta =", integral_rate(c))

t = np.array([0.1, 0.5, 1.0, 2.0])
for name, g in GAUGE_CATALOG.items():
    print(f"F_{name}({t}) = {integrate_gauge(g, t)}")
print("exp_decay error vs 1 - e^-t:", np.max(np.abs(integrate_gauge(GAUGE_CATALOG['exp_decay'], t) - 1 + np.exp(-t))))

# the true contraction ratio is 1/4, so h1 = 1/4 is the boundary for the "one" gauge
for h1 in (0.25, 0.2):
    rep = check_integral_inequality(S, p, k, ContractionCoefficients(h1), GAUGE_CATALOG["one"])
    print(f"h1 = {h1}: passes {rep.passed}, witness {rep.witness}")

for name, g in GAUGE_CATALOG.items():
    tr = iterate_integral(S, p, k, c, g, 1.0)
    print(f"{name:>9}: {tr.verdict} in {tr.n_iter} steps, F-space ratio {tr.ratios[0]:.6f}, limit {tr.limit:.2e}")

print("unique:", uniqueness_integral(S, p, k, c, GAUGE_CATALOG["one"], [0, 0.5, 1]).unique)
