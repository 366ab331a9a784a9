import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BROKEN, UNIT
from vsmetric.errors import DomainError
from vsmetric.lattice import LatticeSpace
from vsmetric.smetric import (
    Carrier,
    VectorSMetric,
    max_construction,
    metric_from_name,
    scaled_sum_abs,
    stacked,
    sum_abs,
    symmetry_check,
    verify_axioms,
)

DYADIC = [i / 8 for i in range(9)]


def brute_force_axioms(rule):
    """Pure-Python check of all three axioms on every tuple of a 9-point grid."""
    ok = {"a": True, "b": True, "c": True}
    for x, y, z in itertools.product(DYADIC, repeat=3):
        v = rule(x, y, z)
        ok["a"] &= v >= 0
        ok["b"] &= (v == 0) == (x == y == z)
        for a in DYADIC:
            ok["c"] &= v <= rule(x, x, a) + rule(y, y, a) + rule(z, z, a) + 1e-12
    return ok


def py_sum_abs(x, y, z):
    return abs(x - y) + abs(y - z) + abs(z - x)


def py_max_of_sum_abs(x, y, z):
    return max(py_sum_abs(x, x, y), py_sum_abs(y, y, z), py_sum_abs(z, z, x))


def test_brute_force_oracle_agrees_with_verifier():
    assert brute_force_axioms(py_sum_abs) == {"a": True, "b": True, "c": True}
    assert brute_force_axioms(py_max_of_sum_abs) == {"a": True, "b": True, "c": True}
    assert brute_force_axioms(lambda x, y, z: py_sum_abs(x, y, z) ** 2)["c"] is False
    grid = Carrier.finite(DYADIC)
    assert verify_axioms(sum_abs(grid)).ok
    assert verify_axioms(max_construction(sum_abs(grid))).ok


def test_eval_examples(S):
    assert float(S(1, 0, 0)) == 2
    assert float(S(0.5, 0.25, 0)) == 1.0
    for c in (0.0, 0.3, 1.0):
        assert float(S(c, c, c)) == 0


def test_eval_outside_carrier(S):
    with pytest.raises(DomainError):
        S(1.5, 0, 0)


def test_max_construction_examples(S):
    M = max_construction(S)
    assert float(M(1, 0, 0)) == 2
    assert float(M(0.7, 0.7, 0.7)) == 0
    assert M.name == "max_of(sum_abs)"


def test_max_construction_joins_componentwise_in_r2():
    # second component uses a non-monotone reparametrisation so the three
    # pairwise terms are incomparable in R^2
    phi = lambda x: np.sin(3 * x)
    second = VectorSMetric(UNIT, LatticeSpace.scalar(),
                           lambda x, y, z: np.abs(phi(x) - phi(y)) + np.abs(phi(y) - phi(z)) + np.abs(phi(z) - phi(x)))
    base = stacked(sum_abs(UNIT), second)
    M = max_construction(base)
    x, y, z = 0.1, 0.5, 0.9
    terms = [base(x, x, y).coords, base(y, y, z).coords, base(z, z, x).coords]
    np.testing.assert_array_equal(M(x, y, z).coords, np.maximum.reduce(terms))
    argmax = {int(np.argmax([t[i] for t in terms])) for i in range(2)}
    assert len(argmax) == 2  # different terms win in different coordinates


@pytest.mark.parametrize("make", [lambda: sum_abs(UNIT), lambda: max_construction(sum_abs(UNIT)),
                                  lambda: scaled_sum_abs(LatticeSpace.vector(3), [1, 2, 0.5]),
                                  lambda: scaled_sum_abs(LatticeSpace.grid(5), lambda s: 1 + s),
                                  lambda: max_construction(scaled_sum_abs(LatticeSpace.vector(2)))])
def test_shipped_constructions_pass_axioms(make):
    S = make()
    report = verify_axioms(S, 10_000, seed=3)
    assert report.ok, str(report)
    assert symmetry_check(S, 10_000, seed=3)


@pytest.mark.parametrize("name", sorted(BROKEN))
def test_broken_metrics_fail_with_counterexample(name):
    make, axiom = BROKEN[name]
    report = verify_axioms(make(), 10_000, seed=0)
    assert not report.passed[axiom]
    assert axiom in report.counterexamples


def test_constant_metric_witness_is_diagonal():
    w = verify_axioms(BROKEN["constant_one"][0](), 1000, seed=0).counterexamples["b"]
    assert w[0] == w[1] == w[2]
    assert w == (0.5, 0.5, 0.5)  # shrunk onto the midpoint


def test_squared_difference_witness_has_x_equal_y_not_z():
    w = verify_axioms(BROKEN["squared_difference"][0](), 1000, seed=0).counterexamples["b"]
    assert w[0] == w[1] != w[2]
    assert w[0] == 0.5


def test_squared_sum_abs_witness_violates_tetrahedral_inequality():
    x, y, z, a = verify_axioms(BROKEN["squared_sum_abs"][0](), 1000, seed=0).counterexamples["c"]
    f = lambda *t: py_sum_abs(*t) ** 2
    assert f(x, y, z) > f(x, x, a) + f(y, y, a) + f(z, z, a)


def test_verify_axioms_is_deterministic():
    make = BROKEN["squared_sum_abs"][0]
    r1, r2 = verify_axioms(make(), 500, seed=11), verify_axioms(make(), 500, seed=11)
    assert r1.counterexamples == r2.counterexamples


def test_finite_carrier_is_enumerated():
    S = sum_abs(Carrier.finite([0, 0.25, 1]))
    assert verify_axioms(S, 1).n_samples == 27


def test_symmetry_examples(S):
    assert symmetry_check(S)
    assert symmetry_check(max_construction(S), 10_000, seed=5)
    assert float(S(0.3, 0.3, 0.3)) == float(S(0.3, 0.3, 0.3))


def test_symmetry_detects_asymmetric_rule():
    # the one-sided term makes S(x, x, y) differ from S(y, y, x)
    rule = lambda x, y, z: np.abs(x - y) + np.abs(y - z) + np.abs(z - x) + np.maximum(z - x, 0)
    skew = VectorSMetric(UNIT, LatticeSpace.scalar(), rule)
    assert not symmetry_check(skew, 100)


def test_metric_catalog():
    assert metric_from_name("sum_abs").name == "sum_abs"
    assert metric_from_name("max_of(sum_abs)").name == "max_of(sum_abs)"
    assert metric_from_name("max_of(max_of(sum_abs))")(1, 0, 0).coords[0] == 2


@settings(max_examples=25, deadline=None)
@given(power=st.floats(0.2, 5.0), scale=st.floats(0.1, 10.0))
def test_axioms_imply_symmetry(power, scale):
    """Any metric passing verification is also symmetric in the S(x,x,y) sense."""
    phi = lambda x: scale * x**power
    rule = lambda x, y, z: np.abs(phi(x) - phi(y)) + np.abs(phi(y) - phi(z)) + np.abs(phi(z) - phi(x))
    S = VectorSMetric(UNIT, LatticeSpace.scalar(), rule)
    for T in (S, max_construction(S)):
        if verify_axioms(T, 2000, seed=1).ok:
            assert symmetry_check(T, 2000, seed=1)
