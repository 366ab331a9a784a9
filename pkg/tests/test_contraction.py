from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import UNIT
from vsmetric.contraction import ContractionCoefficients, check_inequality, feasibility, rate, rate_pair
from vsmetric.errors import DomainError, ParameterError
from vsmetric.smetric import sum_abs

C = ContractionCoefficients


def exact_rate(h1, h2, h3, h4, h5):
    h1, h2, h3, h4, h5 = map(Fraction, (h1, h2, h3, h4, h5))
    return max((h1 + h2 + h5) / (1 - h3 - 2 * h5), (h1 + h3 + h4) / (1 - h2 - 2 * h4))


@pytest.mark.parametrize("h, expected", [
    ((0, 0, 0, 0, 0), True),
    ((0.1, 0.05, 0.05, 0.02, 0.02), True),
    ((0.5, 0, 0, 0, 0), False),
])
def test_feasibility(h, expected):
    assert feasibility(C(*h)) is expected


def test_weighted_sum():
    assert C(0.1, 0.05, 0.05, 0.02, 0.02).weighted_sum == pytest.approx(0.56, abs=1e-15)
    assert C(0.5).weighted_sum == 1.0


@pytest.mark.parametrize("h", [(-0.1, 0, 0, 0, 0), (0, float("nan"), 0, 0, 0), (0, 0, float("inf"), 0, 0)])
def test_bad_coefficients(h):
    with pytest.raises(ParameterError):
        C(*h)


def test_rate_examples():
    assert rate(C()) == 0
    assert rate(C(0.1, 0.05, 0.05, 0.02, 0.02)) == pytest.approx(float(Fraction(17, 91)), rel=1e-15)
    assert rate(C(0.1, 0.05, 0.05, 0.02, 0.02)) == pytest.approx(0.18681318681, abs=1e-11)
    assert rate(C(0.2)) == pytest.approx(0.2, rel=1e-15)
    assert rate_pair(C(0.1, 0.2, 0.0, 0.0, 0.05)) == pytest.approx((0.35 / 0.9, 0.1 / 0.8))


def test_rate_rejects_infeasible():
    with pytest.raises(ParameterError, match="weighted sum 1"):
        rate(C(0.5))


def random_feasible(rng, n):
    raw = rng.dirichlet(np.ones(6), size=n)[:, :5] / np.array([2, 2, 2, 4, 4])
    return raw * rng.uniform(0, 1, size=(n, 1))


def test_rates_below_one_on_random_feasible_tuples():
    rng = np.random.default_rng(0)
    for h in random_feasible(rng, 10_000):
        c = C(*h)
        assert c.feasible
        assert 1 - c.h3 - 2 * c.h5 > 0 and 1 - c.h2 - 2 * c.h4 > 0
        a = rate(c)
        assert 0 <= a < 1
        assert a == pytest.approx(float(exact_rate(*h)), rel=1e-12)


def test_rate_is_monotone_in_each_coefficient():
    rng = np.random.default_rng(1)
    for h in random_feasible(rng, 2000):
        i = rng.integers(5)
        bumped = h.copy()
        bumped[i] += rng.uniform(0, 0.05)
        c2 = C(*bumped)
        if c2.feasible:
            assert rate(c2) >= rate(C(*h)) - 1e-15


def test_example_maps_pass_at_quarter(S):
    rep = check_inequality(S, lambda x: x / 12, lambda x: x / 12, lambda x: x / 3, C(0.25))
    assert rep.passed and rep.witness is None


def test_identity_p_fails_with_off_diagonal_witness(S):
    rep = check_inequality(S, lambda x: x, lambda x: x, lambda x: x / 3, C(0.25))
    assert not rep.passed
    xi, gamma = rep.witness
    assert xi != gamma
    # LHS = 2|xi - gamma| against (1/4) * 2|xi - gamma| / 3
    assert rep.lhs[0] == pytest.approx(2 * abs(xi - gamma))
    assert rep.rhs[0] == pytest.approx(abs(xi - gamma) / 6)


def test_diagonal_lhs_vanishes_when_q_equals_p(S):
    # with an all-zero right side only the diagonal pairs can pass
    rep = check_inequality(S, lambda x: x / 12, lambda x: x / 12, lambda x: x / 3, C(), sample_budget=64)
    assert not rep.passed and rep.witness[0] != rep.witness[1]
    for x in (0.0, 0.4, 1.0):
        assert float(S(x / 12, x / 12, x / 12)) == 0


def test_map_escaping_carrier(S):
    with pytest.raises(DomainError, match="map p"):
        check_inequality(S, lambda x: x + 0.5, lambda x: x, lambda x: x, C(0.1))


def test_check_is_deterministic(S):
    a = check_inequality(S, lambda x: x, lambda x: x, lambda x: x / 3, C(0.25), 500, seed=4)
    b = check_inequality(S, lambda x: x, lambda x: x, lambda x: x / 3, C(0.25), 500, seed=4)
    assert a == b


def test_three_map_system_needs_a_q_side_term(S):
    p, q, k = (lambda x: x / 10), (lambda x: x / 8), (lambda x: x / 2)
    # on the diagonal S(p x, p x, q x) = x/20 while the h1 term vanishes
    bad = check_inequality(S, p, q, k, C(0.3))
    assert not bad.passed
    xi, gamma = bad.witness
    assert 2 * abs(xi / 10 - gamma / 8) > 0.3 * abs(xi - gamma)
    # |x/5 - y/4| <= |x - y|/5 + y/20 <= 0.3|x - y| + 0.1 * 2 * (3y/8)
    assert check_inequality(S, p, q, k, C(0.3, 0, 0.1, 0, 0)).passed


@given(h1=st.floats(0.25, 0.4999))
def test_example_maps_pass_for_every_admissible_h1(h1):
    S = sum_abs(UNIT)
    rep = check_inequality(S, lambda x: x / 12, lambda x: x / 12, lambda x: x / 3, C(h1), sample_budget=500)
    assert rep.passed
