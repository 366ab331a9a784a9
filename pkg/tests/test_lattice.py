import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vsmetric.errors import DimensionError, DomainError, ParameterError
from vsmetric.lattice import (
    MAX_ABS,
    LatticeSpace,
    add,
    archimedean_probe,
    join,
    leq,
    meet,
    scale,
    subcontraction_implies_zero,
    zero,
)

R2 = LatticeSpace.vector(2)


def e(*coords, space=R2):
    return space.element(coords)


@pytest.mark.parametrize(
    "x, y, expected",
    [((0, 0), (0, 0), True), ((1, 3), (2, 2), False), ((1, 1), (2, 3), True)],
)
def test_leq(x, y, expected):
    assert leq(e(*x), e(*y)) is expected


def test_incomparable_pair_is_not_an_error():
    x, y = e(1, 3), e(2, 2)
    assert not leq(x, y) and not leq(y, x)
    assert not (x <= y) and not (x >= y)


def test_join_meet():
    assert join(e(1, 3), e(2, 2)) == e(2, 3)
    assert meet(e(1, 3), e(2, 2)) == e(1, 2)
    x = e(0.3, -4)
    assert join(x, x) == x
    assert (e(1, 3) | e(2, 2)) == e(2, 3)
    assert (e(1, 3) & e(2, 2)) == e(1, 2)


def test_vector_ops():
    assert add(e(1, 2), e(3, 4)) == e(4, 6)
    assert scale(0, e(5, 7)) == e(0, 0)
    assert scale(2, e(1, -1)) == e(2, -2)
    assert zero(R2) == e(0, 0)
    assert e(1, 2) - e(1, 2) == zero(R2)


def test_non_finite_scalar_rejected():
    with pytest.raises(ParameterError):
        scale(float("inf"), e(1, 1))


def test_cross_space_rejected():
    with pytest.raises(DimensionError):
        leq(e(1, 2), LatticeSpace.vector(3).element([1, 2, 3]))
    with pytest.raises(DimensionError):
        join(e(1, 2), LatticeSpace.grid(2).element([1, 2]))
    with pytest.raises(DimensionError):
        R2.element([1, 2, 3])


def test_elements_are_immutable():
    x = e(1, 2)
    with pytest.raises(ValueError):
        x.coords[0] = 5
    with pytest.raises(AttributeError):
        x.coords = np.zeros(2)


def test_grid_space_samples_functions():
    G = LatticeSpace.grid(5)
    f = G.from_function(lambda s: s**2)
    np.testing.assert_allclose(f.coords, [0, 1 / 16, 1 / 4, 9 / 16, 1])


def test_archimedean_probe_examples():
    rep = archimedean_probe(e(1, 1), n_max=4)
    np.testing.assert_allclose(rep.terms, [[1, 1], [1 / 2, 1 / 2], [1 / 3, 1 / 3], [1 / 4, 1 / 4]])
    assert rep.decreasing

    rep = archimedean_probe(e(0, 0), n_max=7)
    assert rep.decreasing and np.all(rep.terms == 0)

    rep = archimedean_probe(e(2, 6), n_max=3)
    np.testing.assert_allclose(rep.term(3).coords, [2 / 3, 2])
    assert rep.decreasing


def test_archimedean_probe_default_budget_runs_to_the_end():
    rep = archimedean_probe(e(1, 1))
    assert rep.n_terms == 10**6 and not rep.early_exit
    assert rep.decreasing and rep.gauges_nonincreasing
    assert rep.final_gauge == pytest.approx(1e-6)


def test_archimedean_probe_exits_early_below_tolerance():
    rep = archimedean_probe(e(1e-9, 0), n_max=10**6)
    assert rep.early_exit and rep.final_gauge < 1e-12
    assert rep.n_terms == 1001


def test_archimedean_probe_requires_positive_cone():
    with pytest.raises(DomainError):
        archimedean_probe(e(-1, 1), n_max=3)


@pytest.mark.parametrize("x, gamma", [((0, 0), 0.5), ((1, 0), 0.5), ((3, 3), 0.9)])
def test_subcontraction_implies_zero_examples(x, gamma):
    assert subcontraction_implies_zero(e(*x), gamma)


@pytest.mark.parametrize("gamma", [-0.1, 1.0, 2.0])
def test_subcontraction_gamma_range(gamma):
    with pytest.raises(ParameterError):
        subcontraction_implies_zero(e(1, 1), gamma)


# -- properties -----------------------------------------------------------

reals = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
SPACES = [LatticeSpace.scalar(), LatticeSpace.vector(3), LatticeSpace.grid(6)]


def elements(space):
    return st.lists(reals, min_size=space.dim, max_size=space.dim).map(space.element)


@pytest.mark.parametrize("space", SPACES, ids=str)
@settings(max_examples=1000, deadline=None)
@given(data=st.data(), omega=st.floats(1e-6, 1e3))
def test_order_translation_and_positive_scaling(space, data, omega):
    x, y, z = (data.draw(elements(space)) for _ in range(3))
    lo, hi = meet(x, y), join(x, y)
    assert leq(lo, hi)
    assert leq(lo + z, hi + z, tol=1e-9)
    assert leq(omega * lo, omega * hi)


@pytest.mark.parametrize("space", SPACES, ids=str)
@given(data=st.data())
def test_partial_order_and_lattice_laws(space, data):
    x, y, z = (data.draw(elements(space)) for _ in range(3))
    assert leq(x, x)
    if leq(x, y) and leq(y, x):
        assert x == y
    if leq(x, y) and leq(y, z):
        assert leq(x, z)
    j = join(x, y)
    assert leq(x, j) and leq(y, j)
    if leq(x, z) and leq(y, z):
        assert leq(j, z)
    m = meet(x, y)
    assert leq(m, x) and leq(m, y)
    assert meet(x, join(x, y)) == x
    assert join(x, meet(x, y)) == x
    assert add(x, zero(space)) == x


@pytest.mark.parametrize("space", SPACES, ids=str)
@given(data=st.data())
def test_max_abs_gauge_is_monotone_on_positive_cone(space, data):
    x = data.draw(elements(space))
    y = data.draw(elements(space))
    a, b = join(x, zero(space)), join(x, zero(space)) + join(y, zero(space))
    assert leq(a, b)
    assert MAX_ABS(a) <= MAX_ABS(b)
    assert MAX_ABS(zero(space)) == 0


@pytest.mark.parametrize("space", SPACES, ids=str)
@given(data=st.data(), gamma=st.floats(0, 0.999))
def test_subcontraction_holds_on_positive_cone(space, data, gamma):
    x = join(data.draw(elements(space)), zero(space))
    assert subcontraction_implies_zero(x, gamma)


@given(st.lists(st.floats(0, 1e3), min_size=3, max_size=3), st.integers(1, 500))
def test_archimedean_probe_property(coords, n_max):
    rep = archimedean_probe(LatticeSpace.vector(3).element(coords), n_max=n_max)
    assert rep.decreasing and rep.gauges_nonincreasing
    g = MAX_ABS.batch(rep.terms)
    assert np.all(np.diff(g) <= 0)
