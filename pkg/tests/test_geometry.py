import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracgap.errors import DomainError
from fracgap.geometry import Box, Ellipse2D, FractionalOrder, check_alpha, diameters, rescale_to_unit_diameter
from fracgap.potentials import Quadratic, QuadraticPlusTrig, TrigTerm, Zero

lengths = st.lists(st.floats(0.05, 20.0), min_size=1, max_size=3)


def test_diameters_examples():
    d = diameters(Box((1.0,)))
    assert (d.D, d.d) == (1.0, 1.0)
    d = diameters(Box((0.8, 0.6)))
    assert d.D == pytest.approx(1.0, abs=1e-15) and d.d == 0.6
    e = diameters(Ellipse2D(1.0, 0.5))
    assert (e.D, e.d) == (2.0, 1.0)


@pytest.mark.parametrize("alpha", [0.0, -0.5, 2.0000001, float("nan"), 3.0])
def test_alpha_out_of_range(alpha):
    with pytest.raises(DomainError, match=r"alpha must lie in \(0,2\]"):
        check_alpha(alpha)
    with pytest.raises(DomainError):
        FractionalOrder(alpha)


def test_invalid_domains():
    with pytest.raises(DomainError):
        Box((1.0, -2.0))
    with pytest.raises(DomainError):
        Box(())
    with pytest.raises(DomainError):
        Ellipse2D(0.5, 1.0)


def test_rescale_examples():
    dom, pot, s = rescale_to_unit_diameter(Box((2.0,)), Zero(), 1.0)
    assert dom == Box((1.0,)) and isinstance(pot, Zero) and s == 2.0
    dom, pot, s = rescale_to_unit_diameter(Box((2.0,)), Quadratic((0.5,)), 1.0)
    assert dom == Box((1.0,)) and s == 2.0
    assert pot.coefficients[0] == pytest.approx(4.0, rel=1e-15)
    dom, pot, s = rescale_to_unit_diameter(Box((0.6, 0.8)), Zero(), 1.0)
    assert dom == Box((0.6, 0.8)) and s == 1.0


@settings(max_examples=100, deadline=None)
@given(lengths, st.floats(0.1, 2.0))
def test_rescaled_diameter_is_one(ls, alpha):
    dom, _, _ = rescale_to_unit_diameter(Box(tuple(ls)), Zero(), alpha)
    assert diameters(dom).D == pytest.approx(1.0, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(lengths, st.randoms())
def test_box_diameters_permutation_invariant(ls, rnd):
    perm = list(ls)
    rnd.shuffle(perm)
    a, b = diameters(Box(tuple(ls))), diameters(Box(tuple(perm)))
    assert a.d == b.d
    assert a.D == pytest.approx(b.D, rel=1e-15)
    assert a.D >= a.d > 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.2, 3), st.floats(0.1, 2.0))
def test_rescaled_potential_values(c, x, D, alpha):
    # V~(y) = D^alpha V(D y)
    V = QuadraticPlusTrig(Quadratic((c,)), (TrigTerm(0.7, "sin", (1.3,)),))
    dom, Vt, s = rescale_to_unit_diameter(Box((D,)), V, alpha)
    y = x / D
    assert Vt([[y]])[0] == pytest.approx(D**alpha * V([[x]])[0], rel=1e-12, abs=1e-12)
