import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracgap.errors import ConvergenceError, DomainError
from fracgap.specfun import SeriesControl, frac_laplacian_constant, gamma, hyp1f2, hyp2f1, hyp_pfq

mpmath.mp.dps = 40

# frozen from mpmath at 40 digits
HYP1F2_2_1_HALF_MPI2_4 = -1.0
HYP2F1_HALF_2_52_QUARTER = 1.119796082505411342732169638459471392428


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("x, expected", [(0.5, math.sqrt(math.pi)), (5.0, 24.0), (1.5, math.sqrt(math.pi) / 2)])
def test_gamma_examples(x, expected):
    assert rel(gamma(x), expected) < 1e-14


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(DomainError):
        gamma(x)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.1, max_value=20.0))
def test_gamma_recurrence(x):
    assert rel(gamma(x + 1), x * gamma(x)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-30.0, max_value=30.0).filter(lambda x: abs(x - round(x)) > 1e-6 or x > 0.5))
def test_gamma_matches_mpmath(x):
    assert rel(gamma(x), float(mpmath.gamma(x))) < 1e-13


@pytest.mark.parametrize("x", [-10.994140625, -29.9999, -3.0000001, -0.5])
def test_gamma_near_poles(x):
    assert rel(gamma(x), float(mpmath.gamma(x))) < 1e-13


def test_hyp1f2_examples():
    assert hyp1f2(0.3, 1.7, 2.2, 0.0) == 1.0
    z = -3.7
    ref = sum(z**k / math.factorial(k) ** 2 for k in range(60))
    assert rel(hyp1f2(1, 1, 1, z), ref) < 1e-13
    assert abs(hyp1f2(2, 1, 0.5, -math.pi**2 / 4) - HYP1F2_2_1_HALF_MPI2_4) < 1e-13


def test_hyp2f1_examples():
    assert hyp2f1(0.4, 1.2, 3.3, 0.0) == 1.0
    assert rel(hyp2f1(0.5, 2, 2.5, 0.25), HYP2F1_HALF_2_52_QUARTER) < 1e-14


def test_frozen_values_match_live_oracle():
    assert float(mpmath.hyp1f2(2, 1, 0.5, -mpmath.pi**2 / 4)) == pytest.approx(HYP1F2_2_1_HALF_MPI2_4, rel=1e-15)
    assert float(mpmath.hyp2f1(0.5, 2, 2.5, 0.25)) == pytest.approx(HYP2F1_HALF_2_52_QUARTER, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3.5), st.floats(0.2, 3.5), st.floats(-12.0, 12.0))
def test_hyp1f2_matches_series_oracle(a, b1, b2, z):
    ref = float(mpmath.hyp1f2(a, b1, b2, z))
    scale = float(mpmath.hyp1f2(abs(a), b1, b2, abs(z)))
    assert abs(hyp1f2(a, b1, b2, z) - ref) <= 1e-12 * max(abs(ref), scale * 1e-3, 1e-300)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.3, 4), st.floats(-0.9, 0.9))
def test_hyp2f1_matches_series_oracle(a, b, c, z):
    # zeroprec lets mpmath return exact zeros such as 2F1(2, 3; 1; -1/2)
    ref = float(mpmath.hyp2f1(a, b, c, z, zeroprec=200))
    scale = float(mpmath.hyp2f1(abs(a), abs(b), c, abs(z)))
    assert abs(hyp2f1(a, b, c, z) - ref) <= 1e-12 * max(abs(ref), scale * 1e-3, 1e-300)


@pytest.mark.parametrize("z", [-0.8984375, -0.5, -0.99, 0.9])
def test_hyp2f1_rational_case(z):
    # 2F1(2, 3; 1; z) = (1 + 2z) / (1 - z)^4
    assert abs(hyp2f1(2.0, 3.0, 1.0, z) - (1 + 2 * z) / (1 - z) ** 4) <= 1e-13 * (1 - z) ** -4


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.3, 4), st.floats(-0.99, -0.01))
def test_hyp2f1_pfaff_matches_direct_series(a, b, c, z):
    # the untransformed series is an independent route for negative z
    direct = hyp_pfq((a, b), (c,), z, SeriesControl(max_terms=20000))
    scale = float(mpmath.hyp2f1(abs(a), abs(b), c, abs(z)))
    assert abs(hyp2f1(a, b, c, z) - direct) <= 1e-11 * max(abs(direct), scale * 1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(-0.9, 0.9))
def test_hyp2f1_binomial_identity(a, b, z):
    assert abs(hyp2f1(a, b, b, z) * (1 - z) ** a - 1.0) < 1e-12


def test_hyp2f1_domain():
    with pytest.raises(DomainError):
        hyp2f1(0.5, 0.5, 1.0, 1.0)


def test_lower_parameter_pole():
    with pytest.raises(DomainError):
        hyp1f2(1.0, -2.0, 1.0, 0.5)


def test_series_nonconvergence():
    with pytest.raises(ConvergenceError):
        hyp_pfq((1.0,), (1.0, 1.0), -400.0, SeriesControl(max_terms=5))


def test_series_control_invariants():
    with pytest.raises(DomainError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(DomainError):
        SeriesControl(max_terms=0)


def test_polynomial_case_terminates():
    # (-2)_k vanishes for k >= 3
    assert rel(hyp2f1(-2, 1, 1, 0.5), 0.25) < 1e-15


def test_frac_laplacian_constant_value():
    assert rel(frac_laplacian_constant(1, 1.0), 1 / math.pi) < 1e-13


@pytest.mark.parametrize("n", [1, 2, 3])
def test_frac_laplacian_constant_limits(n):
    a = 2 - 1e-4
    near_two = n * gamma(n / 2) * (2 - a) / math.pi ** (n / 2)
    assert abs(frac_laplacian_constant(n, a) / near_two - 1) < 1e-3
    a = 1e-4
    near_zero = a * gamma(n / 2) / (2 * math.pi ** (n / 2))
    assert abs(frac_laplacian_constant(n, a) / near_zero - 1) < 1e-3


@pytest.mark.parametrize("n, a", [(1, 0.3), (2, 1.1), (3, 1.7)])
def test_frac_laplacian_constant_oracle(n, a):
    ref = 2**a * mpmath.gamma((n + a) / 2) / (mpmath.pi ** (n / 2) * abs(mpmath.gamma(-a / 2)))
    assert rel(frac_laplacian_constant(n, a), float(ref)) < 1e-13


def test_frac_laplacian_constant_rejects_two():
    with pytest.raises(DomainError):
        frac_laplacian_constant(2, 2.0)
