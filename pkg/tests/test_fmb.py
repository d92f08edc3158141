import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dimlab.errors import DomainError
from dimlab.thermo import (Potential, alpha_cascade, cascade_residuals, g_m, log_alpha_cascade,
                           solve_dimension_gauss, solve_fmb)

u_open = st.floats(min_value=0.5005, max_value=0.9995)


@pytest.mark.parametrize("u", [0.6, 0.75, 0.9])
def test_g1_is_identity(u):
    assert g_m(1, u) == pytest.approx(u, rel=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3, 7, 50])
def test_g_at_one(m):
    assert g_m(m, 1.0) == 1.0


def test_g2_three_quarters():
    assert g_m(2, 0.75) == 0.5625


def test_g_matches_original_form_exactly_in_rationals():
    for m in (2, 3, 5):
        for u in (Fraction(3, 5), Fraction(7, 10), Fraction(9, 10)):
            exact = u ** m * (2 * u - 1) / (u ** m - (1 - u) ** m)
            assert g_m(m, float(u)) == pytest.approx(float(exact), rel=1e-14)


def test_g_domain_and_limit():
    with pytest.raises(DomainError):
        g_m(2, 0.5)
    with pytest.raises(DomainError):
        g_m(2, 0.3)
    assert g_m(3, 0.5, limit=True) == pytest.approx(1 / 6)
    assert g_m(3, 0.5 + 1e-9) == pytest.approx(1 / 6, rel=1e-6)


@given(st.integers(min_value=1, max_value=8), u_open)
def test_g_decreasing_in_m(m, u):
    assert g_m(m + 1, u) <= g_m(m, u)


def test_cascade_e_three_quarters():
    a1, a2 = alpha_cascade(2, math.e, 0.75)
    assert a1 == pytest.approx(math.exp(0.75), rel=1e-14)
    assert a2 == pytest.approx(math.exp(0.25), rel=1e-14)
    assert a1 ** 0.5 * a2 ** 0.75 == pytest.approx(math.exp(9 / 16), rel=1e-14)


def test_cascade_m1():
    assert alpha_cascade(1, 7.0, 0.8) == [pytest.approx(7.0)]


@given(st.integers(min_value=2, max_value=6), st.floats(min_value=1.1, max_value=100), u_open)
def test_cascade_identities(m, B, u):
    res = cascade_residuals(m, B, u)
    assert max(res.values()) < 1e-10
    assert abs(math.fsum(log_alpha_cascade(m, B, u)) - math.log(B)) < 1e-12


def test_cascade_domain():
    with pytest.raises(DomainError):
        alpha_cascade(2, 1.0, 0.7)
    with pytest.raises(DomainError):
        alpha_cascade(2, 2.0, 1.0)


@pytest.mark.parametrize("B", [2.0, 10.0])
def test_fmb_m1_matches_gauss(B):
    a = solve_fmb(1, B, tol=1e-9)
    b = solve_dimension_gauss(Potential.constant(math.log(B)), tol=1e-9, digit_cap=400, n=2)
    assert abs(a.value - b.value) < 1e-6


def test_fmb_monotone_in_B():
    vals = [solve_fmb(1, B, tol=1e-7).value for B in (1.5, 2, 4, 10, 100)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert 0.5 < vals[-1] < 0.6


def test_fmb_nondecreasing_in_m():
    vals = [solve_fmb(m, 2.0, tol=1e-7).value for m in (1, 2, 3, 5)]
    assert all(x <= y + 1e-9 for x, y in zip(vals, vals[1:]))


def test_fmb_near_one_for_small_B():
    assert solve_fmb(1, 1.01, tol=1e-7).value > 0.98


def test_fmb_rejects_bad_B():
    with pytest.raises(DomainError):
        solve_fmb(1, 1.0)
