import math

import pytest
from hypothesis import given, strategies as st

from dimlab.errors import DomainError, InconclusiveError
from dimlab.symbolic import BetaSystem
from dimlab.thermo import Potential, aitken, bracket_root, solve_dimension_beta, solve_dimension_gauss

from conftest import LOG2

# transfer-operator collocation (30 Chebyshev nodes) of P(-t log|G'|) = t log 2
GAUSS_LOG2_ROOT = 0.8039363653183


def test_bracket_root_linear():
    lo, hi, flo, fhi = bracket_root(lambda x: 0.3 - x, 0.0, 1.0, tol=1e-10)
    assert hi - lo <= 1e-10 + 1e-16
    assert flo >= 0 >= fhi
    assert lo <= 0.3 <= hi


def test_bracket_root_needs_sign_change():
    with pytest.raises(InconclusiveError) as info:
        bracket_root(lambda x: 1.0 + x, 0.0, 1.0)
    assert "f(a)" in info.value.residuals


def test_aitken_geometric():
    xs = [1 + 0.5 ** k for k in range(3)]
    assert aitken(xs) == pytest.approx(1.0)


def test_doubling_closed_form(doubling):
    res = solve_dimension_beta(Potential.constant(0.693147), doubling, tol=1e-6)
    assert res.value == pytest.approx(LOG2 / (0.693147 + LOG2), abs=1e-6)
    lo, hi = res.bracket
    assert lo <= res.value <= hi and hi - lo <= 1e-6
    assert res.residual_lower >= 0 >= res.residual_upper


@given(st.floats(min_value=0.01, max_value=6))
def test_doubling_closed_form_any_constant(c):
    res = solve_dimension_beta(Potential.constant(c), BetaSystem(2), tol=1e-9, n=6)
    assert res.value == pytest.approx(LOG2 / (c + LOG2), abs=1e-9)


@pytest.mark.parametrize("beta", ["2", "golden"])
def test_zero_potential_gives_one(beta):
    res = solve_dimension_beta(Potential(), BetaSystem.parse(beta), tol=1e-9)
    assert res.value == pytest.approx(1.0, abs=1e-9 if beta == "2" else 1e-3)
    lo, hi = res.bracket
    assert lo <= 1.0 + 1e-9 and hi >= 1.0 - 1e-9


def test_beta_rejects_negative_f(doubling):
    with pytest.raises(DomainError):
        solve_dimension_beta(Potential.constant(-0.1), doubling)


def test_golden_closed_form_within_bracket(golden):
    c = 0.4
    res = solve_dimension_beta(Potential.constant(c), golden, tol=1e-8, n=18)
    want = math.log(golden.beta) / (c + math.log(golden.beta))
    lo, hi = res.bracket
    assert lo - 1e-9 <= want <= hi + 1e-9


def test_gauss_sanity_root():
    res = solve_dimension_gauss(Potential(), tol=1e-6, digit_cap=2000, n=2)
    assert res.value == pytest.approx(1.0, abs=5e-3)
    lo, hi = res.bracket
    assert lo <= 1.0 <= hi


def test_gauss_log2_root_in_half_one():
    res = solve_dimension_gauss(Potential.constant(LOG2), tol=1e-7, digit_cap=400, n=2)
    lo, hi = res.bracket
    assert 0.5 < lo <= res.value <= hi < 1
    assert lo <= GAUSS_LOG2_ROOT <= hi


def test_gauss_log2_consecutive_levels_agree():
    a = solve_dimension_gauss(Potential.constant(LOG2), tol=1e-7, digit_cap=100, n=3)
    b = solve_dimension_gauss(Potential.constant(LOG2), tol=1e-7, digit_cap=50, n=4)
    assert abs(a.value - b.value) < 2e-3
    assert abs(b.value - GAUSS_LOG2_ROOT) < 1e-3


def test_gauss_bounded_type_alphabet():
    res = solve_dimension_gauss(Potential(), tol=1e-6, alphabet=(1, 2), n=12)
    lo, hi = res.bracket
    assert 0.526 <= lo <= 0.5313 <= hi <= 0.536


def test_gauss_rejects_negative_f():
    with pytest.raises(DomainError):
        solve_dimension_gauss(Potential.constant(-1.0), digit_cap=100)


def test_single_digit_alphabet_has_dimension_zero():
    res = solve_dimension_gauss(Potential(), tol=1e-9, alphabet=(1,), n=3)
    assert res.value == 0.0
    assert res.bracket[0] == 0.0
