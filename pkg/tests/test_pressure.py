import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimlab.errors import DomainError
from dimlab.symbolic import BetaSystem
from dimlab.thermo import GaussPressure, Potential, pressure_beta, pressure_gauss

from conftest import LOG2, LOG_GOLDEN

lgp = Potential.log_gauss_derivative()


@pytest.mark.parametrize("n", [1, 4, 9, 14])
def test_doubling_zero_potential(doubling, n):
    br = pressure_beta(Potential(), doubling, n)
    assert br.lower == pytest.approx(LOG2, abs=1e-14)
    assert br.upper == pytest.approx(LOG2, abs=1e-14)


@given(st.floats(min_value=0, max_value=3), st.floats(min_value=0, max_value=2),
       st.integers(min_value=1, max_value=10))
def test_doubling_linear_pressure(c, s, n):
    br = pressure_beta(Potential.constant(-s * (c + LOG2)), BetaSystem(2), n)
    want = LOG2 - s * (c + LOG2)
    assert br.lower == pytest.approx(want, abs=1e-12)
    assert br.upper == pytest.approx(want, abs=1e-12)


def test_golden_upper_is_fibonacci_rate(golden):
    br = pressure_beta(Potential(), golden, 20)
    assert br.upper == pytest.approx(math.log(17711) / 20, abs=1e-12)
    assert br.upper == pytest.approx(0.4889, abs=5e-4)
    assert br.contains(LOG_GOLDEN)


@pytest.mark.parametrize("n", [5, 10, 15, 20])
def test_golden_brackets_entropy(golden, n):
    br = pressure_beta(Potential(), golden, n)
    assert br.lower <= LOG_GOLDEN <= br.upper
    assert br.lower <= br.estimate <= br.upper


@given(st.floats(min_value=-3, max_value=3))
def test_constant_shift_identity_beta(c):
    system = BetaSystem(1.7)
    pot = Potential.constant(-0.3)
    a = pressure_beta(pot, system, 8)
    b = pressure_beta(pot + Potential.constant(c), system, 8)
    assert b.lower == pytest.approx(a.lower + c, abs=1e-12)
    assert b.upper == pytest.approx(a.upper + c, abs=1e-12)


def test_golden_bracket_narrows(golden):
    widths = [pressure_beta(Potential(), golden, n).width for n in (8, 16, 24)]
    assert widths[0] > widths[1] > widths[2]


def test_gauss_telescoping_sum():
    br = pressure_gauss(lgp * -1.0, 1, digit_cap=1000)
    assert br.details["estimate_truncated"] == pytest.approx(math.log(1 - 1 / 1001), abs=1e-12)
    assert br.tail_bound == pytest.approx(1e-3, rel=1e-9)
    assert br.lower <= 0 <= br.upper


def test_gauss_zero_is_bracketed_at_level_two():
    br = pressure_gauss(lgp * -1.0, 2, digit_cap=400)
    assert br.lower <= 0 <= br.upper
    assert abs(br.estimate) < 1e-4


def test_gauss_tail_domain_error():
    with pytest.raises(DomainError, match="1/2"):
        pressure_gauss(lgp * -0.52, 2, digit_cap=200)
    with pytest.raises(DomainError):
        pressure_gauss(Potential.constant(1.0), 2, digit_cap=200)


def test_gauss_finite_alphabet_has_no_tail():
    br = pressure_gauss(lgp * -0.5, 6, alphabet=(1, 2))
    assert br.tail_bound == 0
    assert br.lower <= br.upper


@given(st.floats(min_value=-2, max_value=2))
def test_constant_shift_identity_gauss(c):
    gp = GaussPressure(2, alphabet=(1, 2, 3))
    a = gp.bracket(lgp * -0.7)
    b = gp.bracket(lgp * -0.7 + Potential.constant(c))
    assert b.lower == pytest.approx(a.lower + c, abs=1e-9)
    assert b.upper == pytest.approx(a.upper + c, abs=1e-9)
    assert b.estimate == pytest.approx(a.estimate + c, abs=1e-9)


def test_gauss_pressure_decreasing_in_t():
    gp = GaussPressure(2, digit_cap=300)
    vals = [gp.estimate(lgp * -t) for t in np.linspace(0.6, 2.0, 8)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
